//! Amplification parameter and the scalar growth-factor recursion of a
//! single Fourier mode.

use crate::basis::StencilConstants;
use crate::caputo::FractionalWeights;
use crate::error::{Error, Result};
use crate::real::Real;

/// Sequence `ξ_0 … ξ_n` produced by [`simulate_growth`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthTrace<T> {
    pub nu: T,
    pub xi: Vec<T>,
    pub gamma: T,
    pub gamma1: T,
    pub tau: T,
    /// Wavenumber the trace was generated for.
    pub beta: T,
}

impl<T: Real> GrowthTrace<T> {
    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = beta;
        self
    }

    /// `max_n |ξ_n| / |ξ_0|`.
    pub fn max_ratio(&self) -> T {
        let seed = self.xi[0].abs();
        self.xi.iter().fold(T::zero(), |m, v| m.max(v.abs())) / seed
    }
}

/// `ν(β) = 1 + γ₁τ + γ₂/α₀ − (γ₃/α₀)(2a₄cos βh + a₅)/(2a₁cos βh + a₂)`.
pub fn compute_nu<T: Real>(
    gamma1: T,
    gamma2: T,
    gamma3: T,
    s: &StencilConstants<T>,
    w: &FractionalWeights<T>,
    beta: T,
    h: T,
) -> Result<T> {
    let two = T::lit(2.0);
    let cos = (beta * h).cos();
    let denom = two * s.a1 * cos + s.a2;
    if !(denom.abs() > T::lit(1e-12)) {
        return Err(Error::domain(format!(
            "vanishing mode denominator 2·a1·cos(βh) + a2 = {denom} at β = {beta}"
        )));
    }
    let numer = two * s.a4 * cos + s.a5;
    let alpha0 = w.alpha0();
    Ok(T::one() + gamma1 * w.tau() + gamma2 / alpha0 - (gamma3 / alpha0) * (numer / denom))
}

/// `ν ≥ 2 + γ₁τ`.
pub fn check_condition<T: Real>(nu: T, gamma1: T, tau: T) -> bool {
    nu >= T::lit(2.0) + gamma1 * tau
}

/// `ν(β)` sampled at `resolution` equispaced wavenumbers on `[0, π/h]`.
pub fn scan_nu<T: Real>(
    gamma1: T,
    gamma2: T,
    gamma3: T,
    s: &StencilConstants<T>,
    w: &FractionalWeights<T>,
    h: T,
    resolution: usize,
) -> Result<Vec<(T, T)>> {
    let top = T::PI() / h;
    let r = resolution.max(1);
    (0..r)
        .map(|i| {
            let beta = if r == 1 {
                T::zero()
            } else {
                top * T::from_count(i) / T::from_count(r - 1)
            };
            compute_nu(gamma1, gamma2, gamma3, s, w, beta, h).map(|nu| (beta, nu))
        })
        .collect()
}

/// Run the growth recursion for `n_steps` steps from seed `xi0`.
///
/// The first step is `ξ₁ = (2 + γ₁τ)/ν · ξ₀`. Later steps use both memory
/// sums; the level `ξ_{-1}` reached by the last term of the second sum is
/// taken as `ξ₁` (zero initial-velocity perturbation).
pub fn simulate_growth<T: Real>(
    nu: T,
    gamma1: T,
    tau: T,
    w: &FractionalWeights<T>,
    n_steps: usize,
    xi0: T,
) -> Result<GrowthTrace<T>> {
    if nu == T::zero() || !nu.is_finite() {
        return Err(Error::domain(format!(
            "ν = {nu} must be finite and nonzero"
        )));
    }
    if n_steps == 0 {
        return Err(Error::domain("n_steps must be at least 1"));
    }
    if w.max_index() + 1 < n_steps {
        return Err(Error::Shape {
            what: "fractional weights",
            expected: n_steps,
            found: w.max_index() + 1,
        });
    }
    let two = T::lit(2.0);
    let lead = two + gamma1 * tau;
    let damp = gamma1 * tau;
    let mut xi = Vec::with_capacity(n_steps + 1);
    xi.push(xi0);
    xi.push(lead / nu * xi0);
    for n in 1..n_steps {
        let at = |m: isize| if m < 0 { xi[1] } else { xi[m as usize] };
        let mut first = T::zero();
        let mut second = T::zero();
        for k in 1..=n {
            let top = (n + 1 - k) as isize;
            let b = w.get(k);
            first = first + b * (at(top) - at(top - 1));
            second = second + b * (at(top) - two * at(top - 1) + at(top - 2));
        }
        let next = (lead * xi[n] - xi[n - 1] - damp * first - second) / nu;
        xi.push(next);
    }
    Ok(GrowthTrace {
        nu,
        xi,
        gamma: w.gamma(),
        gamma1,
        tau,
        beta: T::zero(),
    })
}

/// `|ξ_n| ≤ 2|ξ₀| + 1e-12` for every entry.
pub fn verify_bound<T: Real>(trace: &GrowthTrace<T>) -> bool {
    let limit = T::lit(2.0) * trace.xi[0].abs() + T::lit(1e-12);
    trace.xi.iter().all(|v| v.abs() <= limit)
}
