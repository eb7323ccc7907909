//! L1-type discretisations of the Caputo derivatives of order `γ ∈ (1, 2)`
//! and `γ - 1`, sharing one weight table.

use crate::error::{Error, Result};
use crate::real::Real;
use crate::special::gamma;

/// Weight table `b_k = (k+1)^{2-γ} - k^{2-γ}` and prefactor `α₀ = τ^{-γ} / Γ(3-γ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalWeights<T> {
    gamma: T,
    tau: T,
    alpha0: T,
    b: Vec<T>,
}

/// Build `b_0 … b_n` for order `gamma` and time step `tau`.
pub fn weights<T: Real>(gamma_order: T, n: usize, tau: T) -> Result<FractionalWeights<T>> {
    if !(gamma_order > T::one() && gamma_order < T::lit(2.0)) {
        return Err(Error::domain(format!(
            "order γ = {gamma_order} outside (1, 2)"
        )));
    }
    if !(tau > T::zero() && tau.is_finite()) {
        return Err(Error::domain(format!(
            "time step τ = {tau} must be positive"
        )));
    }
    let expo = T::lit(2.0) - gamma_order;
    let b = (0..=n)
        .map(|k| {
            let k = T::from_count(k);
            (k + T::one()).powf(expo) - k.powf(expo)
        })
        .collect();
    let alpha0 = tau.powf(-gamma_order) / gamma(T::lit(3.0) - gamma_order);
    Ok(FractionalWeights {
        gamma: gamma_order,
        tau,
        alpha0,
        b,
    })
}

impl<T: Real> FractionalWeights<T> {
    /// Use an explicit weight table instead of the L1 weights, e.g. to study
    /// truncated memory. `b` must be nonempty.
    pub fn with_table(gamma_order: T, tau: T, b: Vec<T>) -> Result<Self> {
        let mut w = weights(gamma_order, 0, tau)?;
        if b.is_empty() {
            return Err(Error::Shape {
                what: "fractional weights",
                expected: 1,
                found: 0,
            });
        }
        w.b = b;
        Ok(w)
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn alpha0(&self) -> T {
        self.alpha0
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    /// `b_k`. Panics past the end of the table.
    pub fn get(&self, k: usize) -> T {
        self.b[k]
    }

    /// Index of the last stored weight.
    pub fn max_index(&self) -> usize {
        self.b.len() - 1
    }

    fn require(&self, n: usize) -> Result<()> {
        if self.b.len() < n + 1 {
            return Err(Error::Shape {
                what: "fractional weights",
                expected: n + 1,
                found: self.b.len(),
            });
        }
        Ok(())
    }
}

/// Order-`γ` discrete Caputo value at `t_{n+1}`.
///
/// `series` holds `u^{-1}, u^0, …, u^{n+1}` (ghost level first), so `n` is
/// `series.len() - 3`.
pub fn discrete_caputo_2<T: Real>(w: &FractionalWeights<T>, series: &[T]) -> Result<T> {
    if series.len() < 3 {
        return Err(Error::Shape {
            what: "time series with ghost level",
            expected: 3,
            found: series.len(),
        });
    }
    let n = series.len() - 3;
    w.require(n)?;
    // series[m + 1] = u^m
    let u = |m: isize| series[(m + 1) as usize];
    let two = T::lit(2.0);
    let mut acc = T::zero();
    for k in 0..=n {
        let top = (n - k) as isize;
        acc = acc + w.get(k) * (u(top + 1) - two * u(top) + u(top - 1));
    }
    Ok(w.alpha0() * acc)
}

/// Order-`(γ-1)` discrete Caputo value at `t_{n+1}`; `series` holds `u^0 … u^{n+1}`.
pub fn discrete_caputo_1<T: Real>(w: &FractionalWeights<T>, series: &[T]) -> Result<T> {
    if series.len() < 2 {
        return Err(Error::Shape {
            what: "time series",
            expected: 2,
            found: series.len(),
        });
    }
    let n = series.len() - 2;
    w.require(n)?;
    let mut acc = T::zero();
    for k in 0..=n {
        acc = acc + w.get(k) * (series[n - k + 1] - series[n - k]);
    }
    Ok(w.alpha0() * w.tau() * acc)
}

/// Samples `u(t_m)` for `m = 0 … last`.
pub fn sample_levels<T: Real>(u: impl Fn(T) -> T, tau: T, last: usize) -> Vec<T> {
    (0..=last).map(|m| u(T::from_count(m) * tau)).collect()
}

/// Prepend the ghost level `u^{-1} = u^1 − 2τ·u_t(0)` to `u^0 … u^{n+1}`.
pub fn with_ghost<T: Real>(levels: &[T], velocity0: T, tau: T) -> Result<Vec<T>> {
    if levels.len() < 2 {
        return Err(Error::Shape {
            what: "time series",
            expected: 2,
            found: levels.len(),
        });
    }
    let mut out = Vec::with_capacity(levels.len() + 1);
    out.push(levels[1] - T::lit(2.0) * tau * velocity0);
    out.extend_from_slice(levels);
    Ok(out)
}
