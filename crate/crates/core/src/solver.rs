//! Fully discrete collocation scheme and time marching.
//!
//! Unknowns at each level are the `M + 3` coefficients `c_{-1} … c_{M+1}`.
//! The system has two Dirichlet rows (value stencil at `x_0` and `x_M`) and
//! the discrete equation collocated at every knot `x_0 … x_M`:
//!
//! ```text
//! row 0        a1 c_{-1} + a2 c_0 + a1 c_1            = ψ₁(t_{n+1})
//! row j+1      L1 c_{j-1} + L2 c_j + L1 c_{j+1}       = rhs_j
//! row M+2      a1 c_{M-1} + a2 c_M + a1 c_{M+1}       = ψ₂(t_{n+1})
//! ```
//!
//! The level `u^{-1}` is eliminated through `c^{-1} = c^1 − 2τ d`, with `d`
//! the spline fit of the initial velocity.

use std::time::{Duration, Instant};

use crate::basis::{
    collocation_constants, value_stencil, SpaceGrid, SplineCoefficients, StencilConstants,
};
use crate::caputo::{weights, FractionalWeights};
use crate::error::{Error, Result};
use crate::exprparse::Expression;
use crate::real::Real;
use crate::stability;
use crate::tridiag::{BandedMatrix, BandedSystem, Factorization};

/// Number of wavenumbers sampled for the `min ν(β)` diagnostic.
pub const DEFAULT_BETA_SCAN: usize = 65;

/// Coefficients and data of the telegraph problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec<T> {
    pub gamma: T,
    pub gamma1: T,
    pub gamma2: T,
    pub gamma3: T,
    /// `u(x, 0)`.
    pub phi1: Expression,
    /// `u_t(x, 0)`.
    pub phi2: Expression,
    /// `u(a, t)`.
    pub psi1: Expression,
    /// `u(b, t)`.
    pub psi2: Expression,
    pub f: Expression,
}

impl<T: Real> ProblemSpec<T> {
    /// Validated constructor.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        gamma: T,
        gamma1: T,
        gamma2: T,
        gamma3: T,
        phi1: Expression,
        phi2: Expression,
        psi1: Expression,
        psi2: Expression,
        f: Expression,
    ) -> Result<Self> {
        let p = ProblemSpec {
            gamma,
            gamma1,
            gamma2,
            gamma3,
            phi1,
            phi2,
            psi1,
            psi2,
            f,
        };
        p.validate()?;
        Ok(p)
    }

    /// Problem with all data identically zero.
    pub fn homogeneous(gamma: T, gamma1: T, gamma2: T, gamma3: T) -> Result<Self> {
        let z = Expression::zero;
        Self::new(gamma, gamma1, gamma2, gamma3, z(), z(), z(), z(), z())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > T::one() && self.gamma < T::lit(2.0)) {
            return Err(Error::config(
                "problem.gamma",
                format!("γ = {} outside (1, 2)", self.gamma),
            ));
        }
        for (key, v) in [
            ("problem.gamma1", self.gamma1),
            ("problem.gamma2", self.gamma2),
            ("problem.gamma3", self.gamma3),
        ] {
            if !v.is_finite() {
                return Err(Error::config(key, "coefficient must be finite"));
            }
        }
        if self.gamma3 == T::zero() {
            return Err(Error::config(
                "problem.gamma3",
                "γ₃ = 0 (degenerate diffusion)",
            ));
        }
        Ok(())
    }

    /// Mismatches between initial and boundary data at the corners larger than 1e-8.
    pub fn compatibility_warnings(&self, grid: &SpaceGrid<T>) -> Result<Vec<String>> {
        let a = grid.a().as_f64();
        let b = grid.b().as_f64();
        let mut out = Vec::new();
        let left = self.phi1.eval(a, 0.0)? - self.psi1.eval(a, 0.0)?;
        if left.abs() > 1e-8 {
            out.push(format!("φ₁(a) − ψ₁(0) = {left:e}"));
        }
        let right = self.phi1.eval(b, 0.0)? - self.psi2.eval(b, 0.0)?;
        if right.abs() > 1e-8 {
            out.push(format!("φ₁(b) − ψ₂(0) = {right:e}"));
        }
        Ok(out)
    }

    /// `ν(β)` for this problem.
    pub fn nu(
        &self,
        s: &StencilConstants<T>,
        w: &FractionalWeights<T>,
        beta: T,
        h: T,
    ) -> Result<T> {
        stability::compute_nu(self.gamma1, self.gamma2, self.gamma3, s, w, beta, h)
    }
}

/// Uniform time levels `t_n = nτ`, `n = 0 … N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeMesh<T> {
    t_final: T,
    n: usize,
    tau: T,
}

impl<T: Real> TimeMesh<T> {
    pub fn new(t_final: T, n: usize) -> Result<Self> {
        if !(t_final > T::zero() && t_final.is_finite()) {
            return Err(Error::config(
                "mesh.T",
                format!("T = {t_final} must be positive"),
            ));
        }
        if n == 0 {
            return Err(Error::config("mesh.N", "N must be at least 1"));
        }
        Ok(TimeMesh {
            t_final,
            n,
            tau: t_final / T::from_count(n),
        })
    }

    pub fn t_final(&self) -> T {
        self.t_final
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn time(&self, level: usize) -> T {
        if level == self.n {
            self.t_final
        } else {
            T::from_count(level) * self.tau
        }
    }
}

/// Every coefficient level computed so far, with cached knot values.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientHistory<T> {
    levels: Vec<SplineCoefficients<T>>,
    values: Vec<Vec<T>>,
    velocity: SplineCoefficients<T>,
    velocity_values: Vec<T>,
}

impl<T: Real> CoefficientHistory<T> {
    pub fn new(
        initial: SplineCoefficients<T>,
        velocity: SplineCoefficients<T>,
        grid: &SpaceGrid<T>,
        s: &StencilConstants<T>,
    ) -> Result<Self> {
        let values = vec![value_stencil(&initial, grid, s)?];
        let velocity_values = value_stencil(&velocity, grid, s)?;
        Ok(CoefficientHistory {
            levels: vec![initial],
            values,
            velocity,
            velocity_values,
        })
    }

    pub(crate) fn push(
        &mut self,
        c: SplineCoefficients<T>,
        grid: &SpaceGrid<T>,
        s: &StencilConstants<T>,
    ) -> Result<()> {
        self.values.push(value_stencil(&c, grid, s)?);
        self.levels.push(c);
        Ok(())
    }

    /// Number of stored levels.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, n: usize) -> &SplineCoefficients<T> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[SplineCoefficients<T>] {
        &self.levels
    }

    /// Knot values `u^n_j`.
    pub fn values(&self, n: usize) -> &[T] {
        &self.values[n]
    }

    pub fn velocity(&self) -> &SplineCoefficients<T> {
        &self.velocity
    }

    /// History truncated to its first `count` levels.
    pub fn truncated(&self, count: usize) -> Self {
        CoefficientHistory {
            levels: self.levels[..count].to_vec(),
            values: self.values[..count].to_vec(),
            velocity: self.velocity.clone(),
            velocity_values: self.velocity_values.clone(),
        }
    }

    /// Knot value of level `m` at knot `j`, with `m = -1` resolved through
    /// the ghost rule `u^{-1} = u^1 − 2τ·(fit of φ₂)`.
    fn value_at(&self, m: isize, j: usize, tau: T) -> T {
        if m < 0 {
            self.values[1][j] - T::lit(2.0) * tau * self.velocity_values[j]
        } else {
            self.values[m as usize][j]
        }
    }
}

/// Stability and timing information attached to a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T> {
    /// `ν` at `β = 0`.
    pub nu: T,
    /// Smallest `ν(β)` over the wavenumber scan.
    pub nu_min: T,
    pub condition_met: bool,
    /// Whether the time-invariant collocation matrix is diagonally dominant.
    pub diagonally_dominant: bool,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<T> {
    /// Row `n` holds `u^n_j`, `j = 0 … M`.
    pub knot_values_per_level: Vec<Vec<T>>,
    pub history: CoefficientHistory<T>,
    pub diagnostics: Diagnostics<T>,
}

fn eval_at<T: Real>(e: &Expression, x: T, t: T) -> Result<T> {
    e.eval(x.as_f64(), t.as_f64()).map(T::lit)
}

/// Interpolating spline for `g(x)` (evaluated at t = 0).
///
/// Closed by matching second derivatives at both ends against one-sided
/// second-order difference estimates of `g''`.
pub fn fit_coefficients<T: Real>(
    g: &Expression,
    grid: &SpaceGrid<T>,
    s: &StencilConstants<T>,
) -> Result<SplineCoefficients<T>> {
    let m = grid.m();
    let knots = grid.knots();
    let gv = knots
        .iter()
        .map(|&x| eval_at(g, x, T::zero()))
        .collect::<Result<Vec<T>>>()?;
    let h2 = grid.h() * grid.h();
    let one_sided = |v0: T, v1: T, v2: T, v3: T| {
        (T::lit(2.0) * v0 - T::lit(5.0) * v1 + T::lit(4.0) * v2 - v3) / h2
    };
    let d2a = one_sided(gv[0], gv[1], gv[2], gv[3]);
    let d2b = one_sided(gv[m], gv[m - 1], gv[m - 2], gv[m - 3]);

    let n = grid.n_coefficients();
    let mut a = BandedMatrix::zeros(n);
    a.diag[0] = s.a4;
    a.sup[0] = s.a5;
    a.corner_top = s.a4;
    for r in 1..=m + 1 {
        a.sub[r - 1] = s.a1;
        a.diag[r] = s.a2;
        a.sup[r] = s.a1;
    }
    a.corner_bottom = s.a4;
    a.sub[n - 2] = s.a5;
    a.diag[n - 1] = s.a4;

    let mut rhs = Vec::with_capacity(n);
    rhs.push(d2a);
    rhs.extend_from_slice(&gv);
    rhs.push(d2b);
    let c = a.factorize()?.solve(&rhs)?;
    SplineCoefficients::new(grid, c)
}

/// Collocation matrix for one time step.
///
/// With `first_step` the `α₀` multiplier of the time part doubles, because
/// the ghost level re-introduces `u^1` into the `n = 0` equation.
pub fn assemble_lhs<T: Real>(
    p: &ProblemSpec<T>,
    grid: &SpaceGrid<T>,
    s: &StencilConstants<T>,
    w: &FractionalWeights<T>,
    first_step: bool,
) -> BandedMatrix<T> {
    let alpha0 = w.alpha0();
    let lead = if first_step {
        T::lit(2.0) * alpha0
    } else {
        alpha0
    };
    let time = lead + p.gamma1 * w.tau() * alpha0 + p.gamma2;
    let outer = time * s.a1 - p.gamma3 * s.a4;
    let centre = time * s.a2 - p.gamma3 * s.a5;

    let m = grid.m();
    let n = grid.n_coefficients();
    let mut a = BandedMatrix::zeros(n);
    a.diag[0] = s.a1;
    a.sup[0] = s.a2;
    a.corner_top = s.a1;
    for r in 1..=m + 1 {
        a.sub[r - 1] = outer;
        a.diag[r] = centre;
        a.sup[r] = outer;
    }
    a.corner_bottom = s.a1;
    a.sub[n - 2] = s.a2;
    a.diag[n - 1] = s.a1;
    a
}

/// Right-hand side for the step from level `n` to `n + 1`.
#[allow(clippy::too_many_arguments)]
pub fn assemble_rhs<T: Real>(
    p: &ProblemSpec<T>,
    hist: &CoefficientHistory<T>,
    w: &FractionalWeights<T>,
    n: usize,
    grid: &SpaceGrid<T>,
    mesh: &TimeMesh<T>,
) -> Result<Vec<T>> {
    if hist.len() < n + 1 {
        return Err(Error::Shape {
            what: "coefficient history",
            expected: n + 1,
            found: hist.len(),
        });
    }
    if w.max_index() < n {
        return Err(Error::Shape {
            what: "fractional weights",
            expected: n + 1,
            found: w.max_index() + 1,
        });
    }
    let two = T::lit(2.0);
    let alpha0 = w.alpha0();
    let tau = mesh.tau();
    let damp = p.gamma1 * tau * alpha0;
    let t_next = mesh.time(n + 1);
    let m = grid.m();
    let knots = grid.knots();

    let mut rhs = Vec::with_capacity(grid.n_coefficients());
    rhs.push(eval_at(&p.psi1, grid.a(), t_next)?);
    for (j, &x) in knots.iter().enumerate() {
        let u = |lvl: isize| hist.value_at(lvl, j, tau);
        let forcing = eval_at(&p.f, x, t_next)?;
        let entry = if n == 0 {
            // u^{-1} = u^1 − 2τφ₂; the u^1 part sits in the first-step matrix
            (two * alpha0 + damp) * u(0) + two * tau * alpha0 * hist.velocity_values[j] + forcing
        } else {
            let ni = n as isize;
            let mut first = T::zero();
            let mut second = T::zero();
            for k in 1..=n {
                let top = ni + 1 - k as isize;
                let b = w.get(k);
                first = first + b * (u(top) - u(top - 1));
                second = second + b * (u(top) - two * u(top - 1) + u(top - 2));
            }
            (two * alpha0 + damp) * u(ni) - alpha0 * u(ni - 1) - damp * first - alpha0 * second
                + forcing
        };
        rhs.push(entry);
    }
    rhs.push(eval_at(&p.psi2, grid.b(), t_next)?);
    debug_assert_eq!(rhs.len(), m + 3);
    Ok(rhs)
}

/// Time-stepping state: precomputed operators plus the growing history.
#[derive(Debug, Clone)]
pub struct Stepper<T> {
    problem: ProblemSpec<T>,
    grid: SpaceGrid<T>,
    mesh: TimeMesh<T>,
    stencil: StencilConstants<T>,
    weights: FractionalWeights<T>,
    first: Factorization<T>,
    later: Factorization<T>,
    history: CoefficientHistory<T>,
}

impl<T: Real> Stepper<T> {
    /// Fit the initial data and prepare both time-step factorizations.
    pub fn new(problem: &ProblemSpec<T>, grid: &SpaceGrid<T>, mesh: &TimeMesh<T>) -> Result<Self> {
        problem.validate()?;
        let stencil = collocation_constants(grid.h())?;
        let c0 = fit_coefficients(&problem.phi1, grid, &stencil)?;
        let d = fit_coefficients(&problem.phi2, grid, &stencil)?;
        let history = CoefficientHistory::new(c0, d, grid, &stencil)?;
        Self::with_history(problem, grid, mesh, history)
    }

    /// Resume from an existing history (at least the initial level).
    pub fn with_history(
        problem: &ProblemSpec<T>,
        grid: &SpaceGrid<T>,
        mesh: &TimeMesh<T>,
        history: CoefficientHistory<T>,
    ) -> Result<Self> {
        problem.validate()?;
        if history.is_empty() || history.len() > mesh.n() + 1 {
            return Err(Error::Shape {
                what: "coefficient history",
                expected: mesh.n() + 1,
                found: history.len(),
            });
        }
        let stencil = collocation_constants(grid.h())?;
        let weights = weights(problem.gamma, mesh.n(), mesh.tau())?;
        let first = assemble_lhs(problem, grid, &stencil, &weights, true).factorize()?;
        let later = assemble_lhs(problem, grid, &stencil, &weights, false).factorize()?;
        Ok(Stepper {
            problem: problem.clone(),
            grid: *grid,
            mesh: *mesh,
            stencil,
            weights,
            first,
            later,
            history,
        })
    }

    /// Index of the newest level.
    pub fn level(&self) -> usize {
        self.history.len() - 1
    }

    pub fn is_done(&self) -> bool {
        self.level() >= self.mesh.n()
    }

    pub fn history(&self) -> &CoefficientHistory<T> {
        &self.history
    }

    pub fn stencil(&self) -> &StencilConstants<T> {
        &self.stencil
    }

    pub fn weights(&self) -> &FractionalWeights<T> {
        &self.weights
    }

    /// Right-hand side of the next step without advancing.
    pub fn next_rhs(&self) -> Result<Vec<T>> {
        assemble_rhs(
            &self.problem,
            &self.history,
            &self.weights,
            self.level(),
            &self.grid,
            &self.mesh,
        )
    }

    /// Advance one level and return the new coefficients.
    pub fn step(&mut self) -> Result<&SplineCoefficients<T>> {
        if self.is_done() {
            return Err(Error::domain("time horizon reached"));
        }
        let n = self.level();
        let rhs = self.next_rhs()?;
        let factor = if n == 0 { &self.first } else { &self.later };
        let c = factor.solve(&rhs)?;
        let c = SplineCoefficients::new(&self.grid, c)?;
        self.history.push(c, &self.grid, &self.stencil)?;
        Ok(self.history.level(n + 1))
    }

    pub fn into_history(self) -> CoefficientHistory<T> {
        self.history
    }
}

/// Solve the problem on `grid × mesh`.
pub fn march<T: Real>(
    p: &ProblemSpec<T>,
    grid: &SpaceGrid<T>,
    mesh: &TimeMesh<T>,
) -> Result<SolveResult<T>> {
    let start = Instant::now();
    let mut stepper = Stepper::new(p, grid, mesh)?;
    while !stepper.is_done() {
        stepper.step()?;
    }
    let s = *stepper.stencil();
    let w = stepper.weights().clone();
    let dominant = assemble_lhs(p, grid, &s, &w, false).is_diagonally_dominant();
    let history = stepper.into_history();
    let knot_values_per_level = (0..history.len())
        .map(|n| history.values(n).to_vec())
        .collect();

    let h = grid.h();
    let nu = p.nu(&s, &w, T::zero(), h)?;
    let nu_min = stability::scan_nu(p.gamma1, p.gamma2, p.gamma3, &s, &w, h, DEFAULT_BETA_SCAN)?
        .into_iter()
        .map(|(_, v)| v)
        .fold(nu, T::min);
    let diagnostics = Diagnostics {
        nu,
        nu_min,
        condition_met: stability::check_condition(nu, p.gamma1, mesh.tau()),
        diagonally_dominant: dominant,
        wall_time: start.elapsed(),
    };
    Ok(SolveResult {
        knot_values_per_level,
        history,
        diagnostics,
    })
}

/// Collocation system for the next step of `stepper`, for inspection.
pub fn next_system<T: Real>(
    stepper: &Stepper<T>,
    p: &ProblemSpec<T>,
    grid: &SpaceGrid<T>,
) -> Result<BandedSystem<T>> {
    let first = stepper.level() == 0;
    Ok(BandedSystem {
        matrix: assemble_lhs(p, grid, stepper.stencil(), stepper.weights(), first),
        rhs: stepper.next_rhs()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exprparse::parse;
    use crate::tridiag::residual_inf;

    fn expr(s: &str) -> Expression {
        parse(s).unwrap()
    }

    #[test]
    fn problem_validation() {
        assert!(ProblemSpec::homogeneous(1.0_f64, 1.0, 1.0, 1.0).is_err());
        assert!(ProblemSpec::homogeneous(1.5_f64, 1.0, 1.0, 0.0).is_err());
        assert!(ProblemSpec::homogeneous(1.5_f64, f64::NAN, 1.0, 1.0).is_err());
        assert!(ProblemSpec::homogeneous(1.5_f64, 0.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn compatibility_warning() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 8).unwrap();
        let mut p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        assert!(p.compatibility_warnings(&grid).unwrap().is_empty());
        p.phi1 = expr("1 + x");
        assert_eq!(p.compatibility_warnings(&grid).unwrap().len(), 2);
    }

    #[test]
    fn time_mesh() {
        let m = TimeMesh::new(1.0_f64, 80).unwrap();
        assert_eq!(m.tau(), 1.0 / 80.0);
        assert_eq!(m.time(80), 1.0);
        assert!(((m.n() as f64) * m.tau() - 1.0).abs() < 1e-12);
        assert!(TimeMesh::new(0.0_f64, 4).is_err());
        assert!(TimeMesh::new(1.0_f64, 0).is_err());
    }

    #[test]
    fn fit_zero_and_constant() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 8).unwrap();
        let s = collocation_constants(grid.h()).unwrap();
        let c = fit_coefficients(&Expression::zero(), &grid, &s).unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 0.0));
        let c = fit_coefficients(&expr("1"), &grid, &s).unwrap();
        let u = value_stencil(&c, &grid, &s).unwrap();
        assert!(u.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn fit_interpolates_sine() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 8).unwrap();
        let s = collocation_constants(grid.h()).unwrap();
        let c = fit_coefficients(&expr("sin(pi*x)"), &grid, &s).unwrap();
        let u = value_stencil(&c, &grid, &s).unwrap();
        for (j, x) in grid.knots().into_iter().enumerate() {
            assert!((u[j] - (std::f64::consts::PI * x).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn lhs_term_deletion() {
        let grid = SpaceGrid::new(0.0_f64, 2.0, 4).unwrap();
        let s = collocation_constants(grid.h()).unwrap();
        let w = weights(1.5, 10, 0.1).unwrap();
        let mut p = ProblemSpec::homogeneous(1.5, 0.0, 0.0, 1.0).unwrap();
        p.gamma3 = 0.0;
        let a = assemble_lhs(&p, &grid, &s, &w, false);
        let al = w.alpha0();
        assert_eq!(
            (a.sub[0], a.diag[1], a.sup[1]),
            (al * s.a1, al * s.a2, al * s.a1)
        );
    }

    #[test]
    fn lhs_reference_entries() {
        let grid = SpaceGrid::new(0.0_f64, 2.0, 4).unwrap();
        let s = collocation_constants(0.5).unwrap();
        let w = weights(1.5, 10, 0.1).unwrap();
        let p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        let a = assemble_lhs(&p, &grid, &s, &w, false);
        // (α₀·1.1 + 1)·a1 − a4 with α₀ = 35.68248232305542
        let l1 =
            (35.682_482_323_055_42 * 1.1 + 1.0) * 0.187_300_030_600_002_33 - 4.168_608_021_834_462;
        assert!((a.sub[0] - l1).abs() < 1e-12);
        assert_eq!(a.sub[0], a.sup[1]);
        let f = assemble_lhs(&p, &grid, &s, &w, true);
        let l1_first =
            (35.682_482_323_055_42 * 2.1 + 1.0) * 0.187_300_030_600_002_33 - 4.168_608_021_834_462;
        assert!((f.sub[0] - l1_first).abs() < 1e-12);
        // boundary rows untouched by the first-step flag
        assert_eq!(
            (a.diag[0], a.sup[0], a.corner_top),
            (f.diag[0], f.sup[0], f.corner_top)
        );
        assert_eq!((a.diag[0], a.sup[0], a.corner_top), (s.a1, s.a2, s.a1));
        assert_eq!((a.corner_bottom, a.sub[5], a.diag[6]), (s.a1, s.a2, s.a1));
    }

    #[test]
    fn rhs_zero_problem_and_first_step() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 6).unwrap();
        let mesh = TimeMesh::new(1.0, 10).unwrap();
        let p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        let st = Stepper::new(&p, &grid, &mesh).unwrap();
        assert!(st.next_rhs().unwrap().iter().all(|&v| v == 0.0));

        let mut p = p;
        p.phi1 = expr("sin(pi*x)");
        p.f = expr("x*t + 1");
        let st = Stepper::new(&p, &grid, &mesh).unwrap();
        let rhs = st.next_rhs().unwrap();
        let w = st.weights();
        let k = 2.0 * w.alpha0() + 1.0 * 0.1 * w.alpha0();
        for (j, x) in grid.knots().into_iter().enumerate() {
            let want = k * (std::f64::consts::PI * x).sin() + (x * 0.1 + 1.0);
            assert!((rhs[j + 1] - want).abs() < 1e-9 * want.abs().max(1.0));
        }
    }

    #[test]
    fn rhs_missing_history() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 6).unwrap();
        let mesh = TimeMesh::new(1.0, 10).unwrap();
        let p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        let st = Stepper::new(&p, &grid, &mesh).unwrap();
        let w = st.weights();
        assert!(matches!(
            assemble_rhs(&p, st.history(), w, 3, &grid, &mesh),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn zero_problem_stays_zero() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 16).unwrap();
        let mesh = TimeMesh::new(1.0, 16).unwrap();
        let p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        let r = march(&p, &grid, &mesh).unwrap();
        assert_eq!(r.knot_values_per_level.len(), 17);
        assert!(r
            .knot_values_per_level
            .iter()
            .flatten()
            .all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn boundary_rows_hold_and_residual_small() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 10).unwrap();
        let mesh = TimeMesh::new(0.5, 10).unwrap();
        let mut p = ProblemSpec::homogeneous(1.7, 0.5, 1.0, 2.0).unwrap();
        p.psi1 = expr("t^2");
        p.psi2 = expr("sin(t)");
        p.f = expr("x*(1-x)");
        let mut st = Stepper::new(&p, &grid, &mesh).unwrap();
        while !st.is_done() {
            let sys = next_system(&st, &p, &grid).unwrap();
            let c = st.step().unwrap().as_slice().to_vec();
            let norm_x = c.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let norm_b = sys.rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let res = residual_inf(&sys.matrix, &c, &sys.rhs);
            assert!(res <= 1e-10 * (sys.matrix.norm_inf() * norm_x + norm_b));
        }
        let hist = st.history();
        for n in 1..=10 {
            let t = mesh.time(n);
            let u = hist.values(n);
            assert!((u[0] - t * t).abs() < 1e-10);
            assert!((u[10] - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn restart_reproduces_next_level() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 8).unwrap();
        let mesh = TimeMesh::new(1.0, 6).unwrap();
        let mut p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        p.phi1 = expr("sin(pi*x)");
        p.f = expr("t*sin(pi*x)");
        let full = march(&p, &grid, &mesh).unwrap();
        let partial = full.history.truncated(2);
        let mut resumed = Stepper::with_history(&p, &grid, &mesh, partial).unwrap();
        let c2 = resumed.step().unwrap();
        for (a, b) in c2.as_slice().iter().zip(full.history.level(2).as_slice()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn rhs_is_reproducible() {
        let grid = SpaceGrid::new(0.0_f64, 1.0, 8).unwrap();
        let mesh = TimeMesh::new(1.0, 6).unwrap();
        let mut p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        p.phi2 = expr("sin(pi*x)");
        let mut st = Stepper::new(&p, &grid, &mesh).unwrap();
        for _ in 0..3 {
            st.step().unwrap();
        }
        let a = st.next_rhs().unwrap();
        let b = st.next_rhs().unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn diagnostics_reported() {
        let grid = SpaceGrid::new(0.0_f64, 2.0, 4).unwrap();
        let mesh = TimeMesh::new(1.0, 10).unwrap();
        let p = ProblemSpec::homogeneous(1.5, 1.0, 1.0, 1.0).unwrap();
        let r = march(&p, &grid, &mesh).unwrap();
        assert!((r.diagnostics.nu - 1.128_356_825_089_968_8).abs() < 1e-12);
        assert!(!r.diagnostics.condition_met);
        assert!(r.diagnostics.nu_min <= r.diagnostics.nu);
    }
}
