//! Manufactured solutions, a quadrature oracle for Caputo derivatives, error
//! norms and observed convergence orders.

use std::time::Instant;

use rayon::prelude::*;

use crate::basis::SpaceGrid;
use crate::error::{Error, Result};
use crate::exprparse::{parse, Expression};
use crate::real::Real;
use crate::solver::{march, ProblemSpec, TimeMesh};
use crate::special::gamma;

/// Errors of one numerical solution against the exact one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub l_inf: f64,
    /// `sqrt(h · Σ_{j=0}^{M} e_j²)`.
    pub l2: f64,
    pub m: usize,
    pub n: usize,
    pub runtime_ms: f64,
}

fn caputo_integer_order(order: f64) -> usize {
    order.ceil().max(1.0) as usize
}

/// Caputo derivative of `t^p`, i.e. `Γ(p+1)/Γ(p+1−order) · t^{p−order}`.
pub fn exact_caputo_power(order: f64, p: f64, t: f64) -> Result<f64> {
    if !(order > 0.0) || !(t >= 0.0) {
        return Err(Error::domain(format!(
            "need order > 0 and t >= 0, got {order}, {t}"
        )));
    }
    let n = caputo_integer_order(order);
    if p >= 0.0 && p.fract() == 0.0 && (p as usize) < n {
        return Ok(0.0);
    }
    if !(p > (n - 1) as f64) {
        return Err(Error::domain(format!(
            "t^{p} has a divergent order-{order} Caputo integral (need p > {})",
            n - 1
        )));
    }
    let expo = p - order;
    if t == 0.0 {
        return match expo.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Ok(0.0),
            Some(std::cmp::Ordering::Equal) => Ok(gamma(p + 1.0)),
            _ => Err(Error::domain(format!(
                "derivative of t^{p} unbounded at t = 0"
            ))),
        };
    }
    Ok(gamma(p + 1.0) / gamma(p + 1.0 - order) * t.powf(expo))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `n`-th derivative by central differences with Ridders extrapolation.
///
/// The initial step is capped at half the distance to the origin so the
/// stencil never samples negative times.
fn ridders_derivative(u: &dyn Fn(f64) -> Result<f64>, s: f64, order: usize) -> Result<f64> {
    const SHRINK: f64 = 1.4;
    const SIZE: usize = 10;
    let mut h = 0.1_f64.min(0.5 * s / (order as f64 / 2.0).max(0.5));
    if !(h > 0.0) {
        return Err(Error::domain(format!("cannot difference at s = {s}")));
    }
    let central = |h: f64| -> Result<f64> {
        let mut acc = 0.0;
        for k in 0..=order {
            let offset = (order as f64 / 2.0 - k as f64) * h;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binomial(order, k) * u(s + offset)?;
        }
        Ok(acc / h.powi(order as i32))
    };
    let mut table = [[0.0_f64; SIZE]; SIZE];
    table[0][0] = central(h)?;
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    let con2 = SHRINK * SHRINK;
    for i in 1..SIZE {
        h /= SHRINK;
        table[0][i] = central(h)?;
        let mut fac = con2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= con2;
            let e = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    Ok(best)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let centre = f(mid)?;
    let mut kronrod = GK_WEIGHTS[7] * centre;
    let mut gauss = GAUSS7_WEIGHTS[3] * centre;
    for i in 0..7 {
        let dx = half * GK_NODES[i];
        let pair = f(mid - dx)? + f(mid + dx)?;
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[i / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Globally adaptive Gauss–Kronrod (7/15) integration.
fn integrate(f: &dyn Fn(f64) -> Result<f64>, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gauss_kronrod(f, a, b)?;
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(pieces.iter().map(|p| p.2).sum());
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Accuracy(format!(
                "quadrature error estimate {total_err:e} above tolerance {tol:e}"
            )));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gauss_kronrod(f, lo, mid)?;
        let (v2, e2) = gauss_kronrod(f, mid, hi)?;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// Caputo derivative of `u(t)` (an expression in `t`) by quadrature.
///
/// The kernel singularity at `s = t` is removed with `s = t − σ^{1/(n−γ)}`
/// on `[t/2, t]`; on `[0, t/2]` the substitution `s = r⁴` tames
/// integrable singularities of `u^{(n)}` at the origin. Derivatives of `u`
/// come from Ridders-extrapolated central differences.
pub fn caputo_quadrature(u: &Expression, order: f64, t: f64, tol: f64) -> Result<f64> {
    if !(order > 0.0) || !(t >= 0.0) || !(tol > 0.0) {
        return Err(Error::domain(format!(
            "need order > 0, t >= 0, tol > 0 (got {order}, {t}, {tol})"
        )));
    }
    let n = caputo_integer_order(order);
    let ut = |s: f64| u.eval(0.0, s);
    let deriv = |s: f64| ridders_derivative(&ut, s, n);
    if order.fract() == 0.0 {
        return deriv(t);
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let mu = n as f64 - order;
    let split = 0.5 * t;
    let near = |sigma: f64| deriv(t - sigma.powf(1.0 / mu));
    let far = |r: f64| {
        let s = r.powi(4);
        Ok(4.0 * r.powi(3) * deriv(s)? * (t - s).powf(mu - 1.0))
    };
    let inner_tol = 0.25 * tol * gamma(mu);
    let near_part = integrate(&near, 0.0, split.powf(mu), inner_tol * mu)? / mu;
    let far_part = integrate(&far, 0.0, split.powf(0.25), inner_tol)?;
    Ok((near_part + far_part) / gamma(mu))
}

/// `L∞` and discrete `L2` error of knot values against `exact(x, t)`.
pub fn error_norms<T: Real>(
    numeric: &[T],
    exact: &Expression,
    t: T,
    grid: &SpaceGrid<T>,
) -> Result<ErrorReport> {
    let knots = grid.knots();
    if numeric.len() != knots.len() {
        return Err(Error::Shape {
            what: "knot values",
            expected: knots.len(),
            found: numeric.len(),
        });
    }
    let mut l_inf = 0.0_f64;
    let mut sq = 0.0_f64;
    for (&v, &x) in numeric.iter().zip(&knots) {
        let e = (v.as_f64() - exact.eval(x.as_f64(), t.as_f64())?).abs();
        l_inf = l_inf.max(e);
        sq += e * e;
    }
    Ok(ErrorReport {
        l_inf,
        l2: (grid.h().as_f64() * sq).sqrt(),
        m: grid.m(),
        n: 0,
        runtime_ms: 0.0,
    })
}

/// `log(e_coarse / e_fine) / log(ratio)`.
pub fn observed_order(e_coarse: f64, e_fine: f64, ratio: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(Error::domain(format!(
            "errors must be positive (got {e_coarse}, {e_fine})"
        )));
    }
    if !(ratio > 1.0) {
        return Err(Error::domain(format!(
            "refinement ratio {ratio} must exceed 1"
        )));
    }
    Ok((e_coarse / e_fine).ln() / ratio.ln())
}

/// A problem with known solution `exact(x, t)` on `[a, b] × [0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedProblem<T> {
    pub problem: ProblemSpec<T>,
    pub exact: Expression,
    pub a: T,
    pub b: T,
    pub t_final: T,
}

fn lit(v: f64) -> String {
    format!("({v:?})")
}

/// `u = t² sin(πx)` on `[0, 1] × [0, 1]` with zero initial velocity.
pub fn mms_problem<T: Real>(
    gamma_order: T,
    gamma1: T,
    gamma2: T,
    gamma3: T,
) -> Result<ManufacturedProblem<T>> {
    let g = gamma_order.as_f64();
    if !(g > 1.0 && g < 2.0) {
        return Err(Error::domain(format!("order γ = {g} outside (1, 2)")));
    }
    let (g1, g2, g3) = (gamma1.as_f64(), gamma2.as_f64(), gamma3.as_f64());
    let f = format!(
        "sin(pi*x)*(2*t^{e2}/{c2} + {g1}*2*t^{e3}/{c3} + ({g2} + {g3}*pi^2)*t^2)",
        e2 = lit(2.0 - g),
        c2 = lit(gamma(3.0 - g)),
        e3 = lit(3.0 - g),
        c3 = lit(gamma(4.0 - g)),
        g1 = lit(g1),
        g2 = lit(g2),
        g3 = lit(g3),
    );
    let z = Expression::zero;
    Ok(ManufacturedProblem {
        problem: ProblemSpec::new(
            gamma_order,
            gamma1,
            gamma2,
            gamma3,
            z(),
            z(),
            z(),
            z(),
            parse(&f)?,
        )?,
        exact: parse("t^2*sin(pi*x)")?,
        a: T::zero(),
        b: T::one(),
        t_final: T::one(),
    })
}

/// `u = (t² + t) sin(πx)`: nonzero initial velocity `φ₂ = sin(πx)`.
pub fn mms_velocity_problem<T: Real>(
    gamma_order: T,
    gamma1: T,
    gamma2: T,
    gamma3: T,
) -> Result<ManufacturedProblem<T>> {
    let g = gamma_order.as_f64();
    if !(g > 1.0 && g < 2.0) {
        return Err(Error::domain(format!("order γ = {g} outside (1, 2)")));
    }
    let (g1, g2, g3) = (gamma1.as_f64(), gamma2.as_f64(), gamma3.as_f64());
    // D^γ t = 0, D^{γ-1} t = t^{2-γ}/Γ(3-γ)
    let f = format!(
        "sin(pi*x)*(2*t^{e2}/{c2} + {g1}*(2*t^{e3}/{c3} + t^{e2}/{c2}) + ({g2} + {g3}*pi^2)*(t^2 + t))",
        e2 = lit(2.0 - g),
        c2 = lit(gamma(3.0 - g)),
        e3 = lit(3.0 - g),
        c3 = lit(gamma(4.0 - g)),
        g1 = lit(g1),
        g2 = lit(g2),
        g3 = lit(g3),
    );
    let z = Expression::zero;
    Ok(ManufacturedProblem {
        problem: ProblemSpec::new(
            gamma_order,
            gamma1,
            gamma2,
            gamma3,
            z(),
            parse("sin(pi*x)")?,
            z(),
            z(),
            parse(&f)?,
        )?,
        exact: parse("(t^2 + t)*sin(pi*x)")?,
        a: T::zero(),
        b: T::one(),
        t_final: T::one(),
    })
}

/// Solve on an `m × n` mesh and measure the error at the final time.
pub fn run_case<T: Real>(mms: &ManufacturedProblem<T>, m: usize, n: usize) -> Result<ErrorReport> {
    let start = Instant::now();
    let grid = SpaceGrid::new(mms.a, mms.b, m)?;
    let mesh = TimeMesh::new(mms.t_final, n)?;
    let sol = march(&mms.problem, &grid, &mesh)?;
    let last = sol
        .knot_values_per_level
        .last()
        .expect("at least one level");
    let mut report = error_norms(last, &mms.exact, mesh.t_final(), &grid)?;
    report.n = n;
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// One row of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub report: ErrorReport,
    pub h: f64,
    pub tau: f64,
    pub order_inf: Option<f64>,
    pub order_l2: Option<f64>,
}

/// Solve `levels` meshes `(m·2^k, n·2^k)` and estimate orders between
/// consecutive levels. `threads = 0` lets the pool decide.
pub fn convergence_sweep<T: Real>(
    mms: &ManufacturedProblem<T>,
    m: usize,
    n: usize,
    levels: usize,
    threads: usize,
) -> Result<Vec<SweepRow>> {
    if levels == 0 {
        return Err(Error::config("converge.levels", "need at least one level"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let reports: Vec<ErrorReport> = pool.install(|| {
        (0..levels)
            .into_par_iter()
            .map(|k| run_case(mms, m << k, n << k))
            .collect::<Result<Vec<_>>>()
    })?;
    let width = (mms.b - mms.a).as_f64();
    let t_final = mms.t_final.as_f64();
    let mut rows = Vec::with_capacity(levels);
    for (k, r) in reports.iter().enumerate() {
        let (order_inf, order_l2) = if k == 0 {
            (None, None)
        } else {
            let prev = &reports[k - 1];
            (
                observed_order(prev.l_inf, r.l_inf, 2.0).ok(),
                observed_order(prev.l2, r.l2, 2.0).ok(),
            )
        };
        rows.push(SweepRow {
            report: *r,
            h: width / r.m as f64,
            tau: t_final / r.n as f64,
            order_inf,
            order_l2,
        });
    }
    Ok(rows)
}
