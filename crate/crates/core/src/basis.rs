//! Cubic trigonometric B-splines on a uniform knot sequence.
//!
//! Basis `i` (support-start indexing) lives on `[x_i, x_{i+4}]`. Coefficients
//! are stored under the collocation labelling `c_{-1} … c_{M+1}`, where label
//! `l` refers to the basis starting at knot `l - 2`; the three functions alive
//! at knot `x_j` are then `c_{j-1}, c_j, c_{j+1}`.

use crate::error::{Error, Result};
use crate::real::Real;

/// Largest admissible knot spacing (exclusive).
pub fn max_spacing<T: Real>() -> T {
    T::lit(2.0) * T::PI() / T::lit(5.0)
}

fn check_spacing<T: Real>(h: T) -> Result<()> {
    if !(h > T::zero() && h < max_spacing::<T>()) {
        return Err(Error::domain(format!(
            "knot spacing h = {h} outside (0, 2π/5)"
        )));
    }
    Ok(())
}

/// Uniform partition of `[a, b]` into `m` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid<T> {
    a: T,
    b: T,
    m: usize,
    h: T,
}

impl<T: Real> SpaceGrid<T> {
    pub fn new(a: T, b: T, m: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::config(
                "grid",
                format!("need a < b, got a = {a}, b = {b}"),
            ));
        }
        if m < 3 {
            return Err(Error::config("grid.M", format!("need M >= 3, got {m}")));
        }
        let h = (b - a) / T::from_count(m);
        check_spacing(h)?;
        Ok(SpaceGrid { a, b, m, h })
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    /// Number of subintervals.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Knot `x_j`, extended uniformly outside `0..=M`.
    pub fn knot(&self, j: isize) -> T {
        if j == self.m as isize {
            return self.b;
        }
        self.a + T::lit(j as f64) * self.h
    }

    /// The `M + 1` knots `x_0 … x_M`.
    pub fn knots(&self) -> Vec<T> {
        (0..=self.m as isize).map(|j| self.knot(j)).collect()
    }

    /// Number of spline coefficients (`M + 3`).
    pub fn n_coefficients(&self) -> usize {
        self.m + 3
    }
}

/// Closed-form values of the three surviving basis functions and their
/// derivatives at a knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilConstants<T> {
    /// Value of the outer neighbours.
    pub a1: T,
    /// Value of the centre function.
    pub a2: T,
    /// Magnitude of the outer first derivatives (left is `-a3`).
    pub a3: T,
    /// Second derivative of the outer neighbours.
    pub a4: T,
    /// Second derivative of the centre function.
    pub a5: T,
}

/// Stencil constants for knot spacing `h ∈ (0, 2π/5)`.
pub fn collocation_constants<T: Real>(h: T) -> Result<StencilConstants<T>> {
    check_spacing(h)?;
    let two = T::lit(2.0);
    let half = h / two;
    let three_half = T::lit(1.5) * h;
    let a1 = half.sin().powi(2) / (h.sin() * three_half.sin());
    let a2 = two / (T::one() + two * h.cos());
    let a3 = T::lit(0.75) / three_half.sin();
    let a4 = (T::lit(3.0) + T::lit(9.0) * h.cos())
        / (T::lit(4.0) * half.cos() - T::lit(4.0) * (T::lit(2.5) * h).cos());
    let cot_half = half.cos() / half.sin();
    let a5 = -T::lit(3.0) * cot_half * cot_half / (two + T::lit(4.0) * h.cos());
    Ok(StencilConstants { a1, a2, a3, a4, a5 })
}

impl<T: Real> StencilConstants<T> {
    pub fn new(h: T) -> Result<Self> {
        collocation_constants(h)
    }

    /// `2 a1 + a2`: image of the all-ones coefficient vector under the value stencil.
    pub fn value_sum(&self) -> T {
        T::lit(2.0) * self.a1 + self.a2
    }

    /// `2 a4 + a5`.
    pub fn curvature_sum(&self) -> T {
        T::lit(2.0) * self.a4 + self.a5
    }
}

/// One piece of `TB_i` (`branch` 0..=3 covers `[x_{i+branch}, x_{i+branch+1}]`),
/// evaluated without checking that `x` lies in that piece.
pub(crate) fn branch_value<T: Real>(branch: usize, i: isize, x: T, grid: &SpaceGrid<T>) -> T {
    let two = T::lit(2.0);
    let h = grid.h();
    let p = |k: isize| ((x - grid.knot(i + k)) / two).sin();
    let q = |k: isize| ((grid.knot(i + k) - x) / two).sin();
    let w = (h / two).sin() * h.sin() * (T::lit(1.5) * h).sin();
    let num = match branch {
        0 => p(0).powi(3),
        1 => p(0) * (p(0) * q(2) + q(3) * p(1)) + q(4) * p(1).powi(2),
        2 => q(4) * (p(1) * q(3) + q(4) * p(2)) + p(0) * q(3).powi(2),
        3 => q(4).powi(3),
        _ => T::zero(),
    };
    num / w
}

/// Value of the cubic trigonometric B-spline `TB_i^4` at `x`.
///
/// `i` uses support-start indexing and must lie in `-3..=M-1`; `x` may lie
/// anywhere on the extended knot range `[x_{-3}, x_{M+3}]`.
pub fn eval_basis<T: Real>(i: isize, x: T, grid: &SpaceGrid<T>) -> Result<T> {
    let m = grid.m() as isize;
    if !(-3..m).contains(&i) {
        return Err(Error::domain(format!(
            "basis index {i} outside -3..={}",
            m - 1
        )));
    }
    let lo = grid.knot(-3);
    let hi = grid.knot(m + 3);
    if !(x >= lo && x <= hi) {
        return Err(Error::domain(format!(
            "x = {x} outside the extended knot range"
        )));
    }
    Ok(basis_unchecked(i, x, grid))
}

pub(crate) fn basis_unchecked<T: Real>(i: isize, x: T, grid: &SpaceGrid<T>) -> T {
    let start = grid.knot(i);
    let end = grid.knot(i + 4);
    if x < start || x > end {
        return T::zero();
    }
    let offset = ((x - start) / grid.h()).floor().to_usize().unwrap_or(0);
    branch_value(offset.min(3), i, x, grid)
}

/// Spline coefficients `c_{-1} … c_{M+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCoefficients<T> {
    values: Vec<T>,
}

impl<T: Real> SplineCoefficients<T> {
    pub fn new(grid: &SpaceGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_coefficients() {
            return Err(Error::Shape {
                what: "spline coefficients",
                expected: grid.n_coefficients(),
                found: values.len(),
            });
        }
        Ok(SplineCoefficients { values })
    }

    pub fn zeros(grid: &SpaceGrid<T>) -> Self {
        SplineCoefficients {
            values: vec![T::zero(); grid.n_coefficients()],
        }
    }

    /// Coefficient with collocation label `label ∈ -1..=M+1`.
    pub fn get(&self, label: isize) -> T {
        self.values[(label + 1) as usize]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: T, other: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&c, &d)| c + alpha * d)
            .collect();
        SplineCoefficients { values }
    }

    /// Evaluate the spline `Σ c_l TB_{l-2}(x)` anywhere in `[a, b]`.
    pub fn evaluate(&self, grid: &SpaceGrid<T>, x: T) -> T {
        self.values
            .iter()
            .enumerate()
            .map(|(s, &c)| c * basis_unchecked(s as isize - 3, x, grid))
            .fold(T::zero(), |acc, v| acc + v)
    }
}

/// Spline values and derivatives at the knots `x_0 … x_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotValues<T> {
    pub u: Vec<T>,
    pub ux: Vec<T>,
    pub uxx: Vec<T>,
}

fn check_len<T: Real>(c: &SplineCoefficients<T>, grid: &SpaceGrid<T>) -> Result<()> {
    if c.len() != grid.n_coefficients() {
        return Err(Error::Shape {
            what: "spline coefficients",
            expected: grid.n_coefficients(),
            found: c.len(),
        });
    }
    Ok(())
}

fn apply_stencil<T: Real>(c: &[T], outer_left: T, centre: T, outer_right: T) -> Vec<T> {
    c.windows(3)
        .map(|w| outer_left * w[0] + centre * w[1] + outer_right * w[2])
        .collect()
}

/// Reconstruct `u`, `u_x`, `u_xx` at every knot from spline coefficients.
pub fn knot_values<T: Real>(
    c: &SplineCoefficients<T>,
    grid: &SpaceGrid<T>,
    s: &StencilConstants<T>,
) -> Result<KnotValues<T>> {
    check_len(c, grid)?;
    let c = c.as_slice();
    Ok(KnotValues {
        u: apply_stencil(c, s.a1, s.a2, s.a1),
        ux: apply_stencil(c, -s.a3, T::zero(), s.a3),
        uxx: apply_stencil(c, s.a4, s.a5, s.a4),
    })
}

/// Knot values only (`u_j = a1 c_{j-1} + a2 c_j + a1 c_{j+1}`).
pub fn value_stencil<T: Real>(
    c: &SplineCoefficients<T>,
    grid: &SpaceGrid<T>,
    s: &StencilConstants<T>,
) -> Result<Vec<T>> {
    check_len(c, grid)?;
    Ok(apply_stencil(c.as_slice(), s.a1, s.a2, s.a1))
}
