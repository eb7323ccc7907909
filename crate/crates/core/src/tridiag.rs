//! Tridiagonal solver with one extra entry in the first and last rows.
//!
//! The matrix is tridiagonal except for `A[0][2]` (`corner_top`) and
//! `A[n-1][n-3]` (`corner_bottom`). The bottom corner is folded into the last
//! row using row `n-2` before the forward sweep; the top corner is carried
//! into row 1 by the first elimination step, so the remaining work is
//! ordinary Thomas elimination.

use crate::error::{Error, Result};
use crate::real::Real;

/// Matrix part of an almost-tridiagonal system.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    /// `sub[i] = A[i+1][i]`, length `n - 1`.
    pub sub: Vec<T>,
    /// Length `n`.
    pub diag: Vec<T>,
    /// `sup[i] = A[i][i+1]`, length `n - 1`.
    pub sup: Vec<T>,
    pub corner_top: T,
    pub corner_bottom: T,
}

/// Matrix plus right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSystem<T> {
    pub matrix: BandedMatrix<T>,
    pub rhs: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    /// Zero matrix of dimension `n`.
    pub fn zeros(n: usize) -> Self {
        BandedMatrix {
            sub: vec![T::zero(); n.saturating_sub(1)],
            diag: vec![T::zero(); n],
            sup: vec![T::zero(); n.saturating_sub(1)],
            corner_top: T::zero(),
            corner_bottom: T::zero(),
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 3 {
            return Err(Error::Shape {
                what: "banded system dimension",
                expected: 3,
                found: n,
            });
        }
        for (what, len) in [
            ("sub-diagonal", self.sub.len()),
            ("super-diagonal", self.sup.len()),
        ] {
            if len != n - 1 {
                return Err(Error::Shape {
                    what,
                    expected: n - 1,
                    found: len,
                });
            }
        }
        Ok(())
    }

    /// Row entries as `(column, value)` pairs.
    pub fn row(&self, i: usize) -> Vec<(usize, T)> {
        let n = self.n();
        let mut out = Vec::with_capacity(3);
        if i == n - 1 && n >= 3 {
            out.push((n - 3, self.corner_bottom));
        }
        if i > 0 {
            out.push((i - 1, self.sub[i - 1]));
        }
        out.push((i, self.diag[i]));
        if i + 1 < n {
            out.push((i + 1, self.sup[i]));
        }
        if i == 0 && n >= 3 {
            out.push((2, self.corner_top));
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n())
            .map(|i| {
                self.row(i)
                    .into_iter()
                    .fold(T::zero(), |acc, (j, a)| acc + a * x[j])
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.n())
            .map(|i| {
                self.row(i)
                    .into_iter()
                    .fold(T::zero(), |acc, (_, a)| acc + a.abs())
            })
            .fold(T::zero(), T::max)
    }

    /// Row-wise weak diagonal dominance (diagnostic only).
    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.n()).all(|i| {
            let off = self
                .row(i)
                .into_iter()
                .filter(|&(j, _)| j != i)
                .fold(T::zero(), |acc, (_, a)| acc + a.abs());
            self.diag[i].abs() >= off
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut r = vec![T::zero(); n];
                for (j, a) in self.row(i) {
                    r[j] = r[j] + a;
                }
                r
            })
            .collect()
    }

    /// Eliminate once; the result can solve many right-hand sides.
    pub fn factorize(&self) -> Result<Factorization<T>> {
        self.validate()?;
        let n = self.n();
        let scale = self.norm_inf();
        let tiny = T::epsilon() * scale;
        let is_zero = |p: T| !(p.abs() > tiny) || !p.is_finite();

        let mut diag = self.diag.clone();
        let mut sup = self.sup.clone();
        let mut sub = self.sub.clone();

        // fold A[n-1][n-3] into the last row using row n-2
        let pivot_row = n - 2;
        let mut fold = T::zero();
        if self.corner_bottom != T::zero() {
            let lead = sub[n - 3];
            if is_zero(lead) {
                return Err(Error::Singular { pivot: pivot_row });
            }
            fold = self.corner_bottom / lead;
            sub[n - 2] = sub[n - 2] - fold * diag[n - 2];
            diag[n - 1] = diag[n - 1] - fold * sup[n - 2];
        }

        let mut mult = vec![T::zero(); n];
        if is_zero(diag[0]) {
            return Err(Error::Singular { pivot: 0 });
        }
        for i in 1..n {
            let m = sub[i - 1] / diag[i - 1];
            mult[i] = m;
            diag[i] = diag[i] - m * sup[i - 1];
            if i == 1 {
                sup[1] = sup[1] - m * self.corner_top;
            }
            if is_zero(diag[i]) {
                return Err(Error::Singular { pivot: i });
            }
        }
        Ok(Factorization {
            diag,
            sup,
            mult,
            fold,
            corner_top: self.corner_top,
        })
    }
}

/// Elimination factors of a [`BandedMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization<T> {
    diag: Vec<T>,
    sup: Vec<T>,
    mult: Vec<T>,
    fold: T,
    corner_top: T,
}

impl<T: Real> Factorization<T> {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::Shape {
                what: "right-hand side",
                expected: n,
                found: rhs.len(),
            });
        }
        let mut r = rhs.to_vec();
        r[n - 1] = r[n - 1] - self.fold * r[n - 2];
        for i in 1..n {
            r[i] = r[i] - self.mult[i] * r[i - 1];
        }
        let mut x = vec![T::zero(); n];
        x[n - 1] = r[n - 1] / self.diag[n - 1];
        for i in (1..n - 1).rev() {
            x[i] = (r[i] - self.sup[i] * x[i + 1]) / self.diag[i];
        }
        x[0] = (r[0] - self.sup[0] * x[1] - self.corner_top * x[2]) / self.diag[0];
        Ok(x)
    }
}

/// Solve `sys.matrix · x = sys.rhs`.
pub fn solve_banded<T: Real>(sys: &BandedSystem<T>) -> Result<Vec<T>> {
    sys.matrix.factorize()?.solve(&sys.rhs)
}

/// `‖A x − rhs‖∞`.
pub fn residual_inf<T: Real>(a: &BandedMatrix<T>, x: &[T], rhs: &[T]) -> T {
    a.matvec(x)
        .iter()
        .zip(rhs)
        .map(|(ax, r)| (*ax - *r).abs())
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> BandedMatrix<f64> {
        BandedMatrix {
            sub: vec![-1.0; n - 1],
            diag: vec![2.0; n],
            sup: vec![-1.0; n - 1],
            corner_top: 0.0,
            corner_bottom: 0.0,
        }
    }

    #[test]
    fn identity() {
        let mut a = BandedMatrix::<f64>::zeros(6);
        a.diag.iter_mut().for_each(|d| *d = 1.0);
        let r = vec![1.0, -2.0, 3.0, 0.5, 7.0, -1.0];
        let x = solve_banded(&BandedSystem {
            matrix: a,
            rhs: r.clone(),
        })
        .unwrap();
        assert_eq!(x, r);
    }

    #[test]
    fn laplacian_five() {
        let x = solve_banded(&BandedSystem {
            matrix: laplacian(5),
            rhs: vec![1.0; 5],
        })
        .unwrap();
        for (got, want) in x.iter().zip([2.5, 4.0, 4.5, 4.0, 2.5]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_pivot_reports_row() {
        let mut a = laplacian(4);
        a.diag[0] = 0.0;
        assert_eq!(a.factorize().unwrap_err(), Error::Singular { pivot: 0 });
        // rows 0 and 1 proportional: second pivot vanishes
        let a = BandedMatrix {
            sub: vec![2.0, 1.0, 1.0],
            diag: vec![1.0, 2.0, 3.0, 4.0],
            sup: vec![1.0, 2.0, 1.0],
            corner_top: 1.0,
            corner_bottom: 0.0,
        };
        assert_eq!(a.factorize().unwrap_err(), Error::Singular { pivot: 1 });
    }

    #[test]
    fn shape_errors() {
        let a = laplacian(4);
        assert!(matches!(
            a.factorize().unwrap().solve(&[1.0; 3]),
            Err(Error::Shape { .. })
        ));
        let mut bad = laplacian(4);
        bad.sup.pop();
        assert!(bad.factorize().is_err());
        assert!(BandedMatrix::<f64>::zeros(2).factorize().is_err());
    }

    #[test]
    fn corners_are_used() {
        // dense 3x3 including both corners
        let a = BandedMatrix {
            sub: vec![1.0, 2.0],
            diag: vec![4.0, 5.0, 6.0],
            sup: vec![1.0, 1.0],
            corner_top: 2.0,
            corner_bottom: 3.0,
        };
        let x_true = [1.0_f64, -2.0, 0.5];
        let rhs = a.matvec(&x_true);
        let x = a.factorize().unwrap().solve(&rhs).unwrap();
        for (g, w) in x.iter().zip(x_true) {
            assert!((g - w).abs() < 1e-14);
        }
        let dense = a.to_dense();
        assert_eq!(dense[0][2], 2.0);
        assert_eq!(dense[2][0], 3.0);
    }

    #[test]
    fn dominance_flag() {
        assert!(laplacian(5).is_diagonally_dominant());
        let mut a = laplacian(5);
        a.corner_top = 1.5;
        assert!(!a.is_diagonally_dominant());
    }
}
