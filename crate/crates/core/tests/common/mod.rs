//! Oracles shared by the integration tests. Independent of the library's
//! implementation paths.
#![allow(dead_code)]

/// Derivative of order `order` at `x` by central differences, with a
/// Richardson tableau that removes every power `δ^1 … δ^levels-1`, so it
/// stays valid where higher derivatives jump (spline joints).
pub fn richardson_derivative(
    f: &dyn Fn(f64) -> f64,
    x: f64,
    order: usize,
    delta: f64,
    levels: usize,
) -> f64 {
    let central = |d: f64| match order {
        0 => f(x),
        1 => (f(x + d) - f(x - d)) / (2.0 * d),
        2 => (f(x + d) - 2.0 * f(x) + f(x - d)) / (d * d),
        _ => panic!("order {order} not supported"),
    };
    let mut row: Vec<f64> = (0..levels)
        .map(|k| central(delta / 2f64.powi(k as i32)))
        .collect();
    for p in 1..levels {
        let fac = 2f64.powi(p as i32);
        row = row
            .windows(2)
            .map(|w| (fac * w[1] - w[0]) / (fac - 1.0))
            .collect();
    }
    row[0]
}

/// Dense Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let m = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= m * a[col][c];
            }
            b[r] -= m * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
