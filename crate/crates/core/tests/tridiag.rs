mod common;

use common::{dense_solve, max_abs};
use fractel::tridiag::{residual_inf, solve_banded, BandedMatrix, BandedSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dominant(rng: &mut ChaCha8Rng, n: usize) -> BandedMatrix<f64> {
    let mut a = BandedMatrix::<f64>::zeros(n);
    for v in a.sub.iter_mut().chain(a.sup.iter_mut()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    a.corner_top = rng.gen_range(-1.0..1.0);
    a.corner_bottom = rng.gen_range(-1.0..1.0);
    for i in 0..n {
        let off: f64 = a
            .row(i)
            .iter()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.abs())
            .sum();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        a.diag[i] = sign * (off + rng.gen_range(0.1..2.0));
    }
    a
}

#[test]
fn residual_bound_on_random_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(4..=200);
        let a = random_dominant(&mut rng, n);
        assert!(a.is_diagonally_dominant());
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x = solve_banded(&BandedSystem {
            matrix: a.clone(),
            rhs: rhs.clone(),
        })
        .unwrap();
        let res = residual_inf(&a, &x, &rhs);
        assert!(
            res <= 1e-10 * (a.norm_inf() * max_abs(&x) + max_abs(&rhs)),
            "n = {n}: {res}"
        );
    }
}

#[test]
fn matches_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_dominant(&mut rng, 50);
    let rhs: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x = solve_banded(&BandedSystem {
        matrix: a.clone(),
        rhs: rhs.clone(),
    })
    .unwrap();
    let oracle = dense_solve(a.to_dense(), rhs);
    for (g, w) in x.iter().zip(&oracle) {
        assert!((g - w).abs() <= 1e-10 * w.abs().max(1.0));
    }
}

#[test]
fn laplacian_oracle() {
    let a = BandedMatrix {
        sub: vec![-1.0; 4],
        diag: vec![2.0; 5],
        sup: vec![-1.0; 4],
        corner_top: 0.0,
        corner_bottom: 0.0,
    };
    let oracle = dense_solve(a.to_dense(), vec![1.0; 5]);
    let x = solve_banded(&BandedSystem {
        matrix: a,
        rhs: vec![1.0; 5],
    })
    .unwrap();
    for (g, w) in x.iter().zip(&oracle) {
        assert!((g - w).abs() < 1e-13);
    }
}

#[test]
fn recovers_unit_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 4..12 {
        let a = random_dominant(&mut rng, n);
        let f = a.factorize().unwrap();
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let x = f.solve(&a.matvec(&e)).unwrap();
            for (i, v) in x.iter().enumerate() {
                assert!((v - e[i]).abs() < 1e-9);
            }
        }
    }
}
