use fractel::basis::{knot_values, SpaceGrid};
use fractel::caputo::{discrete_caputo_1, discrete_caputo_2, with_ghost};
use fractel::exprparse::{parse, Expression};
use fractel::solver::{march, next_system, ProblemSpec, Stepper, TimeMesh};
use fractel::verify::{mms_problem, run_case};

fn forced(f: &str) -> ProblemSpec<f64> {
    let z = Expression::zero;
    ProblemSpec::new(1.5, 1.0, 1.0, 1.0, z(), z(), z(), z(), parse(f).unwrap()).unwrap()
}

#[test]
fn superposition_of_forcings() {
    let grid = SpaceGrid::new(0.0, 1.0, 16).unwrap();
    let mesh = TimeMesh::new(1.0, 20).unwrap();
    let f1 = "x*(1 - x)*t";
    let f2 = "sin(pi*x)*exp(t)";
    let u1 = march(&forced(f1), &grid, &mesh).unwrap();
    let u2 = march(&forced(f2), &grid, &mesh).unwrap();
    let u12 = march(&forced(&format!("{f1} + {f2}")), &grid, &mesh).unwrap();
    for n in 0..=mesh.n() {
        for j in 0..=grid.m() {
            let sum = u1.knot_values_per_level[n][j] + u2.knot_values_per_level[n][j];
            assert!(
                (u12.knot_values_per_level[n][j] - sum).abs() <= 1e-10,
                "level {n}, knot {j}"
            );
        }
    }
}

/// The computed levels satisfy the collocated discrete equation, rebuilt
/// from the discrete Caputo operators and the knot values of each level.
#[test]
fn levels_satisfy_discrete_equation() {
    let z = Expression::zero;
    let p = ProblemSpec::new(
        1.4,
        0.7,
        2.0,
        0.5,
        parse("sin(pi*x)").unwrap(),
        parse("x*(1 - x)").unwrap(),
        z(),
        z(),
        parse("exp(-t)*x").unwrap(),
    )
    .unwrap();
    let grid = SpaceGrid::new(0.0, 1.0, 12).unwrap();
    let mesh = TimeMesh::new(0.5, 10).unwrap();
    let sol = march(&p, &grid, &mesh).unwrap();
    let mut stepper = Stepper::new(&p, &grid, &mesh).unwrap();
    while !stepper.is_done() {
        stepper.step().unwrap();
    }
    let s = *stepper.stencil();
    let w = stepper.weights().clone();
    let tau = mesh.tau();
    for n in 0..mesh.n() {
        let kv = knot_values(sol.history.level(n + 1), &grid, &s).unwrap();
        for (j, &x) in grid.knots().iter().enumerate() {
            let levels: Vec<f64> = (0..=n + 1)
                .map(|m| sol.knot_values_per_level[m][j])
                .collect();
            let velocity = x * (1.0 - x);
            let d2 = discrete_caputo_2(&w, &with_ghost(&levels, velocity, tau).unwrap()).unwrap();
            let d1 = discrete_caputo_1(&w, &levels).unwrap();
            let lhs = d2 + p.gamma1 * d1 + p.gamma2 * kv.u[j] - p.gamma3 * kv.uxx[j];
            let f = (-mesh.time(n + 1)).exp() * x;
            let scale = w.alpha0() * levels.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            assert!(
                (lhs - f).abs() <= 1e-10 * scale,
                "level {} knot {j}: {lhs} vs {f}",
                n + 1
            );
        }
    }
}

#[test]
fn boundary_values_reproduced() {
    let z = Expression::zero;
    let p = ProblemSpec::new(
        1.5,
        1.0,
        1.0,
        1.0,
        z(),
        z(),
        parse("t^2").unwrap(),
        parse("sin(t)").unwrap(),
        z(),
    )
    .unwrap();
    let grid = SpaceGrid::new(0.0, 1.0, 10).unwrap();
    let mesh = TimeMesh::new(1.0_f64, 10).unwrap();
    let sol = march(&p, &grid, &mesh).unwrap();
    for n in 1..=mesh.n() {
        let t: f64 = mesh.time(n);
        let row = &sol.knot_values_per_level[n];
        assert!((row[0] - t * t).abs() < 1e-12);
        assert!((row[grid.m()] - t.sin()).abs() < 1e-12);
    }
}

#[test]
fn interior_rows_time_invariant() {
    let mms = mms_problem(1.5, 1.0, 1.0, 1.0).unwrap();
    let grid = SpaceGrid::new(0.0, 1.0, 8).unwrap();
    let mesh = TimeMesh::new(1.0, 6).unwrap();
    let mut stepper = Stepper::new(&mms.problem, &grid, &mesh).unwrap();
    let first = next_system(&stepper, &mms.problem, &grid).unwrap().matrix;
    stepper.step().unwrap();
    let reference = next_system(&stepper, &mms.problem, &grid).unwrap().matrix;
    assert_ne!(
        first, reference,
        "first step doubles the leading time coefficient"
    );
    while !stepper.is_done() {
        assert_eq!(
            next_system(&stepper, &mms.problem, &grid).unwrap().matrix,
            reference
        );
        let again = stepper.next_rhs().unwrap();
        assert_eq!(stepper.next_rhs().unwrap(), again);
        stepper.step().unwrap();
    }
}

#[test]
fn mms_errors_decrease() {
    let mms = mms_problem(1.5, 1.0, 1.0, 1.0).unwrap();
    let errors: Vec<f64> = [8usize, 16, 32, 64]
        .iter()
        .map(|&k| run_case(&mms, k, k).unwrap().l_inf)
        .collect();
    assert!(errors.windows(2).all(|p| p[1] < p[0]), "{errors:?}");
}

#[test]
fn works_in_single_precision() {
    let mms = mms_problem(1.5_f32, 1.0, 1.0, 1.0).unwrap();
    let coarse = run_case(&mms, 8, 8).unwrap().l_inf;
    let fine = run_case(&mms, 16, 16).unwrap().l_inf;
    assert!(fine < coarse && coarse < 1e-2, "{coarse} {fine}");
}
