//! Dense linear algebra and the Newton boundary-value solver.

use std::time::{Duration, Instant};

use fracvi::experiments::{convergence_study, ConvergenceSettings};
use fracvi::*;
use nalgebra::DMatrix;

#[test]
fn hilbert_inverse_matches_nalgebra() {
    let n = 4;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 1.0 / (i + j + 1) as f64).collect())
        .collect();
    let a = Matrix::from_rows(&rows).unwrap();
    let lu = LuDecomposition::new(a).unwrap();
    let inv = DMatrix::from_fn(n, n, |i, j| rows[i][j])
        .try_inverse()
        .unwrap();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = lu.solve(&e).unwrap();
        for i in 0..n {
            assert!((col[i] - inv[(i, j)]).abs() <= 1e-8 * inv[(i, j)].abs().max(1.0));
        }
    }
}

#[test]
fn singular_systems_are_reported() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
    assert!(matches!(
        lu_solve(&a, &[1.0, 2.0]),
        Err(Error::SingularMatrix { .. })
    ));
}

#[test]
fn endpoints_are_kept_bit_for_bit() {
    let l = Problem::Pendulum { omega: 2.0 }.lagrangian(2);
    let grid = make_grid(0.0, 1.0, 24).unwrap();
    let (qa, qb) = (
        vec![0.1 + 0.2, -1.0 / 3.0],
        vec![std::f64::consts::PI / 7.0, 1e-17],
    );
    for scheme in [
        SchemeKind::VariationalClassical { side: Side::Plus },
        SchemeKind::VariationalFractional {
            side: Side::Minus,
            alpha: 0.7,
        },
    ] {
        let p = BvpProblem::new(grid, &l, scheme, qa.clone(), qb.clone()).unwrap();
        let (q, diag) = solve_bvp_newton(&p, &p.default_guess(), &NewtonConfig::default()).unwrap();
        assert!(diag.converged);
        assert_eq!(q.point(0), &qa[..]);
        assert_eq!(q.point(24), &qb[..]);
    }
}

#[test]
fn linear_scheme_matches_direct_solve() {
    // Harmonic VI is linear: R(Q) = A·Q_interior - b. Recover A and b by
    // probing R and compare Newton with a dense solve.
    let l = Problem::Harmonic { omega: 2.0 }.lagrangian(1);
    let grid = make_grid(0.0, 1.0, 10).unwrap();
    let scheme = SchemeKind::VariationalFractional {
        side: Side::Plus,
        alpha: 0.35,
    };
    let p = BvpProblem::new(grid, &l, scheme, vec![0.5], vec![-0.25]).unwrap();
    let m = 9;
    let r0 = p.residual(&vec![0.0; m]).unwrap();
    let a = DMatrix::from_fn(m, m, |i, j| {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        p.residual(&e).unwrap()[i] - r0[i]
    });
    let b = nalgebra::DVector::from_iterator(m, r0.iter().map(|x| -x));
    let exact = a.lu().solve(&b).unwrap();
    let init = Trajectory::linear(grid, &[3.0], &[-7.0]).unwrap();
    let mut init_with_bc = init.clone();
    init_with_bc.point_mut(0)[0] = 0.5;
    init_with_bc.point_mut(10)[0] = -0.25;
    let (q, diag) = solve_bvp_newton(&p, &init_with_bc, &NewtonConfig::default()).unwrap();
    assert!(diag.iterations <= 2);
    for k in 1..10 {
        assert!((q.point(k)[0] - exact[k - 1]).abs() <= 1e-10);
    }
}

#[test]
fn fractional_solve_at_n_256_is_within_budget() {
    let l = Problem::Harmonic { omega: 1.0 }.lagrangian(1);
    let grid = make_grid(0.0, 1.0, 256).unwrap();
    let scheme = SchemeKind::VariationalFractional {
        side: Side::Minus,
        alpha: 0.5,
    };
    let p = BvpProblem::new(
        grid,
        &l,
        scheme,
        vec![1.0],
        vec![1f64.cos() + 0.5 * 1f64.sin()],
    )
    .unwrap();
    let start = Instant::now();
    let (_, diag) = solve_bvp_newton(&p, &p.default_guess(), &NewtonConfig::default()).unwrap();
    assert!(diag.converged);
    assert!(diag.final_residual() <= 1e-10);
    assert!(
        start.elapsed() < Duration::from_secs(30),
        "took {:?}",
        start.elapsed()
    );
}

#[test]
fn free_particle_is_reproduced_exactly() {
    for scheme in [
        SchemeKind::VariationalClassical { side: Side::Minus },
        SchemeKind::DirectClassical { side: Side::Minus },
        SchemeKind::AsymmetricDirect { side: Side::Plus },
    ] {
        let s = ConvergenceSettings {
            problem: Problem::Free,
            qa: -2.0,
            qb: 5.0,
            ..ConvergenceSettings::harmonic(scheme, vec![8, 16, 32])
        };
        let study = convergence_study(&s).unwrap();
        assert!(study.rows.iter().all(|r| r.error <= 1e-12), "{scheme:?}");
    }
}

#[test]
fn pendulum_self_convergence_is_second_order() {
    let s = ConvergenceSettings {
        problem: Problem::Pendulum { omega: 2.0 },
        ..ConvergenceSettings::harmonic(
            SchemeKind::VariationalClassical { side: Side::Minus },
            vec![16, 32, 64],
        )
    };
    let study = convergence_study(&s).unwrap();
    assert!(matches!(
        study.reference,
        experiments::Reference::SelfReference(256)
    ));
    // The self-reference error at N is e(N) - e(256), so the last doubling
    // reads slightly high.
    for p in study.orders() {
        assert!((1.8..=2.3).contains(&p), "order {p}");
    }
}
