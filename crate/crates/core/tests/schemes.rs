//! Functionals, gradients and the coherence of the two scheme routes.

use fracvi::experiments::cubic_witness;
use fracvi::*;
use proptest::prelude::*;

fn path() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (3..=40usize, 1..=2usize).prop_flat_map(|(n, d)| {
        (
            Just(n),
            Just(d),
            prop::collection::vec(-2.0..2.0f64, (n + 1) * d),
        )
    })
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Minus), Just(Side::Plus)]
}

fn problem() -> impl Strategy<Value = Problem> {
    prop_oneof![
        Just(Problem::Free),
        (0.1..3.0f64).prop_map(|omega| Problem::Harmonic { omega }),
        (0.1..3.0f64).prop_map(|omega| Problem::Pendulum { omega }),
    ]
}

fn embedding(n: usize, alpha: Option<f64>) -> Embedding {
    match alpha {
        None => Embedding::Classical,
        Some(a) => Embedding::fractional(a, n).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn directional_derivative_matches_gradient(
        (n, d, values) in path(),
        w in prop::collection::vec(-1.0..1.0f64, 82),
        side in side(),
        problem in problem(),
        alpha in prop::option::of(0.05..1.0f64),
    ) {
        let grid = make_grid(0.0, 1.0, n).unwrap();
        let q = Trajectory::new(grid, d, values).unwrap();
        let mut dir = Trajectory::new(grid, d, w[..(n + 1) * d].to_vec()).unwrap();
        dir.point_mut(0).fill(0.0);
        dir.point_mut(n).fill(0.0);
        let l = problem.lagrangian(d);
        let e = embedding(n, alpha);
        let g = functional_gradient(&l, &q, side, &e).unwrap();

        let eps = 1e-6;
        let shifted = |s: f64| {
            let v: Vec<f64> = q.values().iter().zip(dir.values()).map(|(a, b)| a + s * b).collect();
            discrete_functional(&l, &Trajectory::new(grid, d, v).unwrap(), side, &e).unwrap()
        };
        let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
        let analytic: f64 = grid.h()
            * g.iter().map(|(k, gk)| gk.iter().zip(dir.point(k)).map(|(a, b)| a * b).sum::<f64>()).sum::<f64>();
        prop_assert!((fd - analytic).abs() <= 1e-6 * (1.0 + analytic.abs()), "fd {fd} analytic {analytic}");
    }

    #[test]
    fn coherent_pairs((n, d, values) in path(), side in side(), problem in problem(), alpha in 0.05..1.0f64) {
        let q = Trajectory::new(make_grid(0.0, 1.0, n).unwrap(), d, values).unwrap();
        let l = problem.lagrangian(d);
        let asym = coherence_report(&l, &q, side, Comparison::Asymmetric).unwrap();
        prop_assert!(asym.gap <= 1e-12 * asym.scale.max(1.0));
        let frac = coherence_report(&l, &q, side, Comparison::Fractional { alpha }).unwrap();
        prop_assert!(frac.gap <= 1e-10 * (1.0 + frac.scale));
        prop_assert_eq!(frac.verdict, Verdict::Coherent);
    }

    #[test]
    fn vi_residual_is_the_gradient((n, d, values) in path(), side in side(), alpha in 0.05..1.0f64) {
        let q = Trajectory::new(make_grid(0.0, 1.0, n).unwrap(), d, values).unwrap();
        let l = Problem::Pendulum { omega: 1.3 }.lagrangian(d);
        let vi = residual_vi_fractional(&l, &q, side, alpha).unwrap();
        let g = functional_gradient(&l, &q, side, &Embedding::fractional(alpha, n).unwrap()).unwrap();
        prop_assert_eq!(vi.values(), g.values());
        let vi = residual_vi_classical(&l, &q, side).unwrap();
        let g = functional_gradient(&l, &q, side, &Embedding::Classical).unwrap();
        prop_assert_eq!(vi.values(), g.values());
    }

    #[test]
    fn witness_gap_is_scale_free(c in 0.1..100.0f64) {
        let w = cubic_witness(4).unwrap();
        let q = Trajectory::new(*w.grid(), 1, w.values().iter().map(|x| c * x).collect()).unwrap();
        let r = coherence_report(&Problem::Free.lagrangian(1), &q, Side::Minus, Comparison::Classical).unwrap();
        prop_assert!((r.gap / c - 6.0).abs() <= 1e-12 * 6.0);
        prop_assert_eq!(r.verdict, Verdict::NotCoherent);
    }
}

#[test]
fn fractional_functional_reduces_at_alpha_one() {
    let grid = make_grid(0.0, 2.0, 37).unwrap();
    let q = sample(&grid, 2, |t, out| {
        out[0] = t.sin();
        out[1] = t * t - 1.0;
    });
    let l = Problem::Pendulum { omega: 2.0 }.lagrangian(2);
    for side in [Side::Minus, Side::Plus] {
        let a = discrete_functional_fractional(&l, &q, side, 1.0).unwrap();
        let b = discrete_functional_classical(&l, &q, side).unwrap();
        assert!((a - b).abs() <= 8.0 * f64::EPSILON * b.abs());
    }
}

#[test]
fn mechanical_gradient_is_the_three_point_stencil() {
    let grid = make_grid(0.0, 1.5, 12).unwrap();
    let h = grid.h();
    let q = sample_scalar(&grid, |t| (2.0 * t).cos() + 0.3 * t);
    let omega = 1.7;
    let l = Problem::Pendulum { omega }.lagrangian(1);
    let g = functional_gradient(&l, &q, Side::Minus, &Embedding::Classical).unwrap();
    let scale = g.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for (k, gk) in g.iter() {
        let (a, b, c) = (q.point(k - 1)[0], q.point(k)[0], q.point(k + 1)[0]);
        let want = -((c - 2.0 * b + a) / (h * h) + omega * omega * b.sin());
        assert!((gk[0] - want).abs() <= 1e-12 * scale.max(1.0));
    }
}

#[test]
fn user_lagrangians_plug_into_every_scheme() {
    // Damped-like time-dependent Lagrangian e^t (½v² - ½x²).
    let l = FnLagrangian::new(
        1,
        |x: &[f64], v: &[f64], t: f64| t.exp() * 0.5 * (v[0] * v[0] - x[0] * x[0]),
        |x: &[f64], _v: &[f64], t: f64, out: &mut [f64]| out[0] = -t.exp() * x[0],
        |_x: &[f64], v: &[f64], t: f64, out: &mut [f64]| out[0] = t.exp() * v[0],
    );
    let grid = make_grid(0.0, 1.0, 20).unwrap();
    let q = sample_scalar(&grid, |t| (-0.5 * t).exp() * (3.0 * t).sin());
    for side in [Side::Minus, Side::Plus] {
        for kind in [
            SchemeKind::DirectClassical { side },
            SchemeKind::VariationalClassical { side },
            SchemeKind::AsymmetricDirect { side },
            SchemeKind::DirectFractional { side, alpha: 0.4 },
            SchemeKind::VariationalFractional { side, alpha: 0.4 },
        ] {
            let r = kind.residual(&l, &q).unwrap();
            assert!(r.values().iter().all(|x| x.is_finite()), "{kind:?}");
        }
    }
}
