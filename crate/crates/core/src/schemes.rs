//! Residual assemblers for the discrete Euler–Lagrange schemes and the
//! comparison between direct embedding and variational integrator.
//!
//! Two routes produce each scheme:
//!
//! * direct embedding: the continuous Euler–Lagrange expression with the
//!   derivative operators replaced by their discrete counterparts, applied
//!   to the sampled `∂L/∂v` sequence;
//! * variational integrator: the gradient of the discrete functional,
//!   assembled in [`crate::lagrangian::functional_gradient`] by scattering
//!   through the transposed velocity stencil.
//!
//! The routes agree for the asymmetric and Grünwald–Letnikov embeddings and
//! disagree for the symmetric finite-difference one.

use std::fmt;
use std::ops::RangeInclusive;

use crate::diffops::{delta_minus, delta_plus};
use crate::error::{domain, Error, Result};
use crate::fracops::{delta_alpha_minus_with, delta_alpha_plus_with, gl_coefficients};
use crate::grid::{fmt_f64, max_abs, Grid, ShiftedSequence, Side, Trajectory, Values};
use crate::lagrangian::{
    check_alpha, check_dim, functional_gradient, momentum_sequence, Embedding, Lagrangian,
};

/// Per-node residual of a scheme over a contiguous index range.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    grid: Grid,
    dim: usize,
    first: usize,
    last: usize,
    values: Vec<f64>,
}

impl ResidualField {
    pub fn new(
        grid: Grid,
        dim: usize,
        first: usize,
        last: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if first > last || last > grid.n() {
            return domain(format!(
                "bad residual range {first}..={last} for N = {}",
                grid.n()
            ));
        }
        let expected = (last - first + 1) * dim;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(ResidualField {
            grid,
            dim,
            first,
            last,
            values,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index_range(&self) -> RangeInclusive<usize> {
        self.first..=self.last
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, k: usize) -> Option<&[f64]> {
        if k < self.first || k > self.last {
            return None;
        }
        let j = k - self.first;
        Some(&self.values[j * self.dim..(j + 1) * self.dim])
    }

    /// Panics when `k` is outside the declared range.
    pub fn at(&self, k: usize) -> &[f64] {
        self.get(k)
            .unwrap_or_else(|| panic!("index {k} outside {}..={}", self.first, self.last))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> {
        let first = self.first;
        self.values
            .chunks_exact(self.dim)
            .enumerate()
            .map(move |(j, p)| (j + first, p))
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl Values for ResidualField {
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Which scheme to assemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeKind {
    DirectClassical { side: Side },
    VariationalClassical { side: Side },
    AsymmetricDirect { side: Side },
    DirectFractional { side: Side, alpha: f64 },
    VariationalFractional { side: Side, alpha: f64 },
}

impl SchemeKind {
    pub fn side(&self) -> Side {
        match *self {
            SchemeKind::DirectClassical { side }
            | SchemeKind::VariationalClassical { side }
            | SchemeKind::AsymmetricDirect { side }
            | SchemeKind::DirectFractional { side, .. }
            | SchemeKind::VariationalFractional { side, .. } => side,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            SchemeKind::DirectFractional { alpha, .. }
            | SchemeKind::VariationalFractional { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::DirectClassical { .. } => "direct",
            SchemeKind::VariationalClassical { .. } => "vi",
            SchemeKind::AsymmetricDirect { .. } => "asymmetric",
            SchemeKind::DirectFractional { .. } => "direct-fractional",
            SchemeKind::VariationalFractional { .. } => "vi-fractional",
        }
    }

    /// Parses a scheme name as printed by [`SchemeKind::name`].
    pub fn from_name(name: &str, side: Side, alpha: Option<f64>) -> Result<Self> {
        let need_alpha =
            || alpha.ok_or_else(|| Error::Domain(format!("scheme {name} needs an order alpha")));
        match name.trim() {
            "direct" => Ok(SchemeKind::DirectClassical { side }),
            "vi" => Ok(SchemeKind::VariationalClassical { side }),
            "asymmetric" => Ok(SchemeKind::AsymmetricDirect { side }),
            "direct-fractional" => Ok(SchemeKind::DirectFractional {
                side,
                alpha: need_alpha()?,
            }),
            "vi-fractional" => Ok(SchemeKind::VariationalFractional {
                side,
                alpha: need_alpha()?,
            }),
            other => Err(Error::Parse(format!(
                "unknown scheme {other:?} (expected direct, vi, asymmetric, direct-fractional, vi-fractional)"
            ))),
        }
    }

    /// Residual of this scheme at `q`.
    pub fn residual<L: Lagrangian + ?Sized>(&self, l: &L, q: &Trajectory) -> Result<ResidualField> {
        match *self {
            SchemeKind::DirectClassical { side } => residual_direct_classical(l, q, side),
            SchemeKind::VariationalClassical { side } => residual_vi_classical(l, q, side),
            SchemeKind::AsymmetricDirect { side } => residual_asymmetric_direct(l, q, side),
            SchemeKind::DirectFractional { side, alpha } => {
                residual_direct_fractional(l, q, side, alpha)
            }
            SchemeKind::VariationalFractional { side, alpha } => {
                residual_vi_fractional(l, q, side, alpha)
            }
        }
    }
}

fn velocity_classical(q: &Trajectory, side: Side) -> ShiftedSequence {
    match side {
        Side::Minus => delta_minus(q),
        Side::Plus => {
            let mut v = delta_plus(q);
            for k in 0..q.grid().n() {
                v.at_mut(k).iter_mut().for_each(|x| *x = -*x);
            }
            v
        }
    }
}

/// `R_k = ∂L/∂x(Q_k, V_k, t_k) + sign · (D P)_k` over `range`, where `D P`
/// is a discrete operator already applied to the momentum sequence.
fn assemble<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    v: &ShiftedSequence,
    dp: &ShiftedSequence,
    sign: f64,
    range: RangeInclusive<usize>,
) -> Result<ResidualField> {
    let grid = *q.grid();
    let d = q.dim();
    let (first, last) = (*range.start(), *range.end());
    let mut values = Vec::with_capacity((last - first + 1) * d);
    let mut lx = vec![0.0; d];
    for k in range {
        l.grad_x(q.point(k), v.at(k), grid.node(k), &mut lx);
        values.extend(lx.iter().zip(dp.at(k)).map(|(x, y)| x + sign * y));
    }
    ResidualField::new(grid, d, first, last, values)
}

/// Direct finite-difference embedding of the Euler–Lagrange equation:
/// `∂L/∂x(Q, -σΔσQ, τ) + σ Δσ(∂L/∂v(Q, -σΔσQ, τ))`.
///
/// Both operators act on the same side, so the range is `2..N` for `σ = -`
/// and `0..N-2` for `σ = +`.
pub fn residual_direct_classical<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
) -> Result<ResidualField> {
    check_dim(l, q)?;
    let n = q.grid().n();
    if n < 3 {
        return domain(format!("direct classical scheme needs N >= 3, got {n}"));
    }
    let v = velocity_classical(q, side);
    let p = momentum_sequence(l, q, &v).padded();
    let (dp, range) = match side {
        Side::Minus => (delta_minus(&p), 2..=n),
        Side::Plus => (delta_plus(&p), 0..=n - 2),
    };
    assemble(l, q, &v, &dp, side.sign(), range)
}

/// Variational integrator of the finite-difference embedding: the gradient
/// of the discrete functional, on `1..N-1`.
pub fn residual_vi_classical<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
) -> Result<ResidualField> {
    functional_gradient(l, q, side, &Embedding::Classical)
}

/// Direct embedding of the asymmetric Euler–Lagrange equation:
/// `∂L/∂x(Q, -σΔσQ, τ) - σ Δ_{-σ}(∂L/∂v(Q, -σΔσQ, τ))` on `1..N-1`.
pub fn residual_asymmetric_direct<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
) -> Result<ResidualField> {
    check_dim(l, q)?;
    let n = q.grid().n();
    let v = velocity_classical(q, side);
    let p = momentum_sequence(l, q, &v).padded();
    let dp = match side.opposite() {
        Side::Plus => delta_plus(&p),
        Side::Minus => delta_minus(&p),
    };
    assemble(l, q, &v, &dp, -side.sign(), 1..=n - 1)
}

/// Direct Grünwald–Letnikov embedding of the fractional Euler–Lagrange
/// equation: `∂L/∂x(Q, -σΔ^α_σQ, τ) - σ Δ^α_{-σ}(∂L/∂v(…))` on `1..N-1`.
pub fn residual_direct_fractional<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
    alpha: f64,
) -> Result<ResidualField> {
    check_alpha(alpha)?;
    check_dim(l, q)?;
    let n = q.grid().n();
    let w = gl_coefficients(alpha, n)?;
    let mut v = match side {
        Side::Minus => delta_alpha_minus_with(q, &w)?,
        Side::Plus => delta_alpha_plus_with(q, &w)?,
    };
    if side == Side::Plus {
        for k in 0..n {
            v.at_mut(k).iter_mut().for_each(|x| *x = -*x);
        }
    }
    let p = momentum_sequence(l, q, &v).padded();
    let dp = match side.opposite() {
        Side::Plus => delta_alpha_plus_with(&p, &w)?,
        Side::Minus => delta_alpha_minus_with(&p, &w)?,
    };
    assemble(l, q, &v, &dp, -side.sign(), 1..=n - 1)
}

/// Variational integrator of the Grünwald–Letnikov embedding, on `1..N-1`.
pub fn residual_vi_fractional<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
    alpha: f64,
) -> Result<ResidualField> {
    let e = Embedding::fractional(alpha, q.grid().n())?;
    functional_gradient(l, q, side, &e)
}

/// Forward-difference embedding of `q'' + q' + q = 0`:
/// `(Q_{k+2} - 2Q_{k+1} + Q_k)/h² + (Q_{k+1} - Q_k)/h + Q_k` for `k = 0..N-2`.
pub fn newton_friction_direct(q: &Trajectory) -> Result<ResidualField> {
    let grid = *q.grid();
    let n = grid.n();
    let h = grid.h();
    let d = q.dim();
    let mut values = Vec::with_capacity((n - 1) * d);
    for k in 0..=n - 2 {
        let (q0, q1, q2) = (q.point(k), q.point(k + 1), q.point(k + 2));
        for i in 0..d {
            values.push((q2[i] - 2.0 * q1[i] + q0[i]) / (h * h) + (q1[i] - q0[i]) / h + q0[i]);
        }
    }
    ResidualField::new(grid, d, 0, n - 2, values)
}

/// Pair of routes compared by [`coherence_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparison {
    /// Direct finite-difference embedding vs variational integrator.
    Classical,
    /// Direct embedding of the asymmetric equation vs variational integrator.
    Asymmetric,
    /// Direct Grünwald–Letnikov embedding vs fractional variational integrator.
    Fractional { alpha: f64 },
}

impl Comparison {
    pub fn name(&self) -> &'static str {
        match self {
            Comparison::Classical => "classical",
            Comparison::Asymmetric => "asymmetric",
            Comparison::Fractional { .. } => "fractional",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Comparison::Fractional { alpha } => Some(alpha),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Coherent,
    NotCoherent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Coherent => "COHERENT",
            Verdict::NotCoherent => "NOT COHERENT",
        })
    }
}

/// Relative tolerance on the gap between the two routes.
pub const COHERENCE_TOL: f64 = 1e-10;

/// Outcome of comparing the two routes on their shared indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub comparison: Comparison,
    pub side: Side,
    pub n: usize,
    /// Largest absolute componentwise difference.
    pub gap: f64,
    /// Index where the gap is attained.
    pub witness: usize,
    /// Largest residual magnitude over both routes.
    pub scale: f64,
    pub shared: RangeInclusive<usize>,
    pub verdict: Verdict,
}

impl CoherenceReport {
    pub const CSV_HEADER: &'static str = "scheme,sigma,alpha,N,gap,verdict";

    pub fn csv_row(&self) -> String {
        let alpha = self.comparison.alpha().map(fmt_f64).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.comparison.name(),
            self.side,
            alpha,
            self.n,
            fmt_f64(self.gap),
            self.verdict
        )
    }
}

impl fmt::Display for CoherenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} sigma={}", self.comparison.name(), self.side)?;
        if let Some(a) = self.comparison.alpha() {
            write!(f, " alpha={a}")?;
        }
        write!(
            f,
            " N={} shared={}..={} gap={:e} at k={} (scale {:e}): {}",
            self.n,
            self.shared.start(),
            self.shared.end(),
            self.gap,
            self.witness,
            self.scale,
            self.verdict
        )
    }
}

/// Assembles both routes for `comparison`, restricts them to their common
/// indices and reports the largest gap.
pub fn coherence_report<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
    comparison: Comparison,
) -> Result<CoherenceReport> {
    let (direct, variational) = match comparison {
        Comparison::Classical => (
            residual_direct_classical(l, q, side)?,
            residual_vi_classical(l, q, side)?,
        ),
        Comparison::Asymmetric => (
            residual_asymmetric_direct(l, q, side)?,
            residual_vi_classical(l, q, side)?,
        ),
        Comparison::Fractional { alpha } => (
            residual_direct_fractional(l, q, side, alpha)?,
            residual_vi_fractional(l, q, side, alpha)?,
        ),
    };
    let lo = *direct
        .index_range()
        .start()
        .max(variational.index_range().start());
    let hi = *direct
        .index_range()
        .end()
        .min(variational.index_range().end());
    if lo > hi {
        return domain("the two residuals share no index");
    }
    let mut gap = 0.0_f64;
    let mut witness = lo;
    let mut scale = 0.0_f64;
    for k in lo..=hi {
        let (a, b) = (direct.at(k), variational.at(k));
        scale = scale.max(max_abs(a)).max(max_abs(b));
        for (x, y) in a.iter().zip(b) {
            let g = (x - y).abs();
            if g > gap || g.is_nan() {
                gap = g;
                witness = k;
            }
        }
    }
    let verdict = if gap <= COHERENCE_TOL * (1.0 + scale) {
        Verdict::Coherent
    } else {
        Verdict::NotCoherent
    };
    Ok(CoherenceReport {
        comparison,
        side,
        n: q.grid().n(),
        gap,
        witness,
        scale,
        shared: lo..=hi,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample, sample_scalar};
    use crate::lagrangian::{FnLagrangian, Problem};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cubes(n: usize) -> Trajectory {
        let g = make_grid(0.0, n as f64, n).unwrap();
        sample_scalar(&g, |t| t * t * t)
    }

    fn close_fields(a: &ResidualField, b: &ResidualField, rel: f64) {
        assert_eq!(a.index_range(), b.index_range());
        let scale = 1.0 + max_abs(a.values()).max(max_abs(b.values()));
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= rel * scale, "{x} vs {y}");
        }
    }

    #[test]
    fn direct_classical_cubic() {
        let l = Problem::Free.lagrangian(1);
        let r = residual_direct_classical(&l, &cubes(4), Side::Minus).unwrap();
        assert_eq!(r.index_range(), 2..=4);
        assert_eq!(r.values(), &[-6.0, -12.0, -18.0]);
        let r = residual_direct_classical(&l, &cubes(4), Side::Plus).unwrap();
        assert_eq!(r.index_range(), 0..=2);
    }

    #[test]
    fn direct_classical_needs_three_intervals() {
        let l = Problem::Free.lagrangian(1);
        assert!(residual_direct_classical(&l, &cubes(2), Side::Minus).is_err());
    }

    #[test]
    fn linear_trajectories_annihilated() {
        let l = Problem::Free.lagrangian(2);
        let g = make_grid(0.0, 2.0, 8).unwrap();
        let q = sample(&g, 2, |t, out| {
            out[0] = 3.0 * t - 1.0;
            out[1] = -0.5 * t;
        });
        for side in [Side::Plus, Side::Minus] {
            for r in [
                residual_direct_classical(&l, &q, side).unwrap(),
                residual_vi_classical(&l, &q, side).unwrap(),
                residual_asymmetric_direct(&l, &q, side).unwrap(),
            ] {
                assert!(max_abs(r.values()) < 1e-12);
            }
        }
    }

    #[test]
    fn vi_classical_cubic() {
        let l = Problem::Free.lagrangian(1);
        let r = residual_vi_classical(&l, &cubes(4), Side::Minus).unwrap();
        assert_eq!(r.index_range(), 1..=3);
        assert_eq!(r.values(), &[-6.0, -12.0, -18.0]);
    }

    #[test]
    fn fractional_hand_case_both_routes() {
        let l = Problem::Free.lagrangian(1);
        let g = make_grid(0.0, 3.0, 3).unwrap();
        let q = Trajectory::from_scalars(g, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let d = residual_direct_fractional(&l, &q, Side::Minus, 0.5).unwrap();
        let v = residual_vi_fractional(&l, &q, Side::Minus, 0.5).unwrap();
        assert_eq!(d.values(), &[0.015625, 0.5625]);
        assert_eq!(v.values(), &[0.015625, 0.5625]);

        let z = Trajectory::zeros(g, 1);
        assert!(residual_direct_fractional(&l, &z, Side::Plus, 0.3)
            .unwrap()
            .values()
            .iter()
            .all(|&x| x == 0.0));
        assert!(residual_direct_fractional(&l, &q, Side::Minus, 1.2).is_err());
        assert!(residual_vi_fractional(&l, &q, Side::Minus, -0.2).is_err());
    }

    #[test]
    fn fractional_at_order_one_is_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let l = Problem::Harmonic { omega: 1.1 }.lagrangian(1);
        let g = make_grid(0.0, 1.0, 10).unwrap();
        let q = sample_scalar(&g, |_| rng.random_range(-1.0..1.0));
        for side in [Side::Plus, Side::Minus] {
            let c = residual_vi_classical(&l, &q, side).unwrap();
            close_fields(
                &residual_direct_fractional(&l, &q, side, 1.0).unwrap(),
                &c,
                1e-14,
            );
            close_fields(
                &residual_vi_fractional(&l, &q, side, 1.0).unwrap(),
                &c,
                1e-14,
            );
        }
    }

    #[test]
    fn asymmetric_routes_agree_for_general_lagrangian() {
        let l = FnLagrangian::new(
            1,
            |x: &[f64], v: &[f64], t| (1.0 + t) * v[0] * v[0] * x[0].cos() - x[0] * x[0],
            |x: &[f64], v: &[f64], t, out: &mut [f64]| {
                out[0] = -(1.0 + t) * v[0] * v[0] * x[0].sin() - 2.0 * x[0]
            },
            |x: &[f64], v: &[f64], t, out: &mut [f64]| out[0] = 2.0 * (1.0 + t) * v[0] * x[0].cos(),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = make_grid(0.0, 1.0, 17).unwrap();
        for side in [Side::Plus, Side::Minus] {
            let q = sample_scalar(&g, |_| rng.random_range(-1.0..1.0));
            close_fields(
                &residual_asymmetric_direct(&l, &q, side).unwrap(),
                &residual_vi_classical(&l, &q, side).unwrap(),
                1e-12,
            );
            for alpha in [0.3, 0.75] {
                close_fields(
                    &residual_direct_fractional(&l, &q, side, alpha).unwrap(),
                    &residual_vi_fractional(&l, &q, side, alpha).unwrap(),
                    1e-12,
                );
            }
        }
    }

    #[test]
    fn newton_friction_matches_operator_composition() {
        // q'' -> (-Δ+)(-Δ+) Q, q' -> -Δ+ Q on the forward embedding.
        let g = make_grid(0.0, 1.0, 5).unwrap();
        let q = Trajectory::from_scalars(g, &[1.0, 0.5, -0.25, 2.0, 0.0, 3.0]).unwrap();
        let r = newton_friction_direct(&q).unwrap();
        assert_eq!(r.index_range(), 0..=3);

        let d1 = delta_plus(&q);
        let d1_full = d1.padded();
        let d2 = delta_plus(&d1_full);
        let h = g.h();
        for k in 0..=3 {
            let composed = d2.at(k)[0] - d1.at(k)[0] + q.point(k)[0];
            assert!((r.at(k)[0] - composed).abs() <= 1e-12 * (1.0 / (h * h)));
            let hand = (q.point(k + 2)[0] - 2.0 * q.point(k + 1)[0] + q.point(k)[0]) / (h * h)
                + (q.point(k + 1)[0] - q.point(k)[0]) / h
                + q.point(k)[0];
            assert_eq!(r.at(k)[0], hand);
        }
        // Hand values at h = 0.2, k = 0: (−0.25 − 1 + 1)/0.04 + (0.5 − 1)/0.2 + 1.
        assert!((r.at(0)[0] - (-6.25 - 2.5 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn classical_witness_gap_is_six() {
        let l = Problem::Free.lagrangian(1);
        let rep = coherence_report(&l, &cubes(4), Side::Minus, Comparison::Classical).unwrap();
        assert_eq!(rep.shared, 2..=3);
        assert_eq!(rep.gap, 6.0);
        assert_eq!(rep.verdict, Verdict::NotCoherent);
        let csv = rep.csv_row();
        assert!(
            csv.starts_with("classical,-,,4,6.0000000000000000e0,NOT COHERENT"),
            "{csv}"
        );
    }

    #[test]
    fn coherent_comparisons() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let l = Problem::Pendulum { omega: 1.0 }.lagrangian(2);
        let g = make_grid(0.0, 1.0, 32).unwrap();
        for side in [Side::Plus, Side::Minus] {
            let q = sample(&g, 2, |_, out| {
                out.iter_mut()
                    .for_each(|x| *x = rng.random_range(-1.0..1.0))
            });
            for c in [
                Comparison::Asymmetric,
                Comparison::Fractional { alpha: 0.5 },
                Comparison::Fractional { alpha: 0.9 },
            ] {
                let rep = coherence_report(&l, &q, side, c).unwrap();
                assert_eq!(rep.verdict, Verdict::Coherent, "{rep}");
            }
            let rep = coherence_report(&l, &q, side, Comparison::Classical).unwrap();
            assert_eq!(rep.verdict, Verdict::NotCoherent, "{rep}");
        }
    }

    #[test]
    fn scheme_kind_dispatch() {
        let l = Problem::Free.lagrangian(1);
        let q = cubes(4);
        let k = SchemeKind::from_name("direct", Side::Minus, None).unwrap();
        assert_eq!(k.residual(&l, &q).unwrap().values(), &[-6.0, -12.0, -18.0]);
        assert!(SchemeKind::from_name("vi-fractional", Side::Minus, None).is_err());
        let k = SchemeKind::from_name("vi-fractional", Side::Plus, Some(0.5)).unwrap();
        assert_eq!(k.alpha(), Some(0.5));
        assert_eq!(k.side(), Side::Plus);
        assert!(SchemeKind::from_name("rk4", Side::Plus, None).is_err());
    }
}
