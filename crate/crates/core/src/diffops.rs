//! Forward and backward finite differences, the left/right rectangle
//! quadrature and the discrete integration-by-parts identity.
//!
//! Sign convention: `Δ+ Q = (Q_k - Q_{k+1}) / h` on `0..N-1` and
//! `Δ- Q = (Q_k - Q_{k-1}) / h` on `1..N`, so the discrete analogue of the
//! time derivative is `-σ Δσ`.

use crate::error::{domain, Result};
use crate::grid::{Grid, ShiftedSequence, Side, Trajectory};

/// `(Δ+ Q)_k = (Q_k - Q_{k+1}) / h` for `k = 0..N-1`.
pub fn delta_plus(q: &Trajectory) -> ShiftedSequence {
    let grid = *q.grid();
    let h = grid.h();
    let mut out = ShiftedSequence::zeros(grid, q.dim(), Side::Plus);
    for k in 0..grid.n() {
        let (a, b) = (q.point(k), q.point(k + 1));
        for (o, (x, y)) in out.at_mut(k).iter_mut().zip(a.iter().zip(b)) {
            *o = (x - y) / h;
        }
    }
    out
}

/// `(Δ- Q)_k = (Q_k - Q_{k-1}) / h` for `k = 1..N`.
pub fn delta_minus(q: &Trajectory) -> ShiftedSequence {
    let grid = *q.grid();
    let h = grid.h();
    let mut out = ShiftedSequence::zeros(grid, q.dim(), Side::Minus);
    for k in 1..=grid.n() {
        let (a, b) = (q.point(k), q.point(k - 1));
        for (o, (x, y)) in out.at_mut(k).iter_mut().zip(a.iter().zip(b)) {
            *o = (x - y) / h;
        }
    }
    out
}

/// `Δσ` selected by side.
pub fn delta(q: &Trajectory, side: Side) -> ShiftedSequence {
    match side {
        Side::Plus => delta_plus(q),
        Side::Minus => delta_minus(q),
    }
}

/// Rectangle rule over `I_σ`: `h Σ_{k∈I_σ} v_k`. Scalar sequences only.
pub fn gauss_quadrature(v: &ShiftedSequence) -> Result<f64> {
    if v.dim() != 1 {
        return domain(format!(
            "quadrature needs a scalar sequence, got dim {}",
            v.dim()
        ));
    }
    Ok(gauss_sum(v.grid(), v.side(), |k| v.at(k)[0]))
}

/// `h Σ_{k∈I_σ} f(k)`.
pub fn gauss_sum<F: FnMut(usize) -> f64>(grid: &Grid, side: Side, mut f: F) -> f64 {
    grid.h() * side.index_range(grid.n()).map(&mut f).sum::<f64>()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Evaluates both sides of
/// `Σ_{k=1}^{N} (Δ- F)_k·G_k = Σ_{k=0}^{N-1} F_k·(Δ+ G)_k + (F_N·G_N - F_0·G_0)/h`.
///
/// Returns `(lhs, rhs)`; the two agree up to rounding for any `F`, `G`.
pub fn check_discrete_ibp(f: &Trajectory, g: &Trajectory) -> Result<(f64, f64)> {
    f.check_compatible(g)?;
    let n = f.grid().n();
    let h = f.grid().h();
    let df = delta_minus(f);
    let dg = delta_plus(g);
    let lhs: f64 = (1..=n).map(|k| dot(df.at(k), g.point(k))).sum();
    let interior: f64 = (0..n).map(|k| dot(f.point(k), dg.at(k))).sum();
    let boundary = (dot(f.point(n), g.point(n)) - dot(f.point(0), g.point(0))) / h;
    Ok((lhs, interior + boundary))
}
