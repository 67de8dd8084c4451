//! Grünwald–Letnikov weights and the discrete fractional operators built
//! from them, together with the Gamma function and the closed-form
//! Riemann–Liouville derivative of a monomial used as a consistency oracle.
//!
//! Both operators cost `O(N²)` by direct summation. Sums longer than 128
//! terms are accumulated with compensation.

use std::f64::consts::PI;

use crate::accum::sum_terms;
use crate::diffops::dot;
use crate::error::{domain, Result};
use crate::grid::{ShiftedSequence, Side, Trajectory};

/// Signed binomial weights `w_r = (-1)^r C(α, r)` for `r = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GlCoefficients {
    alpha: f64,
    w: Vec<f64>,
}

impl GlCoefficients {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Largest weight index available.
    pub fn order(&self) -> usize {
        self.w.len() - 1
    }

    /// Partial sum `S_m = Σ_{r=0}^{m} w_r`.
    pub fn partial_sum(&self, m: usize) -> f64 {
        self.w[..=m].iter().sum()
    }
}

/// Weights by the recurrence `w_0 = 1`, `w_r = w_{r-1} (r - 1 - α) / r`.
pub fn gl_coefficients(alpha: f64, n: usize) -> Result<GlCoefficients> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("fractional order must be positive, got {alpha}"));
    }
    let mut w = Vec::with_capacity(n + 1);
    w.push(1.0);
    for r in 1..=n {
        let prev = w[r - 1];
        let rf = r as f64;
        w.push(prev * (rf - 1.0 - alpha) / rf);
    }
    Ok(GlCoefficients { alpha, w })
}

fn weights_for(q: &Trajectory, alpha: f64) -> Result<GlCoefficients> {
    gl_coefficients(alpha, q.grid().n())
}

fn check_weights(q: &Trajectory, w: &GlCoefficients) -> Result<()> {
    if w.order() < q.grid().n() {
        return domain(format!(
            "need {} weights, have {}",
            q.grid().n() + 1,
            w.w.len()
        ));
    }
    Ok(())
}

/// `(Δ^α- Q)_k = h^{-α} Σ_{r=0}^{k} w_r Q_{k-r}` for `k = 1..N`.
pub fn delta_alpha_minus(q: &Trajectory, alpha: f64) -> Result<ShiftedSequence> {
    delta_alpha_minus_with(q, &weights_for(q, alpha)?)
}

/// [`delta_alpha_minus`] with precomputed weights (at least `N + 1` of them).
pub fn delta_alpha_minus_with(q: &Trajectory, w: &GlCoefficients) -> Result<ShiftedSequence> {
    check_weights(q, w)?;
    let grid = *q.grid();
    let d = q.dim();
    let scale = grid.h().powf(-w.alpha);
    let mut out = ShiftedSequence::zeros(grid, d, Side::Minus);
    for k in 1..=grid.n() {
        let o = out.at_mut(k);
        for (i, oi) in o.iter_mut().enumerate() {
            let s = sum_terms(k + 1, (0..=k).map(|r| w.w[r] * q.point(k - r)[i]));
            *oi = scale * s;
        }
    }
    Ok(out)
}

/// `(Δ^α+ Q)_k = h^{-α} Σ_{r=0}^{N-k} w_r Q_{k+r}` for `k = 0..N-1`.
pub fn delta_alpha_plus(q: &Trajectory, alpha: f64) -> Result<ShiftedSequence> {
    delta_alpha_plus_with(q, &weights_for(q, alpha)?)
}

/// [`delta_alpha_plus`] with precomputed weights (at least `N + 1` of them).
pub fn delta_alpha_plus_with(q: &Trajectory, w: &GlCoefficients) -> Result<ShiftedSequence> {
    check_weights(q, w)?;
    let grid = *q.grid();
    let n = grid.n();
    let d = q.dim();
    let scale = grid.h().powf(-w.alpha);
    let mut out = ShiftedSequence::zeros(grid, d, Side::Plus);
    for k in 0..n {
        let o = out.at_mut(k);
        for (i, oi) in o.iter_mut().enumerate() {
            let s = sum_terms(n - k + 1, (0..=n - k).map(|r| w.w[r] * q.point(k + r)[i]));
            *oi = scale * s;
        }
    }
    Ok(out)
}

/// `Δ^α_σ` selected by side.
pub fn delta_alpha_with(q: &Trajectory, w: &GlCoefficients, side: Side) -> Result<ShiftedSequence> {
    match side {
        Side::Plus => delta_alpha_plus_with(q, w),
        Side::Minus => delta_alpha_minus_with(q, w),
    }
}

fn zero_endpoints(q: &Trajectory) -> bool {
    let n = q.grid().n();
    q.point(0).iter().chain(q.point(n)).all(|&x| x == 0.0)
}

/// Evaluates both sides of
/// `Σ_{k=1}^{N} (Δ^α- F)_k·G_k = Σ_{k=0}^{N-1} F_k·(Δ^α+ G)_k`,
/// which holds when `F` or `G` vanishes at both endpoints.
pub fn check_discrete_frac_ibp(f: &Trajectory, g: &Trajectory, alpha: f64) -> Result<(f64, f64)> {
    f.check_compatible(g)?;
    if !(zero_endpoints(f) || zero_endpoints(g)) {
        return domain("fractional summation by parts needs F or G to vanish at both endpoints");
    }
    let n = f.grid().n();
    let w = weights_for(f, alpha)?;
    let df = delta_alpha_minus_with(f, &w)?;
    let dg = delta_alpha_plus_with(g, &w)?;
    let lhs = sum_terms(n, (1..=n).map(|k| dot(df.at(k), g.point(k))));
    let rhs = sum_terms(n, (0..n).map(|k| dot(f.point(k), dg.at(k))));
    Ok((lhs, rhs))
}

// Lanczos approximation, g = 7, 9 terms.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for `x > 0`.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("gamma_fn is defined here for x > 0, got {x}"));
    }
    if x.fract() == 0.0 && x <= 30.0 {
        let mut f = 1.0;
        for i in 2..(x as u32) {
            f *= i as f64;
        }
        return Ok(f);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * lanczos(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Left Riemann–Liouville derivative of order `alpha` of `(t - a)^beta`,
/// evaluated at `t - a = s`: `Γ(β+1) / Γ(β+1-α) · s^{β-α}`.
pub fn rl_monomial_derivative(beta: f64, alpha: f64, s: f64) -> Result<f64> {
    if !(beta > -1.0) {
        return domain(format!("monomial exponent must exceed -1, got {beta}"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("order must lie in (0, 1], got {alpha}"));
    }
    if !(s > 0.0) {
        return domain(format!("evaluation point must satisfy t - a > 0, got {s}"));
    }
    let denom_arg = beta + 1.0 - alpha;
    if denom_arg == 0.0 {
        // 1/Γ(0) = 0: the derivative of order 1 of a constant.
        return Ok(0.0);
    }
    Ok(gamma_fn(beta + 1.0)? / gamma_fn(denom_arg)? * s.powf(beta - alpha))
}
