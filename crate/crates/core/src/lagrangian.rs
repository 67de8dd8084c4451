//! Lagrangians, the built-in mechanical problems, and discrete Lagrangian
//! functionals with their analytic gradients.
//!
//! A discrete functional is `h Σ_{k∈I_σ} L(Q_k, V_k, t_k)` where the
//! velocity `V = -σ Δσ Q` (classical embedding) or `V = -σ Δ^α_σ Q`
//! (Grünwald–Letnikov embedding). Its gradient is assembled by the chain
//! rule: the `∂L/∂v` sequence is scattered back through the transpose of
//! the velocity stencil.

use std::str::FromStr;

use crate::accum::{CompensatedSum, COMPENSATE_ABOVE};
use crate::diffops::{delta_minus, delta_plus};
use crate::error::{domain, Error, Result};
use crate::fracops::{
    delta_alpha_minus_with, delta_alpha_plus_with, gl_coefficients, GlCoefficients,
};
use crate::grid::{ShiftedSequence, Side, Trajectory};
use crate::schemes::ResidualField;

/// A `C²` function `L(x, v, t)` on `ℝ^d × ℝ^d × [a, b]` with its partial
/// gradients.
pub trait Lagrangian {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64], v: &[f64], t: f64) -> f64;

    /// `∂L/∂x` written into `out`.
    fn grad_x(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]);

    /// `∂L/∂v` written into `out`.
    fn grad_v(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]);
}

impl<L: Lagrangian + ?Sized> Lagrangian for &L {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64], v: &[f64], t: f64) -> f64 {
        (**self).value(x, v, t)
    }
    fn grad_x(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]) {
        (**self).grad_x(x, v, t, out)
    }
    fn grad_v(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]) {
        (**self).grad_v(x, v, t, out)
    }
}

/// Potential energy `U: ℝ^d → ℝ`.
pub trait Potential {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
}

/// Potentials addressable by name from the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuiltinPotential {
    /// `U ≡ 0`.
    Zero,
    /// `U(x) = ½ ω² |x|²`.
    Harmonic { omega: f64 },
    /// `U(x) = ω² Σ (1 - cos x_i)`.
    Pendulum { omega: f64 },
}

impl Potential for BuiltinPotential {
    fn value(&self, x: &[f64]) -> f64 {
        match *self {
            BuiltinPotential::Zero => 0.0,
            BuiltinPotential::Harmonic { omega } => {
                0.5 * omega * omega * x.iter().map(|v| v * v).sum::<f64>()
            }
            BuiltinPotential::Pendulum { omega } => {
                omega * omega * x.iter().map(|v| 1.0 - v.cos()).sum::<f64>()
            }
        }
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        match *self {
            BuiltinPotential::Zero => out.fill(0.0),
            BuiltinPotential::Harmonic { omega } => {
                let w2 = omega * omega;
                out.iter_mut().zip(x).for_each(|(o, v)| *o = w2 * v);
            }
            BuiltinPotential::Pendulum { omega } => {
                let w2 = omega * omega;
                out.iter_mut().zip(x).for_each(|(o, v)| *o = w2 * v.sin());
            }
        }
    }
}

/// `L(x, v, t) = ½ |v|² - U(x)`.
#[derive(Debug, Clone)]
pub struct MechanicalLagrangian<P> {
    potential: P,
    dim: usize,
}

impl<P: Potential> MechanicalLagrangian<P> {
    pub fn new(potential: P, dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        MechanicalLagrangian { potential, dim }
    }

    pub fn potential(&self) -> &P {
        &self.potential
    }
}

impl<P: Potential> Lagrangian for MechanicalLagrangian<P> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64], v: &[f64], _t: f64) -> f64 {
        0.5 * v.iter().map(|u| u * u).sum::<f64>() - self.potential.value(x)
    }

    fn grad_x(&self, x: &[f64], _v: &[f64], _t: f64, out: &mut [f64]) {
        self.potential.gradient(x, out);
        out.iter_mut().for_each(|o| *o = -*o);
    }

    fn grad_v(&self, _x: &[f64], v: &[f64], _t: f64, out: &mut [f64]) {
        out.copy_from_slice(v);
    }
}

/// Lagrangian assembled from three closures `(L, ∂L/∂x, ∂L/∂v)`.
pub struct FnLagrangian<F, Fx, Fv> {
    dim: usize,
    value: F,
    grad_x: Fx,
    grad_v: Fv,
}

impl<F, Fx, Fv> FnLagrangian<F, Fx, Fv>
where
    F: Fn(&[f64], &[f64], f64) -> f64,
    Fx: Fn(&[f64], &[f64], f64, &mut [f64]),
    Fv: Fn(&[f64], &[f64], f64, &mut [f64]),
{
    pub fn new(dim: usize, value: F, grad_x: Fx, grad_v: Fv) -> Self {
        assert!(dim > 0, "dimension must be positive");
        FnLagrangian {
            dim,
            value,
            grad_x,
            grad_v,
        }
    }
}

impl<F, Fx, Fv> Lagrangian for FnLagrangian<F, Fx, Fv>
where
    F: Fn(&[f64], &[f64], f64) -> f64,
    Fx: Fn(&[f64], &[f64], f64, &mut [f64]),
    Fv: Fn(&[f64], &[f64], f64, &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64], v: &[f64], t: f64) -> f64 {
        (self.value)(x, v, t)
    }
    fn grad_x(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]) {
        (self.grad_x)(x, v, t, out)
    }
    fn grad_v(&self, x: &[f64], v: &[f64], t: f64, out: &mut [f64]) {
        (self.grad_v)(x, v, t, out)
    }
}

/// Named built-in problems: `free`, `harmonic`, `pendulum`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Problem {
    Free,
    Harmonic { omega: f64 },
    Pendulum { omega: f64 },
}

impl Problem {
    pub fn from_name(name: &str, omega: f64) -> Result<Self> {
        match name.trim() {
            "free" => Ok(Problem::Free),
            "harmonic" => Ok(Problem::Harmonic { omega }),
            "pendulum" => Ok(Problem::Pendulum { omega }),
            other => Err(Error::Parse(format!(
                "unknown problem {other:?} (expected free, harmonic or pendulum)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Problem::Free => "free",
            Problem::Harmonic { .. } => "harmonic",
            Problem::Pendulum { .. } => "pendulum",
        }
    }

    pub fn potential(&self) -> BuiltinPotential {
        match *self {
            Problem::Free => BuiltinPotential::Zero,
            Problem::Harmonic { omega } => BuiltinPotential::Harmonic { omega },
            Problem::Pendulum { omega } => BuiltinPotential::Pendulum { omega },
        }
    }

    pub fn lagrangian(&self, dim: usize) -> MechanicalLagrangian<BuiltinPotential> {
        MechanicalLagrangian::new(self.potential(), dim)
    }
}

impl FromStr for Problem {
    type Err = Error;

    /// Parses a bare name with `ω = 1`.
    fn from_str(s: &str) -> Result<Self> {
        Problem::from_name(s, 1.0)
    }
}

/// Discretization of the time derivative: finite differences, or
/// Grünwald–Letnikov sums of a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    Classical,
    Fractional(GlCoefficients),
}

impl Embedding {
    /// Grünwald–Letnikov embedding with weights for grids of up to `n`
    /// subintervals. Requires `0 < alpha <= 1`.
    pub fn fractional(alpha: f64, n: usize) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Embedding::Fractional(gl_coefficients(alpha, n)?))
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Embedding::Classical => None,
            Embedding::Fractional(w) => Some(w.alpha()),
        }
    }

    /// Velocity sequence `-σ Δσ Q` (or `-σ Δ^α_σ Q`) on `I_σ`.
    pub fn velocity(&self, q: &Trajectory, side: Side) -> Result<ShiftedSequence> {
        let mut v = match (self, side) {
            (Embedding::Classical, Side::Plus) => delta_plus(q),
            (Embedding::Classical, Side::Minus) => delta_minus(q),
            (Embedding::Fractional(w), Side::Plus) => delta_alpha_plus_with(q, w)?,
            (Embedding::Fractional(w), Side::Minus) => delta_alpha_minus_with(q, w)?,
        };
        if side == Side::Plus {
            negate(&mut v);
        }
        Ok(v)
    }

    /// Adds `Σ_{k∈I_σ} ∂V_k/∂Q_j · P_k` to `acc[j]` for every interior `j`,
    /// where `V` is [`Embedding::velocity`] and `P` lives on `I_σ`.
    fn scatter_transpose(&self, p: &ShiftedSequence, side: Side, acc: &mut Accumulators) {
        let n = p.grid().n();
        let h = p.grid().h();
        match self {
            Embedding::Classical => {
                // Both sides share the stencil V_k = (Q_hi - Q_lo) / h.
                for (k, pk) in p.iter() {
                    let (lo, hi) = match side {
                        Side::Minus => (k - 1, k),
                        Side::Plus => (k, k + 1),
                    };
                    acc.add_scaled(hi, pk, 1.0 / h);
                    acc.add_scaled(lo, pk, -1.0 / h);
                }
            }
            Embedding::Fractional(w) => {
                let c = h.powf(-w.alpha());
                let ws = w.weights();
                for (k, pk) in p.iter() {
                    match side {
                        Side::Minus => {
                            for (r, wr) in ws[..=k].iter().enumerate() {
                                acc.add_scaled(k - r, pk, c * wr);
                            }
                        }
                        Side::Plus => {
                            for (r, wr) in ws[..=n - k].iter().enumerate() {
                                acc.add_scaled(k + r, pk, -c * wr);
                            }
                        }
                    }
                }
            }
        }
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        domain(format!("fractional order must lie in (0, 1], got {alpha}"))
    }
}

fn negate(v: &mut ShiftedSequence) {
    let range = v.index_range();
    for k in range {
        v.at_mut(k).iter_mut().for_each(|x| *x = -*x);
    }
}

/// Per-component sums over the interior nodes `1..N-1`.
struct Accumulators {
    n: usize,
    dim: usize,
    sums: Vec<CompensatedSum>,
    compensated: bool,
    plain: Vec<f64>,
}

impl Accumulators {
    fn new(n: usize, dim: usize) -> Self {
        let len = (n - 1) * dim;
        let compensated = n > COMPENSATE_ABOVE;
        Accumulators {
            n,
            dim,
            sums: if compensated {
                vec![CompensatedSum::new(); len]
            } else {
                Vec::new()
            },
            compensated,
            plain: if compensated {
                Vec::new()
            } else {
                vec![0.0; len]
            },
        }
    }

    fn add_scaled(&mut self, j: usize, x: &[f64], s: f64) {
        if j == 0 || j >= self.n {
            return;
        }
        let base = (j - 1) * self.dim;
        if self.compensated {
            for (acc, v) in self.sums[base..base + self.dim].iter_mut().zip(x) {
                acc.add(s * v);
            }
        } else {
            for (acc, v) in self.plain[base..base + self.dim].iter_mut().zip(x) {
                *acc += s * v;
            }
        }
    }

    fn finish(self) -> Vec<f64> {
        if self.compensated {
            self.sums.iter().map(CompensatedSum::value).collect()
        } else {
            self.plain
        }
    }
}

pub(crate) fn check_dim<L: Lagrangian + ?Sized>(l: &L, q: &Trajectory) -> Result<()> {
    if l.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: q.dim(),
        });
    }
    Ok(())
}

/// `∂L/∂v (Q_k, V_k, t_k)` for `k ∈ I_σ`.
pub(crate) fn momentum_sequence<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    v: &ShiftedSequence,
) -> ShiftedSequence {
    let grid = *q.grid();
    let mut p = ShiftedSequence::zeros(grid, q.dim(), v.side());
    for k in v.index_range() {
        l.grad_v(q.point(k), v.at(k), grid.node(k), p.at_mut(k));
    }
    p
}

/// `h Σ_{k∈I_σ} L(Q_k, V_k, t_k)` for the given embedding.
pub fn discrete_functional<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
    embedding: &Embedding,
) -> Result<f64> {
    check_dim(l, q)?;
    let v = embedding.velocity(q, side)?;
    let grid = q.grid();
    let s: f64 = v
        .index_range()
        .map(|k| l.value(q.point(k), v.at(k), grid.node(k)))
        .sum();
    Ok(grid.h() * s)
}

/// Discrete functional for the finite-difference embedding.
pub fn discrete_functional_classical<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
) -> Result<f64> {
    discrete_functional(l, q, side, &Embedding::Classical)
}

/// Discrete functional for the Grünwald–Letnikov embedding of order `alpha`.
pub fn discrete_functional_fractional<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
    alpha: f64,
) -> Result<f64> {
    let e = Embedding::fractional(alpha, q.grid().n())?;
    discrete_functional(l, q, side, &e)
}

/// `G_k = (1/h) ∂L_h/∂Q_k` for interior `k = 1..N-1`.
///
/// Zeros of this field are exactly the discrete extremals with fixed
/// endpoints.
pub fn functional_gradient<L: Lagrangian + ?Sized>(
    l: &L,
    q: &Trajectory,
    side: Side,
    embedding: &Embedding,
) -> Result<ResidualField> {
    check_dim(l, q)?;
    let grid = *q.grid();
    let n = grid.n();
    let d = q.dim();
    let v = embedding.velocity(q, side)?;
    let p = momentum_sequence(l, q, &v);

    let mut acc = Accumulators::new(n, d);
    embedding.scatter_transpose(&p, side, &mut acc);
    let mut values = acc.finish();

    let mut lx = vec![0.0; d];
    for k in 1..n {
        l.grad_x(q.point(k), v.at(k), grid.node(k), &mut lx);
        for (g, x) in values[(k - 1) * d..k * d].iter_mut().zip(&lx) {
            *g += x;
        }
    }
    ResidualField::new(grid, d, 1, n - 1, values)
}
