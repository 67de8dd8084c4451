//! Uniform time grids, discrete curves on them and shifted index-range
//! sequences.
//!
//! All containers store their entries as one flat `Vec<f64>` with stride
//! `dim`, so entry `k` of a trajectory lives at `values[k * dim..(k + 1) * dim]`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::ops::RangeInclusive;

use crate::error::{domain, Error, Result};

/// Uniform partition of `[a, b]` into `n` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return domain(format!("grid bounds must be finite, got [{a}, {b}]"));
        }
        if b <= a {
            return domain(format!("grid needs b > a, got a = {a}, b = {b}"));
        }
        if n < 2 {
            return domain(format!("grid needs at least 2 subintervals, got {n}"));
        }
        Ok(Grid {
            a,
            b,
            n,
            h: (b - a) / n as f64,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals `N`; the grid has `N + 1` nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Node `t_k = a + k (b - a) / N`, with `t_N = b` exactly.
    pub fn node(&self, k: usize) -> f64 {
        assert!(k <= self.n, "node index {k} outside 0..={}", self.n);
        if k == self.n {
            self.b
        } else {
            self.a + k as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.node(k)).collect()
    }

    /// Two grids are compatible when they describe the same partition.
    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "[{}, {}] / {} vs [{}, {}] / {}",
                self.a, self.b, self.n, other.a, other.b, other.n
            )))
        }
    }

    /// Interior nodes `1..=N-1`, the unknowns of a fixed-endpoint problem.
    pub fn interior(&self) -> RangeInclusive<usize> {
        1..=self.n - 1
    }
}

/// Shorthand for [`Grid::new`].
pub fn make_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    Grid::new(a, b, n)
}

/// The `σ = ±` label used throughout: which one-sided difference, which
/// quadrature rule and which index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// `+1.0` for [`Side::Plus`], `-1.0` for [`Side::Minus`].
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    /// `I_+ = {0..N-1}`, `I_- = {1..N}`.
    pub fn index_range(self, n: usize) -> RangeInclusive<usize> {
        match self {
            Side::Plus => 0..=n - 1,
            Side::Minus => 1..=n,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "p" => Ok(Side::Plus),
            "-" | "minus" | "m" => Ok(Side::Minus),
            other => Err(Error::Parse(format!(
                "unknown side {other:?}, expected + or -"
            ))),
        }
    }
}

/// Flat access to the entries of a discrete field.
pub trait Values {
    fn values(&self) -> &[f64];
}

impl Values for [f64] {
    fn values(&self) -> &[f64] {
        self
    }
}

impl Values for Vec<f64> {
    fn values(&self) -> &[f64] {
        self
    }
}

/// Maximum absolute component. NaN entries propagate.
pub fn inf_norm<V: Values + ?Sized>(x: &V) -> Result<f64> {
    let v = x.values();
    if v.is_empty() {
        return domain("inf_norm of an empty field");
    }
    Ok(max_abs(v))
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, &x| {
        if x.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(x.abs())
        }
    })
}

/// Discrete curve `Q_0..Q_N` of `dim`-dimensional points on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: Grid,
    dim: usize,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(grid: Grid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return domain("trajectory dimension must be positive");
        }
        let expected = (grid.n() + 1) * dim;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(Trajectory { grid, dim, values })
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        assert!(dim > 0);
        Trajectory {
            grid,
            dim,
            values: vec![0.0; (grid.n() + 1) * dim],
        }
    }

    /// One-dimensional trajectory from `N + 1` scalars.
    pub fn from_scalars(grid: Grid, q: &[f64]) -> Result<Self> {
        Trajectory::new(grid, 1, q.to_vec())
    }

    pub fn from_points(grid: Grid, points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            values.extend_from_slice(p);
        }
        Trajectory::new(grid, dim, values)
    }

    /// Straight line from `qa` at `t_0` to `qb` at `t_N`.
    pub fn linear(grid: Grid, qa: &[f64], qb: &[f64]) -> Result<Self> {
        if qa.len() != qb.len() {
            return Err(Error::DimensionMismatch {
                expected: qa.len(),
                found: qb.len(),
            });
        }
        let dim = qa.len();
        let n = grid.n();
        let mut q = Trajectory::zeros(grid, dim);
        for k in 0..=n {
            let s = k as f64 / n as f64;
            for (i, x) in q.point_mut(k).iter_mut().enumerate() {
                *x = if k == n {
                    qb[i]
                } else {
                    qa[i] + s * (qb[i] - qa[i])
                };
            }
        }
        Ok(q)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of entries, `N + 1`.
    pub fn len(&self) -> usize {
        self.grid.n() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn point_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[k * self.dim..(k + 1) * self.dim]
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    /// Trajectory with entry `k` moved to `N - k`.
    pub fn reversed(&self) -> Trajectory {
        let mut values = Vec::with_capacity(self.values.len());
        for p in self.values.chunks_exact(self.dim).rev() {
            values.extend_from_slice(p);
        }
        Trajectory {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }

    /// Checks that `other` lives on the same grid with the same dimension.
    pub fn check_compatible(&self, other: &Trajectory) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// CSV with header `k,t,q0[,q1,...]`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,t");
        for i in 0..self.dim {
            let _ = write!(s, ",q{i}");
        }
        s.push('\n');
        for k in 0..self.len() {
            let _ = write!(s, "{k},{}", fmt_f64(self.grid.node(k)));
            for &x in self.point(k) {
                s.push(',');
                s.push_str(&fmt_f64(x));
            }
            s.push('\n');
        }
        s
    }

    /// Parses the format written by [`Trajectory::write_csv`].
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty trajectory csv".into()))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.len() < 3 || cols[0] != "k" || cols[1] != "t" {
            return Err(Error::Parse(format!("bad trajectory header {header:?}")));
        }
        let dim = cols.len() - 2;
        let mut ts = Vec::new();
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != dim + 2 {
                return Err(Error::Parse(format!(
                    "row {row}: expected {} fields",
                    dim + 2
                )));
            }
            let k: usize = fields[0]
                .parse()
                .map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
            if k != row {
                return Err(Error::Parse(format!("row {row}: index {k} out of order")));
            }
            ts.push(parse_f64(fields[1])?);
            for f in &fields[2..] {
                values.push(parse_f64(f)?);
            }
        }
        if ts.len() < 3 {
            return Err(Error::Parse("trajectory csv needs at least 3 rows".into()));
        }
        let grid = Grid::new(ts[0], ts[ts.len() - 1], ts.len() - 1)?;
        Trajectory::new(grid, dim, values)
    }
}

impl Values for Trajectory {
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Samples `f` at every grid node. `f` writes the `dim` components of
/// `f(t)` into its output slice.
pub fn sample<F>(grid: &Grid, dim: usize, mut f: F) -> Trajectory
where
    F: FnMut(f64, &mut [f64]),
{
    let mut q = Trajectory::zeros(*grid, dim);
    for k in 0..=grid.n() {
        let t = grid.node(k);
        f(t, q.point_mut(k));
    }
    q
}

pub fn sample_scalar<F: FnMut(f64) -> f64>(grid: &Grid, mut f: F) -> Trajectory {
    sample(grid, 1, |t, out| out[0] = f(t))
}

/// Sequence of `N` entries indexed by `I_σ` (see [`Side::index_range`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedSequence {
    grid: Grid,
    dim: usize,
    side: Side,
    values: Vec<f64>,
}

impl ShiftedSequence {
    pub fn new(grid: Grid, dim: usize, side: Side, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return domain("sequence dimension must be positive");
        }
        let expected = grid.n() * dim;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(ShiftedSequence {
            grid,
            dim,
            side,
            values,
        })
    }

    pub(crate) fn zeros(grid: Grid, dim: usize, side: Side) -> Self {
        ShiftedSequence {
            grid,
            dim,
            side,
            values: vec![0.0; grid.n() * dim],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn index_range(&self) -> RangeInclusive<usize> {
        self.side.index_range(self.grid.n())
    }

    fn offset(&self) -> usize {
        match self.side {
            Side::Plus => 0,
            Side::Minus => 1,
        }
    }

    /// Entry with grid index `k`.
    ///
    /// Panics when `k` is outside `I_σ`.
    pub fn at(&self, k: usize) -> &[f64] {
        self.get(k).unwrap_or_else(|| {
            panic!(
                "index {k} outside I{} = {:?}",
                self.side,
                self.index_range()
            )
        })
    }

    pub fn get(&self, k: usize) -> Option<&[f64]> {
        if !self.index_range().contains(&k) {
            return None;
        }
        let j = k - self.offset();
        Some(&self.values[j * self.dim..(j + 1) * self.dim])
    }

    pub(crate) fn at_mut(&mut self, k: usize) -> &mut [f64] {
        assert!(
            self.index_range().contains(&k),
            "index {k} outside I{}",
            self.side
        );
        let j = k - self.offset();
        &mut self.values[j * self.dim..(j + 1) * self.dim]
    }

    /// `(k, entry)` pairs over `I_σ`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &[f64])> {
        let off = self.offset();
        self.values
            .chunks_exact(self.dim)
            .enumerate()
            .map(move |(j, p)| (j + off, p))
    }

    /// Full-length trajectory holding this sequence, with the one node
    /// outside `I_σ` filled with NaN.
    pub fn padded(&self) -> Trajectory {
        let n = self.grid.n();
        let mut values = vec![f64::NAN; (n + 1) * self.dim];
        let start = self.offset() * self.dim;
        values[start..start + self.values.len()].copy_from_slice(&self.values);
        Trajectory {
            grid: self.grid,
            dim: self.dim,
            values,
        }
    }
}

impl Values for ShiftedSequence {
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Full round-trip precision: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}
