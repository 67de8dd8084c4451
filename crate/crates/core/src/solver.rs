//! Newton solver for fixed-endpoint discrete Euler–Lagrange systems, the
//! initial-value marching form of the direct classical scheme, and a dense
//! LU solver.

use std::fmt::Write as _;

use crate::error::{domain, Error, NonConvergence, Result};
use crate::grid::{fmt_f64, max_abs, Grid, Trajectory, Values};
use crate::lagrangian::{check_dim, Lagrangian};
use crate::schemes::SchemeKind;

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks_exact(self.n.max(1))
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// `P A = L U` with unit lower `L`, stored in place.
#[derive(Debug, Clone)]
pub struct LuDecomposition {
    lu: Matrix,
    perm: Vec<usize>,
}

impl LuDecomposition {
    pub fn new(mut a: Matrix) -> Result<Self> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, a[(r, col)].abs()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs == 0.0 || !pivot_abs.is_finite() {
                return Err(Error::SingularMatrix { pivot: col });
            }
            if pivot_row != col {
                perm.swap(pivot_row, col);
                for j in 0..n {
                    a.data.swap(pivot_row * n + j, col * n + j);
                }
            }
            let p = a[(col, col)];
            for r in col + 1..n {
                let factor = a[(r, col)] / p;
                a[(r, col)] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        a.data[r * n + j] -= factor * a.data[col * n + j];
                    }
                }
            }
        }
        Ok(LuDecomposition { lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        Ok(x)
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    LuDecomposition::new(a.clone())?.solve(b)
}

/// Newton iteration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig {
    /// Target for the residual infinity norm.
    pub tol: f64,
    pub max_iter: usize,
    /// Relative finite-difference step: column `j` is perturbed by
    /// `fd_step * (1 + |x_j|)`.
    pub fd_step: f64,
    /// Backtracking factor applied to the step length.
    pub damping: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-12,
            max_iter: 50,
            fd_step: 1e-6,
            damping: 0.5,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return domain(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter < 1 {
            return domain("max_iter must be at least 1");
        }
        if !(self.fd_step > 0.0) {
            return domain(format!("fd_step must be positive, got {}", self.fd_step));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return domain(format!("damping must lie in (0, 1), got {}", self.damping));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual_norm: f64,
    pub step_norm: f64,
}

/// History of a Newton solve. Row `i` holds the residual norm at the
/// start of iteration `i` and the length of the step taken from it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Newton steps taken.
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    pub converged: bool,
    /// Set when the solve stopped at the rounding floor of the residual
    /// rather than below `tol`.
    pub stagnated: bool,
}

impl Diagnostics {
    pub fn final_residual(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |r| r.residual_norm)
    }

    /// CSV with header `iter,residual_norm,step_norm`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,residual_norm,step_norm\n");
        for r in &self.history {
            let _ = writeln!(
                s,
                "{},{},{}",
                r.iter,
                fmt_f64(r.residual_norm),
                fmt_f64(r.step_norm)
            );
        }
        s
    }
}

/// Largest residual that rounding alone can explain for a system with
/// Jacobian norm `jac_norm` at a point of size `x_norm`.
fn rounding_floor(jac_norm: f64, x_norm: f64) -> f64 {
    64.0 * f64::EPSILON * jac_norm * (1.0 + x_norm)
}

struct NewtonOutcome {
    x: Vec<f64>,
    diag: Diagnostics,
}

/// Damped Newton with a forward-difference Jacobian.
///
/// Stops when `|F(x)|∞ <= tol`, or when no step can reduce the residual
/// any further and the residual is already within the rounding floor of
/// the system. Returns the last iterate with `converged = false` otherwise.
fn newton<F>(mut x: Vec<f64>, mut f: F, cfg: &NewtonConfig) -> Result<NewtonOutcome>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    cfg.validate()?;
    let m = x.len();
    let mut diag = Diagnostics::default();
    let mut r = f(&x)?;
    if r.len() != m {
        return domain(format!("system has {} equations for {m} unknowns", r.len()));
    }
    let mut norm = max_abs(&r);
    loop {
        if norm <= cfg.tol {
            diag.history.push(IterationRecord {
                iter: diag.iterations,
                residual_norm: norm,
                step_norm: 0.0,
            });
            diag.converged = true;
            break;
        }
        if !norm.is_finite() || diag.iterations >= cfg.max_iter {
            diag.history.push(IterationRecord {
                iter: diag.iterations,
                residual_norm: norm,
                step_norm: 0.0,
            });
            break;
        }

        let mut jac = Matrix::zeros(m);
        let mut xp = x.clone();
        for j in 0..m {
            let step = cfg.fd_step * (1.0 + x[j].abs());
            xp[j] = x[j] + step;
            let rp = f(&xp)?;
            let actual = xp[j] - x[j];
            xp[j] = x[j];
            for i in 0..m {
                jac[(i, j)] = (rp[i] - r[i]) / actual;
            }
        }
        let floor = rounding_floor(jac.norm_inf(), max_abs(&x));
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = lu_solve(&jac, &rhs)?;

        let mut lambda = 1.0;
        let mut accepted = None;
        while lambda > 1e-10 {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + lambda * b).collect();
            let rt = f(&trial)?;
            let nt = max_abs(&rt);
            if nt < norm {
                accepted = Some((trial, rt, nt));
                break;
            }
            lambda *= cfg.damping;
        }
        let Some((trial, rt, nt)) = accepted else {
            diag.history.push(IterationRecord {
                iter: diag.iterations,
                residual_norm: norm,
                step_norm: 0.0,
            });
            if norm <= floor {
                diag.converged = true;
                diag.stagnated = true;
            }
            break;
        };
        let step_norm = lambda * max_abs(&dx);
        diag.history.push(IterationRecord {
            iter: diag.iterations,
            residual_norm: norm,
            step_norm,
        });
        diag.iterations += 1;
        x = trial;
        r = rt;
        norm = nt;
    }
    Ok(NewtonOutcome { x, diag })
}

/// Fixed-endpoint problem: `Q_0 = qa`, `Q_N = qb`, interior unknowns
/// `Q_1..Q_{N-1}` determined by the scheme residual.
pub struct BvpProblem<'a, L: ?Sized> {
    pub grid: Grid,
    pub lagrangian: &'a L,
    pub scheme: SchemeKind,
    pub qa: Vec<f64>,
    pub qb: Vec<f64>,
}

impl<'a, L: Lagrangian + ?Sized> BvpProblem<'a, L> {
    pub fn new(
        grid: Grid,
        lagrangian: &'a L,
        scheme: SchemeKind,
        qa: Vec<f64>,
        qb: Vec<f64>,
    ) -> Result<Self> {
        let d = lagrangian.dim();
        for q in [&qa, &qb] {
            if q.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: q.len(),
                });
            }
        }
        Ok(BvpProblem {
            grid,
            lagrangian,
            scheme,
            qa,
            qb,
        })
    }

    /// Linear interpolation between the boundary values.
    pub fn default_guess(&self) -> Trajectory {
        Trajectory::linear(self.grid, &self.qa, &self.qb).expect("boundary dimensions checked")
    }

    fn assemble(&self, interior: &[f64]) -> Trajectory {
        let d = self.qa.len();
        let n = self.grid.n();
        let mut values = Vec::with_capacity((n + 1) * d);
        values.extend_from_slice(&self.qa);
        values.extend_from_slice(interior);
        values.extend_from_slice(&self.qb);
        Trajectory::new(self.grid, d, values).expect("sizes consistent")
    }

    /// Scheme residual at the trajectory with the given interior values.
    pub fn residual(&self, interior: &[f64]) -> Result<Vec<f64>> {
        let q = self.assemble(interior);
        Ok(self.scheme.residual(self.lagrangian, &q)?.into_values())
    }
}

/// Solves `R(Q) = 0` for the interior nodes by damped Newton.
pub fn solve_bvp_newton<L: Lagrangian + ?Sized>(
    p: &BvpProblem<'_, L>,
    init: &Trajectory,
    cfg: &NewtonConfig,
) -> Result<(Trajectory, Diagnostics)> {
    check_dim(p.lagrangian, init)?;
    p.grid.check_same(init.grid())?;
    let n = p.grid.n();
    let d = init.dim();
    let x0 = init.values()[d..n * d].to_vec();
    let out = newton(x0, |x| p.residual(x), cfg)?;
    let q = p.assemble(&out.x);
    if out.diag.converged {
        Ok((q, out.diag))
    } else {
        Err(Error::NonConvergence(Box::new(NonConvergence {
            last: q,
            diagnostics: out.diag,
        })))
    }
}

/// Marches the direct backward-difference scheme from `Q_0 = q0`,
/// `Q_1 = q1`: for `k = 2..N` solves
/// `∂L/∂x(Q_k, V_k, t_k) - (P_k - P_{k-1}) / h = 0` for `Q_k`, where
/// `V_k = (Q_k - Q_{k-1}) / h` and `P_k = ∂L/∂v(Q_k, V_k, t_k)`.
pub fn march_direct_classical<L: Lagrangian + ?Sized>(
    l: &L,
    grid: &Grid,
    side: crate::grid::Side,
    q0: &[f64],
    q1: &[f64],
    cfg: &NewtonConfig,
) -> Result<Trajectory> {
    if side != crate::grid::Side::Minus {
        return domain("forward marching is defined for the backward-difference scheme only");
    }
    let d = l.dim();
    for q in [q0, q1] {
        if q.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: q.len(),
            });
        }
    }
    let n = grid.n();
    let h = grid.h();
    let mut traj = Trajectory::zeros(*grid, d);
    traj.point_mut(0).copy_from_slice(q0);
    traj.point_mut(1).copy_from_slice(q1);

    let mut lx = vec![0.0; d];
    let mut pk = vec![0.0; d];
    let mut p_prev = vec![0.0; d];
    let mut v = vec![0.0; d];
    for k in 2..=n {
        let (before, rest) = traj.values_mut().split_at_mut(k * d);
        let qm2 = &before[(k - 2) * d..(k - 1) * d];
        let qm1 = &before[(k - 1) * d..k * d];
        let v_prev: Vec<f64> = qm1.iter().zip(qm2).map(|(a, b)| (a - b) / h).collect();
        l.grad_v(qm1, &v_prev, grid.node(k - 1), &mut p_prev);
        let t = grid.node(k);
        let guess: Vec<f64> = qm1.iter().zip(qm2).map(|(a, b)| 2.0 * a - b).collect();
        let step = newton(
            guess,
            |x| {
                v.iter_mut()
                    .zip(x.iter().zip(qm1))
                    .for_each(|(vi, (a, b))| *vi = (a - b) / h);
                l.grad_x(x, &v, t, &mut lx);
                l.grad_v(x, &v, t, &mut pk);
                Ok(lx
                    .iter()
                    .zip(pk.iter().zip(&p_prev))
                    .map(|(gx, (p, pp))| gx - (p - pp) / h)
                    .collect())
            },
            cfg,
        )?;
        rest[..d].copy_from_slice(&step.x);
        if !step.diag.converged {
            // The partially marched trajectory is returned up to node k.
            return Err(Error::NonConvergence(Box::new(NonConvergence {
                last: traj,
                diagnostics: step.diag,
            })));
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Side};
    use crate::lagrangian::Problem;

    #[test]
    fn lu_identity_and_hand_case() {
        let b = vec![1.5, -2.0, 3.25];
        assert_eq!(lu_solve(&Matrix::identity(3), &b).unwrap(), b);
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let x = lu_solve(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lu_pivots_on_zero_diagonal() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(lu_solve(&a, &[2.0, 3.0]).unwrap(), vec![3.0, 2.0]);
    }

    #[test]
    fn lu_reports_singular_pivot() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            lu_solve(&a, &[1.0, 1.0]),
            Err(Error::SingularMatrix { pivot: 1 })
        ));
        assert!(matches!(
            lu_solve(&Matrix::zeros(3), &[0.0; 3]),
            Err(Error::SingularMatrix { pivot: 0 })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(NewtonConfig::default().validate().is_ok());
        let bad = [
            NewtonConfig {
                tol: 0.0,
                ..Default::default()
            },
            NewtonConfig {
                max_iter: 0,
                ..Default::default()
            },
            NewtonConfig {
                fd_step: -1.0,
                ..Default::default()
            },
            NewtonConfig {
                damping: 1.0,
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }

    #[test]
    fn free_bvp_is_linear() {
        let g = make_grid(0.0, 1.0, 10).unwrap();
        let l = Problem::Free.lagrangian(1);
        let p = BvpProblem::new(
            g,
            &l,
            SchemeKind::VariationalClassical { side: Side::Minus },
            vec![0.0],
            vec![1.0],
        )
        .unwrap();
        let init =
            Trajectory::from_scalars(g, &[0.0, 0.3, -1.0, 2.0, 0.0, 0.1, 0.9, 0.4, 0.2, 0.0, 1.0])
                .unwrap();
        let (q, diag) = solve_bvp_newton(&p, &init, &NewtonConfig::default()).unwrap();
        assert!(diag.converged);
        // One step lands within the forward-difference Jacobian accuracy;
        // the second only polishes.
        assert!(diag.iterations <= 2);
        assert!(diag.history[1].residual_norm <= 1e-8 * diag.history[0].residual_norm);
        for k in 0..=10 {
            assert!((q.point(k)[0] - k as f64 / 10.0).abs() < 1e-13);
        }
        assert_eq!(q.point(0), &[0.0]);
        assert_eq!(q.point(10), &[1.0]);
    }

    #[test]
    fn nonconvergence_reports_history() {
        let g = make_grid(0.0, 1.0, 8).unwrap();
        let l = Problem::Pendulum { omega: 3.0 }.lagrangian(1);
        let p = BvpProblem::new(
            g,
            &l,
            SchemeKind::VariationalClassical { side: Side::Minus },
            vec![0.0],
            vec![2.0],
        )
        .unwrap();
        let cfg = NewtonConfig {
            max_iter: 1,
            ..Default::default()
        };
        match solve_bvp_newton(&p, &p.default_guess(), &cfg) {
            Err(Error::NonConvergence(nc)) => {
                assert_eq!(nc.diagnostics.iterations, 1);
                assert_eq!(nc.diagnostics.history.len(), 2);
                assert_eq!(nc.last.point(8), &[2.0]);
                assert!(nc
                    .diagnostics
                    .to_csv()
                    .starts_with("iter,residual_norm,step_norm\n0,"));
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn march_free_is_linear_extrapolation() {
        let g = make_grid(0.0, 1.0, 12).unwrap();
        let l = Problem::Free.lagrangian(2);
        let q = march_direct_classical(
            &l,
            &g,
            Side::Minus,
            &[0.0, 1.0],
            &[0.5, 0.75],
            &NewtonConfig::default(),
        )
        .unwrap();
        for k in 0..=12 {
            let kf = k as f64;
            assert!((q.point(k)[0] - 0.5 * kf).abs() < 1e-12);
            assert!((q.point(k)[1] - (1.0 - 0.25 * kf)).abs() < 1e-12);
        }
    }

    #[test]
    fn march_rest_stays_at_rest() {
        let g = make_grid(0.0, 2.0, 20).unwrap();
        let l = Problem::Pendulum { omega: 2.0 }.lagrangian(1);
        let q = march_direct_classical(
            &l,
            &g,
            Side::Minus,
            &[0.0],
            &[0.0],
            &NewtonConfig::default(),
        )
        .unwrap();
        assert!(q.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn march_rejects_forward_side() {
        let g = make_grid(0.0, 1.0, 4).unwrap();
        let l = Problem::Free.lagrangian(1);
        assert!(march_direct_classical(
            &l,
            &g,
            Side::Plus,
            &[0.0],
            &[0.0],
            &NewtonConfig::default()
        )
        .is_err());
    }
}
