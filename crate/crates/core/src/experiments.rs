//! Randomized identity checks, coherence sweeps and convergence studies
//! behind the `fracvi` command-line tool.

use std::fmt::Write as _;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffops::check_discrete_ibp;
use crate::error::{domain, Error, Result};
use crate::fracops::{check_discrete_frac_ibp, delta_alpha_minus, rl_monomial_derivative};
use crate::grid::{fmt_f64, make_grid, sample, sample_scalar, Grid, Side, Trajectory};
use crate::lagrangian::Problem;
use crate::schemes::{coherence_report, CoherenceReport, Comparison, SchemeKind};
use crate::solver::{march_direct_classical, solve_bvp_newton, BvpProblem, NewtonConfig};

/// Relative tolerance for the finite-difference summation-by-parts check.
pub const IBP_TOL: f64 = 1e-12;
/// Relative tolerance for the Grünwald–Letnikov summation-by-parts check.
pub const FRAC_IBP_TOL: f64 = 1e-10;

/// Deterministic generator for all randomized checks.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Trajectory with entries uniform in `[-1, 1)`.
pub fn random_trajectory(rng: &mut ChaCha8Rng, grid: &Grid, dim: usize) -> Trajectory {
    sample(grid, dim, |_, out| {
        out.iter_mut()
            .for_each(|x| *x = rng.random_range(-1.0..1.0))
    })
}

/// Same, with both endpoints set to zero.
pub fn random_pinned_trajectory(rng: &mut ChaCha8Rng, grid: &Grid, dim: usize) -> Trajectory {
    let mut q = random_trajectory(rng, grid, dim);
    let n = grid.n();
    q.point_mut(0).fill(0.0);
    q.point_mut(n).fill(0.0);
    q
}

/// `|lhs - rhs| / (1 + |lhs|)`.
pub fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + lhs.abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IbpCase {
    pub label: String,
    pub trials: usize,
    pub max_gap: f64,
    pub tol: f64,
}

impl IbpCase {
    pub fn passed(&self) -> bool {
        self.max_gap <= self.tol
    }
}

/// Settings for [`ibp_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpSettings {
    pub seed: u64,
    pub n: usize,
    pub trials: usize,
    /// Fractional order; when set the fractional identity is also checked.
    pub alpha: Option<f64>,
    pub a: f64,
    pub b: f64,
}

impl Default for IbpSettings {
    fn default() -> Self {
        IbpSettings {
            seed: 7,
            n: 64,
            trials: 100,
            alpha: None,
            a: 0.0,
            b: 1.0,
        }
    }
}

/// Randomized summation-by-parts checks. Trial `i` uses dimension
/// `1 + i % 3`. The fractional case pins `F` to zero at both endpoints on
/// even trials and `G` on odd ones.
pub fn ibp_suite(s: &IbpSettings) -> Result<Vec<IbpCase>> {
    let grid = make_grid(s.a, s.b, s.n)?;
    let mut rng = rng_from_seed(s.seed);
    let mut cases = Vec::new();

    let mut gap = 0.0_f64;
    for i in 0..s.trials {
        let d = 1 + i % 3;
        let f = random_trajectory(&mut rng, &grid, d);
        let g = random_trajectory(&mut rng, &grid, d);
        let (l, r) = check_discrete_ibp(&f, &g)?;
        gap = gap.max(relative_gap(l, r));
    }
    cases.push(IbpCase {
        label: "classical".into(),
        trials: s.trials,
        max_gap: gap,
        tol: IBP_TOL,
    });

    if let Some(alpha) = s.alpha {
        let mut gap = 0.0_f64;
        for i in 0..s.trials {
            let d = 1 + i % 3;
            let (f, g) = if i % 2 == 0 {
                (
                    random_pinned_trajectory(&mut rng, &grid, d),
                    random_trajectory(&mut rng, &grid, d),
                )
            } else {
                (
                    random_trajectory(&mut rng, &grid, d),
                    random_pinned_trajectory(&mut rng, &grid, d),
                )
            };
            let (l, r) = check_discrete_frac_ibp(&f, &g, alpha)?;
            gap = gap.max(relative_gap(l, r));
        }
        cases.push(IbpCase {
            label: format!("fractional alpha={alpha}"),
            trials: s.trials,
            max_gap: gap,
            tol: FRAC_IBP_TOL,
        });
    }
    Ok(cases)
}

/// `Q_k = k³` on `[0, N]` with unit step: the trajectory on which the
/// symmetric finite-difference routes differ by exactly 6.
pub fn cubic_witness(n: usize) -> Result<Trajectory> {
    let grid = make_grid(0.0, n as f64, n)?;
    Ok(sample_scalar(&grid, |t| t * t * t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSettings {
    pub problem: Problem,
    pub sides: Vec<Side>,
    pub alphas: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    pub a: f64,
    pub b: f64,
    pub dim: usize,
}

/// A coherence row together with the verdict the theory predicts for it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceRow {
    pub report: CoherenceReport,
    pub expected_coherent: bool,
}

impl CoherenceRow {
    pub fn as_expected(&self) -> bool {
        let coherent = self.report.verdict == crate::schemes::Verdict::Coherent;
        if self.expected_coherent {
            coherent
        } else {
            !coherent && self.report.gap > 0.1
        }
    }
}

/// For each side: the cubic witness (free particle) for the symmetric
/// classical pair, then the asymmetric pair and every fractional order on a
/// random trajectory of `s.problem`.
pub fn coherence_sweep(s: &CoherenceSettings) -> Result<Vec<CoherenceRow>> {
    let l = s.problem.lagrangian(s.dim);
    let grid = make_grid(s.a, s.b, s.n)?;
    let mut rng = rng_from_seed(s.seed);
    let mut rows = Vec::new();
    for &side in &s.sides {
        let witness = cubic_witness(4)?;
        let lw = Problem::Free.lagrangian(1);
        rows.push(CoherenceRow {
            report: coherence_report(&lw, &witness, side, Comparison::Classical)?,
            expected_coherent: false,
        });
        let q = random_trajectory(&mut rng, &grid, s.dim);
        rows.push(CoherenceRow {
            report: coherence_report(&l, &q, side, Comparison::Asymmetric)?,
            expected_coherent: true,
        });
        for &alpha in &s.alphas {
            rows.push(CoherenceRow {
                report: coherence_report(&l, &q, side, Comparison::Fractional { alpha })?,
                expected_coherent: true,
            });
        }
    }
    Ok(rows)
}

/// Continuous solution used as a reference, when one is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactSolution {
    /// Straight line through the boundary values.
    Linear { a: f64, b: f64, qa: f64, qb: f64 },
    /// `q'' = -ω² q` through the boundary values.
    Harmonic {
        a: f64,
        b: f64,
        qa: f64,
        qb: f64,
        omega: f64,
    },
}

impl ExactSolution {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ExactSolution::Linear { a, b, qa, qb } => qa + (qb - qa) * (t - a) / (b - a),
            ExactSolution::Harmonic {
                a,
                b,
                qa,
                qb,
                omega,
            } => {
                (qa * (omega * (b - t)).sin() + qb * (omega * (t - a)).sin())
                    / (omega * (b - a)).sin()
            }
        }
    }

    /// Classical solution of `problem` through `(a, qa)` and `(b, qb)`.
    pub fn for_problem(problem: Problem, a: f64, b: f64, qa: f64, qb: f64) -> Option<Self> {
        match problem {
            Problem::Free => Some(ExactSolution::Linear { a, b, qa, qb }),
            Problem::Harmonic { omega } => {
                if (omega * (b - a)).sin().abs() < 1e-8 {
                    None
                } else {
                    Some(ExactSolution::Harmonic {
                        a,
                        b,
                        qa,
                        qb,
                        omega,
                    })
                }
            }
            Problem::Pendulum { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSettings {
    pub problem: Problem,
    pub scheme: SchemeKind,
    pub ns: Vec<usize>,
    pub a: f64,
    pub b: f64,
    pub qa: f64,
    pub qb: f64,
    pub newton: NewtonConfig,
}

impl ConvergenceSettings {
    /// Harmonic oscillator with `ω = 1` on `[0, 1]` whose exact solution is
    /// `cos t + ½ sin t`.
    pub fn harmonic(scheme: SchemeKind, ns: Vec<usize>) -> Self {
        ConvergenceSettings {
            problem: Problem::Harmonic { omega: 1.0 },
            scheme,
            ns,
            a: 0.0,
            b: 1.0,
            qa: 1.0,
            qb: 1f64.cos() + 0.5 * 1f64.sin(),
            newton: NewtonConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub error: f64,
    /// `log2(error(N) / error(2N))` when `2N` is also in the study.
    pub observed_order: Option<f64>,
}

/// How errors in a study are measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Exact(ExactSolution),
    /// Solution of the same scheme on a grid with this many subintervals.
    SelfReference(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub reference: Reference,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceStudy {
    pub const CSV_HEADER: &'static str = "N,h,error,observed_order";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            let order = r.observed_order.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{}", r.n, fmt_f64(r.h), fmt_f64(r.error), order);
        }
        s
    }

    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.observed_order).collect()
    }
}

/// Solves one cell of a study: marching for the direct classical scheme,
/// Newton on the fixed-endpoint system otherwise.
pub fn solve_cell(
    s: &ConvergenceSettings,
    n: usize,
    exact: Option<&ExactSolution>,
) -> Result<Trajectory> {
    let grid = make_grid(s.a, s.b, n)?;
    let l = s.problem.lagrangian(1);
    match s.scheme {
        SchemeKind::DirectClassical { side } => {
            let start = match exact {
                Some(e) => [e.eval(grid.node(0)), e.eval(grid.node(1))],
                None => {
                    return domain("marching needs an exact solution for its two starting values")
                }
            };
            march_direct_classical(&l, &grid, side, &start[..1], &start[1..], &s.newton)
        }
        scheme => {
            let p = BvpProblem::new(grid, &l, scheme, vec![s.qa], vec![s.qb])?;
            let (q, _) = solve_bvp_newton(&p, &p.default_guess(), &s.newton)?;
            Ok(q)
        }
    }
}

fn fill_orders(rows: &mut [ConvergenceRow]) {
    for i in 0..rows.len() {
        let target = rows[i].n * 2;
        rows[i].observed_order = rows.iter().find(|r| r.n == target).and_then(|r2| {
            let (e1, e2) = (rows[i].error, r2.error);
            (e1 > 0.0 && e2 > 0.0).then(|| (e1 / e2).log2())
        });
    }
}

/// Error table over `s.ns`. Uses the exact solution for classical schemes
/// when the problem has one; otherwise solves the same scheme at
/// `4 · max(N)` subintervals and compares at the shared nodes.
pub fn convergence_study(s: &ConvergenceSettings) -> Result<ConvergenceStudy> {
    if s.ns.is_empty() {
        return domain("convergence study needs at least one N");
    }
    let mut ns = s.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let exact = match s.scheme {
        SchemeKind::DirectFractional { .. } | SchemeKind::VariationalFractional { .. } => None,
        _ => ExactSolution::for_problem(s.problem, s.a, s.b, s.qa, s.qb),
    };
    let reference = match exact {
        Some(e) => Reference::Exact(e),
        None => {
            let n_ref = 4 * ns[ns.len() - 1];
            if let Some(bad) = ns.iter().find(|&&n| !n_ref.is_multiple_of(n)) {
                return domain(format!(
                    "self-reference grid {n_ref} is not a multiple of N = {bad}"
                ));
            }
            Reference::SelfReference(n_ref)
        }
    };
    let reference_solution = match reference {
        Reference::SelfReference(n_ref) => Some(solve_cell(s, n_ref, None)?),
        Reference::Exact(_) => None,
    };

    let cells: Vec<Result<ConvergenceRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                let reference_solution = reference_solution.as_ref();
                let exact = exact.as_ref();
                scope.spawn(move || -> Result<ConvergenceRow> {
                    let q = solve_cell(s, n, exact)?;
                    let grid = *q.grid();
                    let error = (0..=n)
                        .map(|k| {
                            let want = match (exact, reference_solution) {
                                (Some(e), _) => e.eval(grid.node(k)),
                                (None, Some(r)) => r.point(k * (r.grid().n() / n))[0],
                                (None, None) => unreachable!("reference prepared above"),
                            };
                            (q.point(k)[0] - want).abs()
                        })
                        .fold(0.0, f64::max);
                    Ok(ConvergenceRow {
                        n,
                        h: grid.h(),
                        error,
                        observed_order: None,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Domain("worker panicked".into())))
            })
            .collect()
    });
    let mut rows = cells.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.n);
    fill_orders(&mut rows);
    Ok(ConvergenceStudy { reference, rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlCheckRow {
    pub n: usize,
    pub h: f64,
    pub discrete: f64,
    pub exact: f64,
    pub error: f64,
    pub observed_order: Option<f64>,
}

pub const GLCHECK_CSV_HEADER: &str = "N,h,discrete,exact,error,observed_order";

/// `(Δ^α- f)_N` for `f(t) = (t - a)^β` against the closed-form
/// Riemann–Liouville derivative at `t = b`.
pub fn glcheck(alpha: f64, beta: f64, a: f64, b: f64, ns: &[usize]) -> Result<Vec<GlCheckRow>> {
    let exact = rl_monomial_derivative(beta, alpha, b - a)?;
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::with_capacity(ns.len());
    for n in ns {
        let grid = make_grid(a, b, n)?;
        let f = sample_scalar(&grid, |t| (t - a).powf(beta));
        let d = delta_alpha_minus(&f, alpha)?;
        let discrete = d.at(n)[0];
        rows.push(GlCheckRow {
            n,
            h: grid.h(),
            discrete,
            exact,
            error: (discrete - exact).abs(),
            observed_order: None,
        });
    }
    for i in 0..rows.len() {
        let target = rows[i].n * 2;
        rows[i].observed_order = rows.iter().find(|r| r.n == target).and_then(|r2| {
            (rows[i].error > 0.0 && r2.error > 0.0).then(|| (rows[i].error / r2.error).log2())
        });
    }
    Ok(rows)
}

pub fn glcheck_csv(rows: &[GlCheckRow]) -> String {
    let mut s = format!("{GLCHECK_CSV_HEADER}\n");
    for r in rows {
        let order = r.observed_order.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.h),
            fmt_f64(r.discrete),
            fmt_f64(r.exact),
            fmt_f64(r.error),
            order
        );
    }
    s
}
