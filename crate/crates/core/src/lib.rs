//! Discrete embeddings and variational integrators for classical,
//! asymmetric and fractional (Grünwald–Letnikov) Lagrangian systems.
//!
//! A discrete embedding fixes how curves, the time derivative and integrals
//! are discretized. From it one gets two schemes for the Euler–Lagrange
//! equation: the direct embedding (substitute the discrete operators into
//! the equation) and the variational integrator (differentiate the discrete
//! functional). This crate assembles both, compares them, and solves the
//! resulting boundary-value systems.
//!
//! ```
//! use fracvi::{coherence_report, make_grid, sample_scalar, Comparison, Problem, Side};
//!
//! let grid = make_grid(0.0, 4.0, 4).unwrap();
//! let q = sample_scalar(&grid, |t| t * t * t);
//! let l = Problem::Free.lagrangian(1);
//! let report = coherence_report(&l, &q, Side::Minus, Comparison::Classical).unwrap();
//! assert_eq!(report.gap, 6.0);
//! ```

// Domain checks are written `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod accum;
pub mod diffops;
pub mod error;
pub mod experiments;
pub mod fracops;
pub mod grid;
pub mod lagrangian;
pub mod schemes;
pub mod solver;

pub use accum::CompensatedSum;
pub use diffops::{
    check_discrete_ibp, delta, delta_minus, delta_plus, gauss_quadrature, gauss_sum,
};
pub use error::{Error, NonConvergence, Result};
pub use fracops::{
    check_discrete_frac_ibp, delta_alpha_minus, delta_alpha_minus_with, delta_alpha_plus,
    delta_alpha_plus_with, delta_alpha_with, gamma_fn, gl_coefficients, rl_monomial_derivative,
    GlCoefficients,
};
pub use grid::{
    fmt_f64, inf_norm, make_grid, sample, sample_scalar, Grid, ShiftedSequence, Side, Trajectory,
    Values,
};
pub use lagrangian::{
    discrete_functional, discrete_functional_classical, discrete_functional_fractional,
    functional_gradient, BuiltinPotential, Embedding, FnLagrangian, Lagrangian,
    MechanicalLagrangian, Potential, Problem,
};
pub use schemes::{
    coherence_report, newton_friction_direct, residual_asymmetric_direct,
    residual_direct_classical, residual_direct_fractional, residual_vi_classical,
    residual_vi_fractional, CoherenceReport, Comparison, ResidualField, SchemeKind, Verdict,
};
pub use solver::{
    lu_solve, march_direct_classical, solve_bvp_newton, BvpProblem, Diagnostics, IterationRecord,
    LuDecomposition, Matrix, NewtonConfig,
};
