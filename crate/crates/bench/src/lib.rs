//! Fixtures shared by the criterion benchmarks.

use fracvi::experiments::{random_trajectory, rng_from_seed};
use fracvi::{make_grid, Trajectory};

/// Random trajectory on `[0, 1]` with `n` subintervals.
pub fn random_path(n: usize, dim: usize, seed: u64) -> Trajectory {
    let grid = make_grid(0.0, 1.0, n).expect("n >= 2");
    random_trajectory(&mut rng_from_seed(seed), &grid, dim)
}
