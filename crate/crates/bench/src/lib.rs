//! Shared inputs for the criterion benches.

use hardy_factor::sample::{random_step, trial_rng};
use hardy_factor::{Grid, StepFunction};

/// Seeded random `h` on `log_grid(1e-3, 1e3, cells)` with sign flips.
pub fn random_h(cells: usize, seed: u64) -> StepFunction {
    let grid = Grid::log_grid(1e-3, 1e3, cells).expect("valid bench grid");
    random_step(&mut trial_rng(seed, 0), &grid, true)
}
