//! Seeded random step functions and weights for property checks and sweeps.
//!
//! Values are uniform on `[0, 1]`; with sign flips each cell is negated with
//! probability 1/2. Sampled weights are log-uniform on `[0.1, 10]`. The
//! generator is ChaCha8, so a seed reproduces the same stream everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Grid, StepFunction};
use crate::weights::Weight;

pub type SampleRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream for trial `trial` under `seed`, independent of evaluation order.
pub fn trial_rng(seed: u64, trial: u64) -> SampleRng {
    let mut rng = seeded(seed);
    rng.set_stream(trial);
    rng
}

pub fn random_step(rng: &mut impl Rng, grid: &Grid, sign_flips: bool) -> StepFunction {
    let values = (0..grid.cells())
        .map(|_| {
            let x: f64 = rng.random();
            if sign_flips && rng.random::<bool>() {
                -x
            } else {
                x
            }
        })
        .collect();
    StepFunction::new(grid.clone(), values).expect("finite values")
}

pub fn random_sampled_weight(rng: &mut impl Rng, grid: &Grid) -> Weight {
    let values = (0..grid.cells())
        .map(|_| 10f64.powf(rng.random_range(-1.0..=1.0)))
        .collect();
    Weight::sampled(StepFunction::new(grid.clone(), values).expect("finite values"))
        .expect("positive values")
}
