//! Power-weight sweeps over `(p, α)` with seeded random `h`.
//!
//! Pairs outside the class-membership domain are reported as skipped rows.
//! Rows are computed in parallel and returned in input order, so a seed
//! reproduces the output exactly.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factorize::{
    factorize_cesaro, factorize_cesaro_l1, factorize_copson, factorize_copson_l1,
    FactorizationReport, DEFAULT_SLACK,
};
use crate::grid::Grid;
use crate::quadrature::QuadratureSpec;
use crate::sample::{random_step, trial_rng};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepSpace {
    Cesaro,
    Copson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub cells: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::log_grid(self.min, self.max, self.cells)
    }
}

fn default_trials() -> usize {
    1
}

fn default_slack() -> f64 {
    DEFAULT_SLACK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub p_values: Vec<f64>,
    pub alpha_values: Vec<f64>,
    pub space: SweepSpace,
    pub grid: GridSpec,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sign_flips: bool,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.p_values.is_empty() {
            return Err(Error::Invalid("sweep needs at least one p value".into()));
        }
        if self.alpha_values.is_empty() {
            return Err(Error::Invalid("sweep needs at least one α value".into()));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("sweep needs at least one trial".into()));
        }
        if let Some(x) = self
            .p_values
            .iter()
            .chain(&self.alpha_values)
            .find(|x| !x.is_finite())
        {
            return Err(Error::Invalid(format!(
                "sweep values must be finite, got {x}"
            )));
        }
        if !(self.slack >= 0.0) {
            return Err(Error::Invalid(format!(
                "slack must be nonnegative, got {}",
                self.slack
            )));
        }
        self.quadrature.validate()?;
        self.grid.build().map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Pass,
    Fail,
    Skipped,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub alpha: f64,
    pub trial: Option<usize>,
    pub status: RowStatus,
    pub lower_constant: Option<f64>,
    pub upper_constant: Option<f64>,
    pub norm_h: Option<f64>,
    pub norm_f: Option<f64>,
    pub norm_g: Option<f64>,
    pub product: Option<f64>,
    pub ratio: Option<f64>,
    pub lower_ok: Option<bool>,
    pub upper_ok: Option<bool>,
    pub detail: String,
}

impl SweepRow {
    fn bare(p: f64, alpha: f64, trial: Option<usize>, status: RowStatus, detail: String) -> Self {
        Self {
            p,
            alpha,
            trial,
            status,
            lower_constant: None,
            upper_constant: None,
            norm_h: None,
            norm_f: None,
            norm_g: None,
            product: None,
            ratio: None,
            lower_ok: None,
            upper_ok: None,
            detail,
        }
    }

    fn from_report(p: f64, alpha: f64, trial: usize, r: &FactorizationReport) -> Self {
        Self {
            p,
            alpha,
            trial: Some(trial),
            status: if r.passed() {
                RowStatus::Pass
            } else {
                RowStatus::Fail
            },
            lower_constant: Some(r.lower_constant),
            upper_constant: Some(r.upper_constant),
            norm_h: Some(r.norm_h),
            norm_f: Some(r.norm_f),
            norm_g: Some(r.norm_g),
            product: Some(r.product),
            ratio: Some(r.ratio()),
            lower_ok: Some(r.lower_ok),
            upper_ok: Some(r.upper_ok),
            detail: String::new(),
        }
    }
}

/// Why `(p, α)` lies outside the domain of the sweep's factorization.
pub fn invalid_reason(space: SweepSpace, p: f64, alpha: f64) -> Option<String> {
    if p < 1.0 {
        return Some(format!("p ≥ 1 required, got {p}"));
    }
    match space {
        SweepSpace::Cesaro if p == 1.0 && alpha >= 0.0 => Some("α < 0 required at p = 1".into()),
        SweepSpace::Cesaro if alpha >= p - 1.0 => Some("α < p-1 required".into()),
        SweepSpace::Copson if alpha <= -1.0 => Some("α > -1 required".into()),
        _ => None,
    }
}

fn run_trial(spec: &SweepSpec, grid: &Grid, p: f64, alpha: f64, trial: usize) -> SweepRow {
    let h = random_step(
        &mut trial_rng(spec.seed, trial as u64),
        grid,
        spec.sign_flips,
    );
    let result = Weight::power(alpha).and_then(|v| {
        let q = &spec.quadrature;
        match (spec.space, p == 1.0) {
            (SweepSpace::Cesaro, false) => factorize_cesaro(&h, &v, p, q, spec.slack),
            (SweepSpace::Cesaro, true) => factorize_cesaro_l1(&h, &v, q, spec.slack),
            (SweepSpace::Copson, false) => factorize_copson(&h, &v, p, q, spec.slack),
            (SweepSpace::Copson, true) => factorize_copson_l1(&h, &v, q, spec.slack),
        }
    });
    match result {
        Ok(r) => SweepRow::from_report(p, alpha, trial, &r),
        Err(e) => SweepRow::bare(p, alpha, Some(trial), RowStatus::Error, e.to_string()),
    }
}

/// Runs the sweep; every trial of a pair uses the same `h` stream, so pairs
/// are compared on identical inputs.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let grid = spec.grid.build()?;
    let pairs: Vec<(f64, f64)> = spec
        .p_values
        .iter()
        .flat_map(|&p| spec.alpha_values.iter().map(move |&a| (p, a)))
        .collect();
    let rows: Vec<Vec<SweepRow>> = pairs
        .par_iter()
        .map(|&(p, alpha)| match invalid_reason(spec.space, p, alpha) {
            Some(why) => vec![SweepRow::bare(p, alpha, None, RowStatus::Skipped, why)],
            None => (0..spec.trials)
                .into_par_iter()
                .map(|t| run_trial(spec, &grid, p, alpha, t))
                .collect(),
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}
