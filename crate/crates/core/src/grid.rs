//! Grids on `(0, ∞)`, piecewise-constant functions on them, and the exact
//! elementary calculus those functions admit.
//!
//! A [`StepFunction`] holds one value per cell `(x_i, x_{i+1})` and is
//! identically zero outside `[x_0, x_N]`. Prefix integrals, suffix maxima and
//! rectangle sums are computed exactly (up to floating-point rounding).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing, strictly positive breakpoints `x_0 < x_1 < … < x_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Grid {
    breakpoints: Vec<f64>,
}

impl Grid {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::TooFew(breakpoints.len()));
        }
        for (i, &x) in breakpoints.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if x <= 0.0 {
                return Err(Error::NonPositive { index: i, value: x });
            }
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(Error::NonMonotone {
                    index: i + 1,
                    prev: w[0],
                    next: w[1],
                });
            }
        }
        Ok(Self { breakpoints })
    }

    /// `cells + 1` geometrically spaced breakpoints from `x_min` to `x_max`.
    pub fn log_grid(x_min: f64, x_max: f64, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::TooFew(1));
        }
        if !(x_min > 0.0) {
            return Err(Error::NonPositive {
                index: 0,
                value: x_min,
            });
        }
        let ratio = (x_max / x_min).ln();
        let mut pts: Vec<f64> = (0..=cells)
            .map(|k| x_min * (ratio * k as f64 / cells as f64).exp())
            .collect();
        pts[0] = x_min;
        pts[cells] = x_max;
        Self::new(pts)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn cells(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn end(&self) -> f64 {
        self.breakpoints[self.cells()]
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn width(&self, i: usize) -> f64 {
        self.breakpoints[i + 1] - self.breakpoints[i]
    }

    /// Index of the cell containing `t`, with `x_N` assigned to the last cell.
    pub fn locate(&self, t: f64) -> Option<usize> {
        let n = self.cells();
        if t < self.start() || t > self.end() || t.is_nan() {
            return None;
        }
        let idx = self.breakpoints.partition_point(|&x| x <= t);
        Some(idx.saturating_sub(1).min(n - 1))
    }

    /// Sorted union of both breakpoint sets.
    pub fn union(&self, other: &Grid) -> Grid {
        let mut pts = Vec::with_capacity(self.breakpoints.len() + other.breakpoints.len());
        let (a, b) = (&self.breakpoints, &other.breakpoints);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(&x), Some(&y)) if y < x => {
                    j += 1;
                    y
                }
                (Some(&x), Some(_)) => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            pts.push(next);
        }
        Grid { breakpoints: pts }
    }

    /// Grid with extra positive points merged in, in any order.
    pub fn with_points(&self, pts: &[f64]) -> Grid {
        let mut extra: Vec<f64> = pts
            .iter()
            .copied()
            .filter(|x| x.is_finite() && *x > 0.0)
            .collect();
        extra.sort_by(f64::total_cmp);
        extra.dedup();
        self.union(&Grid { breakpoints: extra })
    }

    /// True when every breakpoint of `coarse` is also a breakpoint of `self`.
    pub fn refines(&self, coarse: &Grid) -> bool {
        let mut j = 0;
        for &x in &coarse.breakpoints {
            while j < self.breakpoints.len() && self.breakpoints[j] < x {
                j += 1;
            }
            if j == self.breakpoints.len() || self.breakpoints[j] != x {
                return false;
            }
        }
        true
    }
}

/// Piecewise-constant function: `values[i]` on `(x_i, x_{i+1})`, zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    grid: Grid,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawStep {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(Grid::new(raw.breakpoints)?, raw.values)
    }
}

impl From<StepFunction> for RawStep {
    fn from(f: StepFunction) -> Self {
        RawStep {
            breakpoints: f.grid.breakpoints,
            values: f.values,
        }
    }
}

/// Binary cellwise operations on functions sharing a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Combine {
    Product,
    /// `f / g` with the convention `0 / 0 = 0`.
    Quotient,
    /// `sign(g) · |f|`.
    SignRestore,
}

impl StepFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::LengthMismatch {
                expected: grid.cells(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.cells();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        let n = grid.cells();
        Self::new(grid, vec![c; n])
    }

    /// Builds a function from a rule evaluated on each cell `(a, b)`.
    pub fn from_cells(grid: Grid, mut rule: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let values = (0..grid.cells())
            .map(|i| {
                let (a, b) = grid.cell(i);
                rule(a, b)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Point value; breakpoints take the value of the cell to their right.
    pub fn eval(&self, t: f64) -> f64 {
        match self.grid.locate(t) {
            Some(i) if t < self.grid.end() => self.values[i],
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    fn check_same_grid(&self, other: &StepFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }

    /// Splits cells onto a finer grid without changing values. Target cells
    /// outside `[x_0, x_N]` receive zero.
    pub fn refine_to(&self, target: &Grid) -> Result<StepFunction> {
        if !target.refines(&self.grid) {
            return Err(Error::GridMismatch);
        }
        let values = (0..target.cells())
            .map(|j| {
                let (a, b) = target.cell(j);
                self.eval(0.5 * (a + b))
            })
            .collect();
        Self::new(target.clone(), values)
    }

    /// Exact prefix integral `t ↦ ∫_0^t f`.
    pub fn cumulative(&self) -> CumulativeFunction {
        let n = self.grid.cells();
        let mut node_values = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        node_values.push(acc);
        for i in 0..n {
            acc += self.values[i] * self.grid.width(i);
            node_values.push(acc);
        }
        CumulativeFunction {
            grid: self.grid.clone(),
            node_values,
            slopes: self.values.clone(),
        }
    }

    /// Exact suffix integrals `∫_{x_k}^∞ f` at every breakpoint, summed from
    /// the right.
    pub fn suffix_integrals(&self) -> Vec<f64> {
        let n = self.grid.cells();
        let mut out = vec![0.0; n + 1];
        for i in (0..n).rev() {
            out[i] = out[i + 1] + self.values[i] * self.grid.width(i);
        }
        out
    }

    pub fn integral(&self) -> f64 {
        (0..self.grid.cells())
            .map(|i| self.values[i] * self.grid.width(i))
            .sum()
    }

    /// `∫ f · g` as an exact rectangle sum.
    pub fn inner(&self, other: &StepFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok((0..self.grid.cells())
            .map(|i| self.values[i] * other.values[i] * self.grid.width(i))
            .sum())
    }

    /// Least decreasing majorant of `|f|`: suffix maxima of absolute values.
    pub fn decreasing_majorant(&self) -> StepFunction {
        let mut values = vec![0.0; self.values.len()];
        let mut running = 0.0_f64;
        for i in (0..self.values.len()).rev() {
            running = running.max(self.values[i].abs());
            values[i] = running;
        }
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn abs(&self) -> StepFunction {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn scale(&self, lambda: f64) -> Result<StepFunction> {
        self.with_values(self.values.iter().map(|v| v * lambda).collect())
    }

    pub fn map(&self, mut op: impl FnMut(f64) -> f64) -> Result<StepFunction> {
        self.with_values(self.values.iter().map(|&v| op(v)).collect())
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        self.check_same_grid(other)?;
        self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Cellwise `f^r`. Zero stays zero for `r > 0`; negative bases require an
    /// integer exponent.
    pub fn powf(&self, r: f64) -> Result<StepFunction> {
        let mut values = Vec::with_capacity(self.values.len());
        for (i, &v) in self.values.iter().enumerate() {
            if v < 0.0 && r.fract() != 0.0 {
                return Err(Error::DomainError {
                    cell: i,
                    base: v,
                    exponent: r,
                });
            }
            values.push(if v == 0.0 && r > 0.0 { 0.0 } else { v.powf(r) });
        }
        self.with_values(values)
    }

    pub fn combine(&self, other: &StepFunction, op: Combine) -> Result<StepFunction> {
        combine(self, other, op)
    }
}

/// Cellwise binary algebra on a common grid.
pub fn combine(f: &StepFunction, g: &StepFunction, op: Combine) -> Result<StepFunction> {
    f.check_same_grid(g)?;
    let mut values = Vec::with_capacity(f.values.len());
    for (i, (&a, &b)) in f.values.iter().zip(&g.values).enumerate() {
        let v = match op {
            Combine::Product => a * b,
            Combine::Quotient => {
                if b == 0.0 {
                    if a == 0.0 {
                        0.0
                    } else {
                        return Err(Error::DivisionByZero(i));
                    }
                } else {
                    a / b
                }
            }
            Combine::SignRestore => {
                if b == 0.0 {
                    0.0
                } else {
                    a.abs().copysign(b)
                }
            }
        };
        values.push(v);
    }
    f.with_values(values)
}

/// Continuous piecewise-linear prefix integral of a step function.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeFunction {
    grid: Grid,
    node_values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CumulativeFunction {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn node_values(&self) -> &[f64] {
        &self.node_values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn total(&self) -> f64 {
        self.node_values[self.node_values.len() - 1]
    }

    /// Value of the integral over `(0, t)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.grid.start() {
            return self.node_values[0];
        }
        if t >= self.grid.end() {
            return self.total();
        }
        let i = self.grid.locate(t).expect("t inside grid");
        self.node_values[i] + self.slopes[i] * (t - self.grid.breakpoints()[i])
    }
}
