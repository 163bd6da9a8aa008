//! Level function of a nonnegative step function with respect to `v(x)dx`.
//!
//! On a grid the level function `h°` is the derivative of the least concave
//! majorant of the points `(V(x_k) - V(x_0), H(x_k))`, where `H` is the
//! cumulative of `h·v`. Pool-adjacent-violators computes it in one pass: keep
//! a stack of blocks and merge the top two while the later block's average
//! exceeds the earlier one. Adjacent pooled blocks that end up with the same
//! constant are reported as one interval.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::StepFunction;
use crate::norms::cell_masses;
use crate::weights::Weight;

/// A maximal run of cells `start..end` on which `h°` is constant and differs
/// from `h` somewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelInterval {
    pub start: usize,
    pub end: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelDecomposition {
    pub level: StepFunction,
    pub intervals: Vec<LevelInterval>,
}

/// A pooled block of consecutive cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub start: usize,
    pub end: usize,
    pub mass: f64,
    pub sum: f64,
    /// `sum / mass`, or the cell value itself for a single cell.
    pub mean: f64,
}

/// Weighted nonincreasing regression by pool-adjacent-violators. Only strict
/// violations are pooled, so cells already at their level stay single.
pub fn pava_nonincreasing(values: &[f64], masses: &[f64]) -> Vec<Block> {
    debug_assert_eq!(values.len(), masses.len());
    let mut stack: Vec<Block> = Vec::with_capacity(values.len());
    for (i, (&y, &m)) in values.iter().zip(masses).enumerate() {
        stack.push(Block {
            start: i,
            end: i + 1,
            mass: m,
            sum: y * m,
            mean: y,
        });
        while stack.len() >= 2 {
            let top = stack[stack.len() - 1];
            let prev = stack[stack.len() - 2];
            if top.mean <= prev.mean {
                break;
            }
            stack.pop();
            let merged = stack.last_mut().expect("two blocks");
            merged.end = top.end;
            merged.mass += top.mass;
            merged.sum += top.sum;
            merged.mean = merged.sum / merged.mass;
        }
    }
    stack
}

pub fn level_function(h: &StepFunction, v: &Weight) -> Result<LevelDecomposition> {
    if let Some((i, &value)) = h.values().iter().enumerate().find(|(_, &x)| x < 0.0) {
        return Err(Error::NegativeInput { cell: i, value });
    }
    if h.grid().cells() == 0 {
        return Err(Error::EmptyGrid);
    }
    let masses = cell_masses(h, v);
    if let Some(i) = masses.iter().position(|&m| !(m > 0.0)) {
        return Err(Error::ZeroMass(i));
    }
    let blocks = pava_nonincreasing(h.values(), &masses);
    let mut level = vec![0.0; h.grid().cells()];
    let mut intervals: Vec<LevelInterval> = Vec::new();
    for b in &blocks {
        let c = b.mean;
        level[b.start..b.end].fill(c);
        if h.values()[b.start..b.end].iter().all(|&x| x == c) {
            continue;
        }
        match intervals.last_mut() {
            Some(last) if last.end == b.start && last.value == c => last.end = b.end,
            _ => intervals.push(LevelInterval {
                start: b.start,
                end: b.end,
                value: c,
            }),
        }
    }
    Ok(LevelDecomposition {
        level: StepFunction::new(h.grid().clone(), level)?,
        intervals,
    })
}

/// Upper concave hull slopes by monotone chain, reported once per input
/// segment. Independent of [`pava_nonincreasing`]; used to verify it.
pub fn concave_majorant_oracle(points: &[(f64, f64)]) -> Result<Vec<f64>> {
    for (i, w) in points.windows(2).enumerate() {
        if !(w[0].0 < w[1].0) {
            return Err(Error::NonMonotoneAbscissa(i + 1));
        }
    }
    let mut hull: Vec<usize> = Vec::with_capacity(points.len());
    for (k, &(x, y)) in points.iter().enumerate() {
        while hull.len() >= 2 {
            let (ox, oy) = points[hull[hull.len() - 2]];
            let (ax, ay) = points[hull[hull.len() - 1]];
            let cross = (ax - ox) * (y - oy) - (ay - oy) * (x - ox);
            if cross < 0.0 {
                break;
            }
            hull.pop();
        }
        hull.push(k);
    }
    let mut slopes = Vec::with_capacity(points.len().saturating_sub(1));
    for seg in hull.windows(2) {
        let (x0, y0) = points[seg[0]];
        let (x1, y1) = points[seg[1]];
        let s = (y1 - y0) / (x1 - x0);
        slopes.extend(std::iter::repeat_n(s, seg[1] - seg[0]));
    }
    Ok(slopes)
}
