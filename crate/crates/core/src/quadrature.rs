use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-cell Gauss–Legendre order and the sub-sampling density used by
/// sup/inf searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_cell: usize,
    pub refinement_factor: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_cell: 8,
            refinement_factor: 16,
        }
    }
}

impl QuadratureSpec {
    pub fn new(nodes_per_cell: usize, refinement_factor: usize) -> Result<Self> {
        let spec = Self {
            nodes_per_cell,
            refinement_factor,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_cell < 2 {
            return Err(Error::BadQuadrature(format!(
                "nodes_per_cell must be at least 2, got {}",
                self.nodes_per_cell
            )));
        }
        if self.refinement_factor < 1 {
            return Err(Error::BadQuadrature(
                "refinement_factor must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn rule(&self) -> Result<CellRule> {
        self.validate()?;
        Ok(CellRule {
            gl: GaussLegendre::new(NonZeroUsize::new(self.nodes_per_cell).expect("validated")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Endpoint {
    Left,
    Right,
}

// Geometric grading toward an endpoint where the integrand behaves like a
// fractional power of the distance.
const GRADING_RATIO: f64 = 0.5;
const GRADING_LEVELS: usize = 40;
// Cells spanning more than this ratio are split into log-spaced pieces, so
// integrands varying on the scale of `x` stay resolved.
const MAX_PIECE_RATIO: f64 = 2.0;

pub(crate) struct CellRule {
    gl: GaussLegendre,
}

impl CellRule {
    pub(crate) fn integrate(&self, a: f64, b: f64, f: impl FnMut(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.gl.integrate(a, b, f)
    }

    /// Composite rule on subintervals shrinking geometrically toward `end`.
    pub(crate) fn integrate_graded(
        &self,
        a: f64,
        b: f64,
        end: Endpoint,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        if b <= a {
            return 0.0;
        }
        let len = b - a;
        let mut total = 0.0;
        let mut outer = 1.0;
        for _ in 0..GRADING_LEVELS {
            let inner = outer * GRADING_RATIO;
            let (lo, hi) = match end {
                Endpoint::Left => (a + len * inner, a + len * outer),
                Endpoint::Right => (b - len * outer, b - len * inner),
            };
            total += self.gl.integrate(lo, hi, &mut f);
            outer = inner;
        }
        let (lo, hi) = match end {
            Endpoint::Left => (a, a + len * outer),
            Endpoint::Right => (b - len * outer, b),
        };
        total + self.gl.integrate(lo, hi, &mut f)
    }

    /// Integrates over `(a, b)` with `0 < a`, splitting wide cells
    /// geometrically and grading the piece next to a singular endpoint.
    pub(crate) fn integrate_with(
        &self,
        a: f64,
        b: f64,
        singular: Option<Endpoint>,
        mut f: impl FnMut(f64) -> f64,
    ) -> f64 {
        if b <= a {
            return 0.0;
        }
        let log_ratio = (b / a).ln();
        let pieces = ((log_ratio / MAX_PIECE_RATIO.ln()).ceil() as usize).max(1);
        let mut total = 0.0;
        let mut lo = a;
        for k in 0..pieces {
            let hi = if k + 1 == pieces {
                b
            } else {
                a * (log_ratio * (k + 1) as f64 / pieces as f64).exp()
            };
            let end = match singular {
                Some(Endpoint::Left) if k == 0 => Some(Endpoint::Left),
                Some(Endpoint::Right) if k + 1 == pieces => Some(Endpoint::Right),
                _ => None,
            };
            total += match end {
                Some(end) => self.integrate_graded(lo, hi, end, &mut f),
                None => self.integrate(lo, hi, &mut f),
            };
            lo = hi;
        }
        total
    }
}
