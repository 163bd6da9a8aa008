//! Weights on `(0, ∞)`: analytic power laws `c·t^α` and positive sampled
//! step weights.
//!
//! A sampled weight is zero outside its grid, so any head or tail integral
//! reaching past the grid is truncated. [`Weight::is_truncated`] reports this
//! and every downstream report carries the flag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::StepFunction;

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Weight {
    Power {
        alpha: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        scale: f64,
    },
    Sampled(SampledWeight),
}

/// Step weight with strictly positive cell values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunction", into = "StepFunction")]
pub struct SampledWeight {
    samples: StepFunction,
}

impl SampledWeight {
    pub fn new(samples: StepFunction) -> Result<Self> {
        if let Some((i, &v)) = samples.values().iter().enumerate().find(|(_, &v)| v <= 0.0) {
            return Err(Error::Invalid(format!(
                "sampled weight must be positive, cell {i} holds {v}"
            )));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &StepFunction {
        &self.samples
    }
}

impl TryFrom<StepFunction> for SampledWeight {
    type Error = Error;

    fn try_from(f: StepFunction) -> Result<Self> {
        SampledWeight::new(f)
    }
}

impl From<SampledWeight> for StepFunction {
    fn from(w: SampledWeight) -> Self {
        w.samples
    }
}

/// `∫_a^b x^e dx` for `0 < a ≤ b`, stable when `b/a` is close to one.
pub(crate) fn power_integral(e: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let beta = e + 1.0;
    if beta == 1.0 {
        return b - a;
    }
    let log_ratio = (b / a).ln();
    if beta == 0.0 {
        log_ratio
    } else if (beta * log_ratio).abs() > std::f64::consts::LN_2 {
        (b.powf(beta) - a.powf(beta)) / beta
    } else {
        a.powf(beta) * (beta * log_ratio).exp_m1() / beta
    }
}

fn positive(t: f64) -> Result<f64> {
    if t > 0.0 && !t.is_nan() {
        Ok(t)
    } else {
        Err(Error::NonPositiveArgument(t))
    }
}

impl Weight {
    pub fn power(alpha: f64) -> Result<Self> {
        Self::scaled_power(1.0, alpha)
    }

    pub fn scaled_power(scale: f64, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Invalid(format!(
                "power exponent must be finite, got {alpha}"
            )));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Invalid(format!(
                "power weight scale must be positive, got {scale}"
            )));
        }
        Ok(Weight::Power { alpha, scale })
    }

    pub fn sampled(samples: StepFunction) -> Result<Self> {
        Ok(Weight::Sampled(SampledWeight::new(samples)?))
    }

    /// Re-validates invariants after deserialization of a power weight.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Weight::Power { alpha, scale } => Self::scaled_power(scale, alpha).map(|_| ()),
            Weight::Sampled(_) => Ok(()),
        }
    }

    /// The power exponent, if this is an analytic weight.
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Weight::Power { alpha, .. } => Some(alpha),
            Weight::Sampled(_) => None,
        }
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self, Weight::Sampled(_))
    }

    /// Closed interval outside which the weight vanishes, if bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            Weight::Power { .. } => None,
            Weight::Sampled(s) => Some((s.samples.grid().start(), s.samples.grid().end())),
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        match self.support() {
            None => x > 0.0,
            Some((a, b)) => x >= a && x <= b,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = positive(x)?;
        Ok(match self {
            Weight::Power { alpha, scale } => scale * x.powf(*alpha),
            Weight::Sampled(s) => s.samples.eval(x),
        })
    }

    /// Point value for `x > 0` without argument checks; used inside cells.
    pub(crate) fn density(&self, x: f64) -> f64 {
        match self {
            Weight::Power { alpha, scale } => scale * x.powf(*alpha),
            Weight::Sampled(s) => s.samples.eval(x),
        }
    }

    /// Breakpoints of a sampled weight lying strictly inside `(a, b)`.
    pub(crate) fn interior_breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        match self {
            Weight::Power { .. } => Vec::new(),
            Weight::Sampled(s) => s
                .samples
                .grid()
                .breakpoints()
                .iter()
                .copied()
                .filter(|&x| x > a && x < b)
                .collect(),
        }
    }

    /// `V(t) = ∫_0^t v`.
    pub fn prefix_integral(&self, t: f64) -> Result<f64> {
        let t = positive(t)?;
        match self {
            Weight::Power { alpha, scale } => {
                if *alpha <= -1.0 {
                    return Err(Error::DivergentIntegral(format!(
                        "∫_0^t x^α dx needs α > -1 (α = {alpha})"
                    )));
                }
                Ok(scale * t.powf(alpha + 1.0) / (alpha + 1.0))
            }
            Weight::Sampled(s) => Ok(s.samples.cumulative().eval(t)),
        }
    }

    /// `∫_a^b v(x) x^{-q} dx` over a finite interval inside `(0, ∞)`.
    pub fn moment(&self, q: f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Weight::Power { alpha, scale } => scale * power_integral(alpha - q, a, b),
            Weight::Sampled(s) => {
                let grid = s.samples.grid();
                let mut total = 0.0;
                for i in 0..grid.cells() {
                    let (lo, hi) = grid.cell(i);
                    let (lo, hi) = (lo.max(a), hi.min(b));
                    if lo < hi {
                        total += s.samples.value(i) * power_integral(-q, lo, hi);
                    }
                }
                total
            }
        }
    }

    /// `∫_a^b v`.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        self.moment(0.0, a, b)
    }

    /// `∫_t^∞ v(x) x^{-q} dx`; truncated at the grid end for sampled weights.
    pub fn tail_moment(&self, q: f64, t: f64) -> Result<f64> {
        let t = positive(t)?;
        match self {
            Weight::Power { alpha, scale } => {
                if alpha - q >= -1.0 {
                    return Err(Error::DivergentIntegral(format!(
                        "∫_t^∞ x^(α-q) dx needs α - q < -1 (α = {alpha}, q = {q})"
                    )));
                }
                Ok(scale * t.powf(alpha - q + 1.0) / (q - alpha - 1.0))
            }
            Weight::Sampled(s) => Ok(self.moment(q, t, s.samples.grid().end())),
        }
    }

    /// The weight `v^{1-p'}` with `p' = p/(p-1)`.
    pub fn conjugate_weight(&self, p: f64) -> Result<Weight> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::BadExponent(format!(
                "conjugate weight needs 1 < p < ∞, got {p}"
            )));
        }
        let e = 1.0 - conjugate_exponent(p);
        Ok(match self {
            Weight::Power { alpha, scale } => Weight::Power {
                alpha: alpha * e,
                scale: scale.powf(e),
            },
            Weight::Sampled(s) => Weight::Sampled(SampledWeight {
                samples: s.samples.map(|v| v.powf(e))?,
            }),
        })
    }
}

/// `p' = p / (p - 1)`, with `1' = ∞` and `∞' = 1`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn sampled(bp: &[f64], vals: &[f64]) -> Weight {
        Weight::sampled(StepFunction::new(Grid::new(bp.to_vec()).unwrap(), vals.to_vec()).unwrap())
            .unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(Weight::power(0.0).unwrap().eval(7.3).unwrap(), 1.0);
        assert_eq!(Weight::power(-0.5).unwrap().eval(4.0).unwrap(), 0.5);
        let s = sampled(&[1.0, 2.0, 3.0], &[1.0, 2.0]);
        assert_eq!(s.eval(1.5).unwrap(), 1.0);
        assert_eq!(s.eval(2.5).unwrap(), 2.0);
        assert_eq!(s.eval(5.0).unwrap(), 0.0);
        assert!(!s.in_support(5.0));
        assert_eq!(s.eval(0.0), Err(Error::NonPositiveArgument(0.0)));
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(
            Weight::power(0.0).unwrap().prefix_integral(3.0).unwrap(),
            3.0
        );
        assert_eq!(
            Weight::power(1.0).unwrap().prefix_integral(2.0).unwrap(),
            2.0
        );
        assert!(matches!(
            Weight::power(-1.0).unwrap().prefix_integral(2.0),
            Err(Error::DivergentIntegral(_))
        ));
        let s = sampled(&[1.0, 2.0, 3.0], &[1.0, 2.0]);
        assert_eq!(s.prefix_integral(0.5).unwrap(), 0.0);
        assert_eq!(s.prefix_integral(2.5).unwrap(), 2.0);
    }

    #[test]
    fn tail_examples() {
        let v = Weight::power(0.0).unwrap();
        assert!((v.tail_moment(2.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((v.tail_moment(2.0, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            Weight::power(1.0).unwrap().tail_moment(2.0, 1.0),
            Err(Error::DivergentIntegral(_))
        ));
        let s = sampled(&[1.0, 2.0, 4.0], &[3.0, 1.0]);
        assert_eq!(s.tail_moment(0.0, 1.0).unwrap(), 5.0);
        assert_eq!(s.tail_moment(0.0, 1.0).unwrap(), s.mass(1.0, 4.0));
        assert_eq!(s.tail_moment(1.0, 10.0).unwrap(), 0.0);
        let expect = 3.0 * (2.0_f64).ln() + (2.0_f64).ln();
        assert!((s.tail_moment(1.0, 1.0).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn conjugate_examples() {
        let v = Weight::power(0.0).unwrap().conjugate_weight(2.0).unwrap();
        assert_eq!(v.alpha(), Some(0.0));
        let v = Weight::power(1.0).unwrap().conjugate_weight(2.0).unwrap();
        assert_eq!(v.alpha(), Some(-1.0));
        let s = sampled(&[1.0, 2.0], &[4.0]).conjugate_weight(2.0).unwrap();
        match s {
            Weight::Sampled(s) => assert_eq!(s.samples().values(), &[0.25]),
            _ => unreachable!(),
        }
        assert!(matches!(
            Weight::power(0.0).unwrap().conjugate_weight(1.0),
            Err(Error::BadExponent(_))
        ));
    }

    #[test]
    fn power_increments_match_closed_form() {
        for &alpha in &[-3.0, -1.0, -0.5, 0.0, 0.4, 2.5] {
            let v = Weight::power(alpha).unwrap();
            for &(a, b) in &[(1e-3_f64, 2e-3_f64), (0.5, 7.0), (10.0, 1e4)] {
                let exact: f64 = if alpha == -1.0 {
                    (b / a).ln()
                } else {
                    (b.powf(alpha + 1.0) - a.powf(alpha + 1.0)) / (alpha + 1.0)
                };
                let got = v.mass(a, b);
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs(),
                    "{alpha} {a} {b}"
                );
                if alpha > -1.0 {
                    let diff = v.prefix_integral(b).unwrap() - v.prefix_integral(a).unwrap();
                    assert!((diff - exact).abs() <= 1e-12 * exact.abs());
                }
            }
            // narrow cell: midpoint rule is accurate to O(h^3)
            let (a, b) = (1.0_f64, 1.0 + 1e-7);
            let mid = 0.5 * (a + b);
            let approx = mid.powf(alpha) * (b - a);
            assert!((v.mass(a, b) - approx).abs() <= 1e-12 * approx);
        }
    }

    #[test]
    fn json_forms() {
        let v: Weight = serde_json::from_str(r#"{"kind":"power","alpha":-0.5}"#).unwrap();
        assert_eq!(v, Weight::power(-0.5).unwrap());
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"kind":"power","alpha":-0.5}"#
        );
        let s: Weight =
            serde_json::from_str(r#"{"kind":"sampled","breakpoints":[1,2,4],"values":[1,3]}"#)
                .unwrap();
        assert_eq!(s.support(), Some((1.0, 4.0)));
        assert!(serde_json::from_str::<Weight>(
            r#"{"kind":"sampled","breakpoints":[1,2],"values":[0]}"#
        )
        .is_err());
    }
}
