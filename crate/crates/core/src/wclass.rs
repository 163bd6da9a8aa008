//! Weight-class constants: the least upper and greatest lower bounds in `t`
//! of the ratios that characterize boundedness of `P` and `Q`.
//!
//! | kind        | ratio at `t`                                                     |
//! |-------------|------------------------------------------------------------------|
//! | `Hardy(p)`  | `(∫_t^∞ v x^{-p})^{1/p} (∫_0^t v^{1-p'})^{1/p'}`                 |
//! | `HardyL1`   | `(1/v(t)) ∫_t^∞ v(x)/x dx`                                       |
//! | `Dual(p)`   | `(∫_0^t v)^{1/p} (∫_t^∞ v^{1-p'} x^{-p'})^{1/p'}`                |
//! | `DualL1`    | `V(t) / (t v(t))`                                                |
//!
//! Power weights have every ratio constant in `t` and use closed forms.
//! Sampled weights are extremized over log-spaced points in each cell; the
//! infimum skips the first and last cell, where the truncated head or tail
//! drags the ratio to zero.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::quadrature::{CellRule, QuadratureSpec};
use crate::weights::{conjugate_exponent, power_integral, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum ClassKind {
    Hardy { p: f64 },
    HardyL1,
    Dual { p: f64 },
    DualL1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassConstants {
    pub kind: ClassKind,
    /// Least constant in the upper condition (a supremum over `t`).
    pub upper: f64,
    /// Largest constant in the reverse condition (an infimum over `t`).
    pub lower: f64,
    pub exact: bool,
    pub truncated: bool,
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::BadExponent(format!(
            "class constants need 1 < p < ∞, got {p}"
        )))
    }
}

fn divergent(cond: &str, alpha: f64) -> Error {
    Error::DivergentIntegral(format!("{cond} required (α = {alpha})"))
}

/// Validates the exponent domain of a power weight for `kind`.
pub(crate) fn check_power_domain(kind: ClassKind, alpha: f64) -> Result<()> {
    match kind {
        ClassKind::Hardy { p } => {
            check_p(p)?;
            if alpha >= p - 1.0 {
                return Err(divergent("α < p-1", alpha));
            }
        }
        ClassKind::HardyL1 => {
            if alpha >= 0.0 {
                return Err(divergent("α < 0", alpha));
            }
        }
        ClassKind::Dual { p } => {
            check_p(p)?;
            if alpha <= -1.0 {
                return Err(divergent("α > -1", alpha));
            }
        }
        ClassKind::DualL1 => {
            if alpha <= -1.0 {
                return Err(divergent("α > -1", alpha));
            }
        }
    }
    Ok(())
}

/// Closed-form ratio for `c·t^α`; independent of `t` and of `c`.
pub fn power_class_value(kind: ClassKind, alpha: f64) -> Result<f64> {
    check_power_domain(kind, alpha)?;
    Ok(match kind {
        ClassKind::Hardy { p } => {
            let pp = conjugate_exponent(p);
            (p - alpha - 1.0).powf(-1.0 / p) * ((p - 1.0) / (p - 1.0 - alpha)).powf(1.0 / pp)
        }
        ClassKind::HardyL1 => -1.0 / alpha,
        ClassKind::Dual { p } => (p - 1.0).powf(1.0 / conjugate_exponent(p)) / (alpha + 1.0),
        ClassKind::DualL1 => 1.0 / (alpha + 1.0),
    })
}

/// `p^{1/p} p'^{1/p'}`, the factor relating a `Hardy(p)` or `Dual(p)` class
/// constant to the operator bound.
pub fn hardy_factor(p: f64) -> f64 {
    let pp = conjugate_exponent(p);
    p.powf(1.0 / p) * pp.powf(1.0 / pp)
}

fn constants(v: &Weight, kind: ClassKind) -> Result<ClassConstants> {
    match v {
        Weight::Power { alpha, .. } => {
            let c = power_class_value(kind, *alpha)?;
            Ok(ClassConstants {
                kind,
                upper: c,
                lower: c,
                exact: true,
                truncated: false,
            })
        }
        Weight::Sampled(s) => {
            let grid = s.samples().grid().clone();
            estimate_class_constants(v, kind, &grid, &QuadratureSpec::default())
        }
    }
}

/// `[v]_{M_p}` and `[v]_{m_p}`.
pub fn hardy_class_constants(v: &Weight, p: f64) -> Result<ClassConstants> {
    constants(v, ClassKind::Hardy { p })
}

/// `[v]_{M_1}` and `[v]_{m_1}`.
pub fn hardy_l1_class_constants(v: &Weight) -> Result<ClassConstants> {
    constants(v, ClassKind::HardyL1)
}

/// `[v]_{M_p*}` and `[v]_{m_p*}`.
pub fn dual_class_constants(v: &Weight, p: f64) -> Result<ClassConstants> {
    constants(v, ClassKind::Dual { p })
}

/// `[v]_{M_1*}` and `[v]_{m_1*}`.
pub fn dual_l1_class_constants(v: &Weight) -> Result<ClassConstants> {
    constants(v, ClassKind::DualL1)
}

/// Prefix and suffix integrals of a density over the cells of a grid, with
/// the pieces outside the grid added analytically.
struct Primitive<'a> {
    grid: &'a Grid,
    part: Box<dyn Fn(usize, f64, f64) -> f64 + 'a>,
    /// `∫_0^{x_k}` at each breakpoint.
    prefix: Vec<f64>,
    /// `∫_{x_k}^∞` at each breakpoint.
    suffix: Vec<f64>,
}

impl<'a> Primitive<'a> {
    fn new(
        grid: &'a Grid,
        head: f64,
        tail: f64,
        part: Box<dyn Fn(usize, f64, f64) -> f64 + 'a>,
    ) -> Self {
        let n = grid.cells();
        let cells: Vec<f64> = (0..n)
            .map(|i| {
                let (a, b) = grid.cell(i);
                part(i, a, b)
            })
            .collect();
        let mut prefix = vec![head; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] + cells[i];
        }
        let mut suffix = vec![tail; n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] + cells[i];
        }
        Self {
            grid,
            part,
            prefix,
            suffix,
        }
    }

    fn head(&self, i: usize, t: f64) -> f64 {
        self.prefix[i] + (self.part)(i, self.grid.breakpoints()[i], t)
    }

    fn tail(&self, i: usize, t: f64) -> f64 {
        self.suffix[i + 1] + (self.part)(i, t, self.grid.breakpoints()[i + 1])
    }
}

/// Cell-integral of `v^γ x^{-q}`: exact for sampled weights, Gauss–Legendre
/// for power weights.
fn density_part<'a>(
    v: &'a Weight,
    gamma: f64,
    q: f64,
    cell_value: &'a [f64],
    rule: &'a CellRule,
) -> Box<dyn Fn(usize, f64, f64) -> f64 + 'a> {
    match v {
        Weight::Power { .. } => Box::new(move |_, a, b| {
            rule.integrate_with(a, b, None, |x| v.density(x).powf(gamma) * x.powf(-q))
        }),
        Weight::Sampled(_) => {
            Box::new(move |i, a, b| cell_value[i].powf(gamma) * power_integral(-q, a, b))
        }
    }
}

/// Ratio profile of `kind` on `grid`, evaluated cell by cell.
struct Profile<'a> {
    kind: ClassKind,
    v: &'a Weight,
    cell_value: &'a [f64],
    head: Primitive<'a>,
    tail: Primitive<'a>,
}

impl Profile<'_> {
    fn at(&self, i: usize, t: f64) -> f64 {
        let vt = match self.v {
            Weight::Power { .. } => self.v.density(t),
            Weight::Sampled(_) => self.cell_value[i],
        };
        match self.kind {
            ClassKind::Hardy { p } | ClassKind::Dual { p } => {
                let pp = conjugate_exponent(p);
                let (h, tl) = (self.head.head(i, t), self.tail.tail(i, t));
                let (eh, et) = match self.kind {
                    ClassKind::Hardy { .. } => (1.0 / pp, 1.0 / p),
                    _ => (1.0 / p, 1.0 / pp),
                };
                h.max(0.0).powf(eh) * tl.max(0.0).powf(et)
            }
            ClassKind::HardyL1 => self.tail.tail(i, t) / vt,
            ClassKind::DualL1 => self.head.head(i, t) / (t * vt),
        }
    }
}

fn sample_points(grid: &Grid, refinement: usize) -> Vec<(usize, f64)> {
    let n = grid.cells();
    let mut out = Vec::with_capacity(n * refinement + 1);
    for i in 0..n {
        let (a, b) = grid.cell(i);
        let last = if i + 1 == n {
            refinement
        } else {
            refinement - 1
        };
        for k in 0..=last {
            let t = if k == refinement {
                b
            } else {
                a * (b / a).powf(k as f64 / refinement as f64)
            };
            out.push((i, t));
        }
    }
    out
}

fn with_profile<T>(
    v: &Weight,
    kind: ClassKind,
    grid: &Grid,
    q: &QuadratureSpec,
    body: impl FnOnce(&Profile<'_>, &Grid) -> Result<T>,
) -> Result<T> {
    q.validate()?;
    let rule = q.rule()?;
    if let Weight::Power { alpha, .. } = v {
        check_power_domain(kind, *alpha)?;
    } else if let ClassKind::Hardy { p } | ClassKind::Dual { p } = kind {
        check_p(p)?;
    }
    let grid = match v {
        Weight::Power { .. } => grid.clone(),
        Weight::Sampled(s) => s.samples().grid().clone(),
    };
    let cell_value: Vec<f64> = match v {
        Weight::Power { .. } => Vec::new(),
        Weight::Sampled(s) => s.samples().values().to_vec(),
    };
    let analytic = !v.is_truncated();
    let (x0, xn) = (grid.start(), grid.end());
    // (γ, q) of the head density v^γ x^{-q} and of the tail density
    let ((hg, hq), (tg, tq)) = match kind {
        ClassKind::Hardy { p } => ((1.0 - conjugate_exponent(p), 0.0), (1.0, p)),
        ClassKind::HardyL1 => ((1.0, 0.0), (1.0, 1.0)),
        ClassKind::Dual { p } => {
            let pp = conjugate_exponent(p);
            ((1.0, 0.0), (1.0 - pp, pp))
        }
        ClassKind::DualL1 => ((1.0, 0.0), (1.0, 1.0)),
    };
    let needs_tail = !matches!(kind, ClassKind::DualL1);
    let needs_head = !matches!(kind, ClassKind::HardyL1);
    let (head0, tail0) = if analytic {
        let pw = |g: f64| -> Result<Weight> {
            match v {
                Weight::Power { alpha, scale } => Weight::scaled_power(scale.powf(g), alpha * g),
                Weight::Sampled(_) => unreachable!(),
            }
        };
        let h = if needs_head {
            head_integral(&pw(hg)?, hq, x0)?
        } else {
            0.0
        };
        let t = if needs_tail {
            pw(tg)?.tail_moment(tq, xn)?
        } else {
            0.0
        };
        (h, t)
    } else {
        (0.0, 0.0)
    };
    let profile = Profile {
        kind,
        v,
        cell_value: &cell_value,
        head: Primitive::new(
            &grid,
            head0,
            0.0,
            density_part(v, hg, hq, &cell_value, &rule),
        ),
        tail: Primitive::new(
            &grid,
            0.0,
            tail0,
            density_part(v, tg, tq, &cell_value, &rule),
        ),
    };
    body(&profile, &grid)
}

/// `∫_0^t w x^{-q}` for a power weight `w`.
fn head_integral(w: &Weight, q: f64, t: f64) -> Result<f64> {
    if q == 0.0 {
        return w.prefix_integral(t);
    }
    match w {
        Weight::Power { alpha, scale } => {
            let e = alpha - q;
            if e <= -1.0 {
                return Err(Error::DivergentIntegral(format!("∫_0^t x^{e} dx diverges")));
            }
            Ok(scale * t.powf(e + 1.0) / (e + 1.0))
        }
        Weight::Sampled(_) => Ok(0.0),
    }
}

/// Extremizes the ratio of `kind` over `refinement_factor` log-spaced points
/// per cell. Power weights use `grid` with Gauss–Legendre cell integrals and
/// analytic head and tail; sampled weights use their own grid and exact cell
/// integrals, and the infimum excludes the first and last cell.
pub fn estimate_class_constants(
    v: &Weight,
    kind: ClassKind,
    grid: &Grid,
    q: &QuadratureSpec,
) -> Result<ClassConstants> {
    let truncated = v.is_truncated();
    with_profile(v, kind, grid, q, |profile, grid| {
        let n = grid.cells();
        let points = sample_points(grid, q.refinement_factor);
        let mut upper = 0.0_f64;
        let mut lower = f64::INFINITY;
        for &(i, t) in &points {
            let r = profile.at(i, t);
            upper = upper.max(r);
            let interior = if !truncated {
                true
            } else if n >= 3 {
                i >= 1 && i + 1 < n
            } else {
                t > grid.start() && t < grid.end()
            };
            if interior {
                lower = lower.min(r);
            }
        }
        if !upper.is_finite() || !(lower > 0.0) || !lower.is_finite() {
            return Err(Error::OutOfClass(format!(
                "class constants out of range: upper {upper}, lower {lower}"
            )));
        }
        Ok(ClassConstants {
            kind,
            upper,
            lower,
            exact: false,
            truncated,
        })
    })
}

/// `(t, ratio(t))` at the extremization sample points.
pub fn class_trace(
    v: &Weight,
    kind: ClassKind,
    grid: &Grid,
    q: &QuadratureSpec,
) -> Result<Vec<(f64, f64)>> {
    with_profile(v, kind, grid, q, |profile, grid| {
        Ok(sample_points(grid, q.refinement_factor)
            .into_iter()
            .map(|(i, t)| (t, profile.at(i, t)))
            .collect())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::StepFunction;

    fn pw(a: f64) -> Weight {
        Weight::power(a).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs()
    }

    #[test]
    fn hardy_examples() {
        let c = hardy_class_constants(&pw(0.0), 2.0).unwrap();
        assert!(c.exact && close(c.upper, 1.0, 1e-15) && c.upper == c.lower);
        let c = hardy_class_constants(&pw(-0.5), 2.0).unwrap();
        assert!(close(c.upper, 1.0 / 1.5, 1e-15));
        assert!(matches!(
            hardy_class_constants(&pw(2.0), 2.0),
            Err(Error::DivergentIntegral(_))
        ));
        assert!(matches!(
            hardy_class_constants(&pw(0.0), 1.0),
            Err(Error::BadExponent(_))
        ));
    }

    #[test]
    fn l1_and_dual_examples() {
        assert!(close(
            hardy_l1_class_constants(&pw(-0.5)).unwrap().upper,
            2.0,
            1e-15
        ));
        assert!(close(
            hardy_l1_class_constants(&pw(-1.0)).unwrap().lower,
            1.0,
            1e-15
        ));
        assert!(hardy_l1_class_constants(&pw(0.5)).is_err());
        assert!(close(
            dual_class_constants(&pw(0.0), 2.0).unwrap().upper,
            1.0,
            1e-15
        ));
        assert!(close(
            dual_class_constants(&pw(1.0), 2.0).unwrap().upper,
            0.5,
            1e-15
        ));
        assert!(dual_class_constants(&pw(-2.0), 2.0).is_err());
        assert!(close(
            dual_l1_class_constants(&pw(0.0)).unwrap().upper,
            1.0,
            1e-15
        ));
        assert!(close(
            dual_l1_class_constants(&pw(1.0)).unwrap().upper,
            0.5,
            1e-15
        ));
        assert!(close(
            dual_l1_class_constants(&pw(-0.5)).unwrap().upper,
            2.0,
            1e-15
        ));
    }

    #[test]
    fn hardy_closed_form_matches_direct_sup() {
        // 10^4-point evaluation of the defining ratio from raw integrals
        let (p, alpha) = (2.0, -0.5);
        let pp = conjugate_exponent(p);
        let closed = hardy_class_constants(&pw(alpha), p).unwrap().upper;
        let a = |t: f64| {
            let tail = t.powf(alpha - p + 1.0) / (p - alpha - 1.0);
            let e = alpha * (1.0 - pp);
            let head = t.powf(e + 1.0) / (e + 1.0);
            tail.powf(1.0 / p) * head.powf(1.0 / pp)
        };
        let sup = (0..10_000)
            .map(|k| 1e-3 * 1e6f64.powf(k as f64 / 9_999.0))
            .map(a)
            .fold(0.0, f64::max);
        assert!(close(sup, closed, 1e-12));
    }

    #[test]
    fn numerical_path_matches_closed_form() {
        let grid = Grid::log_grid(1e-2, 1e2, 64).unwrap();
        let q = QuadratureSpec::default();
        for kind in [
            ClassKind::Hardy { p: 1.7 },
            ClassKind::HardyL1,
            ClassKind::Dual { p: 3.0 },
            ClassKind::DualL1,
        ] {
            let v = Weight::scaled_power(3.0, -0.25).unwrap();
            let exact = constants(&v, kind).unwrap();
            let est = estimate_class_constants(&v, kind, &grid, &q).unwrap();
            assert!(close(est.upper, exact.upper, 1e-10), "{kind:?}");
            assert!(close(est.lower, exact.lower, 1e-10), "{kind:?}");
        }
    }

    #[test]
    fn sampled_constant_weight_interior() {
        // v = 1 on (1, 100): Dual L1 ratio is (t - 1)/t on the support
        let grid = Grid::log_grid(1.0, 100.0, 8).unwrap();
        let v = Weight::sampled(StepFunction::constant(grid.clone(), 1.0).unwrap()).unwrap();
        let c = dual_l1_class_constants(&v).unwrap();
        assert!(c.truncated && !c.exact);
        assert!(close(c.upper, 0.99, 1e-12));
        let x1 = grid.breakpoints()[1];
        assert!(close(c.lower, (x1 - 1.0) / x1, 1e-12));
    }

    #[test]
    fn scale_invariance() {
        for &lambda in &[1e-3, 0.5, 7.0] {
            let a =
                hardy_class_constants(&Weight::scaled_power(lambda, 0.3).unwrap(), 2.5).unwrap();
            let b = hardy_class_constants(&pw(0.3), 2.5).unwrap();
            assert!(close(a.upper, b.upper, 1e-12));
        }
    }
}
