//! Invariant suite run by the `verify` command. Each check draws its own
//! seeded stream, so results do not depend on scheduling.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::factorize::{
    factorize_cesaro, factorize_cesaro_l1, factorize_copson, factorize_copson_l1,
    factorize_lebesgue, FactorizationReport, LEBESGUE_SLACK,
};
use crate::grid::{Grid, StepFunction};
use crate::level::{concave_majorant_oracle, level_function};
use crate::norms::{cesaro_norm, copson_norm, gp_norm, gp_norm_dense, gstar_norm, lp_norm};
use crate::quadrature::QuadratureSpec;
use crate::sample::{random_sampled_weight, random_step, trial_rng};
use crate::wclass::{
    dual_class_constants, estimate_class_constants, hardy_class_constants, hardy_factor, ClassKind,
};
use crate::weights::{conjugate_exponent, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub grid_min: f64,
    pub grid_max: f64,
    pub cells: usize,
    pub trials: usize,
    pub quadrature: QuadratureSpec,
    pub slack: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            grid_min: 1e-3,
            grid_max: 1e3,
            cells: 64,
            trials: 20,
            quadrature: QuadratureSpec::default(),
            slack: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&VerifyConfig, &Grid) -> std::result::Result<String, String>;

const P_VALUES: [f64; 3] = [1.5, 2.0, 3.0];
const ALPHA_VALUES: [f64; 3] = [-0.5, 0.0, 0.4];

fn pairs(keep: impl Fn(f64, f64) -> bool) -> Vec<(f64, f64)> {
    P_VALUES
        .iter()
        .flat_map(|&p| ALPHA_VALUES.iter().map(move |&a| (p, a)))
        .filter(|&(p, a)| keep(p, a))
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn e2s<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn closed_forms(_: &VerifyConfig, _: &Grid) -> std::result::Result<String, String> {
    let mut worst = 0.0_f64;
    for (p, a) in pairs(|p, a| a < p - 1.0) {
        let c = e2s(hardy_class_constants(&Weight::power(a).unwrap(), p))?;
        worst = worst.max(rel(hardy_factor(p) * c.upper, p / (p - a - 1.0)));
    }
    for (p, a) in pairs(|_, a| a > -1.0) {
        let c = e2s(dual_class_constants(&Weight::power(a).unwrap(), p))?;
        worst = worst.max(rel(hardy_factor(p) * c.upper, p / (a + 1.0)));
        let lower = (p - 1.0).powf(1.0 / conjugate_exponent(p)) / (a + 1.0);
        worst = worst.max(rel(c.lower, lower));
    }
    if worst <= 1e-9 {
        Ok(format!("max rel err {worst:.1e}"))
    } else {
        Err(format!("max rel err {worst:.1e} exceeds 1e-9"))
    }
}

fn numerical_constants(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    let mut worst = 0.0_f64;
    for (p, a) in pairs(|p, a| a < p - 1.0 && a > -1.0) {
        let v = Weight::power(a).unwrap();
        for kind in [ClassKind::Hardy { p }, ClassKind::Dual { p }] {
            let exact = match kind {
                ClassKind::Hardy { .. } => e2s(hardy_class_constants(&v, p))?,
                _ => e2s(dual_class_constants(&v, p))?,
            };
            let est = e2s(estimate_class_constants(&v, kind, grid, &cfg.quadrature))?;
            worst = worst
                .max(rel(est.upper, exact.upper))
                .max(rel(est.lower, exact.lower));
        }
    }
    if worst <= 1e-3 {
        Ok(format!("max rel err {worst:.1e}"))
    } else {
        Err(format!("max rel err {worst:.1e} exceeds 1e-3"))
    }
}

fn level_oracle(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed ^ 0x1e5e1, t as u64);
        let h = random_step(&mut rng, grid, false);
        let v = if t % 2 == 0 {
            Weight::power(rng.random_range(-0.9..2.0)).unwrap()
        } else {
            random_sampled_weight(&mut rng, grid)
        };
        let d = e2s(level_function(&h, &v))?;
        let mut pts = vec![(0.0, 0.0)];
        let (mut x, mut y, mut yl) = (0.0, 0.0, 0.0);
        for i in 0..grid.cells() {
            let (a, b) = grid.cell(i);
            let m = v.mass(a, b);
            x += m;
            y += h.value(i) * m;
            yl += d.level.value(i) * m;
            pts.push((x, y));
            if yl < y - 1e-12 * y.abs() {
                return Err(format!(
                    "trial {t}: majorization fails at breakpoint {}",
                    i + 1
                ));
            }
        }
        if (yl - y).abs() > 1e-12 * y.abs() {
            return Err(format!("trial {t}: mass {yl} vs {y}"));
        }
        let slopes = e2s(concave_majorant_oracle(&pts))?;
        let scale = h.values().iter().fold(0.0_f64, |m, x| m.max(*x));
        if let Some(i) =
            (0..grid.cells()).find(|&i| (slopes[i] - d.level.value(i)).abs() > 1e-12 * scale)
        {
            return Err(format!(
                "trial {t} cell {i}: PAVA {} vs hull {}",
                d.level.value(i),
                slopes[i]
            ));
        }
        let again = e2s(level_function(&d.level, &v))?;
        if again.level != d.level {
            return Err(format!("trial {t}: level function not idempotent"));
        }
    }
    Ok(format!("{} cases", cfg.trials))
}

fn hardy_lemma(cfg: &VerifyConfig, _: &Grid) -> std::result::Result<String, String> {
    for t in 0..cfg.trials.max(100) {
        let mut rng = trial_rng(cfg.seed ^ 0x4a7d, t as u64);
        let n = rng.random_range(1..=32);
        let grid = Grid::new((1..=n + 1).map(|k| k as f64).collect()).unwrap();
        let f: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64).collect();
        let mut g: Vec<f64> = (0..n).map(|_| rng.random_range(0..10) as f64).collect();
        let (mut fs, mut gs) = (0.0, 0.0);
        for i in 0..n {
            fs += f[i];
            gs += g[i];
            if gs < fs {
                g[i] += fs - gs;
                gs = fs;
            }
        }
        let mut w: Vec<f64> = (0..n).map(|_| rng.random_range(0..20) as f64).collect();
        w.sort_by(|a, b| b.total_cmp(a));
        let (f, g, w) = (
            StepFunction::new(grid.clone(), f).unwrap(),
            StepFunction::new(grid.clone(), g).unwrap(),
            StepFunction::new(grid, w).unwrap(),
        );
        let (lhs, rhs) = (f.inner(&w).unwrap(), g.inner(&w).unwrap());
        if lhs > rhs {
            return Err(format!("trial {t}: {lhs} > {rhs}"));
        }
    }
    Ok(format!("{} triples", cfg.trials.max(100)))
}

fn lebesgue(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed ^ 0x1eb, t as u64);
        let h = random_step(&mut rng, grid, true);
        let v = if t % 2 == 0 {
            Weight::power(rng.random_range(-0.9..2.0)).unwrap()
        } else {
            random_sampled_weight(&mut rng, grid)
        };
        for p in [1.0, 2.0] {
            let r = e2s(factorize_lebesgue(&h, &v, p, LEBESGUE_SLACK))?;
            if !r.passed() {
                return Err(format!(
                    "trial {t} p={p}: norm_h {}, norm_f {}, norm_g {}",
                    r.norm_h, r.norm_f, r.norm_g
                ));
            }
        }
    }
    Ok(format!("{} cases at p = 1, 2", cfg.trials))
}

fn sandwich_failure(r: &FactorizationReport) -> Option<String> {
    (!r.passed()).then(|| {
        format!(
            "norm_h {}, norm_f {}, norm_g {}, lower {}, upper {}",
            r.norm_h, r.norm_f, r.norm_g, r.lower_constant, r.upper_constant
        )
    })
}

fn factorizations(
    cfg: &VerifyConfig,
    grid: &Grid,
    copson: bool,
) -> std::result::Result<String, String> {
    let keep = |p: f64, a: f64| if copson { a > -1.0 } else { a < p - 1.0 };
    let mut runs = 0;
    for (p, a) in pairs(keep) {
        let v = Weight::power(a).unwrap();
        for t in 0..cfg.trials {
            let h = random_step(&mut trial_rng(cfg.seed, t as u64), grid, true);
            let r = if copson {
                e2s(factorize_copson(&h, &v, p, &cfg.quadrature, cfg.slack))?
            } else {
                e2s(factorize_cesaro(&h, &v, p, &cfg.quadrature, cfg.slack))?
            };
            if let Some(why) = sandwich_failure(&r) {
                return Err(format!("p={p} α={a} trial {t}: {why}"));
            }
            runs += 1;
        }
    }
    for &a in &ALPHA_VALUES {
        let v = Weight::power(a).unwrap();
        for t in 0..cfg.trials {
            let h = random_step(&mut trial_rng(cfg.seed, t as u64), grid, true);
            let r = match (copson, a) {
                (false, a) if a < 0.0 => {
                    e2s(factorize_cesaro_l1(&h, &v, &cfg.quadrature, cfg.slack))?
                }
                (true, a) if a > -1.0 => {
                    e2s(factorize_copson_l1(&h, &v, &cfg.quadrature, cfg.slack))?
                }
                _ => continue,
            };
            if let Some(why) = sandwich_failure(&r) {
                return Err(format!("p=1 α={a} trial {t}: {why}"));
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} factorizations"))
}

fn cesaro(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    factorizations(cfg, grid, false)
}

fn copson(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    factorizations(cfg, grid, true)
}

fn best_form(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    for (p, a) in pairs(|p, a| a < p - 1.0) {
        let v = Weight::power(a).unwrap();
        let c = hardy_factor(p) * e2s(hardy_class_constants(&v, p))?.upper;
        for t in 0..cfg.trials {
            let h = random_step(&mut trial_rng(cfg.seed ^ 0xbe57, t as u64), grid, true);
            let ces = e2s(cesaro_norm(&h, &v, p, &cfg.quadrature))?;
            let lp = e2s(lp_norm(&h, &v, p))?;
            if ces > c * lp + cfg.slack * ces {
                return Err(format!("p={p} α={a} trial {t}: {ces} > {c}·{lp}"));
            }
        }
    }
    Ok(format!("{} functions per pair", cfg.trials))
}

fn norm_axioms(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    let v = Weight::power(-0.25).unwrap();
    let q = &cfg.quadrature;
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed ^ 0x40, t as u64);
        let h = random_step(&mut rng, grid, true);
        let lambda = rng.random_range(-5.0..5.0_f64);
        let scaled = h.scale(lambda).unwrap();
        let norms = |f: &StepFunction| -> Result<[f64; 5]> {
            Ok([
                lp_norm(f, &v, 2.0)?,
                gp_norm(f, &v, 2.0)?,
                gstar_norm(f, &v, 2.0)?,
                cesaro_norm(f, &v, 2.0, q)?,
                copson_norm(f, &v, 2.0, q)?,
            ])
        };
        let (a, b) = (e2s(norms(&h))?, e2s(norms(&scaled))?);
        for k in 0..5 {
            if (b[k] - lambda.abs() * a[k]).abs() > 1e-12 * b[k].max(1e-300) {
                return Err(format!(
                    "trial {t}: norm {k} not homogeneous ({} vs {})",
                    b[k],
                    lambda.abs() * a[k]
                ));
            }
        }
        let exact = e2s(gp_norm(&h, &v, 2.0))?;
        let dense = e2s(gp_norm_dense(&h, &v, 2.0, 64))?;
        if (exact - dense).abs() > 1e-12 * exact {
            return Err(format!(
                "trial {t}: G_p breakpoint {exact} vs dense {dense}"
            ));
        }
    }
    Ok(format!("{} functions", cfg.trials))
}

const CHECKS: [(&str, Check); 10] = [
    ("closed-form class constants", closed_forms),
    ("numerical class constants", numerical_constants),
    ("level function vs concave hull", level_oracle),
    ("Hardy lemma", hardy_lemma),
    ("Lebesgue factorization", lebesgue),
    ("Cesàro factorization sandwich", cesaro),
    ("Copson factorization sandwich", copson),
    ("best-form Hardy inequality", best_form),
    ("norm homogeneity and G_p sampling", norm_axioms),
    ("quadrature refinement", refinement),
];

fn refinement(cfg: &VerifyConfig, grid: &Grid) -> std::result::Result<String, String> {
    let v = Weight::power(0.0).unwrap();
    let q = cfg.quadrature;
    let q2 = QuadratureSpec {
        nodes_per_cell: 2 * q.nodes_per_cell,
        ..q
    };
    let mut worst = 0.0_f64;
    for t in 0..cfg.trials {
        let h = random_step(&mut trial_rng(cfg.seed ^ 0x2e, t as u64), grid, false);
        for copson in [false, true] {
            let (a, b) = if copson {
                (
                    e2s(copson_norm(&h, &v, 2.0, &q))?,
                    e2s(copson_norm(&h, &v, 2.0, &q2))?,
                )
            } else {
                (
                    e2s(cesaro_norm(&h, &v, 2.0, &q))?,
                    e2s(cesaro_norm(&h, &v, 2.0, &q2))?,
                )
            };
            worst = worst.max(rel(a, b));
        }
    }
    if worst < 1e-9 {
        Ok(format!("max change on doubling nodes {worst:.1e}"))
    } else {
        Err(format!(
            "max change on doubling nodes {worst:.1e} exceeds 1e-9"
        ))
    }
}

/// Runs every check; outcomes are in a fixed order.
pub fn run_suite(cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    cfg.quadrature.validate()?;
    let grid = Grid::log_grid(cfg.grid_min, cfg.grid_max, cfg.cells)?;
    Ok(CHECKS
        .par_iter()
        .map(|(name, check)| match check(cfg, &grid) {
            Ok(detail) => CheckOutcome {
                name,
                passed: true,
                detail,
            },
            Err(detail) => CheckOutcome {
                name,
                passed: false,
                detail,
            },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let cfg = VerifyConfig {
            cells: 24,
            trials: 3,
            ..VerifyConfig::default()
        };
        for o in run_suite(&cfg).unwrap() {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }
}
