use std::path::Path;

use hardy_factor::norms::{gp_trace, gstar_trace};
use hardy_factor::sample::{random_step, seeded};
use hardy_factor::sweep::{run_sweep, RowStatus, SweepSpec};
use hardy_factor::verify::{run_suite, VerifyConfig};
use hardy_factor::wclass::{class_trace, estimate_class_constants};
use hardy_factor::{
    cesaro_norm, copson_norm, dp_norm, dual_class_constants, dual_l1_class_constants,
    factorize_cesaro, factorize_cesaro_l1, factorize_copson, factorize_copson_l1,
    factorize_lebesgue, gp_norm, gstar_norm, hardy_class_constants, hardy_l1_class_constants,
    hardy_p, hardy_q, lp_norm, ClassConstants, ClassKind, Error, FactorizationReport, Grid,
    QuadratureSpec, Space, StepFunction, Weight, DEFAULT_SLACK, LEBESGUE_SLACK,
};
use serde::Serialize;

use crate::args::{Command, FactorSpace, Format, GlobalArgs, NormSpace};
use crate::output::{load_json, plot_rows, print_csv, print_json, write_plot, Failure, PlotRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    fn from_passed(ok: bool) -> Self {
        if ok {
            Outcome::Passed
        } else {
            Outcome::Failed
        }
    }
}

/// Samples per cell for the profiles written by `--plot-data`.
const PLOT_SAMPLES: usize = 8;

pub fn run(global: &GlobalArgs, command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Constants {
            weight,
            p,
            numeric,
            plot_data,
        } => constants(global, weight, *p, *numeric, plot_data.as_deref()),
        Command::Norm {
            h,
            weight,
            p,
            space,
            plot_data,
        } => norm(
            global,
            h.as_deref(),
            weight,
            *p,
            *space,
            plot_data.as_deref(),
        ),
        Command::Factorize {
            h,
            weight,
            p,
            space,
            plot_data,
        } => factorize(
            global,
            h.as_deref(),
            weight,
            *p,
            *space,
            plot_data.as_deref(),
        ),
        Command::Sweep { spec } => sweep(global, spec),
        Command::Verify { trials } => verify(global, *trials),
    }
}

fn quadrature(g: &GlobalArgs) -> Result<QuadratureSpec, Failure> {
    Ok(QuadratureSpec::new(g.nodes_per_cell, g.refinement_factor)?)
}

fn grid(g: &GlobalArgs) -> Result<Grid, Failure> {
    Ok(Grid::log_grid(g.grid_min, g.grid_max, g.cells)?)
}

fn slack(g: &GlobalArgs, default: f64) -> Result<f64, Failure> {
    match g.slack {
        Some(s) if !(s >= 0.0 && s.is_finite()) => Err(Failure::new(
            "invalid",
            format!("slack must be finite and nonnegative, got {s}"),
        )),
        Some(s) => Ok(s),
        None => Ok(default),
    }
}

fn load_weight(arg: &str) -> Result<Weight, Failure> {
    let v: Weight = load_json(arg, "weight")?;
    v.validate()?;
    Ok(v)
}

/// `h` from a file, or uniform on [0, 1) over the global grid.
fn load_h(g: &GlobalArgs, arg: Option<&str>) -> Result<(StepFunction, HSource), Failure> {
    match arg {
        Some(a) => Ok((load_json(a, "step function")?, HSource::Input)),
        None => {
            let seed = g.seed.unwrap_or(0);
            Ok((
                random_step(&mut seeded(seed), &grid(g)?, false),
                HSource::Random { seed },
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
enum HSource {
    Input,
    Random { seed: u64 },
}

fn write_plot_if(
    path: Option<&Path>,
    rows: impl FnOnce() -> Result<Vec<PlotRow>, Failure>,
) -> Result<(), Failure> {
    match path {
        Some(p) => write_plot(p, &rows()?),
        None => Ok(()),
    }
}

// ---- constants

#[derive(Debug, Serialize)]
struct ConstantsRecord {
    class: &'static str,
    p: Option<f64>,
    method: &'static str,
    status: &'static str,
    upper: Option<f64>,
    lower: Option<f64>,
    exact: Option<bool>,
    truncated: Option<bool>,
    detail: Option<String>,
}

fn class_name(kind: ClassKind) -> (&'static str, Option<f64>) {
    match kind {
        ClassKind::Hardy { p } => ("hardy", Some(p)),
        ClassKind::HardyL1 => ("hardy_l1", None),
        ClassKind::Dual { p } => ("dual", Some(p)),
        ClassKind::DualL1 => ("dual_l1", None),
    }
}

fn record(
    kind: ClassKind,
    method: &'static str,
    r: hardy_factor::Result<ClassConstants>,
) -> Result<ConstantsRecord, Failure> {
    let (class, p) = class_name(kind);
    match r {
        Ok(c) => Ok(ConstantsRecord {
            class,
            p,
            method,
            status: "ok",
            upper: Some(c.upper),
            lower: Some(c.lower),
            exact: Some(c.exact),
            truncated: Some(c.truncated),
            detail: None,
        }),
        Err(e @ (Error::OutOfClass(_) | Error::DivergentIntegral(_))) => Ok(ConstantsRecord {
            class,
            p,
            method,
            status: "out_of_class",
            upper: None,
            lower: None,
            exact: None,
            truncated: None,
            detail: Some(e.to_string()),
        }),
        Err(e) => Err(e.into()),
    }
}

/// Classes defined at `p`: the `p = 1` pair always, the `p`-pair when `p > 1`.
fn kinds_at(p: f64) -> Result<Vec<ClassKind>, Failure> {
    if p == 1.0 {
        Ok(vec![ClassKind::HardyL1, ClassKind::DualL1])
    } else if p > 1.0 && p.is_finite() {
        Ok(vec![
            ClassKind::Hardy { p },
            ClassKind::Dual { p },
            ClassKind::HardyL1,
            ClassKind::DualL1,
        ])
    } else {
        Err(Failure::new(
            "bad_exponent",
            format!("class constants need 1 ≤ p < ∞, got {p}"),
        ))
    }
}

fn default_constants(v: &Weight, kind: ClassKind) -> hardy_factor::Result<ClassConstants> {
    match kind {
        ClassKind::Hardy { p } => hardy_class_constants(v, p),
        ClassKind::HardyL1 => hardy_l1_class_constants(v),
        ClassKind::Dual { p } => dual_class_constants(v, p),
        ClassKind::DualL1 => dual_l1_class_constants(v),
    }
}

fn constants(
    g: &GlobalArgs,
    weight: &str,
    p: f64,
    numeric: bool,
    plot: Option<&Path>,
) -> Result<Outcome, Failure> {
    let v = load_weight(weight)?;
    let kinds = kinds_at(p)?;
    let q = quadrature(g)?;
    let mut records = Vec::new();
    for &kind in &kinds {
        records.push(record(kind, "default", default_constants(&v, kind))?);
    }
    if numeric {
        let grid = grid(g)?;
        for &kind in &kinds {
            records.push(record(
                kind,
                "numeric",
                estimate_class_constants(&v, kind, &grid, &q),
            )?);
        }
    }
    write_plot_if(plot, || {
        let grid = grid(g)?;
        let mut rows = Vec::new();
        for &kind in &kinds {
            match class_trace(&v, kind, &grid, &q) {
                Ok(trace) => rows.extend(plot_rows(class_name(kind).0, trace)),
                Err(Error::OutOfClass(_) | Error::DivergentIntegral(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(rows)
    })?;
    match g.format.unwrap_or(Format::Json) {
        Format::Json => {
            print_json(&serde_json::json!({ "weight": v, "p": p, "records": records }))?
        }
        Format::Csv => print_csv(&records)?,
    }
    Ok(Outcome::Passed)
}

// ---- norm

#[derive(Debug, Serialize)]
struct NormRecord {
    space: &'static str,
    #[serde(serialize_with = "hardy_factor::factorize::exponent_ser")]
    p: f64,
    value: f64,
    cells: usize,
}

fn norm(
    g: &GlobalArgs,
    h: Option<&str>,
    weight: &str,
    p: f64,
    space: NormSpace,
    plot: Option<&Path>,
) -> Result<Outcome, Failure> {
    let v = load_weight(weight)?;
    let (h, source) = load_h(g, h)?;
    let q = quadrature(g)?;
    let (name, value) = match space {
        NormSpace::Lp => ("lp", lp_norm(&h, &v, p)?),
        NormSpace::Dp => ("dp", dp_norm(&h, &v, p)?),
        NormSpace::Gp => ("gp", gp_norm(&h, &v, p)?),
        NormSpace::Gstar => ("gstar", gstar_norm(&h, &v, p)?),
        NormSpace::Cesaro => ("cesaro", cesaro_norm(&h, &v, p, &q)?),
        NormSpace::Copson => ("copson", copson_norm(&h, &v, p, &q)?),
    };
    write_plot_if(plot, || {
        let trace = match space {
            NormSpace::Gp => gp_trace(&h, &v, p)?,
            NormSpace::Gstar => gstar_trace(&h, &v, p)?,
            NormSpace::Cesaro => {
                let ph = hardy_p(&h.abs());
                profile(&h, |t| ph.eval(t))?
            }
            NormSpace::Copson => {
                let qh = hardy_q(&h.abs());
                profile(&h, |t| qh.eval(t))?
            }
            NormSpace::Lp | NormSpace::Dp => profile(&h, |t| Ok(h.eval(t)))?,
        };
        Ok(plot_rows(name, trace).collect())
    })?;
    let rec = NormRecord {
        space: name,
        p,
        value,
        cells: h.grid().cells(),
    };
    match g.format.unwrap_or(Format::Json) {
        Format::Json => print_json(&serde_json::json!({ "norm": rec, "h": source, "weight": v }))?,
        Format::Csv => print_csv(&[rec])?,
    }
    Ok(Outcome::Passed)
}

/// Log-spaced samples of `f` inside every cell of `h`.
fn profile(
    h: &StepFunction,
    f: impl Fn(f64) -> hardy_factor::Result<f64>,
) -> Result<Vec<(f64, f64)>, Failure> {
    let grid = h.grid();
    let mut out = Vec::with_capacity(grid.cells() * PLOT_SAMPLES + 1);
    out.push((grid.start(), f(grid.start())?));
    for i in 0..grid.cells() {
        let (a, b) = grid.cell(i);
        for k in 1..=PLOT_SAMPLES {
            let t = a * (b / a).powf(k as f64 / PLOT_SAMPLES as f64);
            out.push((t, f(t)?));
        }
    }
    Ok(out)
}

// ---- factorize

#[derive(Debug, Serialize)]
struct FactorizeRow {
    space: Space,
    #[serde(serialize_with = "hardy_factor::factorize::exponent_ser")]
    p: f64,
    cells: usize,
    norm_h: f64,
    norm_f: f64,
    norm_g: f64,
    product: f64,
    ratio: f64,
    lower_constant: f64,
    upper_constant: f64,
    lower_ok: bool,
    upper_ok: bool,
    identity_ok: bool,
    g_bound_ok: bool,
    reconstruction_ok: bool,
    monotone_ok: bool,
    truncated: bool,
    passed: bool,
}

impl From<&FactorizationReport> for FactorizeRow {
    fn from(r: &FactorizationReport) -> Self {
        Self {
            space: r.space,
            p: r.p,
            cells: r.f.grid().cells(),
            norm_h: r.norm_h,
            norm_f: r.norm_f,
            norm_g: r.norm_g,
            product: r.product,
            ratio: r.ratio(),
            lower_constant: r.lower_constant,
            upper_constant: r.upper_constant,
            lower_ok: r.lower_ok,
            upper_ok: r.upper_ok,
            identity_ok: r.identity_ok,
            g_bound_ok: r.g_bound_ok,
            reconstruction_ok: r.reconstruction_ok,
            monotone_ok: r.monotone_ok,
            truncated: r.truncated,
            passed: r.passed(),
        }
    }
}

fn factorize(
    g: &GlobalArgs,
    h: Option<&str>,
    weight: &str,
    p: f64,
    space: FactorSpace,
    plot: Option<&Path>,
) -> Result<Outcome, Failure> {
    let v = load_weight(weight)?;
    let (h, source) = load_h(g, h)?;
    let q = quadrature(g)?;
    let report = match space {
        FactorSpace::Lebesgue => factorize_lebesgue(&h, &v, p, slack(g, LEBESGUE_SLACK)?)?,
        FactorSpace::Cesaro if p == 1.0 => {
            factorize_cesaro_l1(&h, &v, &q, slack(g, DEFAULT_SLACK)?)?
        }
        FactorSpace::Cesaro => factorize_cesaro(&h, &v, p, &q, slack(g, DEFAULT_SLACK)?)?,
        FactorSpace::Copson if p == 1.0 => {
            factorize_copson_l1(&h, &v, &q, slack(g, DEFAULT_SLACK)?)?
        }
        FactorSpace::Copson => factorize_copson(&h, &v, p, &q, slack(g, DEFAULT_SLACK)?)?,
    };
    write_plot_if(plot, || factorize_plot(&report, &v, p, space, &q))?;
    match g.format.unwrap_or(Format::Json) {
        Format::Json => print_json(
            &serde_json::json!({ "report": report, "h": source, "passed": report.passed() }),
        )?,
        Format::Csv => print_csv(&[FactorizeRow::from(&report)])?,
    }
    Ok(Outcome::from_passed(report.passed()))
}

fn factorize_plot(
    r: &FactorizationReport,
    v: &Weight,
    p: f64,
    space: FactorSpace,
    q: &QuadratureSpec,
) -> Result<Vec<PlotRow>, Failure> {
    let grid = r.f.grid();
    let mut rows = Vec::new();
    let kind = match space {
        FactorSpace::Lebesgue => None,
        FactorSpace::Cesaro if p == 1.0 => Some(ClassKind::HardyL1),
        FactorSpace::Cesaro => Some(ClassKind::Hardy { p }),
        FactorSpace::Copson if p == 1.0 => Some(ClassKind::DualL1),
        FactorSpace::Copson => Some(ClassKind::Dual { p }),
    };
    if let Some(kind) = kind {
        rows.extend(plot_rows("class_ratio", class_trace(v, kind, grid, q)?));
    }
    let g_trace = match space {
        FactorSpace::Lebesgue if p.is_finite() => Some(gp_trace(&r.g, v, p)?),
        FactorSpace::Cesaro if p > 1.0 => {
            let pp = hardy_factor::conjugate_exponent(p);
            Some(gp_trace(&r.g, &v.conjugate_weight(p)?, pp)?)
        }
        FactorSpace::Copson if p > 1.0 => {
            let pp = hardy_factor::conjugate_exponent(p);
            Some(gstar_trace(&r.g, &v.conjugate_weight(p)?, pp)?)
        }
        _ => None,
    };
    if let Some(t) = g_trace {
        rows.extend(plot_rows("g_ratio", t));
    }
    Ok(rows)
}

// ---- sweep

fn sweep(g: &GlobalArgs, spec_arg: &str) -> Result<Outcome, Failure> {
    let mut spec: SweepSpec = load_json(spec_arg, "sweep spec")?;
    if let Some(seed) = g.seed {
        spec.seed = seed;
    }
    if let Some(s) = g.slack {
        spec.slack = s;
    }
    let rows = run_sweep(&spec)?;
    let ok = rows
        .iter()
        .all(|r| matches!(r.status, RowStatus::Pass | RowStatus::Skipped));
    match g.format.unwrap_or(Format::Csv) {
        Format::Csv => print_csv(&rows)?,
        Format::Json => {
            print_json(&serde_json::json!({ "spec": spec, "rows": rows, "passed": ok }))?
        }
    }
    Ok(Outcome::from_passed(ok))
}

// ---- verify

fn verify(g: &GlobalArgs, trials: usize) -> Result<Outcome, Failure> {
    let cfg = VerifyConfig {
        seed: g.seed.unwrap_or(0),
        grid_min: g.grid_min,
        grid_max: g.grid_max,
        cells: g.cells,
        trials,
        quadrature: quadrature(g)?,
        slack: slack(g, DEFAULT_SLACK)?,
    };
    let checks = run_suite(&cfg)?;
    let ok = checks.iter().all(|c| c.passed);
    match g.format.unwrap_or(Format::Json) {
        Format::Json => {
            print_json(&serde_json::json!({ "config": cfg, "checks": checks, "passed": ok }))?
        }
        Format::Csv => print_csv(&checks)?,
    }
    Ok(Outcome::from_passed(ok))
}
