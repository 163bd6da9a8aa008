use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// Input or I/O problem; reported on stderr and mapped to exit code 2.
#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

impl From<hardy_factor::Error> for Failure {
    fn from(e: hardy_factor::Error) -> Self {
        Self::new(e.kind(), e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::new("io", e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::new("io", e.to_string())
    }
}

/// Loads `arg` as inline JSON when it starts with `{`, otherwise as a path.
pub fn load_json<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| Failure::new("io", format!("cannot read {what} file {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::new("parse", format!("invalid {what}: {e}")))
}

pub fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| Failure::new("io", e.to_string()))?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

pub fn print_csv<T: Serialize>(rows: &[T]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct PlotRow {
    pub series: String,
    pub t: f64,
    pub value: f64,
}

pub fn plot_rows(series: &str, trace: Vec<(f64, f64)>) -> impl Iterator<Item = PlotRow> + '_ {
    trace.into_iter().map(move |(t, value)| PlotRow {
        series: series.to_string(),
        t,
        value,
    })
}

pub fn write_plot(path: &Path, rows: &[PlotRow]) -> Result<(), Failure> {
    // explicit header so an empty trace still yields a well-formed file
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(["series", "t", "value"])?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
