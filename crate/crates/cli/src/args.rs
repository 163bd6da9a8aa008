use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hardy-factor",
    version,
    about = "Factorizations of weighted Lebesgue, Cesàro and Copson spaces"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Left end of the log grid used for random h, numerical constants and verify
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub grid_min: f64,
    /// Right end of the log grid
    #[arg(long, global = true, default_value_t = 1e3)]
    pub grid_max: f64,
    /// Number of log-spaced cells
    #[arg(long, global = true, default_value_t = 64)]
    pub cells: usize,
    /// Gauss–Legendre nodes per cell
    #[arg(long, global = true, default_value_t = 8)]
    pub nodes_per_cell: usize,
    /// Sample points per cell when extremizing class ratios
    #[arg(long, global = true, default_value_t = 16)]
    pub refinement_factor: usize,
    /// Seed for random inputs; overrides the seed in a sweep file
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative slack for the inequality checks
    #[arg(long, global = true)]
    pub slack: Option<f64>,
    /// Output format (sweep defaults to csv, everything else to json)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormSpace {
    Lp,
    Dp,
    Gp,
    Gstar,
    Cesaro,
    Copson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorSpace {
    Lebesgue,
    Cesaro,
    Copson,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weight-class constants applicable at p
    Constants {
        /// Weight as a JSON file or inline JSON
        #[arg(long)]
        weight: String,
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        /// Also extremize the ratios numerically on the global grid
        #[arg(long)]
        numeric: bool,
        /// Write (t, A(t)) traces as CSV
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// A single norm of h
    Norm {
        /// Step function as a JSON file or inline JSON; random on the global grid if omitted
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        weight: String,
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        #[arg(long, value_enum)]
        space: NormSpace,
        /// Write the norm's profile as CSV
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Constructive factorization h = f·g with its verification report
    Factorize {
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        weight: String,
        #[arg(long, value_parser = parse_exponent)]
        p: f64,
        #[arg(long, value_enum)]
        space: FactorSpace,
        /// Write the class-ratio and g-ratio traces as CSV
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Power-weight sweep over (p, α) described by a JSON spec
    Sweep {
        #[arg(long)]
        spec: String,
    },
    /// Run the full invariant suite on random inputs
    Verify {
        /// Random inputs per check
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

/// Accepts finite positive numbers and `inf`.
pub fn parse_exponent(s: &str) -> Result<f64, String> {
    let p = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        t => t
            .parse::<f64>()
            .map_err(|e| format!("{s:?} is not a number: {e}"))?,
    };
    if p > 0.0 {
        Ok(p)
    } else {
        Err(format!("exponent must be positive, got {s}"))
    }
}
