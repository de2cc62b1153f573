//! `combing` command-line front end.
//!
//! Standard output carries the primary artifact (JSON or CSV). Domain
//! errors exit with status 1 and a JSON object `{"error", "message"}` on
//! standard error; usage errors exit with status 2.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "combing", version, about = "Entanglement-combing rate regions")]
pub struct Cli {
    /// Membership tolerance override (positive).
    #[arg(long, global = true, value_parser = positive_float)]
    pub tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a standard state file.
    Gen(GenArgs),
    /// Subset entropy table of a state.
    Table(InputArgs),
    /// Full combing region.
    Region {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Membership of a point in the region.
    Member {
        #[command(flatten)]
        input: InputArgs,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        point: Vec<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
    },
    /// Volume, affine dimension and degeneracy of the region.
    Volume(InputArgs),
    /// Greedy comb trace.
    Comb {
        #[command(flatten)]
        input: InputArgs,
        /// Processing order of the Bobs (1-based); default is B_m first.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Decompose a region point over corner points.
    Decompose {
        #[command(flatten)]
        input: InputArgs,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        point: Vec<f64>,
    },
    /// Breeding schedule for a region point.
    Ledger {
        #[command(flatten)]
        input: InputArgs,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        point: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        n0: f64,
        #[arg(long, default_value_t = 10)]
        rounds: u32,
        /// Report floored counts for this block size instead of rates.
        #[arg(long)]
        integer_block: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// LOCC rate lower bound from SOURCE to TARGET.
    Rate {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 0, conflicts_with = "best")]
        alice: usize,
        /// Maximize over every choice of the distinguished party.
        #[arg(long)]
        best: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Overlap of the region with external constraints.
    Overlap {
        #[command(flatten)]
        input: InputArgs,
        /// JSON list of {"coeffs": [...], "lower_bound": b}.
        #[arg(long)]
        constraints: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = ["ghz", "w", "product-pairs", "haar"])]
    pub kind: String,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 2)]
    pub local_dim: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// State, table, or region file.
    pub input: PathBuf,
    /// Party acting as Alice (state inputs only).
    #[arg(long, default_value_t = 0)]
    pub alice: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Down,
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "error": e.code(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(1)
        }
    }
}
