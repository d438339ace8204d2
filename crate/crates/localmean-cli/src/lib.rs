//! Shared argument, failure, and report types for the `localmean` binary,
//! exposed as a library so integration tests can parse its serialized output.

pub mod inputs;
pub mod reports;

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use localmean::Error;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: String) -> Self {
        Failure { code, message }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) | Error::Validation(_) | Error::GammaPole { .. } => 2,
            Error::Data(_) | Error::InsufficientData { .. } => 3,
            _ => 4,
        };
        Failure::new(code, e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Instance {
    Zeta,
    Zeta2,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Builtin functional-equation instance with its coefficient stream
    #[arg(long, value_enum, conflicts_with = "spec")]
    pub instance: Option<Instance>,

    /// Functional-equation spec file (JSON); needs --coeffs for stream commands
    #[arg(long)]
    pub spec: Option<PathBuf>,

    /// Coefficient stream file (.csv or .json); overrides a builtin stream
    #[arg(long)]
    pub coeffs: Option<PathBuf>,

    /// Window anchor X (voronoi: grid spans [X, 4X]; signscan/detect: top end)
    #[arg(long = "X", default_value_t = 1e4)]
    pub x: f64,

    /// Weight sharpness δ in (0, 1]; L = δ⁻¹ X^(1/(2A))
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    /// Dual-series tail tolerance (default per row: 2 x^(1−ϑ) / L)
    #[arg(long)]
    pub tol: Option<f64>,

    /// Sign-change window constant c₀ (default 2)
    #[arg(long)]
    pub c0: Option<f64>,

    /// Expansion order J (default: smallest certified order for the spec)
    #[arg(long = "J")]
    pub j: Option<usize>,

    /// Grid size (voronoi: x points, default 17; detect: decade checkpoints, default 2)
    #[arg(long)]
    pub grid: Option<usize>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,

    /// Write the report to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Recorded in the report header; evaluation itself is deterministic
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
