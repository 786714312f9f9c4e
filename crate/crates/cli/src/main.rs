mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use structrand::Error;

#[derive(Parser, Debug)]
#[command(name = "structrand", version, about = "Structure-vs-randomness decompositions and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Gowers norms U¹..U^d with the transform cross-check and monotonicity chain.
    Gowers(Common),
    /// Weak, orthogonal or strong decomposition against an atom family.
    Decompose(DecomposeArgs),
    /// Arithmetic regularity of a subset of F₂ⁿ.
    ArithReg(ArithArgs),
    /// Szemerédi regularity partition of a graph.
    GraphReg(GraphArgs),
    /// Weak (cut-atom) regularity of a graph.
    WeakReg(WeakArgs),
    /// 100% / 99% inverse theorems for Gowers norms.
    Inverse(InverseArgs),
    /// Sparse structure theorem on the interval-factor model.
    SparseDemo(SparseArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Input file (JSON function or graph, edge list, or `.adj`).
    #[arg(long, conflicts_with = "gen")]
    pub input: Option<PathBuf>,
    /// Generator spec, e.g. `random:8` or `gnp:128:0.5`.
    #[arg(long)]
    pub gen: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub d: Option<u32>,
    /// Growth function: `exp`, `linear:C`, `affine:A,B`, `arith:EPS`, `table:…`.
    #[arg(long)]
    pub growth: Option<String>,
    #[arg(long)]
    pub mode: Option<String>,
    /// Cap on the complexity `M` reached by strong decompositions.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_m: u64,
    /// Output path; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall-clock time in the report (breaks byte-for-byte reproducibility).
    #[arg(long)]
    #[serde(skip)]
    pub timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// `characters`, `rm:K` (Reed–Muller codes of degree ≤ K) or `cuts`.
    #[arg(long)]
    pub atoms: Option<String>,
    /// Scale the input to unit norm first.
    #[arg(long)]
    pub normalize: bool,
    /// Random restarts for the cut-atom search.
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ArithArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Dimension, for inputs given as a bare point list.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GraphArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Minimum number of parts.
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Sub-pairs examined per pair in sampled mode.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct WeakArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InverseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Accepted distance `δ` from norm one; defaults to `1 - ‖f‖_{U^d}`.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SparseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Slack in the majorant condition `‖E(ν|Y)‖∞ <= 1 + η`.
    #[arg(long, default_value_t = 0.2)]
    pub eta: f64,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Gowers(c) => c,
            Command::Decompose(a) => &a.common,
            Command::ArithReg(a) => &a.common,
            Command::GraphReg(a) => &a.common,
            Command::WeakReg(a) => &a.common,
            Command::Inverse(a) => &a.common,
            Command::SparseDemo(a) => &a.common,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Gowers(_) => "gowers",
            Command::Decompose(_) => "decompose",
            Command::ArithReg(_) => "arith-reg",
            Command::GraphReg(_) => "graph-reg",
            Command::WeakReg(_) => "weak-reg",
            Command::Inverse(_) => "inverse",
            Command::SparseDemo(_) => "sparse-demo",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Certificate(_) | Error::Unmet { .. } => 3,
        Error::BudgetExceeded { .. } | Error::BudgetExhausted { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match report::run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
