//! `comars` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid input (parse, validation, dimension),
//! 3 I/O failure, 4 optimizer pass bound reached (outputs still written),
//! 5 theory-check violation.

mod commands;
mod manifest;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use comars::optimizer::ObjectiveKind;
use serde::Serialize;

pub use manifest::{default_manifest_path, RunManifest};

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_BOUND: i32 = 4;
pub const EXIT_THEORY: i32 = 5;

/// Caps optimizer worker threads.
pub const THREADS_ENV: &str = "COMARS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "comars", version, about = "Build, optimize, and evaluate concatenated OMARS designs")]
pub struct Cli {
    /// Where to write the run manifest (default: next to the main output).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a conference design, generated or read from CSV.
    Generate(GenerateArgs),
    /// Concatenate two DSD bodies with optimized folds and column order.
    Optimize(OptimizeArgs),
    /// Aliasing diagnostics of a design CSV.
    Evaluate(EvaluateArgs),
    /// Side-by-side diagnostics and D-efficiency of two designs.
    Compare(CompareArgs),
    /// Rerun a command from its manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
#[command(group = clap::ArgGroup::new("source").required(true).args(["order", "file", "search"]))]
pub struct GenerateArgs {
    /// Paley construction from an odd prime `p` (`p + 1` runs).
    #[arg(long)]
    pub order: Option<u64>,
    /// Existing conference design to validate and trim.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// Exhaustive search for a design with this many runs (6, 8 or 10).
    #[arg(long)]
    pub search: Option<usize>,
    /// Keep the first `m` columns.
    #[arg(long)]
    pub factors: Option<usize>,
    /// Write the definitive screening design (the design over its negation)
    /// instead of the conference design.
    #[arg(long)]
    pub foldover: bool,
    /// Center runs appended to the foldover.
    #[arg(long, requires = "foldover")]
    pub n0: Option<usize>,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct OptimizeArgs {
    /// Conference design CSV of the first parent.
    #[arg(long)]
    pub conference: PathBuf,
    /// Second, non-isomorphic parent; all three pairings are tried.
    #[arg(long)]
    pub conference2: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub n0: usize,
    #[arg(long, default_value = "f")]
    pub objective: ObjectiveKind,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Safety bound on accepted moves per local search.
    #[arg(long, default_value_t = 10_000)]
    pub max_cc_passes: usize,
    /// Design CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// JSON aliasing report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// One line per accepted move.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EvaluateArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Parent conference-design run count (inferred from the zeros when omitted).
    #[arg(long)]
    pub n: Option<usize>,
    /// Center runs (default: trailing all-zero rows).
    #[arg(long)]
    pub n0: Option<usize>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Check every correlation against the closed-form values.
    #[arg(long)]
    pub check_theory: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct CompareArgs {
    #[arg(long)]
    pub design_a: PathBuf,
    #[arg(long)]
    pub design_b: PathBuf,
    #[arg(long)]
    pub n0_a: Option<usize>,
    #[arg(long)]
    pub n0_b: Option<usize>,
    /// JSON comparison.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub from: PathBuf,
}

/// A failed command and its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: i32, error: impl Into<anyhow::Error>) -> Self {
        Self { code, error: error.into() }
    }
}

impl From<comars::Error> for Failure {
    fn from(e: comars::Error) -> Self {
        let code = match e {
            comars::Error::Io { .. } => EXIT_IO,
            _ => EXIT_INVALID,
        };
        Self::new(code, e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

/// Parses `argv` (without the program name) and runs it, writing the
/// human-readable summary to `out`.
pub fn run_args<I, S>(argv: I, out: &mut dyn Write) -> Result<(), Failure>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("comars")).chain(argv.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| Failure::new(EXIT_INVALID, e))?;
    run(cli, out)
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let manifest = cli.manifest;
    match cli.command {
        Command::Generate(args) => commands::generate(&args, manifest, out),
        Command::Optimize(args) => commands::optimize(&args, manifest, out),
        Command::Evaluate(args) => commands::evaluate(&args, manifest, out),
        Command::Compare(args) => commands::compare(&args, manifest, out),
        Command::Replay(args) => {
            let recorded = RunManifest::read(&args.from).map_err(|e| Failure::new(EXIT_IO, e))?;
            let mut argv = recorded.argv();
            if let Some(path) = manifest {
                argv.extend(["--manifest".into(), path.display().to_string()]);
            }
            run_args(argv, out)
        }
    }
}
