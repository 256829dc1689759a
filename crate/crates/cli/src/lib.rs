//! Command-line front end for the obstruction toolkit.
//!
//! The binary is a thin shell around [`run`]: every subcommand is an ordinary
//! function returning an [`Outcome`], which keeps the whole surface testable
//! in-process. Exit codes are documented on [`report::Status`].

pub mod commands;
pub mod input;
pub mod report;
pub mod script;

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use obstruct::groebner::Strategy;
use obstruct::identity::SYSTEM_SIZE;
use obstruct::{FieldSpec, OrderKind};

pub use commands::{run_command, CliError, Outcome};
pub use report::{RunReport, Status};
pub use script::ExportFormat;

/// Environment variable holding the default wall-clock budget in seconds.
pub const BUDGET_ENV: &str = "OBSTRUCT_BUDGET";

/// Budget used when neither `--budget` nor the environment sets one.
pub const DEFAULT_BUDGET_SECS: f64 = 1800.0;

/// Primes swept by `check --sweep`.
pub const DEFAULT_PRIMES: [u32; 7] = [2, 3, 5, 7, 11, 13, 1049];

#[derive(Debug, Parser)]
#[command(name = "obstruct", version, about = "Generate, verify and certify the 128-polynomial obstruction system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the JSON run report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the JSON run report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write all 128 polynomials, as a data file or as a CAS script.
    Generate(GenerateArgs),
    /// Compare the generated system with the bundled reference listing.
    VerifyAppendix(VerifyArgs),
    /// Decide whether 1 lies in the ideal of the (sub)system.
    Check(CheckArgs),
    /// Time the full system under dp, Dp and lp.
    BenchOrders(BenchArgs),
    /// Solve the two-parameter system forced on commutative varieties.
    Mini(MiniArgs),
    /// Reduced Gröbner basis of a polynomial system read from a file.
    Basis(BasisArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "internal")]
    pub format: ExportFormat,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "q", value_parser = parse_field)]
    pub field: FieldSpec,
    /// Monomial order named in the script's ring line.
    #[arg(long, default_value = "dp", value_parser = parse_order)]
    pub order: OrderKind,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reference listing to compare against instead of the bundled one.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Unit,
    Proper,
    Any,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value = "gf:2", value_parser = parse_field, conflicts_with = "sweep")]
    pub field: FieldSpec,
    /// Run every prime of the default sweep (2, 3, 5, 7, 11, 13, 1049).
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, default_value = "dp", value_parser = parse_order)]
    pub order: OrderKind,
    /// Polynomials to include, e.g. `1..32`; the whole system by default.
    #[arg(long, value_name = "RANGE", value_parser = parse_range)]
    pub subsystem: Option<RangeInclusive<usize>>,
    /// Track cofactors and verify the certificate when 1 is found.
    #[arg(long)]
    pub cofactors: bool,
    /// Wall-clock budget in seconds per run.
    #[arg(long, value_name = "SECS", env = BUDGET_ENV)]
    pub budget: Option<f64>,
    /// Degree bound on S-pairs and reduction steps (bounds the certificate degree).
    #[arg(long, value_name = "DEGREE")]
    pub max_degree: Option<u32>,
    #[arg(long, default_value = "normal", value_parser = parse_strategy)]
    pub strategy: Strategy,
    /// Verdict that counts as success; defaults to `unit` for the whole
    /// system and `any` for a subsystem.
    #[arg(long, value_enum)]
    pub expect: Option<Expect>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "gf:2", value_parser = parse_field)]
    pub field: FieldSpec,
    /// Wall-clock budget in seconds for each order.
    #[arg(long, value_name = "SECS", default_value_t = 60.0)]
    pub budget_per_order: f64,
    #[arg(long, default_value = "normal", value_parser = parse_strategy)]
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MiniCaseArg {
    Commutative,
}

#[derive(Debug, Args)]
pub struct MiniArgs {
    #[arg(long = "case", value_enum, default_value = "commutative")]
    pub case: MiniCaseArg,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    /// One polynomial per line; `#` starts a comment.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, default_value = "q", value_parser = parse_field)]
    pub field: FieldSpec,
    #[arg(long, default_value = "dp", value_parser = parse_order)]
    pub order: OrderKind,
    /// Variable names, most significant first; inferred from the file when omitted.
    #[arg(long, value_delimiter = ',')]
    pub vars: Option<Vec<String>>,
    #[arg(long, value_name = "SECS", env = BUDGET_ENV)]
    pub budget: Option<f64>,
    #[arg(long, default_value = "normal", value_parser = parse_strategy)]
    pub strategy: Strategy,
}

pub fn parse_field(s: &str) -> Result<FieldSpec, String> {
    s.parse::<FieldSpec>().map_err(|e| e.to_string())
}

/// `dp`, `Dp` and `lp` as in the external CAS; the long names are accepted too.
pub fn parse_order(s: &str) -> Result<OrderKind, String> {
    s.parse::<OrderKind>()
}

pub fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>()
}

/// `a..b`, `a..=b`, `a-b` or a single index, 1-based and inclusive.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let t = s.trim();
    let (a, b) = if let Some((a, b)) = t.split_once("..=") {
        (a, b)
    } else if let Some((a, b)) = t.split_once("..") {
        (a, b)
    } else if let Some((a, b)) = t.split_once('-') {
        (a, b)
    } else {
        (t, t)
    };
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("bad range `{s}`"));
    let (a, b) = (num(a)?, num(b)?);
    if a == 0 || a > b || b > SYSTEM_SIZE {
        return Err(format!("range `{s}` must satisfy 1 ≤ start ≤ end ≤ {SYSTEM_SIZE}"));
    }
    Ok(a..=b)
}

/// Runs a parsed command line, prints its output and returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let outcome = match run_command(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("obstruct: {e}");
            return Status::Usage.exit_code();
        }
    };
    let mut report = outcome.report;
    if let Some(path) = &cli.report {
        report.artifacts.push(path.display().to_string());
        if let Err(e) = std::fs::write(path, report.to_json()) {
            eprintln!("obstruct: cannot write {}: {e}", path.display());
            return Status::Usage.exit_code();
        }
    }
    let mut summary = if cli.json { report.to_json() } else { outcome.text };
    if !summary.ends_with('\n') {
        summary.push('\n');
    }
    // An artifact streamed to standard output keeps stdout to itself.
    let result = match outcome.stdout {
        Some(artifact) => {
            let mut out = std::io::stdout().lock();
            eprint!("{summary}");
            out.write_all(artifact.as_bytes()).and_then(|_| out.flush())
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(summary.as_bytes()).and_then(|_| out.flush())
        }
    };
    if let Err(e) = result {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("obstruct: {e}");
        }
    }
    report.exit_code
}
