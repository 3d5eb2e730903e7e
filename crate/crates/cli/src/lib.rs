//! Command-line front end for the stablewealth bounds.
//!
//! Every subcommand renders CSV text whose leading `#` lines echo the full
//! configuration, so a run can be repeated from its own output.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use stablewealth::StableParams;

pub mod commands;
mod grid;

pub use grid::Grid;

#[derive(Debug, Parser)]
#[command(name = "stablewealth", version, about = "Distribution bounds for wealth under geometric alpha-stable returns")]
pub struct Cli {
    /// Seed for Monte Carlo runs; recorded in every output header.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Output file. For `data`, the output directory (default: current directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Convergence tolerance of the command's iterative routine (Romberg integration, stable fit).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower-bound laws of terminal wealth for an investment schedule.
    Bound(commands::bound::BoundArgs),
    /// Necessary principal and success-probability bound for a withdrawal plan.
    Withdraw(commands::withdraw::WithdrawArgs),
    /// Largest mu/sigma ratios that still force a given principal.
    Frontier(commands::frontier::FrontierArgs),
    /// Lump sum equivalent of continuous investment.
    Discount(commands::discount::DiscountArgs),
    /// Monte Carlo checks of the bounds; exits with 3 on any violation.
    Oracle(commands::oracle::OracleArgs),
    /// Returns, stable fit and QQ data from an annual `year,I,D,C` file.
    Data(commands::data::DataArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bound(_) => "bound",
            Command::Withdraw(_) => "withdraw",
            Command::Frontier(_) => "frontier",
            Command::Discount(_) => "discount",
            Command::Oracle(_) => "oracle",
            Command::Data(_) => "data",
        }
    }
}

/// Annual law of the log wealth factor. Defaults are the index fit.
#[derive(Debug, Clone, Copy, Args)]
pub struct ProcessArgs {
    #[arg(long, default_value_t = 1.89)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.110)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0658, allow_negative_numbers = true)]
    pub mu: f64,
}

impl ProcessArgs {
    pub fn params(&self) -> stablewealth::Result<StableParams> {
        StableParams::new(self.alpha, self.beta, self.sigma, self.mu)
    }
}

/// Output of a command before anything is written.
#[derive(Debug, Default)]
pub struct Rendered {
    /// Written to `--out`, or stdout.
    pub primary: String,
    /// Named files written into the `--out` directory.
    pub files: Vec<(String, String)>,
    pub violations: u64,
    pub warnings: Vec<String>,
}

/// Oracle checks found violations; the report has already been written.
#[derive(Debug)]
pub struct OracleViolation(pub u64);

impl fmt::Display for OracleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "oracle found {} violation(s)", self.0)
    }
}

impl std::error::Error for OracleViolation {}

pub fn render(cli: &Cli) -> anyhow::Result<Rendered> {
    if let Some(t) = cli.tol {
        anyhow::ensure!(t > 0.0 && t.is_finite(), "--tol must be positive, got {t}");
    }
    let head = header(cli);
    match &cli.command {
        Command::Bound(a) => commands::bound::render(a, cli, head),
        Command::Withdraw(a) => commands::withdraw::render(a, head),
        Command::Frontier(a) => commands::frontier::render(a, head),
        Command::Discount(a) => commands::discount::render(a, cli, head),
        Command::Oracle(a) => commands::oracle::render(a, cli, head),
        Command::Data(a) => commands::data::render(a, cli, head),
    }
}

/// Render and write. Violations are reported as [`OracleViolation`] after the output is written.
pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let out = render(cli)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match (&cli.command, &cli.out) {
        (Command::Data(_), dir) => {
            let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, text) in &out.files {
                write_file(&dir.join(name), text)?;
            }
            print!("{}", out.primary);
        }
        (_, Some(path)) => write_file(path, &out.primary)?,
        (_, None) => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(out.primary.as_bytes()).context("writing to stdout")?;
        }
    }
    if out.violations > 0 {
        return Err(OracleViolation(out.violations).into());
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// 0 success, 1 usage or validation, 2 numerical non-convergence, 3 oracle violation.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<OracleViolation>().is_some() {
        return 3;
    }
    match err.chain().find_map(|c| c.downcast_ref::<stablewealth::Error>()) {
        Some(e) if e.is_numerical() => 2,
        _ => 1,
    }
}

fn header(cli: &Cli) -> String {
    let tol = cli.tol.map_or_else(|| "default".to_string(), |t| t.to_string());
    format!(
        "# stablewealth {} {}\n# seed={} tol={}\n# config: {:?}\n",
        env!("CARGO_PKG_VERSION"),
        cli.command.name(),
        cli.seed,
        tol,
        cli.command
    )
}

pub(crate) fn fmt_row(values: &[f64]) -> String {
    let mut s = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

pub(crate) fn check_levels(name: &str, levels: &[f64]) -> anyhow::Result<()> {
    anyhow::ensure!(!levels.is_empty(), "{name} is empty");
    if let Some(p) = levels.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        anyhow::bail!("{name} must lie strictly between 0 and 1, got {p}");
    }
    Ok(())
}
