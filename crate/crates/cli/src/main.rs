//! `qci`: confidence intervals from quantile-modified score equations.
//!
//! Exit status is 0 on success, 2 for bad flags, data or domain errors, and
//! 3 when an iterative solver fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "qci", version, about = "Higher-order confidence intervals from quantile-modified score equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model to a CSV file and print point estimates and confidence limits.
    Ci(CiArgs),
    /// Print the interval grid for the exponential rate or the normal variance at MLE 1.
    Table(TableArgs),
    /// Run a Monte Carlo coverage experiment and write the report as CSV.
    Simulate(SimulateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Exponential,
    #[value(name = "normal_variance")]
    NormalVariance,
    #[value(name = "skew_normal")]
    SkewNormal,
    Gamma,
    Beta,
    #[value(name = "student_t")]
    StudentT,
}

#[derive(Args, Debug)]
struct CiArgs {
    /// Comma-separated file with a header row.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Mean model, `response ~ col + ...`; for one-sample families, `response ~ 1`.
    #[arg(long)]
    mean: Option<String>,
    /// Dispersion model, `~ col + ...` or `~ 1`.
    #[arg(long)]
    disp: Option<String>,
    /// Degrees of freedom of the Student-t family.
    #[arg(long)]
    nu: Option<f64>,
    /// Mean link: identity, logit or log.
    #[arg(long)]
    mean_link: Option<String>,
    /// Dispersion link: identity or log.
    #[arg(long)]
    disp_link: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.95")]
    level: Vec<f64>,
    /// two-sided, lower or upper.
    #[arg(long, default_value = "two-sided")]
    kind: String,
    /// Any of ml, mbr, qbr, and exact for the exponential and normal-variance families.
    #[arg(long, value_delimiter = ',', default_value = "ml,mbr,qbr")]
    method: Vec<String>,
    #[arg(long, default_value_t = 2)]
    digits: usize,
    /// Also write full-precision limits to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TableArgs {
    /// table1 (exponential rate) or table2 (normal variance).
    #[arg(long)]
    which: String,
    /// Sample sizes; defaults to 3,5,7 for table1 and 10,15,20 for table2.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.90,0.95,0.99")]
    level: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    digits: usize,
    /// Also write full-precision limits to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// exp5, gamma15, betareg25 or readingskills.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = quantile_ci::mc::DEFAULT_REPLICATES)]
    reps: usize,
    #[arg(long, default_value_t = quantile_ci::mc::DEFAULT_SEED)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.90,0.95,0.99")]
    levels: Vec<f64>,
    /// Defaults to ml,mbr,qbr, plus exact for exp5.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "two-sided,lower,upper")]
    kinds: Vec<String>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ci(a) => commands::ci(a),
        Command::Table(a) => commands::table(a),
        Command::Simulate(a) => commands::simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
