//! Argument parsing and the `apm` entry point.

use super::builtins::{builtin, BuiltinError};
use super::file::{FileError, ProblemFile};
use super::run::{self, ndjson, render_table, run, Mode, RunConfig, RunError, RunReport};
use crate::solver::{FeasibilityMode, Status};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "apm",
    version,
    about = "Adaptive partition solver for two-stage stochastic LPs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file or a built-in instance.
    Solve(SolveArgs),
    /// Print a built-in instance as a problem file.
    Builtin { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Feasibility {
    Error,
    Cuts,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Path to a JSON problem file, or a built-in name.
    pub problem: String,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Measure the gap relative to max(1, |z_U|).
    #[arg(long)]
    pub relative: bool,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write newline-delimited JSON results here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "error")]
    pub feasibility: Feasibility,
    /// Scenarios per replication (saa-ref).
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Replications (saa-ref).
    #[arg(long, default_value_t = 20)]
    pub replications: usize,
    /// Write the final partition as newline-delimited JSON.
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
    /// Print the final partition table.
    #[arg(long)]
    pub show_partition: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Builtin(#[from] BuiltinError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("invalid option {name}: {msg}")]
    Option { name: &'static str, msg: String },
    #[error("writing {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A file path if it exists, otherwise a built-in name.
pub fn load(problem: &str) -> Result<ProblemFile, CliError> {
    if Path::new(problem).exists() {
        Ok(ProblemFile::read(problem)?)
    } else {
        Ok(builtin(problem)?)
    }
}

pub fn config(args: &SolveArgs, file: &ProblemFile) -> Result<RunConfig, CliError> {
    let d = RunConfig::default();
    let mode = match (args.mode, &file.options.solver) {
        (Some(m), _) => m,
        (None, Some(s)) => Mode::parse(s).ok_or_else(|| CliError::Option {
            name: "options.solver",
            msg: format!("unknown solver {s:?}"),
        })?,
        (None, None) => d.mode,
    };
    Ok(RunConfig {
        mode,
        eps: args.eps.or(file.options.eps).unwrap_or(d.eps),
        relative: args.relative,
        max_iter: args.max_iter.or(file.options.max_iter).unwrap_or(d.max_iter),
        seed: args.seed.or(file.options.seed).unwrap_or(d.seed),
        feasibility: match args.feasibility {
            Feasibility::Error => FeasibilityMode::Error,
            Feasibility::Cuts => FeasibilityMode::Cuts,
        },
        samples: args.samples,
        replications: args.replications,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Runs `solve`, printing the table to `stdout`. Returns the report.
pub fn solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<RunReport, CliError> {
    let file = load(&args.problem)?;
    let prob = file.to_problem()?;
    let cfg = config(args, &file)?;
    let report = run(&prob, &cfg)?;
    let _ = write!(stdout, "{}", render_table(&report));
    if let Some(path) = &args.out {
        write_file(path, &ndjson(&report))?;
    }
    if let Some(p) = &report.partition {
        if let Some(path) = &args.partition_out {
            write_file(path, &run::partition_ndjson(p))?;
        }
        if args.show_partition {
            let _ = write!(stdout, "{}", p.table());
        }
    }
    Ok(report)
}

/// Entry point; returns the process exit code
/// (0 converged, 2 iteration limit, 1 error).
pub fn main_with(cli: Cli) -> i32 {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Builtin { name } => match builtin(&name) {
            Ok(f) => {
                let _ = writeln!(stdout, "{}", f.to_json());
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        Command::Solve(args) => match solve(&args, &mut stdout) {
            Ok(r) if r.status == Status::Converged => 0,
            Ok(_) => 2,
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
    }
}
