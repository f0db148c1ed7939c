use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eginv::cli::{cmd_check, cmd_gen, cmd_invert, cmd_selftest, cmd_solve, ExitStatus, Outcome, SolveMethod};
use eginv::{Error, InstanceKind, Tolerances};

/// Check, solve and invert two-sided extension problems.
///
/// Exit status: 0 ok, 1 internal-error, 3 parse-error (files or arguments),
/// 4 condition-fail, 5 no-solution, 6 refused.
#[derive(Parser)]
#[command(name = "eginv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Relative tolerance for conditions and inclusions
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Canonical,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceArg {
    Matrix,
    Sequence,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate conditions C1-C6 on a data set
    Check {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for g
    Solve {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[command(flatten)]
        common: Common,
    },
    /// Invert Omega(g) for a data set and its solution g
    Invert {
        input: PathBuf,
        /// Element file holding g
        g: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a random data set and its generating g
    Gen {
        #[arg(long, value_enum, default_value_t = InstanceArg::Sequence)]
        instance: InstanceArg,
        /// p (matrix) or p x q, e.g. 2x3 (sequence)
        #[arg(long, default_value = "2")]
        dims: String,
        /// Degree of g (sequence instance)
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Prefix of the files written: <output>.json and <output>.g.json
        #[arg(long, default_value = "instance")]
        output: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Run the built-in checks on the bundled fixtures and a random corpus
    Selftest {
        /// Read fixtures from this directory instead of the embedded copies
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Parse { location: "--dims".into(), message: format!("expected N or PxQ, got \"{s}\"") };
    let parts: Vec<&str> = s.split(['x', 'X', ',']).collect();
    let nums: Vec<usize> = parts.iter().map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match nums.as_slice() {
        [p] => Ok((*p, *p)),
        [p, q] => Ok((*p, *q)),
        _ => Err(bad()),
    }
}

fn emit(out: &Outcome, path: Option<&PathBuf>) -> ExitCode {
    let text = out.text();
    match path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("eginv: cannot write {}: {e}", p.display());
                return ExitCode::from(ExitStatus::ParseError.code() as u8);
            }
        }
        None => print!("{text}"),
    }
    if out.exit != ExitStatus::Ok {
        if let Some(m) = out.report.get("message").and_then(|m| m.as_str()) {
            eprintln!("eginv: {}: {m}", out.exit.name());
        } else {
            eprintln!("eginv: {}", out.exit.name());
        }
    }
    ExitCode::from(out.exit.code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(ExitStatus::ParseError.code() as u8) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Check { input, common } => emit(&cmd_check(&input, &Tolerances::with_tolerance(common.tolerance)), common.output.as_ref()),
        Command::Solve { input, method, common } => {
            let m = match method {
                MethodArg::Auto => SolveMethod::Auto,
                MethodArg::Canonical => SolveMethod::Canonical,
                MethodArg::General => SolveMethod::General,
            };
            emit(&cmd_solve(&input, m, &Tolerances::with_tolerance(common.tolerance)), common.output.as_ref())
        }
        Command::Invert { input, g, common } => {
            emit(&cmd_invert(&input, &g, &Tolerances::with_tolerance(common.tolerance)), common.output.as_ref())
        }
        Command::Gen { instance, dims, degree, seed, output, tolerance } => {
            let kind = match instance {
                InstanceArg::Matrix => InstanceKind::TriangularMatrix,
                InstanceArg::Sequence => InstanceKind::Sequence,
            };
            let out = match parse_dims(&dims) {
                Ok((p, q)) => cmd_gen(kind, p, q, degree, seed, &output, &Tolerances::with_tolerance(tolerance)),
                Err(e) => Outcome::error("gen", &e),
            };
            emit(&out, None)
        }
        Command::Selftest { fixtures, common } => emit(
            &cmd_selftest(fixtures.as_deref(), &Tolerances::with_tolerance(common.tolerance)),
            common.output.as_ref(),
        ),
    }
}
