//! Command-line front end.
//!
//! Exit codes: 0 success, 1 property verification failed, 2 solver failure,
//! 3 malformed input or violated precondition, 4 a study threshold was
//! missed.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::qp::Method;
use crate::stokes::CaseId;

pub use commands::{
    converge_rows, run_converge, run_infsup, run_qp_solve, run_stokes, run_verify, InfSupRow,
    QpReport, StokesReport,
};

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    VerifyFailed = 1,
    SolverFailure = 2,
    BadInput = 3,
    Threshold = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Solver-side failures map to 2, everything the caller could have
/// prevented maps to 3.
pub fn exit_for(err: &Error) -> Exit {
    match err {
        Error::Singular { .. }
        | Error::NotConverged { .. }
        | Error::Breakdown { .. }
        | Error::NotOptimal { .. }
        | Error::Infeasible { .. } => Exit::SolverFailure,
        _ => Exit::BadInput,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lagrange",
    version,
    about = "Constrained quadratic minimization and Stokes multiplier checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the program stored in a directory (A.mtx, C.mtx, b.txt, optional d.txt).
    QpSolve(QpSolveArgs),
    /// Coupled and minimization Stokes solves on one grid.
    Stokes(StokesArgs),
    /// Refinement study of the Stokes discretization error.
    Converge(ConvergeArgs),
    /// Discrete inf-sup constant on a list of grids or for a stored program.
    Infsup(InfSupArgs),
    /// Seeded randomized property checks of the solvers.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct QpSolveArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = Method::Direct)]
    pub method: Method,
    #[arg(long, default_value_t = crate::qp::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    /// Also estimate the inf-sup constant of C (A-norm, Euclidean multipliers).
    #[arg(long)]
    pub infsup: bool,
}

#[derive(Debug, Args)]
pub struct StokesArgs {
    #[arg(long, value_parser = grid_size)]
    pub n: usize,
    #[arg(long, default_value = "taylor_green")]
    pub case: CaseId,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = crate::stokes::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,16,32", value_parser = grid_size)]
    pub n_list: Vec<usize>,
    #[arg(long, default_value = "taylor_green")]
    pub case: CaseId,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = crate::stokes::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    /// Harness self-test: replace the solver by cell- and face-averaged exact
    /// values, whose distance to the point samples is second order.
    #[arg(long, hide = true)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct InfSupArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,16,32", value_parser = grid_size)]
    pub n_list: Vec<usize>,
    /// Program directory; when given, the constant of its C is estimated
    /// instead of the Stokes one.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = crate::qp::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,
    /// Also write the table as JSON into this directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Test hook: perturb every solver output before it is checked.
    #[arg(long, hide = true)]
    pub corrupt: bool,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {s}"))
    }
}

fn grid_size(s: &str) -> Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|e| format!("{e}"))?;
    if v >= 2 {
        Ok(v)
    } else {
        Err(format!("grid size must be at least 2, got {v}"))
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let ok = !e.use_stderr();
            let _ = if ok {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return if ok { Exit::Ok } else { Exit::BadInput };
        }
    };
    let result = match &cli.command {
        Command::QpSolve(a) => run_qp_solve(a, out),
        Command::Stokes(a) => run_stokes(a, out),
        Command::Converge(a) => run_converge(a, out),
        Command::Infsup(a) => run_infsup(a, out),
        Command::Verify(a) => run_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}
