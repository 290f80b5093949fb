use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::io::write_vector;
use crate::linalg::vector::{norm2, rel_diff};
use crate::linalg::SparseOperator;
use crate::qp::properties::{run_property_suites, PropertyOutcome, SuiteConfig};
use crate::qp::{estimate_infsup, io::load_problem_dir, objective, solve, InfSupForm, Method};
use crate::stokes::io::{field_records, write_csv, ConvergenceRow};
use crate::stokes::{
    error_norms, estimate_infsup_stokes, manufactured_case, solve_stokes_coupled,
    solve_stokes_minimization, CaseId, ErrorNorms, MacGrid, ManufacturedCase, PressureField,
    StokesSolution, VelocityField,
};

use super::{ConvergeArgs, Exit, InfSupArgs, QpSolveArgs, StokesArgs, VerifyArgs};

/// Largest allowed `max(beta) / min(beta)` over a refinement list.
const BETA_SPREAD: f64 = 1.1;
const ORDER_RANGE: (f64, f64) = (1.8, 2.2);

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

// Console output is best effort; a closed pipe must not turn a finished run
// into a failure.
macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        let _ = writeln!($out, $($arg)*);
    };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QpReport {
    pub method: Method,
    pub n: usize,
    pub m: usize,
    pub tol: f64,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub residual_stationarity: f64,
    pub residual_feasibility: f64,
    pub scale: f64,
    pub objective: f64,
    pub beta: Option<f64>,
}

pub fn run_qp_solve(args: &QpSolveArgs, out: &mut dyn Write) -> Result<Exit> {
    let problem = load_problem_dir(&args.input)?;
    let sol = solve(&problem, args.method, args.tol)?;
    let beta = if args.infsup {
        let mq = SparseOperator::identity(problem.m());
        Some(estimate_infsup(problem.c(), problem.a(), &mq, InfSupForm::DualForm)?.beta)
    } else {
        None
    };
    let report = QpReport {
        method: sol.method,
        n: problem.n(),
        m: problem.m(),
        tol: args.tol,
        iterations: sol.iterations,
        inner_iterations: sol.inner_iterations,
        residual_stationarity: sol.residual_stationarity,
        residual_feasibility: sol.residual_feasibility,
        scale: problem.scale(&sol.x),
        objective: objective(&problem, &sol.x)?,
        beta,
    };
    prepare(&args.output)?;
    write_vector(&args.output.join("x.txt"), &sol.x)?;
    write_vector(&args.output.join("lambda.txt"), &sol.lambda)?;
    write_json(&args.output.join("report.json"), &report)?;
    say!(
        out,
        "{}: n = {}, m = {}, stationarity {:.3e}, feasibility {:.3e}",
        report.method,
        report.n,
        report.m,
        report.residual_stationarity,
        report.residual_feasibility
    );
    if let Some(b) = beta {
        say!(out, "inf-sup constant {b:.6e}");
    }
    Ok(Exit::Ok)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub residual_stationarity: f64,
    /// `|Bu|`
    pub residual_feasibility: f64,
    /// `|Bu| / |u|`
    pub divergence_relative: f64,
    pub projected_gradient_norm: f64,
    pub is_minimizer: bool,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub errors: ErrorNorms,
}

impl SolveSummary {
    fn new(s: &StokesSolution, case: &ManufacturedCase) -> Self {
        let u = norm2(s.velocity.as_slice());
        SolveSummary {
            residual_stationarity: s.saddle.residual_stationarity,
            residual_feasibility: s.saddle.residual_feasibility,
            divergence_relative: if u > 0.0 {
                s.saddle.residual_feasibility / u
            } else {
                s.saddle.residual_feasibility
            },
            projected_gradient_norm: s.optimality.projected_gradient_norm,
            is_minimizer: s.optimality.is_minimizer,
            iterations: s.saddle.iterations,
            inner_iterations: s.saddle.inner_iterations,
            errors: error_norms(&s.velocity, &s.pressure, case),
        }
    }
}

/// Relative discrepancy between the two formulations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equivalence {
    pub velocity: f64,
    pub pressure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesReport {
    pub case: CaseId,
    pub n: usize,
    pub h: f64,
    pub tol: f64,
    pub equivalence: Equivalence,
    pub coupled: SolveSummary,
    pub minimization: SolveSummary,
}

pub fn run_stokes(args: &StokesArgs, out: &mut dyn Write) -> Result<Exit> {
    let grid = MacGrid::new(args.n)?;
    let case = manufactured_case(args.case);
    let coupled = solve_stokes_coupled(&grid, &case, args.tol)?;
    let minimization = solve_stokes_minimization(&grid, &case, args.tol)?;
    let report = StokesReport {
        case: args.case,
        n: args.n,
        h: grid.h(),
        tol: args.tol,
        equivalence: Equivalence {
            velocity: rel_diff(
                minimization.velocity.as_slice(),
                coupled.velocity.as_slice(),
            ),
            pressure: rel_diff(
                minimization.pressure.as_slice(),
                coupled.pressure.as_slice(),
            ),
        },
        coupled: SolveSummary::new(&coupled, &case),
        minimization: SolveSummary::new(&minimization, &case),
    };
    prepare(&args.output)?;
    write_csv(
        &args.output.join("fields_coupled.csv"),
        &field_records(&coupled.velocity, &coupled.pressure),
    )?;
    write_csv(
        &args.output.join("fields_minimization.csv"),
        &field_records(&minimization.velocity, &minimization.pressure),
    )?;
    write_json(&args.output.join("report.json"), &report)?;
    say!(out, "{} on {}x{} cells", report.case, args.n, args.n);
    say!(
        out,
        "formulations differ by {:.3e} (velocity), {:.3e} (pressure)",
        report.equivalence.velocity,
        report.equivalence.pressure
    );
    for (name, s) in [
        ("coupled", &report.coupled),
        ("minimization", &report.minimization),
    ] {
        say!(
            out,
            "{name:<13} |Bu|/|u| {:.3e}  l2_u {:.6e}  l2_p {:.6e}  linf_u {:.6e}",
            s.divergence_relative,
            s.errors.l2_u,
            s.errors.l2_p,
            s.errors.linf_u
        );
    }
    Ok(Exit::Ok)
}

/// Two-point Gauss average of `f` over `[a, a + h]`.
fn average_1d(f: impl Fn(f64) -> f64, a: f64, h: f64) -> f64 {
    let g = 0.5 / 3f64.sqrt();
    0.5 * (f(a + (0.5 - g) * h) + f(a + (0.5 + g) * h))
}

/// Face and cell averages of the exact solution.
fn averaged_exact(grid: MacGrid, case: &ManufacturedCase) -> (VelocityField, PressureField) {
    let h = grid.h();
    let mut vel = vec![0.0; grid.num_velocity()];
    for (i, j) in grid.u_faces() {
        let x = i as f64 * h;
        vel[grid.u_index(i, j)] = average_1d(|y| (case.u)(x, y), j as f64 * h, h);
    }
    for (i, j) in grid.v_faces() {
        let y = j as f64 * h;
        vel[grid.v_index(i, j)] = average_1d(|x| (case.v)(x, y), i as f64 * h, h);
    }
    let p = grid
        .cells()
        .map(|(i, j)| {
            average_1d(
                |y| average_1d(|x| (case.p)(x, y), i as f64 * h, h),
                j as f64 * h,
                h,
            )
        })
        .collect();
    (
        VelocityField::from_vec(grid, vel).expect("sized by grid"),
        PressureField::from_vec(grid, p).expect("sized by grid"),
    )
}

/// Error norms for each `n` (coupled solve, or exact averages when `exact`).
pub fn converge_rows(
    n_list: &[usize],
    case_id: CaseId,
    tol: f64,
    exact: bool,
) -> Result<Vec<ConvergenceRow>> {
    if n_list.len() < 2 {
        return Err(Error::InvalidArgument(
            "an observed order needs at least two grid sizes".into(),
        ));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "grid sizes must be strictly increasing".into(),
        ));
    }
    let case = manufactured_case(case_id);
    let mut levels = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let grid = MacGrid::new(n)?;
        let e = if exact {
            let (u, p) = averaged_exact(grid, &case);
            error_norms(&u, &p, &case)
        } else {
            let s = solve_stokes_coupled(&grid, &case, tol)?;
            error_norms(&s.velocity, &s.pressure, &case)
        };
        levels.push((n, e));
    }
    Ok(ConvergenceRow::table(&levels))
}

fn fmt_order(o: Option<f64>) -> String {
    o.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

pub fn run_converge(args: &ConvergeArgs, out: &mut dyn Write) -> Result<Exit> {
    let rows = converge_rows(&args.n_list, args.case, args.tol, args.exact)?;
    prepare(&args.output)?;
    write_csv(&args.output.join("convergence.csv"), &rows)?;
    say!(
        out,
        "{:>5} {:>12} {:>12} {:>8} {:>8}",
        "n",
        "l2_u",
        "l2_p",
        "order_u",
        "order_p"
    );
    for r in &rows {
        say!(
            out,
            "{:>5} {:>12.4e} {:>12.4e} {:>8} {:>8}",
            r.n,
            r.l2_u,
            r.l2_p,
            fmt_order(r.order_u),
            fmt_order(r.order_p)
        );
    }
    let order = rows.last().and_then(|r| r.order_u).unwrap_or(f64::NAN);
    if order >= ORDER_RANGE.0 && order <= ORDER_RANGE.1 {
        Ok(Exit::Ok)
    } else {
        say!(
            out,
            "velocity order {order:.4} outside [{}, {}]",
            ORDER_RANGE.0,
            ORDER_RANGE.1
        );
        Ok(Exit::Threshold)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfSupRow {
    pub n: usize,
    pub h: f64,
    pub beta: f64,
}

#[derive(Serialize)]
struct ProgramInfSup {
    dual_form: f64,
    primal_form: f64,
    eigenvalue: f64,
    residual: f64,
}

pub fn run_infsup(args: &InfSupArgs, out: &mut dyn Write) -> Result<Exit> {
    if let Some(dir) = &args.input {
        let problem = load_problem_dir(dir)?;
        let mq = SparseOperator::identity(problem.m());
        let dual = estimate_infsup(problem.c(), problem.a(), &mq, InfSupForm::DualForm)?;
        let primal = estimate_infsup(problem.c(), problem.a(), &mq, InfSupForm::PrimalForm)?;
        prepare(&args.output)?;
        write_json(
            &args.output.join("infsup.json"),
            &ProgramInfSup {
                dual_form: dual.beta,
                primal_form: primal.beta,
                eigenvalue: dual.eigenvalue,
                residual: dual.residual,
            },
        )?;
        write_vector(&args.output.join("q.txt"), &dual.attaining_q)?;
        say!(
            out,
            "beta = {:.15} (dual), {:.15} (primal)",
            dual.beta,
            primal.beta
        );
        return Ok(if dual.beta > 0.0 {
            Exit::Ok
        } else {
            Exit::Threshold
        });
    }
    let mut rows = Vec::with_capacity(args.n_list.len());
    for &n in &args.n_list {
        let grid = MacGrid::new(n)?;
        let est = estimate_infsup_stokes(&grid)?;
        rows.push(InfSupRow {
            n,
            h: grid.h(),
            beta: est.beta,
        });
    }
    prepare(&args.output)?;
    write_csv(&args.output.join("infsup.csv"), &rows)?;
    for r in &rows {
        say!(out, "n = {:>4}  beta = {:.6}", r.n, r.beta);
    }
    let min = rows.iter().map(|r| r.beta).fold(f64::INFINITY, f64::min);
    let max = rows.iter().map(|r| r.beta).fold(0.0, f64::max);
    let spread = max / min;
    say!(out, "max/min = {spread:.4}");
    if min > 0.0 && spread < BETA_SPREAD {
        Ok(Exit::Ok)
    } else {
        say!(out, "spread is not below {BETA_SPREAD}");
        Ok(Exit::Threshold)
    }
}

pub fn run_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<Exit> {
    let cfg = SuiteConfig {
        seed: args.seed,
        tol: args.tol,
        corrupt: args.corrupt,
        ..SuiteConfig::default()
    };
    let outcomes: Vec<PropertyOutcome> = run_property_suites(&cfg)?;
    say!(out, "seed {}", cfg.seed);
    say!(
        out,
        "{:<24} {:>7} {:>11} {:>11}  result",
        "property",
        "checks",
        "worst",
        "threshold"
    );
    for o in &outcomes {
        say!(
            out,
            "{:<24} {:>7} {:>11.3e} {:>11.3e}  {}",
            o.name,
            o.checks,
            o.worst,
            o.threshold,
            if o.passed { "pass" } else { "FAIL" }
        );
    }
    if let Some(dir) = &args.output {
        prepare(dir)?;
        write_json(&dir.join("verify.json"), &outcomes)?;
    }
    Ok(if outcomes.iter().all(|o| o.passed) {
        Exit::Ok
    } else {
        Exit::VerifyFailed
    })
}
