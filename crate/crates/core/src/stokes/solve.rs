use crate::error::{Error, Result};
use crate::linalg::vector::norm2;
use crate::qp::{
    constrained_gradient_split, schur_complement_solve, solve_kkt_direct, InfSupEstimate,
    InfSupForm, OptimalityReport, QpProblem, SaddleSolution,
};
use crate::stokes::cases::ManufacturedCase;
use crate::stokes::fields::{remove_mean, PressureField, VelocityField};
use crate::stokes::grid::MacGrid;
use crate::stokes::operators::{assemble_operators, StokesOperators};

/// Velocity, zero-mean pressure and the saddle-point record of one solve.
///
/// `saddle.lambda` is the full zero-mean pressure vector and both residuals
/// are evaluated against the complete divergence operator.
#[derive(Clone, Debug)]
pub struct StokesSolution {
    pub velocity: VelocityField,
    pub pressure: PressureField,
    pub saddle: SaddleSolution,
    /// Projected-gradient certificate of the velocity.
    pub optimality: OptimalityReport,
}

/// `h^2 f` at face centers: the discrete load `(f, v)`.
pub fn sample_forcing(grid: &MacGrid, case: &ManufacturedCase) -> Vec<f64> {
    let h2 = grid.h() * grid.h();
    let field = VelocityField::sample(*grid, case.fx, case.fy);
    field.into_vec().into_iter().map(|v| h2 * v).collect()
}

fn finish(
    grid: &MacGrid,
    ops: &StokesOperators,
    load: &[f64],
    mut saddle: SaddleSolution,
    mut pressure: Vec<f64>,
    tol: f64,
) -> Result<StokesSolution> {
    remove_mean(&mut pressure);
    let u = &saddle.x;
    let au = ops.a.apply(u)?;
    let mut btp = vec![0.0; u.len()];
    ops.b.mul_transpose_into(&pressure, &mut btp);
    let stationarity: Vec<f64> = (0..u.len()).map(|i| au[i] - load[i] - btp[i]).collect();
    let feasibility = norm2(&ops.b.apply(u)?);
    let zero_mean = |v: &mut [f64]| remove_mean(v);
    let scale = ops.a.frobenius_norm() * norm2(u) + norm2(load);
    let (_, projected) = constrained_gradient_split(
        &ops.a,
        load,
        &ops.b,
        u,
        (tol * 1e-2).max(1e-13),
        Some(&zero_mean),
    )?;
    let optimality = OptimalityReport {
        projected_gradient_norm: projected,
        feasibility_norm: feasibility,
        is_minimizer: projected <= tol * scale.max(f64::MIN_POSITIVE)
            && feasibility <= tol * scale.max(f64::MIN_POSITIVE),
    };
    saddle.residual_stationarity = norm2(&stationarity);
    saddle.residual_feasibility = feasibility;
    saddle.lambda = pressure.clone();
    Ok(StokesSolution {
        velocity: VelocityField::from_vec(*grid, saddle.x.clone())?,
        pressure: PressureField::from_vec(*grid, pressure)?,
        saddle,
        optimality,
    })
}

/// Coupled saddle-point solve of the discrete weak formulation.
///
/// Constant pressures span `Ker B'`, so the divergence rows sum to zero and
/// the last one is implied by the others. It is dropped to obtain a
/// full-rank constraint; the pressure of the dropped cell is set to zero and
/// the whole field is then shifted to zero mean.
pub fn solve_stokes_coupled(
    grid: &MacGrid,
    case: &ManufacturedCase,
    tol: f64,
) -> Result<StokesSolution> {
    let ops = assemble_operators(grid);
    let load = sample_forcing(grid, case);
    let np = grid.num_pressure();
    let keep: Vec<usize> = (0..np - 1).collect();
    let c = ops.b.select_rows(&keep);
    let problem =
        QpProblem::with_structural_rank(ops.a.clone(), load.clone(), c, vec![0.0; np - 1])?;
    let saddle = solve_kkt_direct(&problem, tol)?;
    let mut pressure = saddle.lambda.clone();
    pressure.push(0.0);
    finish(grid, &ops, &load, saddle, pressure, tol)
}

/// Minimize `1/2 u'Au - f'u` over `Ker B` (Schur-complement CG with the
/// pressure constant deflated), then recover the pressure as the multiplier
/// solving `B'p = Au - f` in the least-squares sense.
pub fn solve_stokes_minimization(
    grid: &MacGrid,
    case: &ManufacturedCase,
    tol: f64,
) -> Result<StokesSolution> {
    let ops = assemble_operators(grid);
    let load = sample_forcing(grid, case);
    let zero_mean = |v: &mut [f64]| remove_mean(v);
    let saddle = schur_complement_solve(
        &ops.a,
        &load,
        &ops.b,
        &vec![0.0; grid.num_pressure()],
        tol,
        Some(&zero_mean),
    )?;
    let (pressure, outside) = constrained_gradient_split(
        &ops.a,
        &load,
        &ops.b,
        &saddle.x,
        (tol * 1e-2).max(1e-13),
        Some(&zero_mean),
    )?;
    let scale = ops.a.frobenius_norm() * norm2(&saddle.x) + norm2(&load);
    if outside > tol * scale {
        return Err(Error::NotOptimal {
            residual: outside,
            tol: tol * scale,
        });
    }
    finish(grid, &ops, &load, saddle, pressure, tol)
}

/// `beta(h) = sqrt(lambda_min(B A^{-1} B', Mp))` over zero-mean pressures.
pub fn estimate_infsup_stokes(grid: &MacGrid) -> Result<InfSupEstimate> {
    let ops = assemble_operators(grid);
    let zero_mean = |v: &mut [f64]| remove_mean(v);
    crate::qp::estimate_infsup_with(
        &ops.b,
        &ops.a,
        &ops.mp,
        InfSupForm::DualForm,
        Some(&zero_mean),
    )
}
