use serde::{Deserialize, Serialize};

use crate::stokes::cases::ManufacturedCase;
use crate::stokes::fields::{remove_mean, PressureField, VelocityField};

/// Discrete error norms against a manufactured solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    /// `h`-weighted L2 over all velocity faces.
    pub l2_u: f64,
    /// `h`-weighted L2 over cells, both pressures shifted to zero mean.
    pub l2_p: f64,
    pub linf_u: f64,
}

pub fn error_norms(
    velocity: &VelocityField,
    pressure: &PressureField,
    case: &ManufacturedCase,
) -> ErrorNorms {
    let grid = velocity.grid();
    let h2 = grid.h() * grid.h();
    let exact_u = VelocityField::sample(grid, case.u, case.v);
    let (mut sum_u, mut max_u) = (0.0_f64, 0.0_f64);
    for (a, b) in velocity.as_slice().iter().zip(exact_u.as_slice()) {
        let e = a - b;
        sum_u += e * e;
        max_u = max_u.max(e.abs());
    }
    let mut num_p = pressure.as_slice().to_vec();
    let mut exact_p = PressureField::sample(grid, case.p).into_vec();
    remove_mean(&mut num_p);
    remove_mean(&mut exact_p);
    let sum_p: f64 = num_p
        .iter()
        .zip(&exact_p)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    ErrorNorms {
        l2_u: (h2 * sum_u).sqrt(),
        l2_p: (h2 * sum_p).sqrt(),
        linf_u: max_u,
    }
}

/// `log(e_coarse / e_fine) / log(h_coarse / h_fine)`.
pub fn observed_order(e_coarse: f64, e_fine: f64, h_coarse: f64, h_fine: f64) -> f64 {
    (e_coarse / e_fine).ln() / (h_coarse / h_fine).ln()
}
