use crate::error::Result;
use crate::linalg::vector::check_len;
use crate::stokes::grid::MacGrid;

/// Face velocities; wall faces are zero and not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    grid: MacGrid,
    values: Vec<f64>,
}

impl VelocityField {
    pub fn from_vec(grid: MacGrid, values: Vec<f64>) -> Result<Self> {
        check_len(&values, grid.num_velocity(), "velocity field length")?;
        Ok(VelocityField { grid, values })
    }

    pub fn zeros(grid: MacGrid) -> Self {
        VelocityField {
            grid,
            values: vec![0.0; grid.num_velocity()],
        }
    }

    /// Point samples of `(u, v)` at face centers.
    pub fn sample(grid: MacGrid, u: impl Fn(f64, f64) -> f64, v: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = vec![0.0; grid.num_velocity()];
        for (i, j) in grid.u_faces() {
            let (x, y) = grid.u_position(i, j);
            values[grid.u_index(i, j)] = u(x, y);
        }
        for (i, j) in grid.v_faces() {
            let (x, y) = grid.v_position(i, j);
            values[grid.v_index(i, j)] = v(x, y);
        }
        VelocityField { grid, values }
    }

    pub fn grid(&self) -> MacGrid {
        self.grid
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// u on face `(i, j)`, `0 <= i <= n`; wall faces return zero.
    pub fn u(&self, i: usize, j: usize) -> f64 {
        if i == 0 || i == self.grid.n() {
            0.0
        } else {
            self.values[self.grid.u_index(i, j)]
        }
    }

    /// v on face `(i, j)`, `0 <= j <= n`; wall faces return zero.
    pub fn v(&self, i: usize, j: usize) -> f64 {
        if j == 0 || j == self.grid.n() {
            0.0
        } else {
            self.values[self.grid.v_index(i, j)]
        }
    }
}

/// Cell-centered pressure.
#[derive(Clone, Debug, PartialEq)]
pub struct PressureField {
    grid: MacGrid,
    values: Vec<f64>,
}

impl PressureField {
    pub fn from_vec(grid: MacGrid, values: Vec<f64>) -> Result<Self> {
        check_len(&values, grid.num_pressure(), "pressure field length")?;
        Ok(PressureField { grid, values })
    }

    pub fn sample(grid: MacGrid, p: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid
            .cells()
            .map(|(i, j)| {
                let (x, y) = grid.p_position(i, j);
                p(x, y)
            })
            .collect();
        PressureField { grid, values }
    }

    pub fn grid(&self) -> MacGrid {
        self.grid
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.p_index(i, j)]
    }

    pub fn mean(&self) -> f64 {
        crate::linalg::vector::mean(&self.values)
    }
}

/// Remove the cell average (discrete zero-mean pressure space).
pub fn zero_mean_project(p: &PressureField) -> PressureField {
    let mut values = p.values.clone();
    remove_mean(&mut values);
    PressureField {
        grid: p.grid,
        values,
    }
}

pub(crate) fn remove_mean(v: &mut [f64]) {
    let m = crate::linalg::vector::mean(v);
    v.iter_mut().for_each(|x| *x -= m);
}
