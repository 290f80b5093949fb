use crate::error::{Error, Result};

/// Uniform staggered grid on `[0, 1]^2` with `n` cells per side.
///
/// * u-faces: vertical interior faces at `x = i h` (`i = 1..n-1`),
///   `y = (j + 1/2) h` (`j = 0..n-1`).
/// * v-faces: horizontal interior faces at `x = (i + 1/2) h`, `y = j h`
///   (`j = 1..n-1`).
/// * p-cells: centers `((i + 1/2) h, (j + 1/2) h)`.
///
/// Boundary faces carry zero velocity and are not unknowns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MacGrid {
    n: usize,
}

pub fn build_grid(n: usize) -> Result<MacGrid> {
    MacGrid::new(n)
}

impl MacGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 2 cells per side, got {n}"
            )));
        }
        Ok(MacGrid { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn num_u(&self) -> usize {
        (self.n - 1) * self.n
    }

    pub fn num_v(&self) -> usize {
        self.n * (self.n - 1)
    }

    /// Velocity unknowns `2 n (n - 1)`.
    pub fn num_velocity(&self) -> usize {
        self.num_u() + self.num_v()
    }

    /// Pressure unknowns `n^2`.
    pub fn num_pressure(&self) -> usize {
        self.n * self.n
    }

    /// u-face `(i, j)`, `1 <= i <= n-1`.
    pub fn u_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i >= 1 && i < self.n && j < self.n);
        j * (self.n - 1) + (i - 1)
    }

    /// v-face `(i, j)`, `1 <= j <= n-1`.
    pub fn v_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j >= 1 && j < self.n);
        self.num_u() + (j - 1) * self.n + i
    }

    pub fn p_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        j * self.n + i
    }

    pub fn u_position(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        (i as f64 * h, (j as f64 + 0.5) * h)
    }

    pub fn v_position(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        ((i as f64 + 0.5) * h, j as f64 * h)
    }

    pub fn p_position(&self, i: usize, j: usize) -> (f64, f64) {
        let h = self.h();
        ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h)
    }

    /// `(i, j)` of every u-face in unknown order.
    pub fn u_faces(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |j| (1..n).map(move |i| (i, j)))
    }

    pub fn v_faces(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (1..n).flat_map(move |j| (0..n).map(move |i| (i, j)))
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> {
        let n = self.n;
        (0..n).flat_map(move |j| (0..n).map(move |i| (i, j)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_counts() {
        for (n, nu, np) in [(2, 4, 4), (4, 24, 16), (32, 1984, 1024)] {
            let g = build_grid(n).unwrap();
            assert_eq!(g.num_velocity(), nu);
            assert_eq!(g.num_pressure(), np);
        }
    }

    #[test]
    fn too_coarse() {
        assert!(build_grid(1).is_err());
        assert!(build_grid(0).is_err());
    }

    #[test]
    fn index_maps_are_bijective() {
        let g = build_grid(5).unwrap();
        let mut seen = vec![false; g.num_velocity()];
        for (i, j) in g.u_faces() {
            seen[g.u_index(i, j)] = true;
        }
        for (i, j) in g.v_faces() {
            seen[g.v_index(i, j)] = true;
        }
        assert!(seen.iter().all(|&s| s));
        let order: Vec<usize> = g.u_faces().map(|(i, j)| g.u_index(i, j)).collect();
        assert_eq!(order, (0..g.num_u()).collect::<Vec<_>>());
    }
}
