use crate::error::{CoreError, Result};

/// Discretization of the periodic channel `T x [0,1]`.
///
/// The horizontal direction holds `n_x` equispaced nodes on `[0,1)` and is
/// treated spectrally; the vertical direction holds `n_z + 1` nodes
/// `z_j = j / n_z` including both boundaries and is treated with finite
/// differences. Physical arrays are `(n_z + 1) x n_x`, z-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n_x: usize,
    n_z: usize,
}

impl Grid {
    /// Builds a grid, requiring `n_x` even with `n_x >= 8` and `n_z >= 8`.
    pub fn new(n_x: usize, n_z: usize) -> Result<Self> {
        if n_x < 8 || n_x % 2 != 0 {
            return Err(CoreError::InvalidGrid(format!(
                "n_x must be even and at least 8, got {n_x}"
            )));
        }
        if n_z < 8 {
            return Err(CoreError::InvalidGrid(format!(
                "n_z must be at least 8, got {n_z}"
            )));
        }
        Ok(Grid { n_x, n_z })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    /// Number of vertical nodes, `n_z + 1`.
    pub fn n_levels(&self) -> usize {
        self.n_z + 1
    }

    /// Number of retained Fourier modes in the half-complex layout, `n_x/2 + 1`.
    pub fn n_modes(&self) -> usize {
        self.n_x / 2 + 1
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_x as f64
    }

    pub fn dz(&self) -> f64 {
        1.0 / self.n_z as f64
    }

    /// Largest wavenumber kept by the 2/3-rule: modes with `k > n_x/3` are zeroed.
    pub fn dealias_cutoff(&self) -> usize {
        self.n_x / 3
    }

    /// Shape of a physical array on this grid.
    pub fn physical_shape(&self) -> (usize, usize) {
        (self.n_levels(), self.n_x)
    }

    /// Shape of a spectral array on this grid.
    pub fn spectral_shape(&self) -> (usize, usize) {
        (self.n_levels(), self.n_modes())
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| i as f64 / self.n_x as f64).collect()
    }

    pub fn z_nodes(&self) -> Vec<f64> {
        (0..=self.n_z).map(|j| j as f64 / self.n_z as f64).collect()
    }

    /// Trapezoid quadrature weights in z: `dz/2` at the walls, `dz` inside.
    pub fn trapz_weights(&self) -> Vec<f64> {
        let dz = self.dz();
        (0..=self.n_z)
            .map(|j| {
                if j == 0 || j == self.n_z {
                    0.5 * dz
                } else {
                    dz
                }
            })
            .collect()
    }

    /// Angular wavenumber of mode `k` on the unit-period torus.
    pub fn angular(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * k as f64
    }
}
