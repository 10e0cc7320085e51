use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{CoreError, Result};
use crate::grid::Grid;

/// Planned FFTs for one grid, applied row by row along x.
///
/// The forward transform returns true Fourier coefficients: the raw
/// real-to-complex output divided by `n_x`, so that mode 0 is the horizontal
/// mean and `cos(2 pi k x)` shows up as `0.5` in mode `k`. The inverse is the
/// unnormalized complex-to-real transform, which makes the pair an exact
/// roundtrip. Plans are immutable after construction and safe to share across
/// threads.
pub struct Transform {
    grid: Grid,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
}

impl Transform {
    pub fn new(grid: Grid) -> Self {
        let mut planner = RealFftPlanner::<f64>::new();
        let r2c = planner.plan_fft_forward(grid.n_x());
        let c2r = planner.plan_fft_inverse(grid.n_x());
        Transform { grid, r2c, c2r }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Physical `(n_z+1) x n_x` to spectral `(n_z+1) x (n_x/2+1)`.
    pub fn forward(&self, phys: ArrayView2<f64>) -> Result<Array2<Complex64>> {
        if phys.dim() != self.grid.physical_shape() {
            return Err(CoreError::ShapeMismatch {
                expected: self.grid.physical_shape(),
                got: phys.dim(),
            });
        }
        let mut out = Array2::zeros(self.grid.spectral_shape());
        let mut scratch = self.r2c.make_input_vec();
        let mut row_out = self.r2c.make_output_vec();
        let scale = 1.0 / self.grid.n_x() as f64;
        for (i, row) in phys.rows().into_iter().enumerate() {
            for (s, v) in scratch.iter_mut().zip(row.iter()) {
                *s = *v;
            }
            self.r2c
                .process(&mut scratch, &mut row_out)
                .expect("planned r2c length matches grid");
            for (o, v) in out.row_mut(i).iter_mut().zip(row_out.iter()) {
                *o = v * scale;
            }
        }
        Ok(out)
    }

    /// Spectral `(n_z+1) x (n_x/2+1)` back to physical `(n_z+1) x n_x`.
    ///
    /// Imaginary parts of the mean and Nyquist modes have no physical
    /// counterpart for real signals; they are dropped here rather than
    /// rejected, since roundoff routinely leaves dust in them.
    pub fn inverse(&self, spec: ArrayView2<Complex64>) -> Result<Array2<f64>> {
        if spec.dim() != self.grid.spectral_shape() {
            return Err(CoreError::ShapeMismatch {
                expected: self.grid.spectral_shape(),
                got: spec.dim(),
            });
        }
        let mut out = Array2::zeros(self.grid.physical_shape());
        let mut scratch = self.c2r.make_input_vec();
        let mut row_out = self.c2r.make_output_vec();
        let nyquist = self.grid.n_modes() - 1;
        for (i, row) in spec.rows().into_iter().enumerate() {
            for (s, v) in scratch.iter_mut().zip(row.iter()) {
                *s = *v;
            }
            scratch[0].im = 0.0;
            scratch[nyquist].im = 0.0;
            self.c2r
                .process(&mut scratch, &mut row_out)
                .expect("planned c2r length matches grid");
            for (o, v) in out.row_mut(i).iter_mut().zip(row_out.iter()) {
                *o = *v;
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("grid", &self.grid).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample_field(grid: &Grid) -> Array2<f64> {
        let x = grid.x_nodes();
        let z = grid.z_nodes();
        let mut f = Array2::zeros(grid.physical_shape());
        for (j, zj) in z.iter().enumerate() {
            for (i, xi) in x.iter().enumerate() {
                f[[j, i]] = (2.0 * PI * xi).cos() * (1.0 + zj)
                    + 0.25 * (6.0 * PI * xi + 0.3).sin() * zj * zj;
            }
        }
        f
    }

    #[test]
    fn roundtrip_within_spec_tolerance() {
        let grid = Grid::new(32, 16).unwrap();
        let tf = Transform::new(grid);
        let f = sample_field(&grid);
        let g = tf.inverse(tf.forward(f.view()).unwrap().view()).unwrap();
        let max_abs = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = 10.0 * f64::EPSILON * max_abs;
        for (a, b) in f.iter().zip(g.iter()) {
            assert!((a - b).abs() <= tol, "roundtrip error {} > {}", (a - b).abs(), tol);
        }
    }

    #[test]
    fn forward_gives_true_coefficients() {
        let grid = Grid::new(16, 8).unwrap();
        let tf = Transform::new(grid);
        let x = grid.x_nodes();
        let mut f = Array2::zeros(grid.physical_shape());
        for j in 0..grid.n_levels() {
            for (i, xi) in x.iter().enumerate() {
                f[[j, i]] = 3.0 + (2.0 * PI * 2.0 * xi).cos();
            }
        }
        let spec = tf.forward(f.view()).unwrap();
        assert!((spec[[0, 0]].re - 3.0).abs() < 1e-14);
        assert!((spec[[0, 2]].re - 0.5).abs() < 1e-14);
        assert!(spec[[0, 2]].im.abs() < 1e-14);
        assert!(spec[[0, 1]].norm() < 1e-14);
    }

    #[test]
    fn inverse_ignores_mean_and_nyquist_imaginary_dust() {
        let grid = Grid::new(8, 8).unwrap();
        let tf = Transform::new(grid);
        let mut spec = Array2::<Complex64>::zeros(grid.spectral_shape());
        spec[[0, 0]] = Complex64::new(1.0, 1e-17);
        spec[[0, 4]] = Complex64::new(0.5, -3e-17);
        let phys = tf.inverse(spec.view()).unwrap();
        assert!(phys.iter().all(|v| v.is_finite()));
        let mean: f64 = phys.row(0).iter().sum::<f64>() / 8.0;
        assert!((mean - 1.0).abs() < 1e-14);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let grid = Grid::new(16, 8).unwrap();
        let tf = Transform::new(grid);
        let wrong = Array2::<f64>::zeros((4, 16));
        assert!(matches!(
            tf.forward(wrong.view()),
            Err(CoreError::ShapeMismatch { .. })
        ));
    }
}
