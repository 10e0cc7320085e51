use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::grid::Grid;
use crate::spectral;
use crate::transform::Transform;

/// Which representation a [`Field`] currently stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Debug, Clone)]
enum FieldData {
    Physical(Array2<f64>),
    Spectral(Array2<Complex64>),
}

/// A scalar field on the channel, tagged with a role ("u", "omega", ...) and
/// stored in exactly one representation at a time.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    role: String,
    data: FieldData,
}

impl Field {
    pub fn from_physical(grid: Grid, role: &str, values: Array2<f64>) -> Result<Self> {
        if values.dim() != grid.physical_shape() {
            return Err(CoreError::ShapeMismatch {
                expected: grid.physical_shape(),
                got: values.dim(),
            });
        }
        Ok(Field {
            grid,
            role: role.to_string(),
            data: FieldData::Physical(values),
        })
    }

    pub fn from_spectral(grid: Grid, role: &str, values: Array2<Complex64>) -> Result<Self> {
        if values.dim() != grid.spectral_shape() {
            return Err(CoreError::ShapeMismatch {
                expected: grid.spectral_shape(),
                got: values.dim(),
            });
        }
        Ok(Field {
            grid,
            role: role.to_string(),
            data: FieldData::Spectral(values),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn role(&self) -> &str {
        &self.role
    }

    pub fn representation(&self) -> Representation {
        match self.data {
            FieldData::Physical(_) => Representation::Physical,
            FieldData::Spectral(_) => Representation::Spectral,
        }
    }

    /// Physical values if stored physically.
    pub fn physical(&self) -> Option<&Array2<f64>> {
        match &self.data {
            FieldData::Physical(v) => Some(v),
            FieldData::Spectral(_) => None,
        }
    }

    /// Spectral coefficients if stored spectrally.
    pub fn spectral(&self) -> Option<&Array2<Complex64>> {
        match &self.data {
            FieldData::Spectral(v) => Some(v),
            FieldData::Physical(_) => None,
        }
    }

    /// Physical values, transforming if needed.
    pub fn to_physical(&self, tf: &Transform) -> Result<Array2<f64>> {
        match &self.data {
            FieldData::Physical(v) => Ok(v.clone()),
            FieldData::Spectral(v) => tf.inverse(v.view()),
        }
    }

    /// Spectral coefficients, transforming if needed.
    pub fn to_spectral(&self, tf: &Transform) -> Result<Array2<Complex64>> {
        match &self.data {
            FieldData::Spectral(v) => Ok(v.clone()),
            FieldData::Physical(v) => tf.forward(v.view()),
        }
    }

    /// Horizontal derivative; result is spectral.
    pub fn dx(&self, tf: &Transform) -> Result<Field> {
        let spec = self.to_spectral(tf)?;
        Field::from_spectral(self.grid, &self.role, spectral::dx_spectral(&self.grid, spec.view()))
    }

    /// Fractional horizontal operator of order `s >= 0`; result is spectral.
    pub fn fractional(&self, tf: &Transform, s: f64) -> Result<Field> {
        let spec = self.to_spectral(tf)?;
        Field::from_spectral(
            self.grid,
            &self.role,
            spectral::apply_fractional(&self.grid, spec.view(), s)?,
        )
    }

    /// 2/3-rule dealiased copy; result is spectral.
    pub fn dealiased(&self, tf: &Transform) -> Result<Field> {
        let spec = self.to_spectral(tf)?;
        Field::from_spectral(self.grid, &self.role, spectral::dealias(&self.grid, spec.view()))
    }

    /// Vertical derivative in the current representation.
    pub fn dz(&self) -> Field {
        match &self.data {
            FieldData::Physical(v) => Field {
                grid: self.grid,
                role: self.role.clone(),
                data: FieldData::Physical(spectral::dz_fd(&self.grid, v.view())),
            },
            FieldData::Spectral(v) => Field {
                grid: self.grid,
                role: self.role.clone(),
                data: FieldData::Spectral(spectral::dz_fd(&self.grid, v.view())),
            },
        }
    }

    /// Running vertical integral in the current representation.
    pub fn cumint(&self) -> Field {
        match &self.data {
            FieldData::Physical(v) => Field {
                grid: self.grid,
                role: self.role.clone(),
                data: FieldData::Physical(spectral::vertical_cumint(&self.grid, v.view())),
            },
            FieldData::Spectral(v) => Field {
                grid: self.grid,
                role: self.role.clone(),
                data: FieldData::Spectral(spectral::vertical_cumint(&self.grid, v.view())),
            },
        }
    }

    /// Trapezoid vertical mean as a profile over x (physical values).
    pub fn vertical_mean_profile(&self, tf: &Transform) -> Result<Array1<f64>> {
        let phys = self.to_physical(tf)?;
        Ok(spectral::vertical_mean(&self.grid, phys.view()))
    }

    /// How far the field sits from the zero-vertical-mean space: the largest
    /// `|int_0^1 f(x, z) dz|` over grid columns.
    pub fn h_deviation(&self, tf: &Transform) -> Result<f64> {
        let means = self.vertical_mean_profile(tf)?;
        Ok(means.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn representation_tracks_storage_and_roundtrips() {
        let grid = Grid::new(16, 8).unwrap();
        let tf = Transform::new(grid);
        let mut v = Array2::zeros(grid.physical_shape());
        for (j, zj) in grid.z_nodes().iter().enumerate() {
            for (i, xi) in grid.x_nodes().iter().enumerate() {
                v[[j, i]] = (2.0 * PI * xi).sin() * (zj - 0.5);
            }
        }
        let f = Field::from_physical(grid, "u", v.clone()).unwrap();
        assert_eq!(f.representation(), Representation::Physical);
        assert_eq!(f.role(), "u");
        let spec = f.to_spectral(&tf).unwrap();
        let g = Field::from_spectral(grid, "u", spec).unwrap();
        assert_eq!(g.representation(), Representation::Spectral);
        let back = g.to_physical(&tf).unwrap();
        for (a, b) in v.iter().zip(back.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn shape_validation() {
        let grid = Grid::new(16, 8).unwrap();
        assert!(Field::from_physical(grid, "u", Array2::zeros((9, 15))).is_err());
        assert!(Field::from_spectral(grid, "u", Array2::zeros((9, 8))).is_err());
    }

    #[test]
    fn h_deviation_detects_vertical_mean() {
        let grid = Grid::new(16, 16).unwrap();
        let tf = Transform::new(grid);
        let mut v = Array2::zeros(grid.physical_shape());
        for (j, zj) in grid.z_nodes().iter().enumerate() {
            for i in 0..grid.n_x() {
                v[[j, i]] = zj - 0.5;
            }
        }
        let f = Field::from_physical(grid, "u", v.clone()).unwrap();
        assert!(f.h_deviation(&tf).unwrap() < 1e-15);
        for x in v.iter_mut() {
            *x += 0.25;
        }
        let g = Field::from_physical(grid, "u", v).unwrap();
        assert!((g.h_deviation(&tf).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn cumint_at_top_matches_mean_profile() {
        let grid = Grid::new(16, 12).unwrap();
        let tf = Transform::new(grid);
        let mut v = Array2::zeros(grid.physical_shape());
        for (j, zj) in grid.z_nodes().iter().enumerate() {
            for (i, xi) in grid.x_nodes().iter().enumerate() {
                v[[j, i]] = (zj * 3.1).cos() + 0.2 * (2.0 * PI * xi).cos();
            }
        }
        let f = Field::from_physical(grid, "u", v).unwrap();
        let integral = f.cumint();
        let top = integral.physical().unwrap().row(grid.n_z()).to_owned();
        let mean = f.vertical_mean_profile(&tf).unwrap();
        for (a, b) in top.iter().zip(mean.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
