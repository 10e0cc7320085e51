//! Initial-data presets. Every preset is projected onto the
//! zero-vertical-mean space by subtracting its trapezoid vertical mean.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::grid::Grid;
use crate::spectral;

/// Vertical structure functions for the deterministic presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZProfile {
    /// `z - 1/2`.
    Linear,
    /// `cos(pi z)`.
    Cosine,
    /// `tanh((z - 1/2) / 0.1)`, a shear layer of width 0.1.
    Tanh,
}

impl ZProfile {
    pub fn eval(&self, z: f64) -> f64 {
        match self {
            ZProfile::Linear => z - 0.5,
            ZProfile::Cosine => (std::f64::consts::PI * z).cos(),
            ZProfile::Tanh => ((z - 0.5) / 0.1).tanh(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ZProfile::Linear => "linear",
            ZProfile::Cosine => "cosine",
            ZProfile::Tanh => "tanh",
        }
    }

    pub fn parse(s: &str) -> Option<ZProfile> {
        match s {
            "linear" => Some(ZProfile::Linear),
            "cosine" => Some(ZProfile::Cosine),
            "tanh" => Some(ZProfile::Tanh),
            _ => None,
        }
    }
}

/// Initial-data descriptors. `Custom` is only constructible programmatically
/// (tests, checkpoint resumption); the config surface exposes the named ones.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Zero,
    /// `cos(2 pi k x) * profile(z)`.
    SingleMode { k: usize, profile: ZProfile },
    /// `profile(z) (1 + 0.1 cos(2 pi x))`, rescaled after projection so the
    /// measured `|omega_0|_inf` equals `amplitude`.
    Shear { amplitude: f64, profile: ZProfile },
    /// Sum over `1 <= k <= k_max`, `1 <= m <= z_modes` of
    /// `amplitude * eta / (1 + k^2 + m^2) * cos(2 pi k x + phi) * cos(m pi z)`
    /// with `eta ~ U(-1, 1)` and `phi ~ U(0, 2 pi)` from a ChaCha8 stream.
    RandomBand {
        k_max: usize,
        z_modes: usize,
        amplitude: f64,
        seed: Option<u64>,
    },
    /// Verbatim physical values (still projected).
    Custom(Array2<f64>),
}

impl InitialData {
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            InitialData::Zero => Ok(()),
            InitialData::SingleMode { k, .. } => {
                if *k == 0 || *k >= grid.n_x() / 2 {
                    Err(CoreError::InvalidParameter {
                        name: "initial_data",
                        message: format!(
                            "single_mode wavenumber must satisfy 1 <= k < n_x/2, got k = {k}"
                        ),
                    })
                } else {
                    Ok(())
                }
            }
            InitialData::Shear { amplitude, .. } => {
                if !(amplitude.is_finite() && *amplitude > 0.0) {
                    Err(CoreError::InvalidParameter {
                        name: "initial_data",
                        message: format!("shear amplitude must be positive, got {amplitude}"),
                    })
                } else {
                    Ok(())
                }
            }
            InitialData::RandomBand {
                k_max,
                z_modes,
                amplitude,
                ..
            } => {
                if *k_max == 0 || *k_max >= grid.n_x() / 2 {
                    return Err(CoreError::InvalidParameter {
                        name: "initial_data",
                        message: format!(
                            "random_band k_max must satisfy 1 <= k_max < n_x/2, got {k_max}"
                        ),
                    });
                }
                if *z_modes == 0 {
                    return Err(CoreError::InvalidParameter {
                        name: "initial_data",
                        message: "random_band z_modes must be at least 1".to_string(),
                    });
                }
                if !amplitude.is_finite() {
                    return Err(CoreError::InvalidParameter {
                        name: "initial_data",
                        message: format!("random_band amplitude must be finite, got {amplitude}"),
                    });
                }
                Ok(())
            }
            InitialData::Custom(values) => {
                if values.dim() != grid.physical_shape() {
                    Err(CoreError::ShapeMismatch {
                        expected: grid.physical_shape(),
                        got: values.dim(),
                    })
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Builds the physical initial field on `grid`. `default_seed` feeds
    /// `random_band` when it carries no seed of its own.
    pub fn build(&self, grid: &Grid, default_seed: u64) -> Result<Array2<f64>> {
        self.validate(grid)?;
        let x = grid.x_nodes();
        let z = grid.z_nodes();
        let mut u = match self {
            InitialData::Zero => Array2::zeros(grid.physical_shape()),
            InitialData::SingleMode { k, profile } => {
                let mut u = Array2::zeros(grid.physical_shape());
                let kk = *k as f64;
                for (j, zj) in z.iter().enumerate() {
                    let p = profile.eval(*zj);
                    for (i, xi) in x.iter().enumerate() {
                        u[[j, i]] = (2.0 * std::f64::consts::PI * kk * xi).cos() * p;
                    }
                }
                u
            }
            InitialData::Shear { profile, .. } => {
                let mut u = Array2::zeros(grid.physical_shape());
                for (j, zj) in z.iter().enumerate() {
                    let p = profile.eval(*zj);
                    for (i, xi) in x.iter().enumerate() {
                        u[[j, i]] = p * (1.0 + 0.1 * (2.0 * std::f64::consts::PI * xi).cos());
                    }
                }
                u
            }
            InitialData::RandomBand {
                k_max,
                z_modes,
                amplitude,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(default_seed));
                let mut u = Array2::zeros(grid.physical_shape());
                for k in 1..=*k_max {
                    for m in 1..=*z_modes {
                        let eta: f64 = rng.random_range(-1.0..1.0);
                        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        let coeff = amplitude * eta / (1.0 + (k * k + m * m) as f64);
                        for (j, zj) in z.iter().enumerate() {
                            let pz = (m as f64 * std::f64::consts::PI * zj).cos();
                            for (i, xi) in x.iter().enumerate() {
                                u[[j, i]] += coeff
                                    * (2.0 * std::f64::consts::PI * k as f64 * xi + phi).cos()
                                    * pz;
                            }
                        }
                    }
                }
                u
            }
            InitialData::Custom(values) => values.clone(),
        };
        spectral::subtract_vertical_mean(grid, &mut u);
        if let InitialData::Shear { amplitude, .. } = self {
            let omega0 = spectral::dz_fd(grid, u.view());
            let peak = omega0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if peak > 0.0 {
                let scale = amplitude / peak;
                for v in u.iter_mut() {
                    *v *= scale;
                }
            }
        }
        Ok(u)
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Zero => "zero",
            InitialData::SingleMode { .. } => "single_mode",
            InitialData::Shear { .. } => "shear",
            InitialData::RandomBand { .. } => "random_band",
            InitialData::Custom(_) => "custom",
        }
    }
}
