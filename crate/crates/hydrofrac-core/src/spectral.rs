//! Spatial operators: spectral in x, finite-difference and quadrature in z.
//!
//! Spectral arrays use the half-complex layout `(n_z+1) x (n_x/2+1)` produced
//! by [`crate::transform::Transform::forward`]. Physical-side operators are
//! generic over `f64` and `Complex64` so the same stencils serve both
//! representations.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::grid::Grid;

/// Element types the z-direction stencils operate on.
pub trait Scalar:
    Copy
    + Default
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
}

impl Scalar for f64 {}
impl Scalar for Complex64 {}

/// Exact horizontal derivative: multiply mode `k` by `i 2 pi k`.
///
/// The Nyquist mode is zeroed; its derivative is not representable on the
/// real grid and keeping it would break conjugate symmetry.
pub fn dx_spectral(grid: &Grid, spec: ArrayView2<Complex64>) -> Array2<Complex64> {
    let mut out = spec.to_owned();
    let nyquist = grid.n_modes() - 1;
    for k in 0..grid.n_modes() {
        let m = if k == nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, grid.angular(k))
        };
        for v in out.column_mut(k) {
            *v *= m;
        }
    }
    out
}

/// Fractional horizontal dissipation symbol: multiply mode `k` by `|2 pi k|^s`.
///
/// Mode 0 is annihilated for every `s >= 0`, including `s = 0`: the operator
/// acts only on the oscillatory part. Negative orders are rejected.
pub fn apply_fractional(
    grid: &Grid,
    spec: ArrayView2<Complex64>,
    s: f64,
) -> Result<Array2<Complex64>> {
    if !(s >= 0.0) {
        return Err(CoreError::NegativeExponent { s });
    }
    let mut out = spec.to_owned();
    for k in 0..grid.n_modes() {
        let factor = if k == 0 { 0.0 } else { grid.angular(k).powf(s) };
        for v in out.column_mut(k) {
            *v *= factor;
        }
    }
    Ok(out)
}

/// 2/3-rule dealiasing: zero every mode with `k > n_x / 3`.
pub fn dealias_in_place(grid: &Grid, spec: &mut Array2<Complex64>) {
    let cutoff = grid.dealias_cutoff();
    for k in (cutoff + 1)..grid.n_modes() {
        for v in spec.column_mut(k) {
            *v = Complex64::new(0.0, 0.0);
        }
    }
}

/// Out-of-place variant of [`dealias_in_place`].
pub fn dealias(grid: &Grid, spec: ArrayView2<Complex64>) -> Array2<Complex64> {
    let mut out = spec.to_owned();
    dealias_in_place(grid, &mut out);
    out
}

/// Vertical derivative: second-order central differences inside, one-sided
/// three-point stencils at the walls.
pub fn dz_fd<T: Scalar>(grid: &Grid, arr: ArrayView2<T>) -> Array2<T> {
    let n_z = grid.n_z();
    let half_inv_dz = 0.5 / grid.dz();
    let (rows, cols) = arr.dim();
    debug_assert_eq!(rows, n_z + 1);
    let mut out = Array2::from_elem((rows, cols), T::default());
    for i in 0..cols {
        out[[0, i]] = (arr[[1, i]] * 4.0 - arr[[0, i]] * 3.0 - arr[[2, i]]) * half_inv_dz;
        for j in 1..n_z {
            out[[j, i]] = (arr[[j + 1, i]] - arr[[j - 1, i]]) * half_inv_dz;
        }
        out[[n_z, i]] = (arr[[n_z, i]] * 3.0 - arr[[n_z - 1, i]] * 4.0 + arr[[n_z - 2, i]])
            * half_inv_dz;
    }
    out
}

/// Running trapezoid integral from the bottom wall: row `j` holds
/// `int_0^{z_j} f dz`. Row 0 is exactly zero.
pub fn vertical_cumint<T: Scalar>(grid: &Grid, arr: ArrayView2<T>) -> Array2<T> {
    let n_z = grid.n_z();
    let half_dz = 0.5 * grid.dz();
    let (rows, cols) = arr.dim();
    debug_assert_eq!(rows, n_z + 1);
    let mut out = Array2::from_elem((rows, cols), T::default());
    for i in 0..cols {
        let mut acc = T::default();
        for j in 1..=n_z {
            acc = acc + (arr[[j - 1, i]] + arr[[j, i]]) * half_dz;
            out[[j, i]] = acc;
        }
    }
    out
}

/// Trapezoid vertical mean of each column, accumulated in the same order as
/// [`vertical_cumint`] so the two agree bit for bit at `z = 1`.
pub fn vertical_mean<T: Scalar>(grid: &Grid, arr: ArrayView2<T>) -> Array1<T> {
    let n_z = grid.n_z();
    let half_dz = 0.5 * grid.dz();
    let (rows, cols) = arr.dim();
    debug_assert_eq!(rows, n_z + 1);
    let mut out = Array1::from_elem(cols, T::default());
    for i in 0..cols {
        let mut acc = T::default();
        for j in 1..=n_z {
            acc = acc + (arr[[j - 1, i]] + arr[[j, i]]) * half_dz;
        }
        out[i] = acc;
    }
    out
}

/// Subtracts the trapezoid vertical mean from every column, projecting onto
/// fields with zero vertical mean at each x (respectively each mode).
pub fn subtract_vertical_mean<T: Scalar>(grid: &Grid, arr: &mut Array2<T>) {
    let means = vertical_mean(grid, arr.view());
    for (i, m) in means.iter().enumerate() {
        for v in arr.column_mut(i) {
            *v = *v - *m;
        }
    }
}

/// Parseval weight of mode `k` for real signals: interior modes count twice.
pub fn mode_weight(grid: &Grid, k: usize) -> f64 {
    if k == 0 || k == grid.n_modes() - 1 {
        1.0
    } else {
        2.0
    }
}
