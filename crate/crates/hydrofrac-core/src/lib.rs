//! Pseudo-spectral solver and exponent calculus for the two-dimensional
//! hydrostatic primitive equations with fractional horizontal dissipation.
//!
//! The crate has two halves that share nothing but the parameter `alpha`:
//!
//! * a simulator for
//!   `dt u + u dx u + w dz u + dx p + nu Lambda_h^alpha u = 0` on the
//!   periodic channel `T x [0, 1]`, Fourier in `x` and second-order finite
//!   differences in `z`, stepped with integrating-factor RK4 and
//!   instrumented with energy/enstrophy budgets, vorticity maximum
//!   principle margins, fractional Sobolev functionals, and a
//!   Beale-Kato-Majda accumulator ([`dynamics`], [`diagnostics`]);
//! * an exact-arithmetic-free but tightly toleranced implementation of the
//!   regularity exponent calculus for the same equation: threshold
//!   constants, the bootstrap iteration on the vorticity exponent, and the
//!   admissible exponent region ([`exponents`]).
//!
//! Physical fields are `(n_z + 1) x n_x` arrays over grid nodes; spectral
//! fields are `(n_z + 1) x (n_x / 2 + 1)` complex arrays of true Fourier
//! coefficients per level. [`Grid`] fixes the layout, [`Transform`] moves
//! between the two, and [`Field`] tags an array with its representation.

pub use ndarray;
pub use num_complex;

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod exponents;
pub mod field;
pub mod grid;
pub mod presets;
pub mod spectral;
pub mod transform;

pub use diagnostics::{DiagnosticsRecord, InterpolationReport, Recorder, RecorderParams};
pub use dynamics::{
    DtPolicy, Halt, HaltReason, Monitor, RunOutcome, RunSummary, SimConfig, Solver, State,
    TendencyParts,
};
pub use error::{CoreError, Result};
pub use exponents::{
    BootstrapTrace, ExponentReport, RegionGrid, Regime, Thresholds, UpperBoundVariant, Verdict,
};
pub use field::{Field, Representation};
pub use grid::Grid;
pub use presets::{InitialData, ZProfile};
pub use transform::Transform;
