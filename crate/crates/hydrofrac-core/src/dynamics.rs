//! Tendency assembly, pressure elimination, and time stepping for the
//! hydrostatic system
//!
//! ```text
//!   dt u + u dx u + w dz u + dx p + nu Lambda_h^alpha u = 0,
//!   dx u + dz w = 0,      dz p = 0,
//! ```
//!
//! on the periodic channel. The vertical velocity is recovered from
//! incompressibility, `w = -int_0^z dx u`, and the hydrostatic pressure is
//! eliminated by projecting the tendency onto zero vertical mean. Time
//! integration is integrating-factor RK4: the stiff dissipation symbol is
//! applied exactly per mode and the classical RK4 weights act on the
//! transformed nonlinearity.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::diagnostics::{self, DiagnosticsRecord, Recorder, RecorderParams};
use crate::error::{CoreError, Result};
use crate::exponents;
use crate::field::Field;
use crate::grid::Grid;
use crate::presets::InitialData;
use crate::spectral;
use crate::transform::Transform;

/// Structural checks a run reports on afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monitor {
    BudgetU,
    BudgetOmega,
    MaxPrinciple,
    HSpace,
    WBoundary,
    BkmFinite,
}

impl Monitor {
    pub const ALL: [Monitor; 6] = [
        Monitor::BudgetU,
        Monitor::BudgetOmega,
        Monitor::MaxPrinciple,
        Monitor::HSpace,
        Monitor::WBoundary,
        Monitor::BkmFinite,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Monitor::BudgetU => "budget_u",
            Monitor::BudgetOmega => "budget_omega",
            Monitor::MaxPrinciple => "max_principle",
            Monitor::HSpace => "h_space",
            Monitor::WBoundary => "w_boundary",
            Monitor::BkmFinite => "bkm_finite",
        }
    }

    pub fn parse(s: &str) -> Option<Monitor> {
        Monitor::ALL.into_iter().find(|m| m.name() == s)
    }
}

/// Time-step selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed { dt: f64 },
    Cfl { safety: f64, dt_max: f64 },
}

/// Full description of one simulation.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub alpha: f64,
    pub nu: f64,
    pub n_x: usize,
    pub n_z: usize,
    pub dt_policy: DtPolicy,
    pub t_end: f64,
    pub initial_data: InitialData,
    pub nonlinear_enabled: bool,
    pub monitors: Vec<Monitor>,
    /// Exponents for the X/Y functionals; `None` selects the optimal choice
    /// `(rho_star, delta_dstar)`, clamped at zero where those closed forms
    /// go negative (large `alpha`), since negative-order norms are not
    /// defined here.
    pub delta: Option<f64>,
    pub rho: Option<f64>,
    /// Emit a diagnostics record every this many steps (plus t = 0 and the
    /// final time).
    pub record_every: usize,
    /// Times at which to snapshot the state for checkpointing.
    pub checkpoint_times: Vec<f64>,
    pub seed: u64,
    pub max_principle_tol: f64,
}

impl SimConfig {
    /// A config with conventional defaults for everything but the physics.
    pub fn new(alpha: f64, nu: f64, n_x: usize, n_z: usize, t_end: f64) -> Self {
        SimConfig {
            alpha,
            nu,
            n_x,
            n_z,
            dt_policy: DtPolicy::Cfl {
                safety: 0.5,
                dt_max: 0.01,
            },
            t_end,
            initial_data: InitialData::Zero,
            nonlinear_enabled: true,
            monitors: Monitor::ALL.to_vec(),
            delta: None,
            rho: None,
            record_every: 1,
            checkpoint_times: Vec::new(),
            seed: 0,
            max_principle_tol: 1e-6,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n_x, self.n_z)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(CoreError::InvalidParameter {
                name: "alpha",
                message: format!("alpha must lie in (0, 2], got {}", self.alpha),
            });
        }
        if !(self.nu > 0.0) {
            return Err(CoreError::InvalidParameter {
                name: "nu",
                message: format!("nu must be positive, got {}", self.nu),
            });
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(CoreError::InvalidParameter {
                name: "t_end",
                message: format!("t_end must be positive, got {}", self.t_end),
            });
        }
        match self.dt_policy {
            DtPolicy::Fixed { dt } => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(CoreError::InvalidParameter {
                        name: "dt",
                        message: format!("fixed dt must be positive, got {dt}"),
                    });
                }
            }
            DtPolicy::Cfl { safety, dt_max } => {
                if !(safety > 0.0 && safety <= 1.0) {
                    return Err(CoreError::InvalidParameter {
                        name: "cfl_safety",
                        message: format!("safety factor must lie in (0, 1], got {safety}"),
                    });
                }
                if !(dt_max > 0.0 && dt_max.is_finite()) {
                    return Err(CoreError::InvalidParameter {
                        name: "dt_max",
                        message: format!("dt_max must be positive, got {dt_max}"),
                    });
                }
            }
        }
        if self.record_every == 0 {
            return Err(CoreError::InvalidParameter {
                name: "record_every",
                message: "record_every must be at least 1".to_string(),
            });
        }
        for (name, v) in [("delta", self.delta), ("rho", self.rho)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(CoreError::InvalidParameter {
                        name: "delta",
                        message: format!("{name} must be a nonnegative real, got {v}"),
                    });
                }
            }
        }
        for t in &self.checkpoint_times {
            if !(*t >= 0.0 && *t <= self.t_end) {
                return Err(CoreError::InvalidParameter {
                    name: "checkpoint_times",
                    message: format!("checkpoint time {t} outside [0, t_end]"),
                });
            }
        }
        if !(self.max_principle_tol >= 0.0) {
            return Err(CoreError::InvalidParameter {
                name: "max_principle_tol",
                message: format!("tolerance must be nonnegative, got {}", self.max_principle_tol),
            });
        }
        self.initial_data.validate(&grid)
    }

    /// The `(delta, rho)` pair the X/Y functionals use.
    pub fn xy_exponents(&self) -> (f64, f64) {
        let delta = self
            .delta
            .unwrap_or_else(|| exponents::delta_dstar(self.alpha).max(0.0));
        let rho = self
            .rho
            .unwrap_or_else(|| exponents::rho_star(self.alpha).max(0.0));
        (delta, rho)
    }
}

/// Evolving state: the spectral velocity plus clock and step counter.
#[derive(Debug, Clone)]
pub struct State {
    pub u: Array2<Complex64>,
    pub t: f64,
    pub step_count: u64,
}

impl State {
    pub fn u_field(&self, grid: Grid) -> Result<Field> {
        Field::from_spectral(grid, "u", self.u.clone())
    }

    pub fn u_physical(&self, tf: &Transform) -> Result<Array2<f64>> {
        tf.inverse(self.u.view())
    }
}

/// The two parts of the velocity tendency. The dissipation part is kept
/// separate because the stepper applies it exactly rather than through the
/// Runge-Kutta stages.
#[derive(Debug, Clone)]
pub struct TendencyParts {
    /// `-P(u dx u + w dz u)` in spectral form (zero when the nonlinearity is
    /// disabled).
    pub explicit: Array2<Complex64>,
    /// `-nu Lambda^alpha u` in spectral form.
    pub dissipation: Array2<Complex64>,
}

impl TendencyParts {
    pub fn total(&self) -> Array2<Complex64> {
        &self.explicit + &self.dissipation
    }
}

/// Why a run stopped early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HaltReason {
    Blowup { omega_linf: f64, threshold: f64 },
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Halt {
    pub reason: HaltReason,
    pub t: f64,
}

/// Post-run extrema used for the monitor verdicts.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub steps: u64,
    pub initial_energy_u: f64,
    pub initial_omega_linf: f64,
    pub min_max_principle_margin: f64,
    pub max_abs_budget_residual_u: f64,
    pub max_abs_budget_residual_omega: f64,
    pub max_h_deviation: f64,
    pub max_w_bottom: f64,
    pub max_w_top: f64,
    /// `max(|w(x,1)| - 1e-10 max|dx u|)` over records; the boundary
    /// condition holds iff this is nonpositive.
    pub max_w_top_excess: f64,
    pub final_bkm: f64,
    pub accumulators_nondecreasing: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: State,
    pub records: Vec<DiagnosticsRecord>,
    pub summary: RunSummary,
    pub halted: Option<Halt>,
    /// State snapshots at the configured checkpoint times, in order.
    pub snapshots: Vec<State>,
}

/// Blowup rule: non-finite vorticity, or growth beyond `1e6` times the
/// initial sup-norm (a sustained violation of the maximum principle).
pub fn blowup_verdict(omega_linf: f64, omega0_linf: f64) -> bool {
    !omega_linf.is_finite() || (omega0_linf > 0.0 && omega_linf > 1e6 * omega0_linf)
}

/// One configured simulation: grid, plans, and the dissipation symbol.
pub struct Solver {
    cfg: SimConfig,
    grid: Grid,
    tf: Transform,
    /// `nu |2 pi k|^alpha` per mode.
    lam: Vec<f64>,
}

impl Solver {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let tf = Transform::new(grid);
        let lam = (0..grid.n_modes())
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    cfg.nu * grid.angular(k).powf(cfg.alpha)
                }
            })
            .collect();
        Ok(Solver { cfg, grid, tf, lam })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn transform(&self) -> &Transform {
        &self.tf
    }

    /// Builds the initial state: preset, projection onto zero vertical mean,
    /// and truncation to the dealiased band the evolution lives in.
    pub fn initial_state(&self) -> Result<State> {
        let phys = self.cfg.initial_data.build(&self.grid, self.cfg.seed)?;
        let mut spec = self.tf.forward(phys.view())?;
        spectral::dealias_in_place(&self.grid, &mut spec);
        Ok(State {
            u: spec,
            t: 0.0,
            step_count: 0,
        })
    }

    /// Hydrostatic vorticity `omega = dz u`, spectral.
    pub fn vorticity(&self, u_spec: ArrayView2<Complex64>) -> Array2<Complex64> {
        spectral::dz_fd(&self.grid, u_spec)
    }

    /// Vertical velocity `w = -int_0^z dx u dz'`, spectral. Row 0 is exactly
    /// zero; the top row vanishes with the vertical mean of `u`.
    pub fn recover_w(&self, u_spec: ArrayView2<Complex64>) -> Array2<Complex64> {
        let dxu = spectral::dx_spectral(&self.grid, u_spec);
        let mut w = spectral::vertical_cumint(&self.grid, dxu.view());
        for v in w.iter_mut() {
            *v = -*v;
        }
        w
    }

    /// Dealiased advection term `u dx u + w dz u`, spectral, without the
    /// pressure projection.
    pub fn nonlinear_term(&self, u_spec: ArrayView2<Complex64>) -> Result<Array2<Complex64>> {
        let u = self.tf.inverse(u_spec)?;
        let dxu_spec = spectral::dx_spectral(&self.grid, u_spec);
        let ux = self.tf.inverse(dxu_spec.view())?;
        let uz = spectral::dz_fd(&self.grid, u.view());
        let mut w_spec = spectral::vertical_cumint(&self.grid, dxu_spec.view());
        for v in w_spec.iter_mut() {
            *v = -*v;
        }
        let w = self.tf.inverse(w_spec.view())?;
        let mut adv = u;
        for ((a, x), (wz, z)) in adv
            .iter_mut()
            .zip(ux.iter())
            .zip(w.iter().zip(uz.iter()))
        {
            *a = *a * *x + *wz * *z;
        }
        let mut n = self.tf.forward(adv.view())?;
        spectral::dealias_in_place(&self.grid, &mut n);
        Ok(n)
    }

    /// Removes the vertical mean: the discrete realization of subtracting
    /// `dx p`, which keeps the evolution inside the zero-vertical-mean space.
    pub fn pressure_project(&self, spec: &mut Array2<Complex64>) {
        spectral::subtract_vertical_mean(&self.grid, spec);
    }

    /// `-P(nonlinear term)`: the explicit right-hand side the RK stages see.
    fn nonlinear_rhs(&self, u_spec: ArrayView2<Complex64>) -> Result<Array2<Complex64>> {
        let mut n = self.nonlinear_term(u_spec)?;
        self.pressure_project(&mut n);
        for v in n.iter_mut() {
            *v = -*v;
        }
        Ok(n)
    }

    /// Both tendency parts at the given state.
    pub fn tendency(&self, state: &State) -> Result<TendencyParts> {
        let explicit = if self.cfg.nonlinear_enabled {
            self.nonlinear_rhs(state.u.view())?
        } else {
            Array2::zeros(self.grid.spectral_shape())
        };
        let mut dissipation = spectral::apply_fractional(&self.grid, state.u.view(), self.cfg.alpha)?;
        for v in dissipation.iter_mut() {
            *v *= -self.cfg.nu;
        }
        Ok(TendencyParts {
            explicit,
            dissipation,
        })
    }

    fn scaled_cols(&self, a: ArrayView2<Complex64>, f: &[f64]) -> Array2<Complex64> {
        let mut out = a.to_owned();
        for mut row in out.rows_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v *= f[k];
            }
        }
        out
    }

    /// Integrating-factor RK4 step. With the decay factors
    /// `E = exp(-lam dt/2)`, `E2 = E^2` applied per mode:
    ///
    /// ```text
    ///   k1 = N(u)                     k3 = N(E u + dt/2 k2)
    ///   k2 = N(E (u + dt/2 k1))       k4 = N(E2 u + dt E k3)
    ///   u' = E2 u + dt/6 (E2 k1 + 2 E k2 + 2 E k3 + k4)
    /// ```
    ///
    /// which is classical RK4 in the variables `v(t) = e^{(t - t_n) L} u(t)`;
    /// the dissipation is exact, so with the nonlinearity disabled the step
    /// reduces to `u' = E2 u`.
    pub fn step(&self, state: &mut State, dt: f64) -> Result<()> {
        if !(dt >= 0.0) {
            return Err(CoreError::InvalidParameter {
                name: "dt",
                message: format!("dt must be nonnegative, got {dt}"),
            });
        }
        let e: Vec<f64> = self.lam.iter().map(|l| (-0.5 * l * dt).exp()).collect();
        let e2: Vec<f64> = self.lam.iter().map(|l| (-l * dt).exp()).collect();
        let new_u = if self.cfg.nonlinear_enabled {
            let u = state.u.view();
            let k1 = self.nonlinear_rhs(u)?;
            let mut s = state.u.clone();
            s.zip_mut_with(&k1, |a, b| *a += 0.5 * dt * b);
            let k2 = self.nonlinear_rhs(self.scaled_cols(s.view(), &e).view())?;
            let mut s = self.scaled_cols(u, &e);
            s.zip_mut_with(&k2, |a, b| *a += 0.5 * dt * b);
            let k3 = self.nonlinear_rhs(s.view())?;
            let mut s = self.scaled_cols(u, &e2);
            let ek3 = self.scaled_cols(k3.view(), &e);
            s.zip_mut_with(&ek3, |a, b| *a += dt * b);
            let k4 = self.nonlinear_rhs(s.view())?;
            let mut out = self.scaled_cols(u, &e2);
            let ck1 = self.scaled_cols(k1.view(), &e2);
            let ck2 = self.scaled_cols(k2.view(), &e);
            let sixth = dt / 6.0;
            for (((o, a), b), (c, d)) in out
                .iter_mut()
                .zip(ck1.iter())
                .zip(ck2.iter())
                .zip(ek3.iter().zip(k4.iter()))
            {
                *o += sixth * (*a + 2.0 * *b + 2.0 * *c + *d);
            }
            out
        } else {
            self.scaled_cols(state.u.view(), &e2)
        };
        if new_u.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CoreError::NonFinite { t: state.t });
        }
        state.u = new_u;
        state.t += dt;
        state.step_count += 1;
        Ok(())
    }

    /// Advective time-step bound: `safety * min(dx / max|u|, dz / max|w|)`,
    /// capped at `dt_max`; `dt_max` when the field is at rest.
    pub fn stable_dt(&self, state: &State) -> Result<f64> {
        let DtPolicy::Cfl { safety, dt_max } = self.cfg.dt_policy else {
            return Err(CoreError::InvalidParameter {
                name: "dt_policy",
                message: "stable_dt requires the cfl policy".to_string(),
            });
        };
        let u = self.tf.inverse(state.u.view())?;
        let w = self.tf.inverse(self.recover_w(state.u.view()).view())?;
        let max_u = diagnostics::linf_norm(u.view());
        let max_w = diagnostics::linf_norm(w.view());
        let mut dt = dt_max;
        if max_u > 0.0 {
            dt = dt.min(safety * self.grid.dx() / max_u);
        }
        if max_w > 0.0 {
            dt = dt.min(safety * self.grid.dz() / max_w);
        }
        Ok(dt)
    }

    /// Integrates from the configured initial data to `t_end`, recording
    /// diagnostics every `record_every` steps (plus the initial and final
    /// instants) and snapshotting at the checkpoint times. Deterministic for
    /// a fixed config.
    pub fn run(&self) -> Result<RunOutcome> {
        let mut state = self.initial_state()?;
        let (delta, rho) = self.cfg.xy_exponents();
        let mut recorder = Recorder::new(
            self.grid,
            &self.tf,
            RecorderParams {
                alpha: self.cfg.alpha,
                nu: self.cfg.nu,
                delta,
                rho,
                max_principle_tol: self.cfg.max_principle_tol,
            },
        )?;
        let first = recorder.record(state.u.view(), state.t)?;
        let omega0_linf = first.omega_linf;
        let mut records = vec![first];
        let mut halted = None;

        let mut checkpoint_times = self.cfg.checkpoint_times.clone();
        checkpoint_times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut next_cp = 0;
        let mut snapshots = Vec::new();

        let t_end = self.cfg.t_end;
        let eps_t = 1e-12 * t_end.max(1.0);
        while next_cp < checkpoint_times.len() && checkpoint_times[next_cp] <= eps_t {
            snapshots.push(state.clone());
            next_cp += 1;
        }

        while state.t < t_end - eps_t {
            let dt = match self.cfg.dt_policy {
                DtPolicy::Fixed { dt } => dt,
                DtPolicy::Cfl { .. } => self.stable_dt(&state)?,
            };
            let dt = dt.min(t_end - state.t);
            match self.step(&mut state, dt) {
                Ok(()) => {}
                Err(CoreError::NonFinite { t }) => {
                    halted = Some(Halt {
                        reason: HaltReason::NonFinite,
                        t,
                    });
                    break;
                }
                Err(e) => return Err(e),
            }
            while next_cp < checkpoint_times.len()
                && checkpoint_times[next_cp] <= state.t + eps_t
            {
                snapshots.push(state.clone());
                next_cp += 1;
            }
            let at_end = state.t >= t_end - eps_t;
            if state.step_count % self.cfg.record_every as u64 == 0 || at_end {
                let rec = recorder.record(state.u.view(), state.t)?;
                let blowing = blowup_verdict(rec.omega_linf, omega0_linf);
                records.push(rec);
                if blowing {
                    halted = Some(Halt {
                        reason: HaltReason::Blowup {
                            omega_linf: rec.omega_linf,
                            threshold: 1e6 * omega0_linf,
                        },
                        t: state.t,
                    });
                    break;
                }
            }
        }

        let aux = recorder.aux();
        let mut nondecreasing = true;
        for w in records.windows(2) {
            if w[1].diss_u_accum < w[0].diss_u_accum
                || w[1].diss_omega_accum < w[0].diss_omega_accum
                || w[1].bkm_accum < w[0].bkm_accum
            {
                nondecreasing = false;
            }
        }
        let summary = RunSummary {
            steps: state.step_count,
            initial_energy_u: records[0].energy_u,
            initial_omega_linf: omega0_linf,
            min_max_principle_margin: diagnostics::max_principle_margin(&records),
            max_abs_budget_residual_u: records
                .iter()
                .map(|r| r.budget_residual_u.abs())
                .fold(0.0, f64::max),
            max_abs_budget_residual_omega: records
                .iter()
                .map(|r| r.budget_residual_omega.abs())
                .fold(0.0, f64::max),
            max_h_deviation: aux.max_h_deviation,
            max_w_bottom: aux.max_w_bottom,
            max_w_top: aux.max_w_top,
            max_w_top_excess: aux.max_w_top_excess,
            final_bkm: diagnostics::bkm_integral(&records),
            accumulators_nondecreasing: nondecreasing,
        };
        Ok(RunOutcome {
            final_state: state,
            records,
            summary,
            halted,
            snapshots,
        })
    }
}
