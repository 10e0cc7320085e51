//! Subcommand implementations.
//!
//! Every command is a plain function from parsed arguments to `Result<()>`;
//! the binary maps errors to exit codes. Simulation outputs always land in
//! a directory containing `manifest.txt` (written before the run starts),
//! `diagnostics.csv`, checkpoint files, and `checksums.sha256`.

use std::io::Write;
use std::path::{Path, PathBuf};

use hydrofrac_core::dynamics::{HaltReason, Monitor, RunOutcome, Solver};
use hydrofrac_core::exponents::{
    self, Regime, UpperBoundVariant,
};
use hydrofrac_core::transform::Transform;

use crate::checkpoint::{Checkpoint, CheckpointError};
use crate::config::ResolvedConfig;
use crate::csvout;
use crate::error::{CliError, Result};
use crate::manifest::{self, RunManifest, MANIFEST_NAME};

fn map_core(e: hydrofrac_core::CoreError) -> CliError {
    CliError::Usage(e.to_string())
}

fn map_checkpoint(path: &Path, e: CheckpointError) -> CliError {
    match e {
        CheckpointError::Io(e) => CliError::io(path, e),
        other => CliError::Usage(format!("{}: {other}", path.display())),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Runs one simulation into `out_dir`, producing the manifest (first), the
/// diagnostics CSV, checkpoints, and checksums.
pub fn run_simulation(cfg: &ResolvedConfig, out_dir: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let solver = Solver::new(cfg.sim.clone()).map_err(map_core)?;

    let mut cp_names: Vec<String> = (0..cfg.sim.checkpoint_times.len())
        .map(|i| format!("checkpoint_{i:03}.hpe1"))
        .collect();
    let mut outputs = vec!["diagnostics.csv".to_string(), "final_state.hpe1".to_string()];
    outputs.append(&mut cp_names.clone());
    RunManifest::for_simulation(cfg, outputs.clone()).write(&out_dir.join(MANIFEST_NAME))?;

    let outcome = solver.run().map_err(map_core)?;

    write_file(
        &out_dir.join("diagnostics.csv"),
        &csvout::diagnostics_csv(&outcome.records),
    )?;
    let tf = Transform::new(*solver.grid());
    let mut to_store: Vec<(String, &hydrofrac_core::State)> = Vec::new();
    to_store.push(("final_state.hpe1".to_string(), &outcome.final_state));
    cp_names.truncate(outcome.snapshots.len());
    for (name, snap) in cp_names.iter().zip(outcome.snapshots.iter()) {
        to_store.push((name.clone(), snap));
    }
    for (name, state) in to_store {
        let path = out_dir.join(&name);
        let cp = Checkpoint {
            t: state.t,
            u: state.u_physical(&tf).map_err(map_core)?,
        };
        cp.write(&path).map_err(|e| map_checkpoint(&path, e))?;
    }
    // A halted run may not have reached some checkpoint times; drop the
    // unwritten names from the checksum list.
    let written: Vec<String> = outputs
        .into_iter()
        .filter(|name| out_dir.join(name).exists())
        .collect();
    manifest::write_checksums(out_dir, &written)?;
    Ok(outcome)
}

/// Per-monitor verdicts over a finished run.
///
/// The energy-budget bounds are relative to the initial energies and carry a
/// `record_every^2` factor: the dissipation integrals are trapezoid sums at
/// record cadence, so their quadrature error grows with the square of the
/// record spacing.
pub fn monitor_report(outcome: &RunOutcome, record_every: usize) -> Vec<(Monitor, bool, String)> {
    let s = &outcome.summary;
    let e0_u = outcome.records[0].energy_u;
    let e0_w = outcome.records[0].energy_omega;
    let budget_tol = 1e-6 * (record_every as f64).powi(2);
    Monitor::ALL
        .iter()
        .map(|&m| {
            let (ok, detail) = match m {
                Monitor::BudgetU => (
                    s.max_abs_budget_residual_u <= budget_tol * e0_u,
                    format!(
                        "max |residual| {:e}, bound {:e}",
                        s.max_abs_budget_residual_u,
                        budget_tol * e0_u
                    ),
                ),
                Monitor::BudgetOmega => (
                    s.max_abs_budget_residual_omega <= budget_tol * e0_w,
                    format!(
                        "max |residual| {:e}, bound {:e}",
                        s.max_abs_budget_residual_omega,
                        budget_tol * e0_w
                    ),
                ),
                Monitor::MaxPrinciple => (
                    s.min_max_principle_margin >= 0.0,
                    format!("min margin {:e}", s.min_max_principle_margin),
                ),
                Monitor::HSpace => {
                    // Vertical means drift by roundoff proportional to the
                    // field magnitude; scale the bound by the initial RMS.
                    let h_tol = 1e-12 * (1.0 + s.initial_energy_u.sqrt());
                    (
                        s.max_h_deviation <= h_tol,
                        format!(
                            "max |vertical mean| {:e}, bound {:e}",
                            s.max_h_deviation, h_tol
                        ),
                    )
                }
                Monitor::WBoundary => (
                    s.max_w_bottom == 0.0 && s.max_w_top_excess <= 0.0,
                    format!(
                        "max |w(.,0)| {:e}, top excess {:e}",
                        s.max_w_bottom, s.max_w_top_excess
                    ),
                ),
                Monitor::BkmFinite => (
                    s.final_bkm.is_finite() && s.accumulators_nondecreasing,
                    format!(
                        "final accumulator {:e}, nondecreasing {}",
                        s.final_bkm, s.accumulators_nondecreasing
                    ),
                ),
            };
            (m, ok, detail)
        })
        .collect()
}

pub fn cmd_simulate(cfg: &ResolvedConfig, out_dir: &Path) -> Result<()> {
    let outcome = run_simulation(cfg, out_dir)?;
    println!(
        "run complete: {} steps to t = {}, {} records -> {}",
        outcome.summary.steps,
        outcome.final_state.t,
        outcome.records.len(),
        out_dir.display()
    );
    let report = monitor_report(&outcome, cfg.sim.record_every);
    for (m, ok, detail) in report {
        if cfg.sim.monitors.contains(&m) {
            let verdict = if ok { "ok" } else { "VIOLATED" };
            println!("monitor {}: {} ({})", m.name(), verdict, detail);
        }
    }
    if let Some(halt) = outcome.halted {
        let what = match halt.reason {
            HaltReason::Blowup {
                omega_linf,
                threshold,
            } => format!(
                "blowup at t = {} (omega_linf {omega_linf:e} > threshold {threshold:e})",
                halt.t
            ),
            HaltReason::NonFinite => {
                format!("non-finite state at t = {}; last finite record kept", halt.t)
            }
        };
        return Err(CliError::Blowup(what));
    }
    Ok(())
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::CriticalSmallData => "critical_small_data",
        Regime::SmallData => "small_data",
        Regime::GlobalRegularity => "global_regularity",
        Regime::OutOfRange => "out_of_range",
    }
}

/// Notes column: regime boundaries within 1e-3 of `alpha`.
fn threshold_notes(alpha: f64) -> String {
    let mut notes: Vec<String> = Vec::new();
    for (name, value) in exponents::near_thresholds(alpha, 1e-3) {
        let meaning = match name {
            "alpha0" => "global regularity holds for alpha >= alpha0",
            "alpha1" => "delta_m switches branch at alpha1",
            "alpha2" => "two bootstrap steps suffice above alpha2",
            "alpha_split" => "bootstrap dichotomy flips at 4/sqrt(15)",
            _ => "",
        };
        notes.push(format!("within 1e-3 of {name} = {value} ({meaning})"));
    }
    notes.join("; ")
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "undefined".to_string(),
    }
}

pub fn cmd_exponents(alpha: f64, csv: Option<&Path>) -> Result<()> {
    if !alpha.is_finite() {
        return Err(CliError::Usage(format!("alpha must be finite, got {alpha}")));
    }
    let report = exponents::exponent_table(alpha);
    let regime = regime_name(exponents::regime(alpha));
    let notes = threshold_notes(alpha);
    let t = &report.thresholds;
    println!("exponent table at alpha = {alpha}");
    println!("  regime      = {regime}");
    println!("  delta_1     = {}", report.delta1);
    println!("  rho_1       = {}", report.rho1);
    println!("  delta_2     = {}", fmt_opt(report.delta2));
    println!("  rho_2       = {}", fmt_opt(report.rho2));
    println!("  delta_star  = {}", report.delta_star);
    println!("  delta_dstar = {}", report.delta_dstar);
    println!("  delta_m     = {}", report.delta_m);
    println!("  rho_star    = {}", report.rho_star);
    println!("  rho_m       = {}", fmt_opt(report.rho_m));
    println!("  thresholds: alpha0 = {}, alpha1 = {}, alpha2 = {}, 4/sqrt(15) = {}",
        t.alpha0, t.alpha1, t.alpha2, t.alpha_split);
    if !report.in_window {
        println!("  note: alpha outside [1, 6/5]; values shown where defined");
    }
    if !notes.is_empty() {
        println!("  note: {notes}");
    }
    if let Some(path) = csv {
        write_file(path, &csvout::exponents_csv(&report, regime, &notes))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Parses `start:end:step` into an inclusive sweep.
pub fn parse_alpha_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(CliError::Usage(format!(
            "--alphas expects start:end:step, got `{spec}`"
        )));
    };
    let parse = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| CliError::Usage(format!("--alphas: bad number `{s}`")))
    };
    let (start, end, step) = (parse(start)?, parse(end)?, parse(step)?);
    if !(step > 0.0) || end < start {
        return Err(CliError::Usage(format!(
            "--alphas: need start <= end and step > 0, got `{spec}`"
        )));
    }
    let mut out = Vec::new();
    let n = ((end - start) / step).round() as usize;
    for i in 0..=n {
        let a = start + step * i as f64;
        if a <= end + 1e-12 {
            out.push(a);
        }
    }
    Ok(out)
}

pub fn cmd_iterate(alphas: &[f64], csv: Option<&Path>) -> Result<()> {
    let mut body = String::from(csvout::ITERATE_HEADER);
    body.push('\n');
    for &alpha in alphas {
        let trace = exponents::bootstrap(alpha).map_err(|e| CliError::Domain(e.to_string()))?;
        csvout::iterate_rows(&trace, &mut body);
        let last = *trace.rho_sequence.last().unwrap();
        match trace.verdict {
            exponents::Verdict::ReachesRhoStar { steps } => println!(
                "alpha = {alpha}: reaches rho_star = {} after {steps} step(s), last rho = {last}",
                exponents::rho_star(alpha)
            ),
            exponents::Verdict::ConvergesToRhoM { limit } => println!(
                "alpha = {alpha}: converges to rho_M = {limit} < rho_star = {}",
                exponents::rho_star(alpha)
            ),
        }
    }
    if let Some(path) = csv {
        write_file(path, &body)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn parse_variant(s: &str) -> Result<UpperBoundVariant> {
    match s {
        "half-alpha" => Ok(UpperBoundVariant::HalfAlpha),
        "half-rho" => Ok(UpperBoundVariant::HalfRho),
        other => Err(CliError::Usage(format!(
            "--variant expects half-alpha or half-rho, got `{other}`"
        ))),
    }
}

pub fn cmd_region(
    alpha: f64,
    resolution: usize,
    variant: UpperBoundVariant,
    out: &Path,
) -> Result<()> {
    let grid = exponents::admissible_region(alpha, resolution, variant)
        .map_err(|e| CliError::Domain(e.to_string()))?;
    write_file(out, &csvout::region_csv(&grid))?;
    println!(
        "alpha = {alpha}: {} of {} sampled points admissible",
        grid.admissible_count,
        grid.samples.len()
    );
    println!(
        "optimal point (rho_star, delta_dstar) = ({}, {}): {}",
        grid.optimal_rho,
        grid.optimal_delta,
        if grid.optimal_admissible {
            "admissible"
        } else {
            "not admissible"
        }
    );
    println!("wrote {}", out.display());
    Ok(())
}

struct SweepRow {
    job: usize,
    config: String,
    alpha: Option<f64>,
    nu: Option<f64>,
    status: &'static str,
    halted: &'static str,
    final_bkm: Option<f64>,
    margin: Option<f64>,
    error: String,
}

fn sweep_job(job: usize, config_path: &Path, job_dir: &Path) -> SweepRow {
    let mut row = SweepRow {
        job,
        config: config_path.display().to_string(),
        alpha: None,
        nu: None,
        status: "failed",
        halted: "none",
        final_bkm: None,
        margin: None,
        error: String::new(),
    };
    let cfg = crate::config::ConfigBuilder::from_file(config_path).and_then(|b| b.build());
    let cfg = match cfg {
        Ok(cfg) => cfg,
        Err(e) => {
            row.error = e.to_string();
            return row;
        }
    };
    row.alpha = Some(cfg.sim.alpha);
    row.nu = Some(cfg.sim.nu);
    match run_simulation(&cfg, job_dir) {
        Ok(outcome) => {
            row.status = "ok";
            row.halted = match outcome.halted.map(|h| h.reason) {
                None => "none",
                Some(HaltReason::Blowup { .. }) => "blowup",
                Some(HaltReason::NonFinite) => "non_finite",
            };
            row.final_bkm = Some(outcome.summary.final_bkm);
            row.margin = Some(outcome.summary.min_max_principle_margin);
        }
        Err(e) => {
            row.error = e.to_string();
        }
    }
    row
}

/// Effective sweep parallelism: `--jobs`, capped by `HYDROFRAC_THREADS`.
fn effective_jobs(requested: Option<usize>, n_jobs: usize) -> usize {
    let mut jobs = requested
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);
    if let Ok(cap) = std::env::var("HYDROFRAC_THREADS") {
        if let Ok(cap) = cap.parse::<usize>() {
            jobs = jobs.min(cap.max(1));
        }
    }
    jobs.min(n_jobs.max(1))
}

pub fn cmd_sweep(configs: &[PathBuf], out_dir: &Path, jobs: Option<usize>) -> Result<()> {
    if configs.is_empty() {
        return Err(CliError::Usage("sweep requires at least one config".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let threads = effective_jobs(jobs, configs.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let indexed: Vec<(usize, &PathBuf)> = configs.iter().enumerate().collect();
    let rows: Vec<SweepRow> = pool.install(|| {
        use rayon::prelude::*;
        indexed
            .par_iter()
            .map(|(i, path)| sweep_job(*i, path, &out_dir.join(format!("job_{i:03}"))))
            .collect()
    });

    let mut summary = String::from(csvout::SWEEP_HEADER);
    summary.push('\n');
    for r in &rows {
        let fields = vec![
            r.job.to_string(),
            r.config.clone(),
            r.alpha.map(|v| v.to_string()).unwrap_or_default(),
            r.nu.map(|v| v.to_string()).unwrap_or_default(),
            r.status.to_string(),
            r.halted.to_string(),
            r.final_bkm.map(|v| v.to_string()).unwrap_or_default(),
            r.margin.map(|v| v.to_string()).unwrap_or_default(),
            r.error.clone(),
        ];
        summary.push_str(&csvout::csv_row(&fields));
        summary.push('\n');
    }
    write_file(&out_dir.join("summary.csv"), &summary)?;

    let failed = rows.iter().filter(|r| r.status == "failed").count();
    for r in &rows {
        println!(
            "job {:03} [{}]: {}{}",
            r.job,
            r.config,
            r.status,
            if r.error.is_empty() {
                String::new()
            } else {
                format!(" ({})", r.error)
            }
        );
    }
    println!(
        "sweep complete: {} ok, {failed} failed -> {}",
        rows.len() - failed,
        out_dir.join("summary.csv").display()
    );
    if failed > 0 {
        return Err(CliError::Usage(format!("{failed} sweep job(s) failed")));
    }
    Ok(())
}

pub fn cmd_verify(manifest_path: &Path) -> Result<()> {
    let m = RunManifest::read(manifest_path)?;
    if m.command != "simulate" {
        return Err(CliError::Usage(format!(
            "verify supports simulate manifests, got command `{}`",
            m.command
        )));
    }
    let original_dir = manifest_path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let cfg = m.resolved_config()?;
    let tmp = tempfile::tempdir()
        .map_err(|e| CliError::Io(format!("creating verify scratch dir: {e}")))?;
    run_simulation(&cfg, tmp.path())?;

    let mut mismatched = Vec::new();
    for name in &m.outputs {
        let orig_path = original_dir.join(name);
        let redo_path = tmp.path().join(name);
        let read = |path: &Path| -> Result<Option<Vec<u8>>> {
            match std::fs::read(path) {
                Ok(bytes) => Ok(Some(bytes)),
                // A halted run legitimately skips later checkpoints.
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                Err(e) => Err(CliError::io(path, e)),
            }
        };
        let (verdict, ok) = match (read(&orig_path)?, read(&redo_path)?) {
            (None, None) => ("absent in both runs: ok", true),
            (Some(a), Some(b)) if a == b => ("ok", true),
            _ => ("MISMATCH", false),
        };
        println!("verify {name}: {verdict}");
        if !ok {
            mismatched.push(name.clone());
        }
    }
    let _ = std::io::stdout().flush();
    if mismatched.is_empty() {
        println!("verify passed: {} file(s) byte-identical", m.outputs.len());
        Ok(())
    } else {
        Err(CliError::Domain(format!(
            "verify failed: {} file(s) differ: {}",
            mismatched.len(),
            mismatched.join(", ")
        )))
    }
}
