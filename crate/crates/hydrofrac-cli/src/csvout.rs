//! CSV serialization for diagnostics streams and the exponent-calculus
//! commands.
//!
//! Floats are written with Rust's shortest-round-trip formatting, so a CSV
//! written twice from the same records is byte-identical and parses back to
//! the same bit patterns.

use hydrofrac_core::diagnostics::DiagnosticsRecord;
use hydrofrac_core::exponents::{BootstrapTrace, ExponentReport, RegionGrid, Verdict};

pub const DIAGNOSTICS_HEADER: &str = "t,energy_u,diss_u_accum,budget_residual_u,energy_omega,\
diss_omega_accum,budget_residual_omega,omega_linf,omega_z_l2,bkm_accum,X,Y";

/// Quotes a field if it contains a comma, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row(fields: &[String]) -> String {
    fields
        .iter()
        .map(|f| csv_field(f))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn diagnostics_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from(DIAGNOSTICS_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.t,
            r.energy_u,
            r.diss_u_accum,
            r.budget_residual_u,
            r.energy_omega,
            r.diss_omega_accum,
            r.budget_residual_omega,
            r.omega_linf,
            r.omega_z_l2,
            r.bkm_accum,
            r.x,
            r.y
        ));
    }
    out
}

fn opt(v: Option<f64>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "undefined".to_string(),
    }
}

pub const EXPONENTS_HEADER: &str = "alpha,regime,delta1,rho1,delta2,rho2,delta_star,delta_dstar,\
delta_m,rho_star,rho_m,alpha0,alpha1,alpha2,alpha_split,notes";

/// One-row CSV for an exponent report; out-of-domain fields read
/// `undefined` rather than failing.
pub fn exponents_csv(report: &ExponentReport, regime: &str, notes: &str) -> String {
    let t = &report.thresholds;
    let row = csv_row(&[
        report.alpha.to_string(),
        regime.to_string(),
        report.delta1.to_string(),
        report.rho1.to_string(),
        opt(report.delta2),
        opt(report.rho2),
        report.delta_star.to_string(),
        report.delta_dstar.to_string(),
        report.delta_m.to_string(),
        report.rho_star.to_string(),
        opt(report.rho_m),
        t.alpha0.to_string(),
        t.alpha1.to_string(),
        t.alpha2.to_string(),
        t.alpha_split.to_string(),
        notes.to_string(),
    ]);
    format!("{EXPONENTS_HEADER}\n{row}\n")
}

pub const ITERATE_HEADER: &str = "alpha,k,rho,delta,verdict,steps";

fn verdict_fields(v: &Verdict) -> (String, String) {
    match v {
        Verdict::ReachesRhoStar { steps } => ("reaches_rho_star".to_string(), steps.to_string()),
        Verdict::ConvergesToRhoM { limit } => ("converges_to_rho_m".to_string(), limit.to_string()),
    }
}

/// Appends one trace's rows (header not included). The `delta` column is
/// blank at k = 0, which is the seed rather than an iterate.
pub fn iterate_rows(trace: &BootstrapTrace, out: &mut String) {
    let (verdict, extra) = verdict_fields(&trace.verdict);
    for (k, rho) in trace.rho_sequence.iter().enumerate() {
        let delta = if k == 0 {
            String::new()
        } else {
            trace.delta_sequence[k - 1].to_string()
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            trace.alpha, k, rho, delta, verdict, extra
        ));
    }
}

pub const REGION_HEADER: &str = "rho,delta,admissible,marked";

/// Region raster plus the marked optimal point as a final extra row.
pub fn region_csv(grid: &RegionGrid) -> String {
    let mut out = String::from(REGION_HEADER);
    out.push('\n');
    for s in &grid.samples {
        out.push_str(&format!(
            "{},{},{},0\n",
            s.rho,
            s.delta,
            u8::from(s.admissible)
        ));
    }
    out.push_str(&format!(
        "{},{},{},1\n",
        grid.optimal_rho,
        grid.optimal_delta,
        u8::from(grid.optimal_admissible)
    ));
    out
}

pub const SWEEP_HEADER: &str =
    "job,config,alpha,nu,status,halted,final_bkm,min_max_principle_margin,error";
