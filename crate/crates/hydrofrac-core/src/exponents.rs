//! Exponent calculus for the fractional-dissipation regularity theory.
//!
//! Everything here is closed-form arithmetic on the dissipation order
//! `alpha` and the regularity exponents `delta` (for the velocity) and `rho`
//! (for the vorticity): the constraint maps `f`, `g`, `g^{-1}`, `h`, the
//! interpolation exponents `theta_ij` with their coupling powers `mu_i`, the
//! bootstrap recursion that alternates improvements of `rho` and `delta`, the
//! regime thresholds, the admissible-region sampler, and the small-data
//! smallness constant.

use std::sync::OnceLock;

use crate::error::{CoreError, Result};

/// The four regime thresholds in the dissipation order.
///
/// `alpha0` is the real root of `2a^3 + 3a^2 - 4a - 2` in `(1, 6/5)`:
/// at and above it the bootstrap certifies global regularity. `alpha1 =
/// (13 - sqrt(73))/4` is where a single bootstrap step suffices. `alpha2`
/// is the root of `6a^3 + 17a^2 - 70a + 48` in the same interval, where the
/// second iterate starts clearing the target. `alpha_split = 4/sqrt(15)`
/// separates convergence to the interior fixed point from escape past the
/// target in finitely many steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha_split: f64,
}

/// Bisection to a loose bracket, then Newton polish until the polynomial
/// residual drops below 1e-13.
fn cubic_root(c3: f64, c2: f64, c1: f64, c0: f64, mut lo: f64, mut hi: f64) -> f64 {
    let p = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let dp = |x: f64| (3.0 * c3 * x + 2.0 * c2) * x + c1;
    let (flo, fhi) = (p(lo), p(hi));
    debug_assert!(flo * fhi < 0.0, "root not bracketed");
    let rising = flo < 0.0;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if (p(mid) < 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        let r = p(x);
        if r.abs() < 1e-13 {
            break;
        }
        x -= r / dp(x);
    }
    x
}

/// Computes (first call) or fetches (later calls) the cached thresholds.
pub fn thresholds() -> &'static Thresholds {
    static CACHE: OnceLock<Thresholds> = OnceLock::new();
    CACHE.get_or_init(|| Thresholds {
        alpha0: cubic_root(2.0, 3.0, -4.0, -2.0, 1.0, 1.2),
        alpha1: (13.0 - 73f64.sqrt()) / 4.0,
        alpha2: cubic_root(6.0, 17.0, -70.0, 48.0, 1.0, 1.2),
        alpha_split: 4.0 / 15f64.sqrt(),
    })
}

/// Where `alpha` falls relative to the thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `alpha = 1`: the critical case, global regularity for small data.
    CriticalSmallData,
    /// `1 < alpha < alpha0`: small data required, bootstrap converges short
    /// of the target.
    SmallData,
    /// `alpha0 <= alpha < 6/5`: unconditional global regularity.
    GlobalRegularity,
    /// Outside `[1, 6/5)`: the theory makes no claim.
    OutOfRange,
}

pub fn regime(alpha: f64) -> Regime {
    let t = thresholds();
    if alpha == 1.0 {
        Regime::CriticalSmallData
    } else if alpha > 1.0 && alpha < t.alpha0 {
        Regime::SmallData
    } else if alpha >= t.alpha0 && alpha <= 1.2 {
        Regime::GlobalRegularity
    } else {
        Regime::OutOfRange
    }
}

/// Thresholds lying within `tol` of `alpha`, for flagging near-boundary
/// inputs whose regime label is sensitive to the last printed digit.
pub fn near_thresholds(alpha: f64, tol: f64) -> Vec<(&'static str, f64)> {
    let t = thresholds();
    let mut out = Vec::new();
    for (name, value) in [
        ("alpha_split", t.alpha_split),
        ("alpha2", t.alpha2),
        ("alpha0", t.alpha0),
        ("alpha1", t.alpha1),
    ] {
        if (alpha - value).abs() < tol {
            out.push((name, value));
        }
    }
    out
}

/// Largest admissible velocity exponent given vorticity exponent `rho`:
/// `f(rho) = (2a^2 - a + 2 rho (a - 2)) / (2 (1 - 2 rho))`.
///
/// The pole at `rho = 1/2` is rejected rather than evaluated.
pub fn f_of_rho(alpha: f64, rho: f64) -> Result<f64> {
    if rho >= 0.5 {
        return Err(CoreError::InvalidParameter {
            name: "rho",
            message: format!("f is defined for rho < 1/2, got {rho}"),
        });
    }
    Ok((2.0 * alpha * alpha - alpha + 2.0 * rho * (alpha - 2.0)) / (2.0 * (1.0 - 2.0 * rho)))
}

/// First branch of `g`, valid for `delta` in `[(2-a)/2, 2-a]`; returns
/// infinity past its own pole so the min in [`g_of_delta`] ignores it there.
fn g_branch1(alpha: f64, delta: f64) -> f64 {
    let denom = alpha - 2.0 * delta + 4.0;
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        alpha * (2.0 * alpha + 2.0 * delta - 1.0) / (2.0 * denom)
    }
}

fn g_branch2(alpha: f64, delta: f64) -> f64 {
    0.5 * (delta + alpha - 1.0)
}

/// Vorticity exponent reachable from velocity exponent `delta`:
/// `g(delta) = min{ a(2a + 2 delta - 1) / (2(a - 2 delta + 4)), (delta + a - 1)/2 }`.
///
/// The min realizes the first branch exactly on `delta in [(2-a)/2, 2-a]`
/// and the second branch outside; ties at the breakpoints go either way
/// since the branches agree there.
pub fn g_of_delta(alpha: f64, delta: f64) -> f64 {
    g_branch1(alpha, delta).min(g_branch2(alpha, delta))
}

/// Inverse of `g`: first-branch inverse
/// `(a+4)/2 - 3a(a+1) / (2(a + 2 rho))` for `rho in [a/4, 1/2]`, second-branch
/// inverse `2 rho - a + 1` outside.
pub fn g_inverse(alpha: f64, rho: f64) -> f64 {
    if rho >= alpha / 4.0 && rho <= 0.5 {
        0.5 * (alpha + 4.0) - 3.0 * alpha * (alpha + 1.0) / (2.0 * (alpha + 2.0 * rho))
    } else {
        2.0 * rho - alpha + 1.0
    }
}

/// Lower constraint on `delta` from the pressure-free energy estimate:
/// `h(rho) = a(2-a) / (2(2 rho + a)) + (-3a^2 + 2a + 2) / (2a)`.
pub fn h_of_rho(alpha: f64, rho: f64) -> Result<f64> {
    if 2.0 * rho + alpha <= 0.0 {
        return Err(CoreError::InvalidParameter {
            name: "rho",
            message: format!("h requires 2*rho + alpha > 0, got rho = {rho}"),
        });
    }
    Ok(alpha * (2.0 - alpha) / (2.0 * (2.0 * rho + alpha))
        + (-3.0 * alpha * alpha + 2.0 * alpha + 2.0) / (2.0 * alpha))
}

/// Interpolation exponents and the coupling powers of the eight right-hand
/// side terms in the coupled energy inequality.
#[derive(Debug, Clone, Copy)]
pub struct ThetaMu {
    pub theta11: f64,
    pub theta12: f64,
    pub theta21: f64,
    pub theta22: f64,
    pub theta32: f64,
    pub theta33: f64,
    /// `mu[i]` is the power on the leading factor of term `i+1`; terms 1, 2,
    /// 4, 5, 7 are linear in it.
    pub mu: [f64; 8],
    /// `alpha/2 <= delta < alpha + rho`.
    pub delta_in_window: bool,
    /// `alpha/4 <= rho < alpha`.
    pub rho_in_window: bool,
}

/// Evaluates every `theta_ij` and `mu_i` at `(alpha, delta, rho)`.
///
/// Out-of-window inputs produce flags, not failures; only nonpositive
/// denominators are rejected.
pub fn theta_mu(alpha: f64, delta: f64, rho: f64) -> Result<ThetaMu> {
    let denom = 2.0 * rho + alpha;
    if denom <= 0.0 || alpha <= 0.0 {
        return Err(CoreError::InvalidParameter {
            name: "rho",
            message: format!(
                "theta exponents need alpha > 0 and 2*rho + alpha > 0, got alpha = {alpha}, rho = {rho}"
            ),
        });
    }
    let theta12 = (2.0 * delta - alpha) / denom;
    let theta11 = (2.0 - 2.0 * delta + theta12) / alpha;
    let theta22 = (4.0 * rho - alpha) / denom;
    let theta21 = (2.0 - 2.0 * delta + theta22) / alpha;
    let theta32 = (2.0 - alpha) / denom;
    let theta33 = (-2.0 * delta * alpha - alpha * alpha + 2.0 * alpha + 2.0) / (2.0 * alpha * alpha);
    let mu3 = 1.0 - theta12;
    let mu6 = 1.0 - theta22;
    let mu8 = 0.5 * (1.0 - theta32);
    Ok(ThetaMu {
        theta11,
        theta12,
        theta21,
        theta22,
        theta32,
        theta33,
        mu: [1.0, 1.0, mu3, 1.0, 1.0, mu6, 1.0, mu8],
        delta_in_window: delta >= 0.5 * alpha && delta < alpha + rho,
        rho_in_window: rho >= 0.25 * alpha && rho < alpha,
    })
}

/// Every closed-form exponent at one `alpha`. Entries are `None` exactly
/// where their formula is undefined: `delta2`/`rho2` when `rho1` hits the
/// pole of `f`, `rho_m` when `16 - 15 alpha^2 < 0`.
#[derive(Debug, Clone, Copy)]
pub struct ExponentReport {
    pub alpha: f64,
    pub delta1: f64,
    pub delta2: Option<f64>,
    pub delta_star: f64,
    pub delta_dstar: f64,
    pub delta_m: f64,
    pub rho_star: f64,
    pub rho1: f64,
    pub rho2: Option<f64>,
    pub rho_m: Option<f64>,
    pub thresholds: Thresholds,
    /// Whether `alpha` lies in the window `[1, 6/5]` the formulas are derived
    /// for. Values outside are still evaluated where defined.
    pub in_window: bool,
}

pub fn delta1(alpha: f64) -> f64 {
    alpha * (2.0 * alpha - 1.0) / 2.0
}

pub fn rho1(alpha: f64) -> f64 {
    let first = alpha * (2.0 * alpha - 1.0) / (4.0 * (2.0 - alpha));
    let second = (2.0 * alpha * alpha + alpha - 2.0) / 4.0;
    first.min(second)
}

pub fn delta_star(alpha: f64) -> f64 {
    (0.5 * alpha).max((-2.0 * alpha * alpha + 2.0 * alpha + 1.0) / alpha)
}

pub fn delta_dstar(alpha: f64) -> f64 {
    2.0 * (-alpha * alpha - alpha + 3.0) / (3.0 - alpha)
}

pub fn delta_m(alpha: f64) -> f64 {
    (0.5 * alpha).max(delta_dstar(alpha))
}

pub fn rho_star(alpha: f64) -> f64 {
    0.5 * (3.0 - 2.0 * alpha)
}

/// Interior fixed point of the bootstrap recursion, defined while
/// `16 - 15 alpha^2 >= 0`, i.e. `alpha <= 4/sqrt(15)`.
pub fn rho_m(alpha: f64) -> Option<f64> {
    let disc = 16.0 - 15.0 * alpha * alpha;
    if disc < 0.0 {
        None
    } else {
        Some((4.0 - alpha - disc.sqrt()) / 8.0)
    }
}

pub fn exponent_table(alpha: f64) -> ExponentReport {
    let r1 = rho1(alpha);
    let d2 = f_of_rho(alpha, r1).ok();
    let r2 = d2.map(|d| g_of_delta(alpha, d));
    ExponentReport {
        alpha,
        delta1: delta1(alpha),
        delta2: d2,
        delta_star: delta_star(alpha),
        delta_dstar: delta_dstar(alpha),
        delta_m: delta_m(alpha),
        rho_star: rho_star(alpha),
        rho1: r1,
        rho2: r2,
        rho_m: rho_m(alpha),
        thresholds: *thresholds(),
        in_window: (1.0..=1.2).contains(&alpha),
    }
}

/// Outcome of the bootstrap iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// Some iterate cleared `rho_star`; `steps` counts applications of the
    /// recursion.
    ReachesRhoStar { steps: usize },
    /// The iteration stalled at the interior fixed point `rho_M`.
    ConvergesToRhoM { limit: f64 },
}

/// The bootstrap iterates with companion `delta` improvements.
#[derive(Debug, Clone)]
pub struct BootstrapTrace {
    pub alpha: f64,
    /// `rho_0 = 0, rho_1, ...` up to and including the terminal iterate.
    pub rho_sequence: Vec<f64>,
    /// `delta_{k+1} = f(rho_k)`; one entry per recursion step taken.
    pub delta_sequence: Vec<f64>,
    pub verdict: Verdict,
}

const BOOTSTRAP_TOL: f64 = 1e-14;
const BOOTSTRAP_CAP: usize = 100_000;

/// Runs `rho_{k+1} = a(2a - 1 - 2 rho_k) / (4(2 - a - 2 rho_k))` from
/// `rho_0 = 0` until an iterate clears `rho_star` or the sequence converges.
///
/// Below the target the map's denominator stays positive (`2 - a - 2 rho >
/// a - 1 > 0` for `rho < rho_star`), so the defensive pole check can only
/// fire for inputs outside the stated window; it is treated as escape.
pub fn bootstrap(alpha: f64) -> Result<BootstrapTrace> {
    if !(alpha > 1.0 && alpha < 1.2) {
        return Err(CoreError::InvalidParameter {
            name: "alpha",
            message: format!("bootstrap is defined for alpha in (1, 6/5), got {alpha}"),
        });
    }
    let target = rho_star(alpha);
    let mut rho_sequence = vec![0.0];
    let mut delta_sequence = Vec::new();
    let mut rho: f64 = 0.0;
    let verdict = loop {
        if rho >= target {
            break Verdict::ReachesRhoStar {
                steps: rho_sequence.len() - 1,
            };
        }
        if rho_sequence.len() > BOOTSTRAP_CAP {
            break Verdict::ConvergesToRhoM { limit: rho };
        }
        let denom = 2.0 - alpha - 2.0 * rho;
        if denom <= 0.0 {
            // Divergence to the pole: the map would jump past any target.
            break Verdict::ReachesRhoStar {
                steps: rho_sequence.len() - 1,
            };
        }
        delta_sequence.push(f_of_rho(alpha, rho)?);
        let next = alpha * (2.0 * alpha - 1.0 - 2.0 * rho) / (4.0 * denom);
        rho_sequence.push(next);
        if (next - rho).abs() < BOOTSTRAP_TOL && next < target {
            rho = next;
            break Verdict::ConvergesToRhoM { limit: rho };
        }
        rho = next;
    };
    Ok(BootstrapTrace {
        alpha,
        rho_sequence,
        delta_sequence,
        verdict,
    })
}

/// Which upper bound closes the admissible strip above `h(rho)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperBoundVariant {
    /// `delta <= h(rho) + alpha/2`, the form the term-by-term derivation
    /// produces. Default.
    HalfAlpha,
    /// `delta <= h(rho) + rho/2`, the form in the collected condition list.
    HalfRho,
}

/// Additive slack on the non-strict inequalities so boundary points (the
/// optimal point sits exactly on one constraint) are not lost to roundoff.
const REGION_SLACK: f64 = 1e-9;

/// Membership test for the admissible region at fixed `alpha`.
///
/// The `delta <= f(rho)` condition is applied in the pole-free polynomial
/// form `2 delta (1 - 2 rho) <= 2 a^2 - a + 2 rho(a - 2)`, which extends
/// continuously across `rho = 1/2`.
pub fn is_admissible(alpha: f64, rho: f64, delta: f64, variant: UpperBoundVariant) -> bool {
    let f_poly = 2.0 * delta * (1.0 - 2.0 * rho)
        <= 2.0 * alpha * alpha - alpha + 2.0 * rho * (alpha - 2.0) + REGION_SLACK;
    let g_low = delta >= g_inverse(alpha, rho) - REGION_SLACK;
    let h = match h_of_rho(alpha, rho) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let band = match variant {
        UpperBoundVariant::HalfAlpha => 0.5 * alpha,
        UpperBoundVariant::HalfRho => 0.5 * rho,
    };
    let h_window = delta >= h - REGION_SLACK && delta <= h + band + REGION_SLACK;
    let delta_mild = delta >= 0.5 * alpha - REGION_SLACK && delta < alpha + rho;
    let rho_mild = rho >= 0.25 * alpha - REGION_SLACK && rho < alpha;
    f_poly && g_low && h_window && delta_mild && rho_mild
}

/// One raster cell of the sampled region.
#[derive(Debug, Clone, Copy)]
pub struct RegionSample {
    pub rho: f64,
    pub delta: f64,
    pub admissible: bool,
}

/// The sampled admissible region together with the marked optimal point
/// `(rho_star, delta_dstar)`.
#[derive(Debug, Clone)]
pub struct RegionGrid {
    pub alpha: f64,
    pub variant: UpperBoundVariant,
    pub samples: Vec<RegionSample>,
    pub admissible_count: usize,
    pub optimal_rho: f64,
    pub optimal_delta: f64,
    pub optimal_admissible: bool,
}

/// Rasterizes membership over `rho in [a/4, a) x delta in [a/2, a + 1)`
/// with `resolution^2` cells, rho-major.
///
/// Only `alpha in [1, alpha0)` is accepted: at `alpha0` and beyond the
/// small-data construction is superseded by unconditional regularity.
pub fn admissible_region(
    alpha: f64,
    resolution: usize,
    variant: UpperBoundVariant,
) -> Result<RegionGrid> {
    let t = thresholds();
    if !(alpha >= 1.0 && alpha < t.alpha0) {
        return Err(CoreError::InvalidParameter {
            name: "alpha",
            message: format!(
                "admissible region is defined for alpha in [1, {:.10}), got {alpha}",
                t.alpha0
            ),
        });
    }
    if resolution < 2 {
        return Err(CoreError::InvalidParameter {
            name: "resolution",
            message: format!("resolution must be at least 2, got {resolution}"),
        });
    }
    let rho_lo = 0.25 * alpha;
    let rho_step = (alpha - rho_lo) / resolution as f64;
    let delta_lo = 0.5 * alpha;
    let delta_step = (alpha + 1.0 - delta_lo) / resolution as f64;
    let mut samples = Vec::with_capacity(resolution * resolution);
    let mut admissible_count = 0;
    for ir in 0..resolution {
        let rho = rho_lo + ir as f64 * rho_step;
        for id in 0..resolution {
            let delta = delta_lo + id as f64 * delta_step;
            let admissible = is_admissible(alpha, rho, delta, variant);
            admissible_count += admissible as usize;
            samples.push(RegionSample {
                rho,
                delta,
                admissible,
            });
        }
    }
    let optimal_rho = rho_star(alpha);
    let optimal_delta = delta_dstar(alpha);
    Ok(RegionGrid {
        alpha,
        variant,
        samples,
        admissible_count,
        optimal_rho,
        optimal_delta,
        optimal_admissible: is_admissible(alpha, optimal_rho, optimal_delta, variant),
    })
}

/// Smallness constant `c = min_i (nu / (16 C_i))^{1/mu_i} X0^{-(1-mu_i)/(2 mu_i)}`.
pub fn smallness_constant(nu: f64, x0: f64, c: &[f64; 8], mu: &[f64; 8]) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(CoreError::InvalidParameter {
            name: "nu",
            message: format!("need nu > 0, got {nu}"),
        });
    }
    if !(x0 > 0.0) {
        return Err(CoreError::InvalidParameter {
            name: "X0",
            message: format!("need X0 > 0, got {x0}"),
        });
    }
    let mut best = f64::INFINITY;
    for i in 0..8 {
        if !(c[i] > 0.0) {
            return Err(CoreError::InvalidParameter {
                name: "C",
                message: format!("need C_{} > 0, got {}", i + 1, c[i]),
            });
        }
        if !(mu[i] > 0.0 && mu[i] <= 1.0) {
            return Err(CoreError::InvalidParameter {
                name: "mu",
                message: format!("need mu_{} in (0, 1], got {}", i + 1, mu[i]),
            });
        }
        let term = (nu / (16.0 * c[i])).powf(1.0 / mu[i])
            * x0.powf(-(1.0 - mu[i]) / (2.0 * mu[i]));
        best = best.min(term);
    }
    Ok(best)
}
