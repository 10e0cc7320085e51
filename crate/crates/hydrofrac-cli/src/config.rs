//! Flat `key = value` configuration files and their flag overrides.
//!
//! The format is line-oriented: `#` starts a comment, blank lines are
//! ignored, and every other line must read `key = value`. Keys are
//! validated exhaustively; an unknown key is an error naming it. Flags
//! override file values by being applied after the file.

use std::collections::BTreeMap;
use std::collections::btree_map::Entry;
use std::path::{Path, PathBuf};

use hydrofrac_core::dynamics::{DtPolicy, Monitor, SimConfig};
use hydrofrac_core::presets::{InitialData, ZProfile};

use crate::error::{CliError, Result};

const KNOWN_KEYS: &[&str] = &[
    "alpha",
    "nu",
    "n_x",
    "n_z",
    "t_end",
    "initial_data",
    "dt_policy",
    "dt",
    "cfl_safety",
    "dt_max",
    "nonlinear_enabled",
    "monitors",
    "delta",
    "rho",
    "record_every",
    "checkpoint_times",
    "seed",
    "output_dir",
    "max_principle_tol",
];

/// Key-value accumulator: file first, then overrides.
#[derive(Debug, Default, Clone)]
pub struct ConfigBuilder {
    map: BTreeMap<String, String>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut b = ConfigBuilder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "{}:{}: expected `key = value`, got `{line}`",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            match b.map.entry(key) {
                Entry::Occupied(e) => {
                    return Err(CliError::Usage(format!(
                        "{}:{}: duplicate key `{}`",
                        path.display(),
                        lineno + 1,
                        e.key()
                    )));
                }
                Entry::Vacant(e) => {
                    e.insert(value.trim().to_string());
                }
            }
        }
        Ok(b)
    }

    /// Sets (or overrides) one key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.map.insert(key.to_string(), value.into());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| CliError::Usage(format!("missing required key `{key}`")))
    }

    fn parse_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key).map(|v| parse_f64(key, v)).transpose()
    }

    fn parse_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    CliError::Usage(format!("key `{key}`: expected a nonnegative integer, got `{v}`"))
                })
            })
            .transpose()
    }

    /// Resolves everything: defaults filled, types checked, ranges validated.
    pub fn build(&self) -> Result<ResolvedConfig> {
        for key in self.map.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown key `{key}`")));
            }
        }

        let alpha = parse_f64("alpha", self.require("alpha")?)?;
        let nu = parse_f64("nu", self.require("nu")?)?;
        let n_x = self
            .parse_usize("n_x")?
            .ok_or_else(|| CliError::Usage("missing required key `n_x`".into()))?;
        let n_z = self
            .parse_usize("n_z")?
            .ok_or_else(|| CliError::Usage("missing required key `n_z`".into()))?;
        let t_end = parse_f64("t_end", self.require("t_end")?)?;
        let initial_data = parse_initial_data(self.require("initial_data")?)?;

        let dt = self.parse_f64("dt")?;
        let dt_policy = match self.get("dt_policy") {
            // `dt` alone implies the fixed policy.
            None => match dt {
                Some(dt) => DtPolicy::Fixed { dt },
                None => DtPolicy::Cfl {
                    safety: self.parse_f64("cfl_safety")?.unwrap_or(0.5),
                    dt_max: self.parse_f64("dt_max")?.unwrap_or(0.01),
                },
            },
            Some("fixed") => DtPolicy::Fixed {
                dt: dt.ok_or_else(|| {
                    CliError::Usage("dt_policy = fixed requires key `dt`".into())
                })?,
            },
            Some("cfl") => {
                if dt.is_some() {
                    return Err(CliError::Usage(
                        "key `dt` is only meaningful with dt_policy = fixed".into(),
                    ));
                }
                DtPolicy::Cfl {
                    safety: self.parse_f64("cfl_safety")?.unwrap_or(0.5),
                    dt_max: self.parse_f64("dt_max")?.unwrap_or(0.01),
                }
            }
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "key `dt_policy`: expected `fixed` or `cfl`, got `{other}`"
                )));
            }
        };
        if matches!(dt_policy, DtPolicy::Fixed { .. }) {
            for key in ["cfl_safety", "dt_max"] {
                if self.get(key).is_some() {
                    return Err(CliError::Usage(format!(
                        "key `{key}` is only meaningful with dt_policy = cfl"
                    )));
                }
            }
        }

        let nonlinear_enabled = match self.get("nonlinear_enabled") {
            None => true,
            Some(v) => parse_bool("nonlinear_enabled", v)?,
        };
        let monitors = match self.get("monitors") {
            None => Monitor::ALL.to_vec(),
            Some(v) => parse_monitors(v)?,
        };
        let record_every = self.parse_usize("record_every")?.unwrap_or(1);
        let checkpoint_times = match self.get("checkpoint_times") {
            None => Vec::new(),
            Some(v) => parse_f64_list("checkpoint_times", v)?,
        };
        let seed = match self.get("seed") {
            None => 0,
            Some(v) => v.parse::<u64>().map_err(|_| {
                CliError::Usage(format!("key `seed`: expected an unsigned integer, got `{v}`"))
            })?,
        };
        let output_dir = PathBuf::from(self.get("output_dir").unwrap_or("out"));
        let max_principle_tol = self.parse_f64("max_principle_tol")?.unwrap_or(1e-6);

        let sim = SimConfig {
            alpha,
            nu,
            n_x,
            n_z,
            dt_policy,
            t_end,
            initial_data,
            nonlinear_enabled,
            monitors,
            delta: self.parse_f64("delta")?,
            rho: self.parse_f64("rho")?,
            record_every,
            checkpoint_times,
            seed,
            max_principle_tol,
        };
        sim.validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(ResolvedConfig { sim, output_dir })
    }
}

/// A validated configuration plus where its outputs go.
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub sim: SimConfig,
    pub output_dir: PathBuf,
}

impl ResolvedConfig {
    /// Canonical `(key, value)` echo with every default filled in, in a
    /// fixed order. Feeding these back through [`ConfigBuilder`] reproduces
    /// the configuration exactly.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let s = &self.sim;
        let mut out = vec![
            ("alpha", s.alpha.to_string()),
            ("nu", s.nu.to_string()),
            ("n_x", s.n_x.to_string()),
            ("n_z", s.n_z.to_string()),
            ("t_end", s.t_end.to_string()),
            ("initial_data", descriptor_string(&s.initial_data)),
        ];
        match s.dt_policy {
            DtPolicy::Fixed { dt } => {
                out.push(("dt_policy", "fixed".to_string()));
                out.push(("dt", dt.to_string()));
            }
            DtPolicy::Cfl { safety, dt_max } => {
                out.push(("dt_policy", "cfl".to_string()));
                out.push(("cfl_safety", safety.to_string()));
                out.push(("dt_max", dt_max.to_string()));
            }
        }
        let (delta, rho) = s.xy_exponents();
        out.push(("nonlinear_enabled", s.nonlinear_enabled.to_string()));
        out.push((
            "monitors",
            s.monitors
                .iter()
                .map(|m| m.name())
                .collect::<Vec<_>>()
                .join(","),
        ));
        out.push(("delta", delta.to_string()));
        out.push(("rho", rho.to_string()));
        out.push(("record_every", s.record_every.to_string()));
        out.push((
            "checkpoint_times",
            s.checkpoint_times
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(","),
        ));
        out.push(("seed", s.seed.to_string()));
        out.push(("output_dir", self.output_dir.display().to_string()));
        out.push(("max_principle_tol", s.max_principle_tol.to_string()));
        out
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| CliError::Usage(format!("key `{key}`: expected a number, got `{v}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Usage(format!(
            "key `{key}`: expected `true` or `false`, got `{v}`"
        ))),
    }
}

fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|part| parse_f64(key, part.trim())).collect()
}

fn parse_monitors(v: &str) -> Result<Vec<Monitor>> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|part| {
            let part = part.trim();
            Monitor::parse(part).ok_or_else(|| {
                CliError::Usage(format!("key `monitors`: unknown monitor `{part}`"))
            })
        })
        .collect()
}

/// Parses an initial-data descriptor: `zero`, `single_mode(k, profile)`,
/// `shear(amplitude, profile)`, or
/// `random_band(k_max, z_modes, amplitude[, seed])`.
pub fn parse_initial_data(v: &str) -> Result<InitialData> {
    let v = v.trim();
    let bad = |msg: String| CliError::Usage(format!("key `initial_data`: {msg}"));
    if v == "zero" {
        return Ok(InitialData::Zero);
    }
    let Some((name, rest)) = v.split_once('(') else {
        return Err(bad(format!("unknown preset `{v}`")));
    };
    let Some(args) = rest.strip_suffix(')') else {
        return Err(bad(format!("missing closing parenthesis in `{v}`")));
    };
    let args: Vec<&str> = args.split(',').map(str::trim).collect();
    let int = |a: &str| -> Result<usize> {
        a.parse()
            .map_err(|_| bad(format!("expected an integer, got `{a}`")))
    };
    let num = |a: &str| -> Result<f64> {
        a.parse()
            .map_err(|_| bad(format!("expected a number, got `{a}`")))
    };
    let profile = |a: &str| -> Result<ZProfile> {
        ZProfile::parse(a).ok_or_else(|| bad(format!("unknown profile `{a}`")))
    };
    match (name.trim(), args.len()) {
        ("single_mode", 2) => Ok(InitialData::SingleMode {
            k: int(args[0])?,
            profile: profile(args[1])?,
        }),
        ("shear", 2) => Ok(InitialData::Shear {
            amplitude: num(args[0])?,
            profile: profile(args[1])?,
        }),
        ("random_band", 3 | 4) => Ok(InitialData::RandomBand {
            k_max: int(args[0])?,
            z_modes: int(args[1])?,
            amplitude: num(args[2])?,
            seed: args.get(3).map(|a| {
                a.parse::<u64>()
                    .map_err(|_| bad(format!("expected an unsigned integer seed, got `{a}`")))
            })
            .transpose()?,
        }),
        (name, n) => Err(bad(format!("unknown preset `{name}` with {n} arguments"))),
    }
}

/// Canonical descriptor for an initial-data preset.
pub fn descriptor_string(data: &InitialData) -> String {
    match data {
        InitialData::Zero => "zero".to_string(),
        InitialData::SingleMode { k, profile } => format!("single_mode({k}, {})", profile.name()),
        InitialData::Shear { amplitude, profile } => {
            format!("shear({amplitude}, {})", profile.name())
        }
        InitialData::RandomBand {
            k_max,
            z_modes,
            amplitude,
            seed,
        } => match seed {
            Some(seed) => format!("random_band({k_max}, {z_modes}, {amplitude}, {seed})"),
            None => format!("random_band({k_max}, {z_modes}, {amplitude})"),
        },
        InitialData::Custom(_) => "custom".to_string(),
    }
}
