//! `hydrofrac`: simulate the fractionally dissipated hydrostatic channel
//! flow and evaluate its regularity exponent calculus.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use hydrofrac_cli::commands;
use hydrofrac_cli::config::ConfigBuilder;
use hydrofrac_cli::error::{CliError, Result};

#[derive(Parser)]
#[command(name = "hydrofrac", version, about = "Hydrostatic channel flow with fractional dissipation: solver, monitors, and exponent calculus")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation from a config file and/or flags
    Simulate(SimulateArgs),
    /// Print the exponent table and thresholds at one alpha
    Exponents(ExponentsArgs),
    /// Emit bootstrap iteration traces (dichotomy data)
    Iterate(IterateArgs),
    /// Rasterize the admissible (rho, delta) region at one alpha
    Region(RegionArgs),
    /// Run several configs with bounded parallelism and a summary CSV
    Sweep(SweepArgs),
    /// Re-run a manifest and byte-compare its outputs
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Config file (key = value); flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    n_x: Option<usize>,
    #[arg(long)]
    n_z: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Fixed step size (implies dt_policy = fixed)
    #[arg(long)]
    dt: Option<f64>,
    /// `fixed` or `cfl`
    #[arg(long)]
    dt_policy: Option<String>,
    #[arg(long)]
    cfl_safety: Option<f64>,
    #[arg(long)]
    dt_max: Option<f64>,
    /// Preset descriptor, e.g. `random_band(8, 2, 0.01, 42)`
    #[arg(long)]
    initial_data: Option<String>,
    #[arg(long)]
    nonlinear_enabled: Option<bool>,
    /// Comma-separated monitor names
    #[arg(long)]
    monitors: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    /// Comma-separated times in [0, t_end]
    #[arg(long)]
    checkpoint_times: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    max_principle_tol: Option<f64>,
}

#[derive(Args)]
struct ExponentsArgs {
    #[arg(long)]
    alpha: f64,
    /// Also write a one-row CSV here
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct IterateArgs {
    /// Single alpha
    #[arg(long, conflicts_with = "alphas")]
    alpha: Option<f64>,
    /// Range `start:end:step`, inclusive
    #[arg(long)]
    alphas: Option<String>,
    /// Write trace rows here as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    /// Upper-bound variant: `half-alpha` or `half-rho`
    #[arg(long, default_value = "half-alpha")]
    variant: String,
    /// Output CSV path
    #[arg(long, default_value = "region.csv")]
    output: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Config files, one job each
    #[arg(required = true)]
    configs: Vec<PathBuf>,
    #[arg(long, default_value = "sweep_out")]
    output_dir: PathBuf,
    /// Parallel jobs (also capped by HYDROFRAC_THREADS)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Path to a manifest.txt produced by `simulate`
    manifest: PathBuf,
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let mut b = match &args.config {
        Some(path) => ConfigBuilder::from_file(path)?,
        None => ConfigBuilder::new(),
    };
    macro_rules! override_flag {
        ($field:ident) => {
            if let Some(v) = &args.$field {
                b.set(stringify!($field), v.to_string());
            }
        };
    }
    override_flag!(alpha);
    override_flag!(nu);
    override_flag!(n_x);
    override_flag!(n_z);
    override_flag!(t_end);
    override_flag!(dt);
    override_flag!(dt_policy);
    override_flag!(cfl_safety);
    override_flag!(dt_max);
    override_flag!(initial_data);
    override_flag!(nonlinear_enabled);
    override_flag!(monitors);
    override_flag!(delta);
    override_flag!(rho);
    override_flag!(record_every);
    override_flag!(checkpoint_times);
    override_flag!(seed);
    override_flag!(max_principle_tol);
    if let Some(dir) = &args.output_dir {
        b.set("output_dir", dir.display().to_string());
    }
    let cfg = b.build()?;
    let out_dir = cfg.output_dir.clone();
    commands::cmd_simulate(&cfg, &out_dir)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Cmd::Simulate(args) => simulate(args),
        Cmd::Exponents(args) => commands::cmd_exponents(args.alpha, args.csv.as_deref()),
        Cmd::Iterate(args) => {
            let alphas = match (args.alpha, args.alphas) {
                (Some(a), None) => vec![a],
                (None, Some(spec)) => commands::parse_alpha_range(&spec)?,
                _ => {
                    return Err(CliError::Usage(
                        "iterate needs exactly one of --alpha or --alphas".into(),
                    ));
                }
            };
            commands::cmd_iterate(&alphas, args.csv.as_deref())
        }
        Cmd::Region(args) => {
            let variant = commands::parse_variant(&args.variant)?;
            commands::cmd_region(args.alpha, args.resolution, variant, &args.output)
        }
        Cmd::Sweep(args) => commands::cmd_sweep(&args.configs, &args.output_dir, args.jobs),
        Cmd::Verify(args) => commands::cmd_verify(&args.manifest),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
