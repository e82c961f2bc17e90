//! `dmftq`: desk-scale experiment runner.
//!
//! Exit codes: 0 success, 2 configuration error, 3 DMFT did not converge,
//! 4 recompilation failed, 1 anything else.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dmftq::greens::Backend;
use dmftq::noise::Preset;
use serde::Serialize;

use crate::config::ConfigError;

#[derive(Parser, Debug)]
#[command(name = "dmftq", version, about = "Two-site DMFT on emulated noisy quantum hardware")]
struct Cli {
    /// Worker threads for the parallel sections (default: all cores).
    #[arg(long, global = true, env = "DMFTQ_JOBS")]
    jobs: Option<usize>,

    /// JSON object with parameter overrides; explicit flags win.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CNOT process infidelity over a log-spaced (T_relax, λ) grid.
    FidelityMap(FidelityMapArgs),
    /// One self-consistent DMFT run.
    DmftRun(RunArgs),
    /// Independent DMFT runs over a list of U values.
    DmftSweep(SweepArgs),
    /// Measure iG(τ) once and fit it.
    Greens(GreensArgs),
    /// Recompile a circuit with incremental structural learning.
    IslRecompile(IslArgs),
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct FidelityMapArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_relax_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_relax_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_relax_points: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda_points: Option<usize>,
    /// Leave the preset (T_relax, λ) points out of the grid.
    #[arg(long)]
    #[serde(skip)]
    no_presets: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dephasing_ratio: Option<f64>,
    /// Start from the figure preset (3).
    #[arg(long)]
    #[serde(skip)]
    figure: Option<u8>,
    /// CSV destination (default: stdout).
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// DMFT loop flags shared by `dmft-run` and `dmft-sweep`.
#[derive(Args, Debug, Serialize)]
struct DmftFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_star: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    v_init: Option<f64>,
    /// Trotter step size.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    /// Number of Trotter steps (τ points after τ = 0).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    /// statevector | density
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    backend: Option<Backend>,
    /// A | B | C | D | E (density backend only).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_preset: Option<Preset>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// Self-consistency tolerance on |V_new − V|.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    sc_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_iters: Option<usize>,
    /// Iterations averaged after the first hit on noisy backends.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    avg_window: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    damping: Option<f64>,
    /// Recompile the Green's circuits with ISL.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    isl: bool,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    isl_threshold: Option<f64>,
    /// Exact time evolution instead of circuits.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    exact: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct RunArgs {
    #[arg(long)]
    u: Option<f64>,
    #[command(flatten)]
    dmft: DmftFlags,
    /// JSON result destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace CSV destination (default: next to --out as <stem>.trace.csv).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[arg(long)]
    u_min: Option<f64>,
    #[arg(long)]
    u_max: Option<f64>,
    #[arg(long)]
    u_step: Option<f64>,
    /// Comma-separated U values; overrides the range.
    #[arg(long, value_delimiter = ',')]
    us: Option<Vec<f64>>,
    #[command(flatten)]
    dmft: DmftFlags,
    /// Start from a figure preset (4, 6 or 7).
    #[arg(long)]
    figure: Option<u8>,
    /// Earlier sweep CSV on the same U grid; adds Z/Z₀ columns.
    #[arg(long)]
    relative_to: Option<PathBuf>,
    /// CSV destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary destination.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct GreensArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    /// Hybridization.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    t_star: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    backend: Option<Backend>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_preset: Option<Preset>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    shots: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    /// `tau,iG,stderr` CSV destination (default: stdout).
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    /// Fit JSON destination (default: next to --out as <stem>.fit.json, else stderr).
    #[arg(long)]
    #[serde(skip)]
    fit: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct IslArgs {
    /// Input circuit, one op per line.
    #[arg(long = "in", value_name = "FILE")]
    #[serde(skip)]
    input: PathBuf,
    /// Recompiled circuit destination.
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
    /// Cost threshold 1 − |⟨ψ_A|ψ_B⟩|².
    #[arg(long)]
    #[serde(rename = "cost_threshold", skip_serializing_if = "Option::is_none")]
    threshold: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    max_layers: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    restarts: Option<usize>,
    /// JSON stats destination (default: stdout).
    #[arg(long)]
    #[serde(skip)]
    stats: Option<PathBuf>,
}

/// The DMFT loop stopped without meeting the tolerance (exit code 3).
#[derive(Debug)]
pub struct NotConverged(pub String);

impl std::fmt::Display for NotConverged {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NotConverged {}

fn exit_code(e: &anyhow::Error) -> u8 {
    use dmftq::Error as E;
    for cause in e.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if cause.is::<NotConverged>() {
            return 3;
        }
        if let Some(err) = cause.downcast_ref::<E>() {
            return match err {
                E::Recompile { .. } | E::Chain { .. } => 4,
                E::Fit(_) | E::Pole(_) | E::NotNormalized(_) => 1,
                _ => 2,
            };
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return config::config_err("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let file = config::load_file(cli.config.as_deref())?;
    match cli.command {
        Command::FidelityMap(a) => commands::fidelity_map(a, file),
        Command::DmftRun(a) => commands::dmft_run(a, file),
        Command::DmftSweep(a) => commands::dmft_sweep(a, file),
        Command::Greens(a) => commands::greens(a, file),
        Command::IslRecompile(a) => commands::isl_recompile(a, file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
