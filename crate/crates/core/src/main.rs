//! Command-line front end: run scenarios, sweep the scaling parameter,
//! print predicted bounds, check datum norms, and measure convergence.
//!
//! Exit codes: 0 on success, 1 on any error, 3 when a run ends in blow-up
//! (artifacts up to the last valid state are still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use gkdv::bounds::bound_report;
use gkdv::diagnostics::field_sample;
use gkdv::error::Result;
use gkdv::experiments::{
    run_scenario, spatial_report, sweep_nu, temporal_report, write_scenario_artifacts,
    write_sweep_artifacts, ResolvedScenario, ScenarioConfig,
};
use gkdv::integrator::RunStatus;
use gkdv::spectral::Grid;

const EXIT_BLOWUP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gkdv",
    version,
    about = "Pseudo-spectral laboratory for generalized KdV soliton dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweeps (default: one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Deterministic mode. The solver has no stochastic components, so this
    /// is always on; the flag is accepted for interface stability.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write its artifact bundle.
    Run {
        /// Scenario file (TOML).
        config: PathBuf,
        /// Output directory for the artifact bundle.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sweep the scaling parameter of the rescaled-soliton comparison.
    SweepNu {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print predicted timescales and size bounds for the scenario datum.
    Bounds {
        config: PathBuf,
        /// Also write the report as JSON into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print measured norms of the initial datum next to the closed form.
    Norms {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Temporal and spatial self-convergence of the scenario's setup.
    Convergence {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Refinement levels (step halvings / grid doublings).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

fn resolve(config: &Path) -> Result<ResolvedScenario> {
    ScenarioConfig::from_path(config)?.resolve()
}

fn write_json(dir: &Option<PathBuf>, name: &str, text: &str) -> Result<()> {
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).map_err(|source| gkdv::Error::Io {
            path: dir.clone(),
            source,
        })?;
        let path = dir.join(name);
        std::fs::write(&path, text).map_err(|source| gkdv::Error::Io { path, source })?;
    }
    Ok(())
}

fn describe(status: RunStatus) -> String {
    match status {
        RunStatus::Completed => "completed".into(),
        RunStatus::BlowUp { t_last } => format!("blow-up (last valid state at t = {t_last})"),
    }
}

fn cmd_run(config: PathBuf, out: PathBuf) -> Result<u8> {
    let artifacts = run_scenario(resolve(&config)?)?;
    let written = write_scenario_artifacts(&out, &artifacts)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!("status: {}", describe(artifacts.status));
    if let Some(rs) = artifacts.reference_status {
        println!("reference status: {}", describe(rs));
    }
    Ok(match artifacts.status {
        RunStatus::Completed => 0,
        RunStatus::BlowUp { .. } => EXIT_BLOWUP,
    })
}

fn cmd_sweep(config: PathBuf, out: PathBuf) -> Result<u8> {
    let resolved = resolve(&config)?;
    let outcome = sweep_nu(&resolved)?;
    let written = write_sweep_artifacts(&out, &resolved, &outcome)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!(
        "nu_star: {} (objective {})",
        outcome.nu_star, outcome.objective_star
    );
    println!("base run: {}", describe(outcome.base_status));
    Ok(match outcome.base_status {
        RunStatus::Completed => 0,
        RunStatus::BlowUp { .. } => EXIT_BLOWUP,
    })
}

fn cmd_bounds(config: PathBuf, out: Option<PathBuf>) -> Result<u8> {
    let resolved = resolve(&config)?;
    let epsilon = field_sample(0.0, &resolved.initial).h2;
    let report = bound_report(&resolved.model, epsilon, 1.0);
    let text =
        serde_json::to_string_pretty(&report).map_err(|e| gkdv::Error::Serialize(e.to_string()))?;
    println!("{text}");
    write_json(&out, "bounds.json", &text)?;
    Ok(0)
}

fn cmd_norms(config: PathBuf, out: Option<PathBuf>) -> Result<u8> {
    let resolved = resolve(&config)?;
    let sample = field_sample(0.0, &resolved.initial);
    let closed = resolved.config.initial.closed_form_h2();
    let value = json!({
        "H0": sample.h0,
        "H1": sample.h1,
        "H2": sample.h2,
        "Linf": sample.linf,
        "mass": sample.mass,
        "momentum": sample.momentum,
        "closed_form_h2": closed,
        "h2_relative_gap": closed.map(|c| (sample.h2 - c).abs() / c),
    });
    let text =
        serde_json::to_string_pretty(&value).map_err(|e| gkdv::Error::Serialize(e.to_string()))?;
    println!("{text}");
    write_json(&out, "norms.json", &text)?;
    Ok(0)
}

fn cmd_convergence(config: PathBuf, out: Option<PathBuf>, levels: usize) -> Result<u8> {
    let resolved = resolve(&config)?;
    let cfg = &resolved.config;
    let temporal = temporal_report(
        &resolved.model,
        &resolved.initial,
        cfg.time.t_end,
        resolved.dt,
        levels,
    )?;
    let initial = cfg.initial.clone();
    let build = move |grid: &Grid| initial.build(grid);
    let spatial = spatial_report(
        &resolved.model,
        &build,
        cfg.grid.half_width,
        cfg.grid.points,
        levels,
        cfg.time.t_end,
        resolved.dt,
    )?;
    let value = json!({ "temporal": temporal, "spatial": spatial });
    let text =
        serde_json::to_string_pretty(&value).map_err(|e| gkdv::Error::Serialize(e.to_string()))?;
    println!("{text}");
    write_json(&out, "convergence.json", &text)?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        // Ignore failure: the global pool can only be set once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match cli.command {
        Command::Run { config, out } => cmd_run(config, out),
        Command::SweepNu { config, out } => cmd_sweep(config, out),
        Command::Bounds { config, out } => cmd_bounds(config, out),
        Command::Norms { config, out } => cmd_norms(config, out),
        Command::Convergence {
            config,
            out,
            levels,
        } => cmd_convergence(config, out, levels),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
