//! Artifact emission: CSV series, snapshot files, resolved configuration,
//! JSON metadata, and SVG plots for runs and sweeps.
//!
//! Every writer is a pure function of the collected data, and floats are
//! rendered with the shortest decimal form that round-trips, so reruns of the
//! same scenario produce byte-identical files (wall-clock duration, which
//! lives only in the metadata, is the one exception).

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::BoundReport;
use crate::diagnostics::DiagnosticsSample;
use crate::error::{Error, Result};
use crate::integrator::RunStatus;
use crate::spectral::RealField;

use super::config::ResolvedScenario;
use super::plot::{line_plot, spacetime_plot, Overlay, Series, PALETTE};
use super::scenario::{ScenarioAnalysis, ScenarioArtifacts};
use super::sweep::{SweepOutcome, SweepPoint};

pub const DIAGNOSTICS_HEADER: &str = "t,H0,H1,H2,Linf,mass,momentum,peak_x,peak_val";

/// Shortest decimal form that parses back to the same bits.
fn cell(v: f64) -> String {
    format!("{v}")
}

pub fn diagnostics_csv(samples: &[DiagnosticsSample]) -> String {
    let mut out = String::with_capacity(64 * (samples.len() + 1));
    out.push_str(DIAGNOSTICS_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            cell(s.t),
            cell(s.h0),
            cell(s.h1),
            cell(s.h2),
            cell(s.linf),
            cell(s.mass),
            cell(s.momentum),
            cell(s.peak_x),
            cell(s.peak_value),
        ));
    }
    out
}

pub fn snapshot_csv(field: &RealField) -> String {
    let mut out = String::with_capacity(32 * (field.values().len() + 1));
    out.push_str("x,U\n");
    for (&x, &u) in field.grid().points().iter().zip(field.values()) {
        out.push_str(&format!("{},{}\n", cell(x), cell(u)));
    }
    out
}

/// `snap_t<time>.csv` with the time printed to microsecond granularity and
/// trailing zeros trimmed.
pub fn snapshot_filename(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("snap_t{s}.csv")
}

/// Two-hump separation series; merged states leave the cell empty.
pub fn separations_csv(series: &[(f64, Option<f64>)]) -> String {
    let mut out = String::from("t,separation\n");
    for (t, sep) in series {
        match sep {
            Some(s) => out.push_str(&format!("{},{}\n", cell(*t), cell(*s))),
            None => out.push_str(&format!("{},\n", cell(*t))),
        }
    }
    out
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("nu,objective\n");
    for p in points {
        out.push_str(&format!("{},{}\n", cell(p.nu), cell(p.objective)));
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct ScenarioMetadata<'a> {
    name: &'a str,
    version: &'a str,
    status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_status: Option<RunStatus>,
    config_sha256: &'a str,
    dt: f64,
    t_end: f64,
    diagnostic_samples: usize,
    snapshot_times: Vec<f64>,
    initial_h2_measured: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_h2_closed_form: Option<f64>,
    bounds: &'a BoundReport,
    analysis: &'a ScenarioAnalysis,
    wall_seconds: f64,
    /// The exact configuration that reproduces this run byte for byte.
    resolved_config_toml: &'a str,
}

pub fn scenario_metadata_json(art: &ScenarioArtifacts) -> Result<String> {
    let resolved = &art.resolved;
    let meta = ScenarioMetadata {
        name: &resolved.config.name,
        version: env!("CARGO_PKG_VERSION"),
        status: art.status,
        reference_status: art.reference_status,
        config_sha256: &resolved.sha256,
        dt: resolved.dt,
        t_end: resolved.config.time.t_end,
        diagnostic_samples: art.primary.len(),
        snapshot_times: art.snapshots.iter().map(|(t, _)| *t).collect(),
        initial_h2_measured: art.primary[0].h2,
        initial_h2_closed_form: resolved.config.initial.closed_form_h2(),
        bounds: &art.bounds,
        analysis: &art.analysis,
        wall_seconds: art.wall_seconds,
        resolved_config_toml: &resolved.canonical_toml,
    };
    serde_json::to_string_pretty(&meta).map_err(|e| Error::Serialize(e.to_string()))
}

fn norm_series<'a>(
    samples: &'a [DiagnosticsSample],
    storage: &'a mut Vec<Vec<(f64, f64)>>,
) -> Vec<Series<'a>> {
    storage.clear();
    storage.push(samples.iter().map(|s| (s.t, s.h0)).collect());
    storage.push(samples.iter().map(|s| (s.t, s.h1)).collect());
    storage.push(samples.iter().map(|s| (s.t, s.h2)).collect());
    storage.push(samples.iter().map(|s| (s.t, s.linf)).collect());
    ["H0", "H1", "H2", "Linf"]
        .iter()
        .zip(storage.iter())
        .enumerate()
        .map(|(i, (&label, points))| Series {
            label,
            color: PALETTE[i],
            points,
            markers: false,
        })
        .collect()
}

fn norms_svg(title: &str, samples: &[DiagnosticsSample]) -> String {
    let mut storage = Vec::new();
    let series = norm_series(samples, &mut storage);
    line_plot(title, "t", "norm", &series)
}

fn spacetime_svg(art: &ScenarioArtifacts) -> Result<String> {
    let track: Vec<(f64, f64)> = art.peak_track.iter().map(|&(t, x, _)| (x, t)).collect();
    let ref_track: Vec<(f64, f64)> = art
        .reference_peak_track
        .iter()
        .map(|&(t, x, _)| (x, t))
        .collect();
    let mut overlays = vec![Overlay {
        label: "solution peak",
        color: PALETTE[0],
        points: &track,
        dashed: false,
    }];
    if !ref_track.is_empty() {
        overlays.push(Overlay {
            label: "reference peak",
            color: "#000000",
            points: &ref_track,
            dashed: true,
        });
    }
    spacetime_plot(
        &format!("{}: space-time evolution", art.resolved.config.name),
        &art.raster,
        &overlays,
    )
}

/// Write the full artifact bundle of a finished scenario; returns the paths
/// written, in a fixed order.
pub fn write_scenario_artifacts(dir: &Path, art: &ScenarioArtifacts) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let emit = |name: String, contents: String, written: &mut Vec<PathBuf>| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };

    emit(
        "resolved_config.toml".into(),
        art.resolved.canonical_toml.clone(),
        &mut written,
    )?;
    emit(
        "metadata.json".into(),
        scenario_metadata_json(art)?,
        &mut written,
    )?;
    emit(
        "diagnostics.csv".into(),
        diagnostics_csv(&art.primary),
        &mut written,
    )?;
    if !art.distance.is_empty() {
        emit(
            "distance.csv".into(),
            diagnostics_csv(&art.distance),
            &mut written,
        )?;
    }
    if let Some(seps) = &art.separations {
        emit(
            "separations.csv".into(),
            separations_csv(seps),
            &mut written,
        )?;
    }
    if let Some(seps) = &art.reference_separations {
        emit(
            "reference_separations.csv".into(),
            separations_csv(seps),
            &mut written,
        )?;
    }
    for (t, field) in &art.snapshots {
        emit(snapshot_filename(*t), snapshot_csv(field), &mut written)?;
    }
    let name = &art.resolved.config.name;
    emit(
        "norms.svg".into(),
        norms_svg(&format!("{name}: solution norms"), &art.primary),
        &mut written,
    )?;
    if !art.distance.is_empty() {
        emit(
            "distance.svg".into(),
            norms_svg(&format!("{name}: distance to reference"), &art.distance),
            &mut written,
        )?;
    }
    emit("spacetime.svg".into(), spacetime_svg(art)?, &mut written)?;
    Ok(written)
}

#[derive(Serialize)]
struct SweepMetadata<'a> {
    name: &'a str,
    version: &'a str,
    config_sha256: &'a str,
    sweep: &'a SweepOutcome,
    resolved_config_toml: &'a str,
}

pub fn sweep_metadata_json(resolved: &ResolvedScenario, outcome: &SweepOutcome) -> Result<String> {
    let meta = SweepMetadata {
        name: &resolved.config.name,
        version: env!("CARGO_PKG_VERSION"),
        config_sha256: &resolved.sha256,
        sweep: outcome,
        resolved_config_toml: &resolved.canonical_toml,
    };
    serde_json::to_string_pretty(&meta).map_err(|e| Error::Serialize(e.to_string()))
}

/// Write the artifact bundle of a sweep; returns the paths written.
pub fn write_sweep_artifacts(
    dir: &Path,
    resolved: &ResolvedScenario,
    outcome: &SweepOutcome,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let emit = |name: &str, contents: String, written: &mut Vec<PathBuf>| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, &contents)?;
        written.push(path);
        Ok(())
    };

    emit(
        "resolved_config.toml",
        resolved.canonical_toml.clone(),
        &mut written,
    )?;
    emit(
        "metadata.json",
        sweep_metadata_json(resolved, outcome)?,
        &mut written,
    )?;
    emit("sweep.csv", sweep_csv(&outcome.points), &mut written)?;
    emit(
        "star_distance.csv",
        diagnostics_csv(&outcome.star_distance),
        &mut written,
    )?;

    let name = &resolved.config.name;
    let curve: Vec<(f64, f64)> = outcome.points.iter().map(|p| (p.nu, p.objective)).collect();
    let star = [(outcome.nu_star, outcome.objective_star)];
    emit(
        "sweep.svg",
        line_plot(
            &format!("{name}: objective over the scaling parameter"),
            "nu",
            "mean L2 distance",
            &[
                Series {
                    label: "objective",
                    color: PALETTE[0],
                    points: &curve,
                    markers: true,
                },
                Series {
                    label: "optimum",
                    color: PALETTE[1],
                    points: &star,
                    markers: true,
                },
            ],
        ),
        &mut written,
    )?;
    emit(
        "star_distance.svg",
        norms_svg(
            &format!("{name}: distance to the optimal rescaled soliton"),
            &outcome.star_distance,
        ),
        &mut written,
    )?;
    Ok(written)
}
