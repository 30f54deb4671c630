//! Run one resolved scenario end to end: advance the solution (and a
//! reference in lockstep when configured), record diagnostics, snapshots,
//! a decimated space-time raster, and derived analyses.

use std::time::Instant;

use serde::Serialize;

use crate::bounds::{bound_report, size_lifespan, BoundReport};
use crate::diagnostics::{
    collision_time, distance_sample, field_sample, fit_linear_growth, fit_peak_speed,
    plateau_slopes, size_estimate_monitor, two_peak_separation, DiagnosticsSample, GrowthFit,
    LinearFit, PlateauCheck, SizeReport,
};
use crate::error::{Error, Result};
use crate::initial_data::AnalyticProfile;
use crate::integrator::{step_plan, Flow, RunStatus};
use crate::spectral::{Grid, RealField};

use super::config::{InitialConfig, ResolvedReference, ResolvedScenario};
use super::plot::Raster;

/// Upper bounds on the stored space-time raster; the run decimates to stay
/// under them, so memory stays flat no matter how long the run is.
pub const RASTER_MAX_COLS: usize = 512;
pub const RASTER_MAX_ROWS: usize = 400;

/// Keep every `stride`-th entry so at most `max` of `len` survive.
fn decimation_stride(len: usize, max: usize) -> usize {
    len.div_ceil(max.max(1)).max(1)
}

/// The separation monitor only counts humps at least this fraction of the
/// shorter initial hump; merged humps then read as a single peak.
const SEPARATION_PEAK_FRACTION: f64 = 0.3;

/// Conclusions drawn from the recorded series after the run.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScenarioAnalysis {
    /// Window the growth fit used.
    pub fit_window: (f64, f64),
    /// Least-squares growth of the distance-to-reference norms on the window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_growth: Option<GrowthFit>,
    /// Head/tail slopes of the distance `H^2` series (plateau detection).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_plateau: Option<PlateauCheck>,
    /// Speed of the solution peak fit over the second half of the run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_speed_late: Option<LinearFit>,
    /// Collision instant of a two-hump state, from the reference run when
    /// one is simulated, otherwise from the solution itself.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_time: Option<f64>,
    /// The `H^2` doubling check over `min(predicted lifespan, t_end)`.
    pub size_h2: SizeReport,
}

/// Everything a finished scenario produces, ready for the output writers.
pub struct ScenarioArtifacts {
    pub resolved: ResolvedScenario,
    pub status: RunStatus,
    /// Set when a simulated reference blew up before the horizon.
    pub reference_status: Option<RunStatus>,
    /// Diagnostics of the solution at the sampling cadence.
    pub primary: Vec<DiagnosticsSample>,
    /// Diagnostics of `solution - reference` at the same times.
    pub distance: Vec<DiagnosticsSample>,
    /// Two-hump separation series of the solution (two-soliton data only);
    /// `None` entries mean the humps had merged.
    pub separations: Option<Vec<(f64, Option<f64>)>>,
    /// Same for the simulated reference, when there is one.
    pub reference_separations: Option<Vec<(f64, Option<f64>)>>,
    pub snapshots: Vec<(f64, RealField)>,
    pub raster: Raster,
    /// `(t, x, value)` of the tallest point at each sample time.
    pub peak_track: Vec<(f64, f64, f64)>,
    /// Reference peak track, when a reference exists.
    pub reference_peak_track: Vec<(f64, f64, f64)>,
    pub bounds: BoundReport,
    pub analysis: ScenarioAnalysis,
    pub wall_seconds: f64,
}

/// The reference being advanced next to the solution.
enum RefRunner {
    None,
    Analytic(AnalyticProfile),
    /// `None` after a blow-up: the comparison stops, the solution continues.
    Simulated(Option<Box<Flow>>),
}

impl RefRunner {
    fn field_at(&mut self, grid: &Grid, t: f64) -> Result<Option<RealField>> {
        match self {
            RefRunner::None | RefRunner::Simulated(None) => Ok(None),
            RefRunner::Analytic(profile) => profile.sample(grid, t).map(Some),
            RefRunner::Simulated(Some(flow)) => Ok(Some(flow.field())),
        }
    }

    /// Advance a simulated reference; a blow-up retires it and is reported,
    /// any other error propagates.
    fn advance(&mut self, remainder: Option<f64>) -> Result<Option<RunStatus>> {
        if let RefRunner::Simulated(slot) = self {
            if let Some(flow) = slot.as_mut() {
                let r = match remainder {
                    Some(h) => flow.advance_by(h),
                    None => flow.advance(),
                };
                match r {
                    Ok(()) => {}
                    Err(Error::BlowUp { t_last }) => {
                        *slot = None;
                        return Ok(Some(RunStatus::BlowUp { t_last }));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(None)
    }
}

/// Threshold below which a hump does not count as a separate peak: a fraction
/// of the shorter hump of the initial two-soliton state.
fn separation_threshold(initial: &RealField) -> f64 {
    let peaks = crate::diagnostics::local_maxima(initial, 0.0);
    match peaks.len() {
        0 => 0.0,
        1 => SEPARATION_PEAK_FRACTION * peaks[0].1,
        _ => SEPARATION_PEAK_FRACTION * peaks[1].1,
    }
}

/// Map requested snapshot times to step indices (final state when none are
/// requested).
fn snapshot_indices(times: &[f64], dt: f64, total: u64) -> Vec<u64> {
    let mut idx: Vec<u64> = if times.is_empty() {
        vec![total]
    } else {
        times
            .iter()
            .map(|&t| ((t / dt).round().max(0.0) as u64).min(total))
            .collect()
    };
    idx.sort_unstable();
    idx.dedup();
    idx
}

pub fn run_scenario(resolved: ResolvedScenario) -> Result<ScenarioArtifacts> {
    let start = Instant::now();
    let cfg = &resolved.config;
    let grid = resolved.grid.clone();
    let t_end = cfg.time.t_end;
    let dt = resolved.dt;
    let stride = cfg.diagnostics.stride.max(1) as u64;

    let (full_steps, remainder) = step_plan(t_end, dt);
    let total = full_steps + u64::from(remainder.is_some());
    let snap_at = snapshot_indices(&cfg.time.snapshots, dt, total);

    // Decimation keeping the raster bounded.
    let planned_samples = (total / stride + 2) as usize;
    let row_keep = decimation_stride(planned_samples, RASTER_MAX_ROWS);
    let col_keep = decimation_stride(grid.len(), RASTER_MAX_COLS);
    let raster_xs: Vec<f64> = grid.points().iter().step_by(col_keep).copied().collect();

    let mut flow = Flow::new(resolved.model.clone(), dt, &resolved.initial)?;
    let mut reference = match &resolved.reference {
        ResolvedReference::None => RefRunner::None,
        ResolvedReference::Analytic(p) => RefRunner::Analytic(*p),
        ResolvedReference::Simulated(model) => RefRunner::Simulated(Some(Box::new(Flow::new(
            model.clone(),
            dt,
            &resolved.initial,
        )?))),
    };

    let track_separation = matches!(cfg.initial, InitialConfig::TwoSoliton { .. });
    let sep_threshold = track_separation.then(|| separation_threshold(&resolved.initial));
    let track_ref_separation =
        track_separation && matches!(resolved.reference, ResolvedReference::Simulated(_));

    let mut primary: Vec<DiagnosticsSample> = Vec::new();
    let mut distance: Vec<DiagnosticsSample> = Vec::new();
    let mut reference_peak_track: Vec<(f64, f64, f64)> = Vec::new();
    let mut separations: Vec<(f64, Option<f64>)> = Vec::new();
    let mut reference_separations: Vec<(f64, Option<f64>)> = Vec::new();
    let mut snapshots: Vec<(f64, RealField)> = Vec::new();
    let mut raster_rows: Vec<Vec<f64>> = Vec::new();
    let mut raster_ts: Vec<f64> = Vec::new();
    let mut status = RunStatus::Completed;
    let mut reference_status: Option<RunStatus> = None;
    let mut samples_seen = 0usize;

    for i in 0..=total {
        let t = flow.t();
        let due = i % stride == 0 || i == total;
        let want_snap = snap_at.binary_search(&i).is_ok();
        if due || want_snap {
            let field = flow.field();
            if due {
                primary.push(field_sample(t, &field));
                if let Some(rf) = reference.field_at(&grid, t)? {
                    distance.push(distance_sample(t, &field, &rf)?);
                    let r = field_sample(t, &rf);
                    reference_peak_track.push((t, r.peak_x, r.peak_value));
                    if track_ref_separation {
                        reference_separations
                            .push((t, two_peak_separation(&rf, sep_threshold.unwrap())));
                    }
                }
                if let Some(thr) = sep_threshold {
                    separations.push((t, two_peak_separation(&field, thr)));
                }
                if samples_seen.is_multiple_of(row_keep) {
                    raster_rows.push(field.values().iter().step_by(col_keep).copied().collect());
                    raster_ts.push(t);
                }
                samples_seen += 1;
            }
            if want_snap {
                snapshots.push((t, field));
            }
        }
        if i == total {
            break;
        }
        let rem = (i + 1 == total).then_some(remainder).flatten();
        let step = match rem {
            Some(h) => flow.advance_by(h),
            None => flow.advance(),
        };
        match step {
            Ok(()) => {}
            Err(Error::BlowUp { t_last }) => {
                status = RunStatus::BlowUp { t_last };
                break;
            }
            Err(e) => return Err(e),
        }
        if let Some(st) = reference.advance(rem)? {
            reference_status = Some(st);
        }
    }

    let initial_h2 = primary[0].h2;
    let bounds = bound_report(&resolved.model, initial_h2, 1.0);
    let lifespan = size_lifespan(&resolved.model.nonlinearity, initial_h2, 1.0);
    let size_h2 = size_estimate_monitor(&primary, 2, initial_h2, lifespan);

    let fit_window = cfg
        .diagnostics
        .fit_window
        .map(|w| (w[0], w[1]))
        .unwrap_or((0.0, t_end / 2.0));
    let distance_growth = fit_linear_growth(&distance, fit_window, 8).ok();
    let distance_plateau = {
        let ts: Vec<f64> = distance.iter().map(|s| s.t).collect();
        let ys: Vec<f64> = distance.iter().map(|s| s.h2).collect();
        plateau_slopes(&ts, &ys).ok()
    };

    let peak_track: Vec<(f64, f64, f64)> = primary
        .iter()
        .map(|s| (s.t, s.peak_x, s.peak_value))
        .collect();
    let peak_speed_late = {
        let half = t_end / 2.0;
        let ts: Vec<f64> = primary.iter().map(|s| s.t).filter(|&t| t >= half).collect();
        let xs: Vec<f64> = primary
            .iter()
            .filter(|s| s.t >= half)
            .map(|s| s.peak_x)
            .collect();
        fit_peak_speed(&ts, &xs, 2.0 * grid.half_width()).ok()
    };

    let collision = if track_ref_separation && !reference_separations.is_empty() {
        collision_time(&reference_separations)
    } else if track_separation {
        collision_time(&separations)
    } else {
        None
    };

    let analysis = ScenarioAnalysis {
        fit_window,
        distance_growth,
        distance_plateau,
        peak_speed_late,
        collision_time: collision,
        size_h2,
    };

    Ok(ScenarioArtifacts {
        resolved,
        status,
        reference_status,
        primary,
        distance,
        separations: track_separation.then_some(separations),
        reference_separations: track_ref_separation.then_some(reference_separations),
        snapshots,
        raster: Raster {
            xs: raster_xs,
            ts: raster_ts,
            rows: raster_rows,
        },
        peak_track,
        reference_peak_track,
        bounds,
        analysis,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
