//! Scaling-parameter sweep: find the `nu` whose rescaled soliton, traveling
//! at speed `nu * c`, stays closest (time-averaged `L^2`) to the solution of
//! the configured model started from the same profile.
//!
//! The solution is integrated once; every candidate `nu` is then scored
//! against the stored states, so the sweep cost is one run plus cheap
//! closed-form evaluations. Candidates whose score comes out non-finite are
//! excluded from the argmin.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{
    detect_max_then_min, distance_sample, DiagnosticsSample, MaxMinOptions, MaxThenMin,
};
use crate::error::{Error, Result};
use crate::initial_data::rescaled_soliton;
use crate::integrator::{step_plan, Flow, RunStatus};
use crate::spectral::{Grid, RealField};

use super::config::{ResolvedScenario, SweepConfig};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepPoint {
    pub nu: f64,
    /// Time-averaged `L^2` distance to the rescaled soliton at this `nu`.
    pub objective: f64,
}

#[derive(Serialize)]
pub struct SweepOutcome {
    /// Time window the objective averaged over.
    pub window: (f64, f64),
    pub base_status: RunStatus,
    /// The full objective curve on the `nu` grid.
    pub points: Vec<SweepPoint>,
    /// Best grid point (ties resolve to the smaller `nu`).
    pub best_grid: SweepPoint,
    /// Golden-section refinement of the bracket around the best grid point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined: Option<SweepPoint>,
    /// The reported optimum (refined when refinement ran).
    pub nu_star: f64,
    pub objective_star: f64,
    /// Distance diagnostics against the optimal rescaled soliton (written to
    /// CSV separately, not serialized here).
    #[serde(skip_serializing)]
    pub star_distance: Vec<DiagnosticsSample>,
    /// Rise-dip-rise pattern of the `H^2` star-distance series, if present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_then_min: Option<MaxThenMin>,
    /// States the objective averaged over.
    pub samples_used: usize,
    pub wall_seconds: f64,
}

/// Mean `L^2` distance between the stored states and the rescaled soliton
/// with the given `nu` (speed `nu * c`, same `c` and offset as the datum).
fn mean_l2_distance(stored: &[(f64, RealField)], grid: &Grid, nu: f64, c: f64, x0: f64) -> f64 {
    let dx = grid.spacing();
    let per_sample: Vec<f64> = stored
        .par_iter()
        .map(|(t, field)| {
            let profile = rescaled_soliton(nu, c, x0, grid, *t).expect("sweep range was validated");
            let mut acc = 0.0;
            for (a, b) in field.values().iter().zip(profile.values()) {
                let d = a - b;
                acc += d * d;
            }
            (acc * dx).sqrt()
        })
        .collect();
    // Ordered serial reduction keeps the result independent of thread count.
    per_sample.iter().sum::<f64>() / per_sample.len() as f64
}

/// Golden-section minimum of `f` on `[a, b]` to within `tol`.
fn golden_section(mut a: f64, mut b: f64, tol: f64, f: &dyn Fn(f64) -> f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub fn sweep_nu(resolved: &ResolvedScenario) -> Result<SweepOutcome> {
    let start = Instant::now();
    let cfg = &resolved.config;
    let sweep: &SweepConfig = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("scenario has no [sweep] table".into()))?;
    let (c, x0) = cfg
        .initial
        .speed_and_offset()
        .expect("single-soliton datum was validated at resolve time");
    let grid = resolved.grid.clone();
    let t_end = cfg.time.t_end;
    let dt = resolved.dt;
    let stride = cfg.diagnostics.stride.max(1) as u64;
    let window = sweep.window.map(|w| (w[0], w[1])).unwrap_or((0.0, t_end));
    let slack = 1e-9 * window.1.abs().max(1.0);

    // One base run, storing the state at the sampling cadence inside the
    // window.
    let (full_steps, remainder) = step_plan(t_end, dt);
    let total = full_steps + u64::from(remainder.is_some());
    let mut flow = Flow::new(resolved.model.clone(), dt, &resolved.initial)?;
    let mut stored: Vec<(f64, RealField)> = Vec::new();
    let mut base_status = RunStatus::Completed;
    for i in 0..=total {
        let t = flow.t();
        if (i % stride == 0 || i == total) && t >= window.0 - slack && t <= window.1 + slack {
            stored.push((t, flow.field()));
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
                base_status = RunStatus::BlowUp { t_last };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if stored.is_empty() {
        return Err(Error::Config(format!(
            "sweep window [{}, {}] contains no diagnostic samples",
            window.0, window.1
        )));
    }

    let objective = |nu: f64| mean_l2_distance(&stored, &grid, nu, c, x0);

    let nus: Vec<f64> = (0..sweep.steps)
        .map(|i| sweep.nu_min + (sweep.nu_max - sweep.nu_min) * i as f64 / (sweep.steps - 1) as f64)
        .collect();
    let objectives: Vec<f64> = nus.par_iter().map(|&nu| objective(nu)).collect();
    let points: Vec<SweepPoint> = nus
        .iter()
        .zip(&objectives)
        .map(|(&nu, &objective)| SweepPoint { nu, objective })
        .collect();

    // Argmin over finite scores; strict `<` resolves ties to the lower nu.
    let mut best_idx = None;
    for (i, &obj) in objectives.iter().enumerate() {
        if obj.is_finite() && best_idx.is_none_or(|j: usize| obj < objectives[j]) {
            best_idx = Some(i);
        }
    }
    let best_idx = best_idx.ok_or_else(|| {
        Error::Config("every sweep candidate produced a non-finite objective".into())
    })?;
    let best_grid = points[best_idx];

    let refined = sweep.refine_tol.map(|tol| {
        let lo = nus[best_idx.saturating_sub(1)];
        let hi = nus[(best_idx + 1).min(nus.len() - 1)];
        let (nu, obj) = golden_section(lo, hi, tol, &objective);
        SweepPoint { nu, objective: obj }
    });
    let star = refined
        .filter(|r| r.objective <= best_grid.objective)
        .unwrap_or(best_grid);

    let mut star_distance = Vec::with_capacity(stored.len());
    for (t, field) in &stored {
        let profile = rescaled_soliton(star.nu, c, x0, &grid, *t)?;
        star_distance.push(distance_sample(*t, field, &profile)?);
    }
    let ts: Vec<f64> = star_distance.iter().map(|s| s.t).collect();
    let h2s: Vec<f64> = star_distance.iter().map(|s| s.h2).collect();
    let max_then_min = detect_max_then_min(&ts, &h2s, MaxMinOptions::default());

    Ok(SweepOutcome {
        window,
        base_status,
        points,
        best_grid,
        refined,
        nu_star: star.nu,
        objective_star: star.objective,
        star_distance,
        max_then_min,
        samples_used: stored.len(),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
