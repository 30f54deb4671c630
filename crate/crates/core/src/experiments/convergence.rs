//! Self-convergence reports: observed temporal order under step halving and
//! spectral spatial decay under grid doubling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrator::{step_plan, Flow};
use crate::models::ModelSpec;
use crate::spectral::{Grid, RealField};

/// Differences below this are treated as the round-off floor: order and
/// ratio estimates stop being meaningful there.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

/// Temporal self-convergence: each level halves the step.
#[derive(Clone, Debug, Serialize)]
pub struct TemporalReport {
    pub dts: Vec<f64>,
    /// `max |state(dt_i) - state(dt_{i+1})|` at the horizon.
    pub diffs: Vec<f64>,
    /// `log2(diffs[i] / diffs[i+1])`; a fourth-order scheme gives ~4.
    pub orders: Vec<f64>,
}

/// Spatial self-convergence: each level doubles the collocation points.
#[derive(Clone, Debug, Serialize)]
pub struct SpatialReport {
    pub points: Vec<usize>,
    /// Max-norm error of each coarser level against the finest, on the
    /// coarse level's own collocation points.
    pub errors: Vec<f64>,
    /// `errors[i] / errors[i+1]`; spectral accuracy makes these explode
    /// (far beyond any fixed power of 2) until the round-off floor.
    pub ratios: Vec<f64>,
}

/// Integrate to the horizon and return the final state; blow-up propagates
/// as an error since a truncated run has no comparable final state.
fn final_state(model: &ModelSpec, initial: &RealField, t_end: f64, dt: f64) -> Result<RealField> {
    let (full_steps, remainder) = step_plan(t_end, dt);
    let mut flow = Flow::new(model.clone(), dt, initial)?;
    for _ in 0..full_steps {
        flow.advance()?;
    }
    if let Some(h) = remainder {
        flow.advance_by(h)?;
    }
    Ok(flow.field())
}

fn linf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs()))
}

fn order_between(coarse: f64, fine: f64) -> f64 {
    if coarse <= ROUNDOFF_FLOOR && fine <= ROUNDOFF_FLOOR {
        return f64::INFINITY;
    }
    (coarse / fine).log2()
}

/// Run the model at `levels` step sizes `dt0 / 2^i` on a fixed grid and
/// difference successive final states.
pub fn temporal_report(
    model: &ModelSpec,
    initial: &RealField,
    t_end: f64,
    dt0: f64,
    levels: usize,
) -> Result<TemporalReport> {
    if levels < 3 {
        return Err(Error::InvalidParameter(format!(
            "temporal order needs at least 3 levels, got {levels}"
        )));
    }
    if !(dt0.is_finite() && dt0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "base step must be positive, got {dt0}"
        )));
    }
    let dts: Vec<f64> = (0..levels).map(|i| dt0 / (1u64 << i) as f64).collect();
    let mut states = Vec::with_capacity(levels);
    for &dt in &dts {
        states.push(final_state(model, initial, t_end, dt)?);
    }
    let diffs: Vec<f64> = states
        .windows(2)
        .map(|w| linf_diff(w[0].values(), w[1].values()))
        .collect();
    let orders: Vec<f64> = diffs
        .windows(2)
        .map(|w| order_between(w[0], w[1]))
        .collect();
    Ok(TemporalReport { dts, diffs, orders })
}

/// Run the model at `levels` grid resolutions `base_points * 2^i` with one
/// fixed step size, building the datum on each grid, and compare every level
/// against the finest on the shared collocation points.
pub fn spatial_report(
    model: &ModelSpec,
    build: &dyn Fn(&Grid) -> Result<RealField>,
    half_width: f64,
    base_points: usize,
    levels: usize,
    t_end: f64,
    dt: f64,
) -> Result<SpatialReport> {
    if levels < 3 {
        return Err(Error::InvalidParameter(format!(
            "spatial report needs at least 3 levels, got {levels}"
        )));
    }
    let points: Vec<usize> = (0..levels).map(|i| base_points << i).collect();
    let mut finals = Vec::with_capacity(levels);
    for &n in &points {
        let grid = Grid::new(half_width, n)?;
        let initial = build(&grid)?;
        finals.push(final_state(model, &initial, t_end, dt)?);
    }
    let finest = finals.last().unwrap().values();
    // Grids share x_j = -L + j * (2L / N), so every coarse point is a fine
    // point at a power-of-two index stride.
    let errors: Vec<f64> = finals[..levels - 1]
        .iter()
        .enumerate()
        .map(|(i, state)| {
            let stride = 1usize << (levels - 1 - i);
            state
                .values()
                .iter()
                .enumerate()
                .fold(0.0f64, |m, (j, &v)| m.max((v - finest[j * stride]).abs()))
        })
        .collect();
    let ratios: Vec<f64> = errors
        .windows(2)
        .map(|w| {
            if w[1] <= ROUNDOFF_FLOOR {
                f64::INFINITY
            } else {
                w[0] / w[1]
            }
        })
        .collect();
    Ok(SpatialReport {
        points,
        errors,
        ratios,
    })
}
