//! Integrating-factor RK4 time stepping.
//!
//! The dispersive part `nu d3/dx3` is diagonal in Fourier space and is applied
//! exactly through the factor `exp(i nu xi^3 h)`; classical RK4 handles only
//! the advective flux `-nu d/dx G(U)`. The scheme therefore has no stiffness
//! restriction from dispersion, conserves the zero mode to the bit (the flux
//! never feeds it), and converges at fourth order in `dt`.

use std::mem;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::Fft;
use serde::Serialize;

use crate::diagnostics::{field_sample, DiagnosticsSample};
use crate::error::{Error, Result};
use crate::models::{out_of_range, out_of_range_complex, ModelSpec};
use crate::spectral::{plan_forward, plan_inverse, Grid, RealField};

/// `exp(i nu xi^3 h)` per mode; the Nyquist symbol is 1, matching the
/// convention that odd derivatives vanish there.
fn dispersion_propagator(grid: &Grid, nu: f64, h: f64) -> Vec<Complex<f64>> {
    let nyquist = grid.len() / 2;
    grid.wavenumbers()
        .iter()
        .enumerate()
        .map(|(j, &xi)| {
            if j == nyquist {
                Complex::new(1.0, 0.0)
            } else {
                Complex::cis(nu * xi * xi * xi * h)
            }
        })
        .collect()
}

/// One IF-RK4 step operator for a fixed model, grid, and step size.
pub struct TimeStepper {
    grid: Grid,
    model: ModelSpec,
    dt: f64,
    inv_n: f64,
    e_half: Vec<Complex<f64>>,
    e_full: Vec<Complex<f64>>,
    /// `-nu i xi` with the two-thirds mask and the Nyquist zero folded in.
    flux_symbol: Vec<Complex<f64>>,
    masked: Vec<bool>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex<f64>>,
    work: Vec<Complex<f64>>,
    n1: Vec<Complex<f64>>,
    n2: Vec<Complex<f64>>,
    n3: Vec<Complex<f64>>,
    n4: Vec<Complex<f64>>,
    stage: Vec<Complex<f64>>,
}

impl TimeStepper {
    /// `dt` may be negative (the flow is reversible) but not zero.
    pub fn new(model: ModelSpec, grid: &Grid, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step size must be finite and nonzero, got {dt}"
            )));
        }
        let n = grid.len();
        let nyquist = n / 2;
        let masked: Vec<bool> = (0..n)
            .map(|j| {
                let m = j.min(n - j);
                3 * m >= n
            })
            .collect();
        let flux_symbol: Vec<Complex<f64>> = grid
            .wavenumbers()
            .iter()
            .enumerate()
            .map(|(j, &xi)| {
                if masked[j] || j == nyquist {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(0.0, -model.nu * xi)
                }
            })
            .collect();
        let fft = plan_forward(n);
        let ifft = plan_inverse(n);
        let scratch_len = fft
            .get_inplace_scratch_len()
            .max(ifft.get_inplace_scratch_len());
        Ok(TimeStepper {
            e_half: dispersion_propagator(grid, model.nu, dt / 2.0),
            e_full: dispersion_propagator(grid, model.nu, dt),
            grid: grid.clone(),
            model,
            dt,
            inv_n: 1.0 / n as f64,
            flux_symbol,
            masked,
            fft,
            ifft,
            scratch: vec![Complex::new(0.0, 0.0); scratch_len],
            work: vec![Complex::new(0.0, 0.0); n],
            n1: vec![Complex::new(0.0, 0.0); n],
            n2: vec![Complex::new(0.0, 0.0); n],
            n3: vec![Complex::new(0.0, 0.0); n],
            n4: vec![Complex::new(0.0, 0.0); n],
            stage: vec![Complex::new(0.0, 0.0); n],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advective tendency `-nu d/dx G(U)` of a raw spectral state, dealiased
    /// on the way in and out.
    fn nonlinear(&mut self, input: &[Complex<f64>], out: &mut [Complex<f64>]) -> Result<()> {
        self.work.copy_from_slice(input);
        for (w, &m) in self.work.iter_mut().zip(&self.masked) {
            if m {
                *w = Complex::new(0.0, 0.0);
            }
        }
        self.ifft
            .process_with_scratch(&mut self.work, &mut self.scratch);
        let mut bad = None;
        for (i, w) in self.work.iter_mut().enumerate() {
            let u = w.re * self.inv_n;
            let g = self.model.nonlinearity.eval_flux(u);
            if !g.is_finite() && bad.is_none() {
                bad = Some(i);
            }
            *w = Complex::new(g, 0.0);
        }
        if let Some(i) = bad {
            return Err(Error::NonFinite(i));
        }
        self.fft
            .process_with_scratch(&mut self.work, &mut self.scratch);
        for ((o, &w), &s) in out.iter_mut().zip(&self.work).zip(&self.flux_symbol) {
            *o = w * s;
        }
        Ok(())
    }

    /// One step on a raw (unnormalized FFT) spectral state, in place.
    pub(crate) fn step_spectral(&mut self, state: &mut [Complex<f64>]) -> Result<()> {
        let n = self.grid.len();
        if state.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: state.len(),
            });
        }
        let mut n1 = mem::take(&mut self.n1);
        let mut n2 = mem::take(&mut self.n2);
        let mut n3 = mem::take(&mut self.n3);
        let mut n4 = mem::take(&mut self.n4);
        let mut stage = mem::take(&mut self.stage);
        let hdt = self.dt / 2.0;
        let dt6 = self.dt / 6.0;
        let result = (|| {
            self.nonlinear(state, &mut n1)?;
            for j in 0..n {
                stage[j] = (state[j] + hdt * n1[j]) * self.e_half[j];
            }
            self.nonlinear(&stage, &mut n2)?;
            for j in 0..n {
                stage[j] = state[j] * self.e_half[j] + hdt * n2[j];
            }
            self.nonlinear(&stage, &mut n3)?;
            for j in 0..n {
                stage[j] = state[j] * self.e_full[j] + self.dt * (n3[j] * self.e_half[j]);
            }
            self.nonlinear(&stage, &mut n4)?;
            for j in 0..n {
                state[j] = state[j] * self.e_full[j]
                    + dt6
                        * (n1[j] * self.e_full[j]
                            + 2.0 * (self.e_half[j] * (n2[j] + n3[j]))
                            + n4[j]);
            }
            Ok(())
        })();
        self.n1 = n1;
        self.n2 = n2;
        self.n3 = n3;
        self.n4 = n4;
        self.stage = stage;
        result
    }

    /// Single step on a physical field. Reports blow-up with `t_last = 0`,
    /// i.e. relative to the input state.
    pub fn step(&mut self, field: &RealField) -> Result<RealField> {
        if *field.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut state: Vec<Complex<f64>> = field
            .values()
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        self.fft.process_with_scratch(&mut state, &mut self.scratch);
        self.step_spectral(&mut state)
            .map_err(|_| Error::BlowUp { t_last: 0.0 })?;
        self.ifft
            .process_with_scratch(&mut state, &mut self.scratch);
        if out_of_range_complex(&state, self.inv_n) {
            return Err(Error::BlowUp { t_last: 0.0 });
        }
        let values: Vec<f64> = state.iter().map(|c| c.re * self.inv_n).collect();
        Ok(RealField::from_raw(&self.grid, values))
    }
}

/// A solution being advanced step by step; always holds a valid state.
pub struct Flow {
    stepper: TimeStepper,
    state: Vec<Complex<f64>>,
    phys: Vec<f64>,
    steps: u64,
    extra_t: f64,
}

impl Flow {
    pub fn new(model: ModelSpec, dt: f64, initial: &RealField) -> Result<Self> {
        if out_of_range(initial.values()) {
            return Err(Error::InvalidParameter(
                "initial datum exceeds the blow-up threshold".into(),
            ));
        }
        let mut stepper = TimeStepper::new(model, initial.grid(), dt)?;
        let mut state: Vec<Complex<f64>> = initial
            .values()
            .iter()
            .map(|&v| Complex::new(v, 0.0))
            .collect();
        stepper
            .fft
            .process_with_scratch(&mut state, &mut stepper.scratch);
        Ok(Flow {
            stepper,
            state,
            phys: initial.values().to_vec(),
            steps: 0,
            extra_t: 0.0,
        })
    }

    pub fn grid(&self) -> &Grid {
        self.stepper.grid()
    }

    pub fn model(&self) -> &ModelSpec {
        self.stepper.model()
    }

    /// Elapsed time: `steps * dt` plus any custom-length steps.
    pub fn t(&self) -> f64 {
        self.steps as f64 * self.stepper.dt + self.extra_t
    }

    /// Current physical values (always finite and within range).
    pub fn values(&self) -> &[f64] {
        &self.phys
    }

    /// Current state as a field; allocates, so call at sampling cadence.
    pub fn field(&self) -> RealField {
        RealField::from_raw(self.grid(), self.phys.clone())
    }

    fn refresh_physical(&mut self) -> Result<()> {
        let t_last = self.t();
        self.stepper.work.copy_from_slice(&self.state);
        self.stepper
            .ifft
            .process_with_scratch(&mut self.stepper.work, &mut self.stepper.scratch);
        if out_of_range_complex(&self.stepper.work, self.stepper.inv_n) {
            return Err(Error::BlowUp { t_last });
        }
        for (p, w) in self.phys.iter_mut().zip(&self.stepper.work) {
            *p = w.re * self.stepper.inv_n;
        }
        Ok(())
    }

    /// Advance by one `dt`. On blow-up the error carries the time of the
    /// last valid state, and [`Flow::values`] still reports that state; the
    /// flow must not be advanced further afterwards.
    pub fn advance(&mut self) -> Result<()> {
        let t_last = self.t();
        let mut state = mem::take(&mut self.state);
        let r = self.stepper.step_spectral(&mut state);
        match r {
            Ok(()) => {
                self.state = state;
                match self.refresh_physical() {
                    Ok(()) => {
                        self.steps += 1;
                        Ok(())
                    }
                    Err(_) => Err(Error::BlowUp { t_last }),
                }
            }
            Err(_) => {
                // Keep the pre-step state; it is still valid.
                self.state = state;
                Err(Error::BlowUp { t_last })
            }
        }
    }

    /// Advance by an arbitrary step (used for a short final remainder step).
    pub fn advance_by(&mut self, dt: f64) -> Result<()> {
        if dt == self.stepper.dt {
            return self.advance();
        }
        let t_last = self.t();
        let mut one = TimeStepper::new(self.stepper.model.clone(), self.grid(), dt)?;
        let mut state = mem::take(&mut self.state);
        let r = one.step_spectral(&mut state);
        self.state = state;
        if r.is_err() {
            return Err(Error::BlowUp { t_last });
        }
        match self.refresh_physical() {
            Ok(()) => {
                self.extra_t += dt;
                Ok(())
            }
            Err(_) => Err(Error::BlowUp { t_last }),
        }
    }
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// The magnitude passed the blow-up threshold or stopped being finite;
    /// `t_last` is the time of the last valid recorded state.
    BlowUp {
        t_last: f64,
    },
}

/// Diagnostics and snapshots collected over a run.
pub struct RunOutput {
    pub diagnostics: Vec<DiagnosticsSample>,
    pub snapshots: Vec<(f64, RealField)>,
    pub status: RunStatus,
}

/// A complete single-solution problem statement.
pub struct SolverRun {
    pub model: ModelSpec,
    pub initial: RealField,
    pub t_end: f64,
    pub dt: f64,
    /// Requested snapshot times; they snap to the nearest step boundary.
    /// Empty means "final state only".
    pub snapshot_times: Vec<f64>,
    /// Record diagnostics every this many steps (the final state is always
    /// recorded). Must be at least 1.
    pub diagnostics_stride: usize,
}

/// Number of full steps plus an optional shorter remainder step.
pub(crate) fn step_plan(t_end: f64, dt: f64) -> (u64, Option<f64>) {
    let ratio = t_end / dt;
    let rounded = ratio.round();
    if (ratio - rounded).abs() <= 1e-9 * ratio.max(1.0) {
        (rounded as u64, None)
    } else {
        let full = ratio.floor() as u64;
        (full, Some(t_end - full as f64 * dt))
    }
}

/// Integrate to `t_end`, recording diagnostics and snapshots. Blow-up is a
/// status, not an error: everything recorded up to the last valid state is
/// returned.
pub fn run(spec: &SolverRun) -> Result<RunOutput> {
    if !(spec.t_end.is_finite() && spec.t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "final time must be finite and nonnegative, got {}",
            spec.t_end
        )));
    }
    if !(spec.dt.is_finite() && spec.dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step size must be positive, got {}",
            spec.dt
        )));
    }
    if spec.diagnostics_stride == 0 {
        return Err(Error::InvalidParameter(
            "diagnostics stride must be at least 1".into(),
        ));
    }
    let (full_steps, remainder) = step_plan(spec.t_end, spec.dt);
    let total_steps = full_steps + remainder.is_some() as u64;

    // Map requested snapshot times to step indices; default to "final only".
    let mut snap_indices: Vec<u64> = if spec.snapshot_times.is_empty() {
        vec![total_steps]
    } else {
        spec.snapshot_times
            .iter()
            .map(|&ts| {
                let clamped = ts.clamp(0.0, spec.t_end);
                ((clamped / spec.dt).round() as u64).min(total_steps)
            })
            .collect()
    };
    snap_indices.sort_unstable();
    snap_indices.dedup();

    let mut flow = Flow::new(spec.model.clone(), spec.dt, &spec.initial)?;
    let mut diagnostics = Vec::new();
    let mut snapshots = Vec::new();
    let mut status = RunStatus::Completed;
    let mut i: u64 = 0;
    loop {
        let t = flow.t();
        if i.is_multiple_of(spec.diagnostics_stride as u64) || i == total_steps {
            // The state at step 0 is the initial datum itself, exactly.
            let field = if i == 0 {
                spec.initial.clone()
            } else {
                flow.field()
            };
            diagnostics.push(field_sample(t, &field));
            if snap_indices.binary_search(&i).is_ok() {
                snapshots.push((t, field));
            }
        } else if snap_indices.binary_search(&i).is_ok() {
            snapshots.push((t, flow.field()));
        }
        if i == total_steps {
            break;
        }
        let step_result = if i < full_steps {
            flow.advance()
        } else {
            flow.advance_by(remainder.unwrap_or(spec.dt))
        };
        match step_result {
            Ok(()) => i += 1,
            Err(Error::BlowUp { t_last }) => {
                status = RunStatus::BlowUp { t_last };
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RunOutput {
        diagnostics,
        snapshots,
        status,
    })
}

/// Heuristic stable step: `0.5 / (nu xi_max max|F'|)` on the initial range.
/// Infinite when the advective term vanishes (pure dispersion is exact here).
pub fn cfl_dt(model: &ModelSpec, initial: &RealField) -> f64 {
    let amp = initial
        .values()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let rate =
        model.nu * initial.grid().max_wavenumber() * model.nonlinearity.derivative_bound(amp);
    if rate > 0.0 {
        0.5 / rate
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::gkdv_soliton;
    use crate::models::conserved_quantities;
    use crate::spectral::{forward, inverse};

    fn max_abs_diff(a: &RealField, b: &RealField) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// At tiny amplitude the step must reproduce the exact dispersive
    /// propagator: the nonlinear correction is quadratic in the amplitude.
    #[test]
    fn near_linear_step_matches_exact_dispersion() {
        let grid = Grid::new(std::f64::consts::PI, 64).unwrap();
        let amp = 1e-10;
        let u0 =
            RealField::from_fn(&grid, |x| amp * ((2.0 * x).cos() + 0.3 * (5.0 * x).sin())).unwrap();
        let dt = 1e-4;
        let model = ModelSpec::kdv();
        let mut stepper = TimeStepper::new(model.clone(), &grid, dt).unwrap();
        let stepped = stepper.step(&u0).unwrap();

        let mut coeffs = forward(&u0);
        let nyquist = grid.len() / 2;
        for (j, (c, &xi)) in coeffs
            .coeffs_mut()
            .iter_mut()
            .zip(grid.wavenumbers())
            .enumerate()
        {
            if j != nyquist {
                *c *= Complex::cis(model.nu * xi * xi * xi * dt);
            }
        }
        let exact = inverse(&coeffs);
        let err = max_abs_diff(&stepped, &exact) / amp;
        assert!(
            err <= 1e-12,
            "relative deviation from exact dispersion: {err}"
        );
    }

    #[test]
    fn soliton_translates_with_small_error() {
        let grid = Grid::new(50.0, 512).unwrap();
        let c = 0.3;
        let u0 = gkdv_soliton(1, c, 0.0, &grid, 0.0).unwrap();
        let dt = 1e-3;
        let mut flow = Flow::new(ModelSpec::kdv(), dt, &u0).unwrap();
        for _ in 0..1000 {
            flow.advance().unwrap();
        }
        let expected = gkdv_soliton(1, c, 0.0, &grid, 1.0).unwrap();
        let err = max_abs_diff(&flow.field(), &expected);
        assert!(
            err <= 1e-9,
            "soliton translation error {err} after t = 1 at dt = {dt}"
        );
    }

    #[test]
    fn global_error_decays_at_fourth_order() {
        let grid = Grid::new(50.0, 256).unwrap();
        let u0 = gkdv_soliton(1, 0.3, 0.0, &grid, 0.0).unwrap();
        let t_end = 0.5f64;
        let mut finals = Vec::new();
        for &dt in &[0.02f64, 0.01, 0.005] {
            let steps = (t_end / dt).round() as usize;
            let mut flow = Flow::new(ModelSpec::kdv(), dt, &u0).unwrap();
            for _ in 0..steps {
                flow.advance().unwrap();
            }
            finals.push(flow.field());
        }
        let e1 = max_abs_diff(&finals[0], &finals[1]);
        let e2 = max_abs_diff(&finals[1], &finals[2]);
        let order = (e1 / e2).log2();
        assert!(
            (3.7..=4.3).contains(&order),
            "observed temporal order {order} (errors {e1}, {e2})"
        );
    }

    #[test]
    fn backward_stepping_retraces_the_flow() {
        let grid = Grid::new(50.0, 256).unwrap();
        let u0 = gkdv_soliton(1, 0.3, 0.0, &grid, 0.0).unwrap();
        let dt = 0.01;
        let mut fwd = Flow::new(ModelSpec::kdv(), dt, &u0).unwrap();
        for _ in 0..200 {
            fwd.advance().unwrap();
        }
        let mut bwd = Flow::new(ModelSpec::kdv(), -dt, &fwd.field()).unwrap();
        for _ in 0..200 {
            bwd.advance().unwrap();
        }
        let err = max_abs_diff(&bwd.field(), &u0);
        assert!(err <= 1e-8, "round trip error {err}");
    }

    #[test]
    fn mass_and_momentum_are_conserved_on_a_long_mkdv_run() {
        let grid = Grid::new(200.0, 1024).unwrap();
        let u0 = gkdv_soliton(2, 0.2, 0.0, &grid, 0.0).unwrap();
        let q0 = conserved_quantities(&u0);
        let dt = 0.01;
        let mut flow = Flow::new(ModelSpec::mkdv(), dt, &u0).unwrap();
        for _ in 0..10_000 {
            flow.advance().unwrap();
        }
        let q1 = conserved_quantities(&flow.field());
        let mass_drift = (q1.mass - q0.mass).abs() / q0.mass.abs();
        let momentum_drift = (q1.momentum - q0.momentum).abs() / q0.momentum;
        assert!(
            mass_drift <= 1e-10,
            "relative mass drift {mass_drift} over t in [0, 100]"
        );
        assert!(
            momentum_drift <= 1e-9,
            "relative momentum drift {momentum_drift} over t in [0, 100]"
        );
    }

    #[test]
    fn unstable_step_size_reports_blow_up_with_partial_outputs() {
        let grid = Grid::new(50.0, 256).unwrap();
        let u0 = gkdv_soliton(1, 4.0, 0.0, &grid, 0.0).unwrap();
        let out = run(&SolverRun {
            model: ModelSpec::kdv(),
            initial: u0,
            t_end: 100.0,
            dt: 10.0, // wildly past any stable step
            snapshot_times: vec![],
            diagnostics_stride: 1,
        })
        .unwrap();
        match out.status {
            RunStatus::BlowUp { t_last } => {
                assert!(t_last < 100.0);
                assert!(!out.diagnostics.is_empty(), "partial diagnostics kept");
                let last = out.diagnostics.last().unwrap();
                assert!(
                    (last.t - t_last).abs() < 1e-12,
                    "last recorded sample sits at the last valid time"
                );
                assert!(last.linf.is_finite());
            }
            RunStatus::Completed => panic!("expected blow-up"),
        }
    }

    #[test]
    fn zero_horizon_run_returns_the_initial_datum_exactly() {
        let grid = Grid::new(50.0, 128).unwrap();
        let u0 = gkdv_soliton(1, 0.3, 1.0, &grid, 0.0).unwrap();
        let out = run(&SolverRun {
            model: ModelSpec::kdv(),
            initial: u0.clone(),
            t_end: 0.0,
            dt: 0.01,
            snapshot_times: vec![],
            diagnostics_stride: 10,
        })
        .unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert_eq!(out.snapshots.len(), 1);
        let (t, field) = &out.snapshots[0];
        assert_eq!(*t, 0.0);
        for (a, b) in field.values().iter().zip(u0.values()) {
            assert_eq!(a.to_bits(), b.to_bits(), "snapshot is bit-identical");
        }
        assert_eq!(out.diagnostics.len(), 1);
    }

    #[test]
    fn snapshot_requests_snap_to_step_boundaries() {
        let grid = Grid::new(50.0, 128).unwrap();
        let u0 = gkdv_soliton(1, 0.3, 0.0, &grid, 0.0).unwrap();
        let out = run(&SolverRun {
            model: ModelSpec::kdv(),
            initial: u0,
            t_end: 1.0,
            dt: 0.1,
            snapshot_times: vec![0.0, 0.33, 0.97, 2.5],
            diagnostics_stride: 5,
        })
        .unwrap();
        let times: Vec<f64> = out.snapshots.iter().map(|(t, _)| *t).collect();
        // 0.33 rounds to step 3; 0.97 and the clamped 2.5 both land on step 10.
        assert_eq!(times.len(), 3, "snapped times {times:?}");
        assert_eq!(times[0], 0.0);
        assert!((times[1] - 0.3).abs() < 1e-12);
        assert!((times[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reruns_are_bitwise_identical() {
        let grid = Grid::new(50.0, 256).unwrap();
        let u0 = gkdv_soliton(2, 0.2, 0.0, &grid, 0.0).unwrap();
        let spec = SolverRun {
            model: ModelSpec::mkdv(),
            initial: u0,
            t_end: 2.0,
            dt: 0.01,
            snapshot_times: vec![1.0, 2.0],
            diagnostics_stride: 20,
        };
        let a = run(&spec).unwrap();
        let b = run(&spec).unwrap();
        assert_eq!(a.diagnostics.len(), b.diagnostics.len());
        for (x, y) in a.diagnostics.iter().zip(&b.diagnostics) {
            assert_eq!(x.h2.to_bits(), y.h2.to_bits());
            assert_eq!(x.peak_x.to_bits(), y.peak_x.to_bits());
        }
        for ((_, fa), (_, fb)) in a.snapshots.iter().zip(&b.snapshots) {
            for (p, q) in fa.values().iter().zip(fb.values()) {
                assert_eq!(p.to_bits(), q.to_bits());
            }
        }
    }

    #[test]
    fn remainder_step_lands_exactly_on_the_horizon() {
        let grid = Grid::new(50.0, 128).unwrap();
        let u0 = gkdv_soliton(1, 0.3, 0.0, &grid, 0.0).unwrap();
        let out = run(&SolverRun {
            model: ModelSpec::kdv(),
            initial: u0.clone(),
            t_end: 0.25,
            dt: 0.1, // 2 full steps plus a 0.05 remainder
            snapshot_times: vec![0.25],
            diagnostics_stride: 1,
        })
        .unwrap();
        let t_last = out.diagnostics.last().unwrap().t;
        assert!((t_last - 0.25).abs() < 1e-12, "landed at {t_last}");
        // Against a uniform-step reference at the same horizon.
        let mut flow = Flow::new(ModelSpec::kdv(), 0.05, &u0).unwrap();
        for _ in 0..5 {
            flow.advance().unwrap();
        }
        let err = max_abs_diff(&out.snapshots[0].1, &flow.field());
        // The two coarse dt = 0.1 steps dominate this difference (O(dt^4)).
        assert!(err < 1e-6, "remainder-step trajectory differs by {err}");
    }

    #[test]
    fn cfl_heuristic_scales_with_amplitude_and_handles_linear_models() {
        let grid = Grid::new(50.0, 256).unwrap();
        // F' = 2U for the cubic family, so the bound tightens with amplitude.
        let small = gkdv_soliton(2, 0.1, 0.0, &grid, 0.0).unwrap();
        let large = gkdv_soliton(2, 1.0, 0.0, &grid, 0.0).unwrap();
        let model = ModelSpec::mkdv();
        let dt_small = cfl_dt(&model, &small);
        let dt_large = cfl_dt(&model, &large);
        assert!(dt_small.is_finite() && dt_small > 0.0);
        assert!(dt_large < dt_small, "larger data need smaller steps");
        // F' = 1 for the quadratic family: finite and amplitude-independent.
        let k1 = cfl_dt(&ModelSpec::kdv(), &small);
        assert!((k1 - cfl_dt(&ModelSpec::kdv(), &large)).abs() < 1e-15);
        // On zero data the quadratic advective limit disappears entirely.
        let zero = RealField::zeros(&grid);
        assert!(cfl_dt(&ModelSpec::mkdv(), &zero).is_infinite());
    }

    #[test]
    fn single_step_api_agrees_with_the_flow() {
        let grid = Grid::new(50.0, 128).unwrap();
        let u0 = gkdv_soliton(1, 0.3, 0.0, &grid, 0.0).unwrap();
        let mut stepper = TimeStepper::new(ModelSpec::kdv(), &grid, 0.01).unwrap();
        let one = stepper.step(&u0).unwrap();
        let mut flow = Flow::new(ModelSpec::kdv(), 0.01, &u0).unwrap();
        flow.advance().unwrap();
        assert_eq!(max_abs_diff(&one, &flow.field()), 0.0, "identical kernels");
    }
}
