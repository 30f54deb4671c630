//! C ABI for the gkdv laboratory.
//!
//! Conventions, mirrored in the generated `include/gkdv.h`:
//!
//! - Every fallible function returns a [`GkdvStatus`]; results travel through
//!   `out` pointers that are written only when the status is
//!   `GKDV_STATUS_OK` (blow-up, where noted, still yields a usable handle).
//! - Handles are opaque. Each constructor has a matching `*_free`; freeing
//!   `NULL` is a no-op, freeing twice or using a freed handle is undefined
//!   behavior, as in any C object API.
//! - A failure stores a thread-local message retrievable with
//!   [`gkdv_last_error`].
//! - Panics are caught at the boundary and surface as
//!   `GKDV_STATUS_INTERNAL`; they never unwind into the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use gkdv::bounds::bound_report;
use gkdv::diagnostics::{field_sample, DiagnosticsSample};
use gkdv::experiments::{
    run_scenario, write_scenario_artifacts, ScenarioArtifacts, ScenarioConfig,
};
use gkdv::initial_data::{closed_form_h2, gkdv_soliton};
use gkdv::integrator::{Flow, RunStatus};
use gkdv::models::{ModelSpec, PolynomialNonlinearity};
use gkdv::spectral::{Grid, RealField};
use gkdv::Error;

/// Outcome of a call across the C boundary.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GkdvStatus {
    /// The call succeeded and all `out` parameters are valid.
    Ok = 0,
    /// A required pointer argument was `NULL`.
    NullPointer = 1,
    /// An argument was out of range or otherwise rejected.
    InvalidArgument = 2,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 3,
    /// Reading or writing a file failed.
    Io = 4,
    /// The solution left the valid range before the requested horizon.
    BlowUp = 5,
    /// An internal invariant failed; the library state is still consistent.
    Internal = 6,
}

/// One row of scalar diagnostics for a field or a point along a run.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct GkdvSample {
    /// Simulation time of the sample.
    pub t: f64,
    /// `L^2` norm.
    pub h0: f64,
    /// `H^1` norm.
    pub h1: f64,
    /// `H^2` norm.
    pub h2: f64,
    /// Max magnitude on the grid.
    pub linf: f64,
    /// Integral of the field.
    pub mass: f64,
    /// Integral of the squared field.
    pub momentum: f64,
    /// Parabola-refined location of the largest value.
    pub peak_x: f64,
    /// Refined height at that location.
    pub peak_value: f64,
}

impl From<DiagnosticsSample> for GkdvSample {
    fn from(s: DiagnosticsSample) -> Self {
        GkdvSample {
            t: s.t,
            h0: s.h0,
            h1: s.h1,
            h2: s.h2,
            linf: s.linf,
            mass: s.mass,
            momentum: s.momentum,
            peak_x: s.peak_x,
            peak_value: s.peak_value,
        }
    }
}

/// Opaque handle for a polynomial advection model.
pub struct GkdvModel(ModelSpec);

/// Opaque handle for real samples on a periodic grid.
pub struct GkdvField(RealField);

/// Opaque handle for an in-flight integration. Blow-up latches: once a step
/// fails, the handle keeps reporting the last valid state and rejects
/// further advances.
pub struct GkdvFlow {
    flow: Flow,
    blown_at: Option<f64>,
}

/// Opaque handle for a finished scenario run and its artifacts.
pub struct GkdvRun(ScenarioArtifacts);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg.into());
}

fn fail(status: GkdvStatus, msg: impl Into<String>) -> GkdvStatus {
    set_error(msg);
    status
}

fn fail_null(name: &str) -> GkdvStatus {
    fail(GkdvStatus::NullPointer, format!("{name} must not be NULL"))
}

fn fail_err(err: Error) -> GkdvStatus {
    let status = match &err {
        Error::BlowUp { .. } => GkdvStatus::BlowUp,
        Error::Io { .. } | Error::TomlParse { .. } => GkdvStatus::Io,
        Error::Serialize(_) => GkdvStatus::Internal,
        _ => GkdvStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

/// Run `f` with panics converted to `GKDV_STATUS_INTERNAL`.
fn guarded(f: impl FnOnce() -> GkdvStatus) -> GkdvStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic across the C boundary".into());
            fail(GkdvStatus::Internal, msg)
        }
    }
}

/// # Safety
/// `ptr` must be `NULL` or a pointer previously returned by the matching
/// constructor and not yet freed.
unsafe fn free_handle<T>(ptr: *mut T) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(ptr) });
    }
}

/// # Safety
/// `ptr` must be `NULL` or valid for reads of a NUL-terminated string.
unsafe fn utf8_arg<'a>(name: &str, ptr: *const c_char) -> Result<&'a str, GkdvStatus> {
    if ptr.is_null() {
        return Err(fail_null(name));
    }
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| {
        fail(
            GkdvStatus::InvalidUtf8,
            format!("{name} is not valid UTF-8"),
        )
    })
}

fn write_out<T>(out: *mut T, value: T) -> GkdvStatus {
    // Callers have already null-checked `out`.
    unsafe { out.write(value) };
    GkdvStatus::Ok
}

/// Library version as a static NUL-terminated string; do not free it.
#[no_mangle]
pub extern "C" fn gkdv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the current thread's last error message into `buf`.
///
/// Writes at most `cap - 1` bytes plus a NUL terminator and returns the full
/// message length in bytes (excluding the NUL), so a second call with a
/// buffer of `length + 1` bytes retrieves the whole message. With a `NULL`
/// buffer or `cap == 0` nothing is written and only the length is returned.
///
/// # Safety
/// `buf` must be `NULL` or valid for writes of `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                buf.add(n).write(0);
            }
        }
        bytes.len()
    })
}

/// Free a string returned by this library (currently only
/// [`gkdv_model_bounds_json`]).
///
/// # Safety
/// `s` must be `NULL` or a pointer returned by a `*_json` function of this
/// library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gkdv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { std::ffi::CString::from_raw(s) });
    }
}

/// Create a model `U_t + nu U_xxx + nu (G(U))_x = 0` with
/// `G'(U) = sum coeffs[j] U^{j+1}`.
///
/// `coeffs` holds the advection polynomial's coefficients from the linear
/// term up; at least one is required and the last must be nonzero. `nu`
/// scales both the dispersive and the advective term and must be positive.
///
/// # Safety
/// `coeffs` must be valid for reads of `len` doubles; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_model_new(
    coeffs: *const f64,
    len: usize,
    nu: f64,
    out: *mut *mut GkdvModel,
) -> GkdvStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        if coeffs.is_null() {
            return fail_null("coeffs");
        }
        let a = unsafe { std::slice::from_raw_parts(coeffs, len) }.to_vec();
        let nonlinearity = match PolynomialNonlinearity::new(a) {
            Ok(p) => p,
            Err(e) => return fail_err(e),
        };
        match ModelSpec::new(nonlinearity, nu) {
            Ok(model) => write_out(out, Box::into_raw(Box::new(GkdvModel(model)))),
            Err(e) => fail_err(e),
        }
    })
}

/// Release a model handle; `NULL` is ignored.
///
/// # Safety
/// `model` must be `NULL` or an unfreed pointer from [`gkdv_model_new`].
#[no_mangle]
pub unsafe extern "C" fn gkdv_model_free(model: *mut GkdvModel) {
    unsafe { free_handle(model) }
}

/// Degree of the model's advection polynomial.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_model_degree(model: *const GkdvModel, out: *mut u32) -> GkdvStatus {
    guarded(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, model.0.nonlinearity.degree())
    })
}

/// Evaluate the advection polynomial at `u`.
///
/// # Safety
/// `model` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_model_eval(
    model: *const GkdvModel,
    u: f64,
    out: *mut f64,
) -> GkdvStatus {
    guarded(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, model.0.nonlinearity.eval(u))
    })
}

/// Predicted timescales and size bounds for a datum of `H^2` size `epsilon`
/// under this model, as a JSON object. Free the string with
/// [`gkdv_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out_json` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_model_bounds_json(
    model: *const GkdvModel,
    epsilon: f64,
    window_constant: f64,
    out_json: *mut *mut c_char,
) -> GkdvStatus {
    guarded(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        if out_json.is_null() {
            return fail_null("out_json");
        }
        let report = bound_report(&model.0, epsilon, window_constant);
        let text = match serde_json::to_string_pretty(&report) {
            Ok(t) => t,
            Err(e) => return fail(GkdvStatus::Internal, e.to_string()),
        };
        match std::ffi::CString::new(text) {
            Ok(cstr) => write_out(out_json, cstr.into_raw()),
            Err(e) => fail(GkdvStatus::Internal, e.to_string()),
        }
    })
}

/// Closed-form `H^2` norm of the traveling-wave profile with exponent `k`
/// and speed `c`. Available for `k = 1` and `k = 2` only.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_soliton_h2(k: u32, c: f64, out: *mut f64) -> GkdvStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        if !(c.is_finite() && c > 0.0) {
            return fail(
                GkdvStatus::InvalidArgument,
                format!("speed c must be positive and finite, got {c}"),
            );
        }
        match closed_form_h2(k, c) {
            Some(value) => write_out(out, value),
            None => fail(
                GkdvStatus::InvalidArgument,
                format!("no closed form for exponent k = {k}; only k = 1 and k = 2"),
            ),
        }
    })
}

/// Sample the traveling-wave profile with exponent `k`, speed `c`, and
/// center `x0` on a periodic grid of `points` nodes spanning
/// `[-half_width, half_width)`. `points` must be even and at least 16.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_field_soliton(
    k: u32,
    c: f64,
    x0: f64,
    half_width: f64,
    points: usize,
    out: *mut *mut GkdvField,
) -> GkdvStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        let grid = match Grid::new(half_width, points) {
            Ok(g) => g,
            Err(e) => return fail_err(e),
        };
        match gkdv_soliton(k, c, x0, &grid, 0.0) {
            Ok(field) => write_out(out, Box::into_raw(Box::new(GkdvField(field)))),
            Err(e) => fail_err(e),
        }
    })
}

/// Wrap caller-provided samples on a periodic grid of `len` nodes spanning
/// `[-half_width, half_width)`. The values are copied; all must be finite.
///
/// # Safety
/// `values` must be valid for reads of `len` doubles; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_field_from_values(
    half_width: f64,
    values: *const f64,
    len: usize,
    out: *mut *mut GkdvField,
) -> GkdvStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        if values.is_null() {
            return fail_null("values");
        }
        let grid = match Grid::new(half_width, len) {
            Ok(g) => g,
            Err(e) => return fail_err(e),
        };
        let copied = unsafe { std::slice::from_raw_parts(values, len) }.to_vec();
        match RealField::new(&grid, copied) {
            Ok(field) => write_out(out, Box::into_raw(Box::new(GkdvField(field)))),
            Err(e) => fail_err(e),
        }
    })
}

/// Release a field handle; `NULL` is ignored.
///
/// # Safety
/// `field` must be `NULL` or an unfreed pointer from a field constructor.
#[no_mangle]
pub unsafe extern "C" fn gkdv_field_free(field: *mut GkdvField) {
    unsafe { free_handle(field) }
}

/// Number of grid nodes the field is sampled on.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_field_len(field: *const GkdvField, out: *mut usize) -> GkdvStatus {
    guarded(|| {
        let Some(field) = (unsafe { field.as_ref() }) else {
            return fail_null("field");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, field.0.values().len())
    })
}

/// Copy the field's sample values into `buf`, which must hold at least
/// [`gkdv_field_len`] doubles.
///
/// # Safety
/// `field` must be a live handle; `buf` must be valid for writes of `cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn gkdv_field_copy_values(
    field: *const GkdvField,
    buf: *mut f64,
    cap: usize,
) -> GkdvStatus {
    guarded(|| {
        let Some(field) = (unsafe { field.as_ref() }) else {
            return fail_null("field");
        };
        copy_slice("field", field.0.values(), buf, cap)
    })
}

/// Copy the field's grid coordinates into `buf`, which must hold at least
/// [`gkdv_field_len`] doubles.
///
/// # Safety
/// `field` must be a live handle; `buf` must be valid for writes of `cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn gkdv_field_copy_points(
    field: *const GkdvField,
    buf: *mut f64,
    cap: usize,
) -> GkdvStatus {
    guarded(|| {
        let Some(field) = (unsafe { field.as_ref() }) else {
            return fail_null("field");
        };
        copy_slice("grid", field.0.grid().points(), buf, cap)
    })
}

fn copy_slice(what: &str, src: &[f64], buf: *mut f64, cap: usize) -> GkdvStatus {
    if buf.is_null() {
        return fail_null("buf");
    }
    if cap < src.len() {
        return fail(
            GkdvStatus::InvalidArgument,
            format!(
                "buffer holds {cap} doubles but the {what} has {}",
                src.len()
            ),
        );
    }
    unsafe { std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len()) };
    GkdvStatus::Ok
}

/// Scalar diagnostics of the field (norms, invariants, refined peak),
/// reported with the time column set to `t`.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_field_sample(
    field: *const GkdvField,
    t: f64,
    out: *mut GkdvSample,
) -> GkdvStatus {
    guarded(|| {
        let Some(field) = (unsafe { field.as_ref() }) else {
            return fail_null("field");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, field_sample(t, &field.0).into())
    })
}

/// Start an integration of the model from `initial` with step `dt`.
/// The field and model are copied into the flow; both handles remain owned
/// by the caller.
///
/// # Safety
/// `model` and `initial` must be live handles; `out` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_flow_new(
    model: *const GkdvModel,
    initial: *const GkdvField,
    dt: f64,
    out: *mut *mut GkdvFlow,
) -> GkdvStatus {
    guarded(|| {
        let Some(model) = (unsafe { model.as_ref() }) else {
            return fail_null("model");
        };
        let Some(initial) = (unsafe { initial.as_ref() }) else {
            return fail_null("initial");
        };
        if out.is_null() {
            return fail_null("out");
        }
        match Flow::new(model.0.clone(), dt, &initial.0) {
            Ok(flow) => write_out(
                out,
                Box::into_raw(Box::new(GkdvFlow {
                    flow,
                    blown_at: None,
                })),
            ),
            Err(e) => fail_err(e),
        }
    })
}

/// Release a flow handle; `NULL` is ignored.
///
/// # Safety
/// `flow` must be `NULL` or an unfreed pointer from [`gkdv_flow_new`].
#[no_mangle]
pub unsafe extern "C" fn gkdv_flow_free(flow: *mut GkdvFlow) {
    unsafe { free_handle(flow) }
}

/// Advance the flow by `steps` steps of its `dt`.
///
/// On `GKDV_STATUS_BLOW_UP` the flow stops at the last valid state, which
/// remains readable; advancing further is rejected with the same status.
///
/// # Safety
/// `flow` must be a live handle with no other outstanding use.
#[no_mangle]
pub unsafe extern "C" fn gkdv_flow_advance(flow: *mut GkdvFlow, steps: u64) -> GkdvStatus {
    guarded(|| {
        let Some(flow) = (unsafe { flow.as_mut() }) else {
            return fail_null("flow");
        };
        if let Some(t_last) = flow.blown_at {
            return fail_err(Error::BlowUp { t_last });
        }
        for _ in 0..steps {
            if let Err(e) = flow.flow.advance() {
                if let Error::BlowUp { t_last } = e {
                    flow.blown_at = Some(t_last);
                }
                return fail_err(e);
            }
        }
        GkdvStatus::Ok
    })
}

/// Elapsed simulation time of the flow.
///
/// # Safety
/// `flow` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_flow_time(flow: *const GkdvFlow, out: *mut f64) -> GkdvStatus {
    guarded(|| {
        let Some(flow) = (unsafe { flow.as_ref() }) else {
            return fail_null("flow");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, flow.flow.t())
    })
}

/// Copy the flow's current state into `buf`, which must hold at least as
/// many doubles as the initial field had nodes.
///
/// # Safety
/// `flow` must be a live handle; `buf` must be valid for writes of `cap`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn gkdv_flow_copy_state(
    flow: *const GkdvFlow,
    buf: *mut f64,
    cap: usize,
) -> GkdvStatus {
    guarded(|| {
        let Some(flow) = (unsafe { flow.as_ref() }) else {
            return fail_null("flow");
        };
        copy_slice("state", flow.flow.values(), buf, cap)
    })
}

/// Scalar diagnostics of the flow's current state at its current time.
///
/// # Safety
/// `flow` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_flow_sample(
    flow: *const GkdvFlow,
    out: *mut GkdvSample,
) -> GkdvStatus {
    guarded(|| {
        let Some(flow) = (unsafe { flow.as_ref() }) else {
            return fail_null("flow");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, field_sample(flow.flow.t(), &flow.flow.field()).into())
    })
}

/// Load a scenario from a TOML file, integrate it, and optionally write the
/// artifact bundle.
///
/// `artifact_dir` may be `NULL` to skip writing artifacts. A run that ends
/// in blow-up still returns `GKDV_STATUS_OK` with a usable handle; query the
/// outcome with [`gkdv_run_status`]. Errors (unreadable file, invalid
/// configuration) return without writing `out`.
///
/// # Safety
/// `config_path` must point to a NUL-terminated string; `artifact_dir` must
/// be `NULL` or NUL-terminated; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_run_scenario(
    config_path: *const c_char,
    artifact_dir: *const c_char,
    out: *mut *mut GkdvRun,
) -> GkdvStatus {
    guarded(|| {
        if out.is_null() {
            return fail_null("out");
        }
        let path = match unsafe { utf8_arg("config_path", config_path) } {
            Ok(p) => PathBuf::from(p),
            Err(status) => return status,
        };
        let dir = if artifact_dir.is_null() {
            None
        } else {
            match unsafe { utf8_arg("artifact_dir", artifact_dir) } {
                Ok(d) => Some(PathBuf::from(d)),
                Err(status) => return status,
            }
        };
        let resolved = match ScenarioConfig::from_path(&path).and_then(|c| c.resolve()) {
            Ok(r) => r,
            Err(e) => return fail_err(e),
        };
        let artifacts = match run_scenario(resolved) {
            Ok(a) => a,
            Err(e) => return fail_err(e),
        };
        if let Some(dir) = dir {
            if let Err(e) = write_scenario_artifacts(&dir, &artifacts) {
                return fail_err(e);
            }
        }
        write_out(out, Box::into_raw(Box::new(GkdvRun(artifacts))))
    })
}

/// Release a run handle; `NULL` is ignored.
///
/// # Safety
/// `run` must be `NULL` or an unfreed pointer from [`gkdv_run_scenario`].
#[no_mangle]
pub unsafe extern "C" fn gkdv_run_free(run: *mut GkdvRun) {
    unsafe { free_handle(run) }
}

/// Outcome of a finished run: whether it reached its horizon, and the last
/// valid simulation time (the horizon when `completed`, the blow-up time
/// otherwise).
///
/// # Safety
/// `run` must be a live handle; `completed` and `t_last` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_run_status(
    run: *const GkdvRun,
    completed: *mut bool,
    t_last: *mut f64,
) -> GkdvStatus {
    guarded(|| {
        let Some(run) = (unsafe { run.as_ref() }) else {
            return fail_null("run");
        };
        if completed.is_null() {
            return fail_null("completed");
        }
        if t_last.is_null() {
            return fail_null("t_last");
        }
        let (done, last) = match run.0.status {
            RunStatus::Completed => (true, run.0.primary.last().map_or(0.0, |s| s.t)),
            RunStatus::BlowUp { t_last } => (false, t_last),
        };
        unsafe {
            completed.write(done);
            t_last.write(last);
        }
        GkdvStatus::Ok
    })
}

/// Number of diagnostic samples the run recorded.
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_run_sample_count(run: *const GkdvRun, out: *mut usize) -> GkdvStatus {
    guarded(|| {
        let Some(run) = (unsafe { run.as_ref() }) else {
            return fail_null("run");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, run.0.primary.len())
    })
}

/// Fetch the diagnostic sample at `index` (0-based, in time order).
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_run_sample(
    run: *const GkdvRun,
    index: usize,
    out: *mut GkdvSample,
) -> GkdvStatus {
    guarded(|| {
        let Some(run) = (unsafe { run.as_ref() }) else {
            return fail_null("run");
        };
        if out.is_null() {
            return fail_null("out");
        }
        match run.0.primary.get(index) {
            Some(sample) => write_out(out, (*sample).into()),
            None => fail(
                GkdvStatus::InvalidArgument,
                format!(
                    "sample index {index} out of range; the run has {}",
                    run.0.primary.len()
                ),
            ),
        }
    })
}

/// Wall-clock seconds the integration took.
///
/// # Safety
/// `run` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gkdv_run_wall_seconds(run: *const GkdvRun, out: *mut f64) -> GkdvStatus {
    guarded(|| {
        let Some(run) = (unsafe { run.as_ref() }) else {
            return fail_null("run");
        };
        if out.is_null() {
            return fail_null("out");
        }
        write_out(out, run.0.wall_seconds)
    })
}
