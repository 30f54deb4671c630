//! Exercises the C ABI from the Rust side (status codes, error paths,
//! handle life cycles) and, when a C compiler is available, compiles and
//! runs a small C program against the generated header and shared library.

use std::ffi::{c_char, CString};
use std::path::PathBuf;
use std::ptr;

use gkdv_ffi::*;
use tempfile::TempDir;

fn last_error() -> String {
    let needed = unsafe { gkdv_last_error(ptr::null_mut(), 0) };
    let mut buf = vec![0u8; needed + 1];
    unsafe { gkdv_last_error(buf.as_mut_ptr() as *mut c_char, buf.len()) };
    buf.truncate(needed);
    String::from_utf8(buf).unwrap()
}

fn model(coeffs: &[f64]) -> *mut GkdvModel {
    let mut out = ptr::null_mut();
    let status = unsafe { gkdv_model_new(coeffs.as_ptr(), coeffs.len(), 1.0, &mut out) };
    assert_eq!(status, GkdvStatus::Ok, "{}", last_error());
    out
}

fn soliton(k: u32, c: f64, half_width: f64, points: usize) -> *mut GkdvField {
    let mut out = ptr::null_mut();
    let status = unsafe { gkdv_field_soliton(k, c, 0.0, half_width, points, &mut out) };
    assert_eq!(status, GkdvStatus::Ok, "{}", last_error());
    out
}

#[test]
fn version_is_a_static_utf8_string() {
    let ptr = gkdv_version();
    assert!(!ptr.is_null());
    let v = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn error_messages_round_trip_through_small_buffers() {
    let status = unsafe { gkdv_soliton_h2(7, 0.5, ptr::null_mut()) };
    assert_eq!(status, GkdvStatus::NullPointer);
    let msg = last_error();
    assert!(msg.contains("out"), "{msg}");

    // A two-byte buffer yields one byte of message plus the terminator,
    // while the return value still reports the full length.
    let mut tiny = [0u8; 2];
    let needed = unsafe { gkdv_last_error(tiny.as_mut_ptr() as *mut c_char, tiny.len()) };
    assert_eq!(needed, msg.len());
    assert_eq!(tiny[0], msg.as_bytes()[0]);
    assert_eq!(tiny[1], 0);
}

#[test]
fn model_evaluates_its_polynomial() {
    let m = model(&[1.0, 0.0, 0.02]);
    let mut degree = 0u32;
    assert_eq!(unsafe { gkdv_model_degree(m, &mut degree) }, GkdvStatus::Ok);
    assert_eq!(degree, 3);
    let mut value = 0.0;
    assert_eq!(
        unsafe { gkdv_model_eval(m, 0.5, &mut value) },
        GkdvStatus::Ok
    );
    assert!((value - (0.5 + 0.02 * 0.125)).abs() < 1e-15);
    unsafe { gkdv_model_free(m) };

    let mut out = ptr::null_mut();
    let status = unsafe { gkdv_model_new(ptr::null(), 0, 1.0, &mut out) };
    assert_eq!(status, GkdvStatus::NullPointer);
    let status = unsafe { gkdv_model_new([0.0].as_ptr(), 1, 1.0, &mut out) };
    assert_eq!(status, GkdvStatus::InvalidArgument, "{}", last_error());
}

#[test]
fn bounds_report_serializes_to_json() {
    let m = model(&[0.0, 1.0]);
    let mut json = ptr::null_mut();
    let status = unsafe { gkdv_model_bounds_json(m, 0.1, 1.0, &mut json) };
    assert_eq!(status, GkdvStatus::Ok, "{}", last_error());
    let text = unsafe { std::ffi::CStr::from_ptr(json) }.to_str().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(text).unwrap();
    assert_eq!(parsed["k"], 2);
    assert!(parsed["h2_initial"].is_f64());
    unsafe { gkdv_string_free(json) };
    unsafe { gkdv_model_free(m) };
}

#[test]
fn soliton_field_matches_the_closed_form_norm() {
    let mut closed = 0.0;
    assert_eq!(
        unsafe { gkdv_soliton_h2(2, 0.2, &mut closed) },
        GkdvStatus::Ok
    );

    let f = soliton(2, 0.2, 40.0, 512);
    let mut len = 0usize;
    assert_eq!(unsafe { gkdv_field_len(f, &mut len) }, GkdvStatus::Ok);
    assert_eq!(len, 512);

    let mut sample = GkdvSample::default();
    assert_eq!(
        unsafe { gkdv_field_sample(f, 3.0, &mut sample) },
        GkdvStatus::Ok
    );
    assert_eq!(sample.t, 3.0);
    assert!(
        (sample.h2 - closed).abs() / closed < 1e-9,
        "h2 {} vs closed form {closed}",
        sample.h2
    );

    // Copying into a short buffer is rejected; an exact one succeeds and
    // reproduces the peak at the center.
    let mut short = vec![0.0; len - 1];
    assert_eq!(
        unsafe { gkdv_field_copy_values(f, short.as_mut_ptr(), short.len()) },
        GkdvStatus::InvalidArgument
    );
    let mut values = vec![0.0; len];
    let mut points = vec![0.0; len];
    assert_eq!(
        unsafe { gkdv_field_copy_values(f, values.as_mut_ptr(), len) },
        GkdvStatus::Ok
    );
    assert_eq!(
        unsafe { gkdv_field_copy_points(f, points.as_mut_ptr(), len) },
        GkdvStatus::Ok
    );
    let center = points.iter().position(|&x| x == 0.0).unwrap();
    let amplitude = (6.0f64 * 0.2).sqrt();
    assert!((values[center] - amplitude).abs() < 1e-12);
    unsafe { gkdv_field_free(f) };

    assert_eq!(
        unsafe { gkdv_soliton_h2(7, 0.5, &mut closed) },
        GkdvStatus::InvalidArgument
    );
    assert!(last_error().contains("k = 7"), "{}", last_error());
}

#[test]
fn field_from_values_validates_and_round_trips() {
    let raw: Vec<f64> = (0..64).map(|i| (i as f64 * 0.1).sin()).collect();
    let mut f = ptr::null_mut();
    assert_eq!(
        unsafe { gkdv_field_from_values(10.0, raw.as_ptr(), raw.len(), &mut f) },
        GkdvStatus::Ok
    );
    let mut copied = vec![0.0; raw.len()];
    assert_eq!(
        unsafe { gkdv_field_copy_values(f, copied.as_mut_ptr(), copied.len()) },
        GkdvStatus::Ok
    );
    assert_eq!(raw, copied);
    unsafe { gkdv_field_free(f) };

    let bad = [1.0, f64::NAN];

    let mut out = ptr::null_mut();
    let status = unsafe { gkdv_field_from_values(10.0, bad.as_ptr(), bad.len(), &mut out) };
    assert_eq!(status, GkdvStatus::InvalidArgument);
}

#[test]
fn flow_advances_a_soliton_at_its_speed() {
    let m = model(&[1.0]);
    let f = soliton(1, 0.3, 30.0, 256);
    let mut start = GkdvSample::default();
    assert_eq!(
        unsafe { gkdv_field_sample(f, 0.0, &mut start) },
        GkdvStatus::Ok
    );

    let mut flow = ptr::null_mut();
    assert_eq!(
        unsafe { gkdv_flow_new(m, f, 0.01, &mut flow) },
        GkdvStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(unsafe { gkdv_flow_advance(flow, 100) }, GkdvStatus::Ok);

    let mut t = 0.0;
    assert_eq!(unsafe { gkdv_flow_time(flow, &mut t) }, GkdvStatus::Ok);
    assert!((t - 1.0).abs() < 1e-12);

    let mut sample = GkdvSample::default();
    assert_eq!(
        unsafe { gkdv_flow_sample(flow, &mut sample) },
        GkdvStatus::Ok
    );
    assert_eq!(sample.t, t);
    // The wave travels at its speed with invariants intact.
    assert!(
        (sample.peak_x - 0.3).abs() < 0.01,
        "peak at {}",
        sample.peak_x
    );
    assert!((sample.mass - start.mass).abs() < 1e-10);
    assert!((sample.momentum - start.momentum).abs() < 1e-10);

    let mut state = vec![0.0; 256];
    assert_eq!(
        unsafe { gkdv_flow_copy_state(flow, state.as_mut_ptr(), state.len()) },
        GkdvStatus::Ok
    );
    assert!(state.iter().all(|v| v.is_finite()));

    unsafe { gkdv_flow_free(flow) };
    unsafe { gkdv_field_free(f) };
    unsafe { gkdv_model_free(m) };
}

#[test]
fn flow_blow_up_latches_and_keeps_the_last_valid_state() {
    let m = model(&[0.0, 0.0, 0.0, 0.0, 1.0]);
    let f = soliton(5, 4.0, 10.0, 64);
    let mut flow = ptr::null_mut();
    assert_eq!(
        unsafe { gkdv_flow_new(m, f, 0.5, &mut flow) },
        GkdvStatus::Ok,
        "{}",
        last_error()
    );

    assert_eq!(unsafe { gkdv_flow_advance(flow, 500) }, GkdvStatus::BlowUp);
    assert!(last_error().contains("last valid time"), "{}", last_error());

    let mut t = f64::NAN;
    assert_eq!(unsafe { gkdv_flow_time(flow, &mut t) }, GkdvStatus::Ok);
    assert!(t.is_finite() && t < 250.0);

    let mut state = vec![f64::NAN; 64];
    assert_eq!(
        unsafe { gkdv_flow_copy_state(flow, state.as_mut_ptr(), state.len()) },
        GkdvStatus::Ok
    );
    assert!(state.iter().all(|v| v.is_finite()));

    // Further advances are rejected without disturbing the state.
    assert_eq!(unsafe { gkdv_flow_advance(flow, 1) }, GkdvStatus::BlowUp);
    let mut after = vec![f64::NAN; 64];
    assert_eq!(
        unsafe { gkdv_flow_copy_state(flow, after.as_mut_ptr(), after.len()) },
        GkdvStatus::Ok
    );
    assert_eq!(state, after);

    unsafe { gkdv_flow_free(flow) };
    unsafe { gkdv_field_free(f) };
    unsafe { gkdv_model_free(m) };
}

const SCENARIO: &str = r#"
name = "abi_small"

[grid]
half_width = 30.0
points = 128

[model]
a = [1.0]

[initial]
kind = "soliton"
k = 1
c = 0.3
x0 = 0.0

[time]
t_end = 1.0
dt = 0.02

[diagnostics]
stride = 10
"#;

#[test]
fn scenario_runs_from_toml_and_writes_artifacts() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("scenario.toml");
    std::fs::write(&config, SCENARIO).unwrap();
    let artifact_dir = tmp.path().join("artifacts");

    let c_config = CString::new(config.to_str().unwrap()).unwrap();
    let c_dir = CString::new(artifact_dir.to_str().unwrap()).unwrap();
    let mut run = ptr::null_mut();
    let status = unsafe { gkdv_run_scenario(c_config.as_ptr(), c_dir.as_ptr(), &mut run) };
    assert_eq!(status, GkdvStatus::Ok, "{}", last_error());

    let mut completed = false;
    let mut t_last = 0.0;
    assert_eq!(
        unsafe { gkdv_run_status(run, &mut completed, &mut t_last) },
        GkdvStatus::Ok
    );
    assert!(completed);
    assert!((t_last - 1.0).abs() < 1e-12);

    let mut count = 0usize;
    assert_eq!(
        unsafe { gkdv_run_sample_count(run, &mut count) },
        GkdvStatus::Ok
    );
    assert!(count >= 2, "only {count} samples");

    let mut first = GkdvSample::default();
    let mut last = GkdvSample::default();
    assert_eq!(
        unsafe { gkdv_run_sample(run, 0, &mut first) },
        GkdvStatus::Ok
    );
    assert_eq!(
        unsafe { gkdv_run_sample(run, count - 1, &mut last) },
        GkdvStatus::Ok
    );
    assert_eq!(first.t, 0.0);
    assert!(last.t > first.t);
    assert_eq!(
        unsafe { gkdv_run_sample(run, count, &mut last) },
        GkdvStatus::InvalidArgument
    );

    let mut wall = 0.0;
    assert_eq!(
        unsafe { gkdv_run_wall_seconds(run, &mut wall) },
        GkdvStatus::Ok
    );
    assert!(wall > 0.0);

    assert!(artifact_dir.join("diagnostics.csv").exists());
    assert!(artifact_dir.join("resolved_config.toml").exists());
    unsafe { gkdv_run_free(run) };
}

#[test]
fn scenario_errors_map_to_statuses() {
    let missing = CString::new("/nonexistent/config.toml").unwrap();
    let mut run = ptr::null_mut();
    let status = unsafe { gkdv_run_scenario(missing.as_ptr(), ptr::null(), &mut run) };
    assert_eq!(status, GkdvStatus::Io, "{}", last_error());

    let status = unsafe { gkdv_run_scenario(ptr::null(), ptr::null(), &mut run) };
    assert_eq!(status, GkdvStatus::NullPointer);

    let invalid = [0xFFu8, 0];
    let status =
        unsafe { gkdv_run_scenario(invalid.as_ptr() as *const c_char, ptr::null(), &mut run) };
    assert_eq!(status, GkdvStatus::InvalidUtf8);
}

/// Compiles `examples/demo.c`-style usage directly against the generated
/// header and the freshly built shared library, then runs it.
#[test]
fn c_client_compiles_links_and_runs() {
    let cc = match ["cc", "gcc", "clang"].iter().find(|cc| which(cc).is_some()) {
        Some(cc) => *cc,
        None => {
            eprintln!("no C compiler found; skipping the C client check");
            return;
        }
    };

    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    // The shared library lands next to the test binary's parent directory.
    let lib_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = lib_dir.join("libgkdv_ffi.so");
    assert!(lib.exists(), "cdylib not found at {}", lib.display());

    let tmp = TempDir::new().unwrap();
    let source = tmp.path().join("client.c");
    std::fs::write(&source, C_CLIENT).unwrap();
    let exe = tmp.path().join("client");

    let compile = std::process::Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&source)
        .arg("-o")
        .arg(&exe)
        .arg(format!("-L{}", lib_dir.display()))
        .arg("-lgkdv_ffi")
        .arg("-lm")
        .output()
        .expect("launching the C compiler");
    assert!(
        compile.status.success(),
        "compile failed:\n{}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = std::process::Command::new(&exe)
        .env("LD_LIBRARY_PATH", &lib_dir)
        .output()
        .expect("launching the C client");
    assert!(
        run.status.success(),
        "client exited with {:?}:\n{}",
        run.status.code(),
        String::from_utf8_lossy(&run.stdout)
    );
}

fn which(name: &str) -> Option<PathBuf> {
    std::env::var_os("PATH").and_then(|paths| {
        std::env::split_paths(&paths)
            .map(|dir| dir.join(name))
            .find(|p| p.is_file())
    })
}

const C_CLIENT: &str = r#"
#include <stdio.h>
#include <string.h>
#include "gkdv.h"

static int check(GkdvStatus status, const char *what) {
    if (status != GKDV_STATUS_OK) {
        char msg[256];
        gkdv_last_error(msg, sizeof msg);
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)status, msg);
        return 1;
    }
    return 0;
}

int main(void) {
    if (strlen(gkdv_version()) == 0) return 1;

    double closed = 0.0;
    if (check(gkdv_soliton_h2(2, 0.2, &closed), "closed form")) return 2;

    double coeffs[1] = {1.0};
    GkdvModel *model = NULL;
    if (check(gkdv_model_new(coeffs, 1, 1.0, &model), "model")) return 3;

    GkdvField *field = NULL;
    if (check(gkdv_field_soliton(1, 0.3, 0.0, 30.0, 256, &field), "field")) return 4;

    GkdvFlow *flow = NULL;
    if (check(gkdv_flow_new(model, field, 0.01, &flow), "flow")) return 5;
    if (check(gkdv_flow_advance(flow, 100), "advance")) return 6;

    GkdvSample sample;
    if (check(gkdv_flow_sample(flow, &sample), "sample")) return 7;
    if (!(sample.t > 0.99 && sample.t < 1.01)) return 8;
    if (!(sample.peak_x > 0.25 && sample.peak_x < 0.35)) return 9;

    gkdv_flow_free(flow);
    gkdv_field_free(field);
    gkdv_model_free(model);
    return 0;
}
"#;
