// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exercises the C ABI end to end: handle lifecycle, status codes, output
//! values against the core library, and the generated header.

// Frozen reference values keep their full decimal expansions.
#![allow(clippy::excessive_precision)]

use std::ptr;

use sqzsync_ffi::{
    sqz_derived_reservoir, sqz_epsilon_opt, sqz_husimi_q, sqz_params_create, sqz_params_free,
    sqz_s_max, sqz_squeeze_db, sqz_steady_state, sqz_steady_theta, sqz_version, SqzParams,
    SqzStatus,
};

/// Creates a handle for valid parameters, panicking on failure.
fn handle(n: f64, r: f64, phi: f64, delta: f64, eps: f64) -> *mut SqzParams {
    let mut p: *mut SqzParams = ptr::null_mut();
    let status = unsafe { sqz_params_create(n, r, phi, delta, eps, 1.0, &mut p) };
    assert_eq!(status, SqzStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn steady_state_matches_the_core_library() {
    let p = handle(1.0, 1.5, 0.0, 0.0, 0.5);
    let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
    let status = unsafe { sqz_steady_state(p, &mut x, &mut y, &mut z) };
    assert_eq!(status, SqzStatus::Ok);
    let core = sqzsync::steady_state(&sqzsync::SystemParams::new(1.0, 1.5, 0.0, 0.0, 0.5).unwrap())
        .unwrap();
    assert_eq!(x.to_bits(), core.x.to_bits());
    assert_eq!(y.to_bits(), core.y.to_bits());
    assert_eq!(z.to_bits(), core.z.to_bits());
    unsafe { sqz_params_free(p) };
}

#[test]
fn derived_reservoir_and_cycle_geometry_round_trip() {
    let p = handle(0.0, 1.5, 0.0, 0.0, 0.0);
    let (mut n_eff, mut m_re, mut m_im, mut gamma) = (0.0, 0.0, 0.0, 0.0);
    assert_eq!(
        unsafe { sqz_derived_reservoir(p, &mut n_eff, &mut m_re, &mut m_im, &mut gamma) },
        SqzStatus::Ok
    );
    assert!((n_eff - 4.533830997888883).abs() <= 1e-12);
    assert!((m_re - (-5.008937463704951)).abs() <= 1e-12);
    assert_eq!(m_im, 0.0);
    assert!((gamma - 10.067661995777766).abs() <= 1e-12);

    let (mut theta_s, mut r_s) = (0.0, 0.0);
    assert_eq!(
        unsafe { sqz_steady_theta(p, &mut theta_s, &mut r_s) },
        SqzStatus::Ok
    );
    assert!((theta_s - 1.6702883124726005).abs() <= 1e-13);
    assert!((r_s - 0.45033603629028340).abs() <= 1e-13);
    unsafe { sqz_params_free(p) };
}

#[test]
fn synchronization_metrics_flow_through_the_abi() {
    let p = handle(0.0, 1.5, 0.0, 0.0, 0.5);
    let (mut s, mut phi_star) = (0.0, 0.0);
    assert_eq!(
        unsafe { sqz_s_max(p, &mut s, &mut phi_star) },
        SqzStatus::Ok
    );
    assert!((s - 0.12484526975792053).abs() <= 1e-12);
    assert!((phi_star - std::f64::consts::PI).abs() <= 1e-12);

    let mut q = 0.0;
    assert_eq!(
        unsafe { sqz_husimi_q(p, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, &mut q) },
        SqzStatus::Ok
    );
    // Q at the equator, opposite the drive: (1 + |x|) / 4 pi for this state.
    assert!(q > 0.15 && q < 0.16, "q = {q}");

    let (mut eps, mut s_at_opt) = (0.0, 0.0);
    assert_eq!(
        unsafe { sqz_epsilon_opt(p, &mut eps, &mut s_at_opt) },
        SqzStatus::Ok
    );
    assert!((eps - 0.5006193045060953).abs() <= 1e-9);
    assert!(s_at_opt > 0.12484526975792053 - 1e-12);
    unsafe { sqz_params_free(p) };
}

#[test]
fn invalid_parameters_report_without_writing_a_handle() {
    let mut p: *mut SqzParams = ptr::null_mut();
    let status = unsafe { sqz_params_create(-1.0, 0.0, 0.0, 0.0, 0.0, 1.0, &mut p) };
    assert_eq!(status, SqzStatus::InvalidParam);
    assert!(p.is_null(), "no handle may be written on failure");

    let status = unsafe { sqz_params_create(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, &mut p) };
    assert_eq!(status, SqzStatus::InvalidParam, "zero rate unit");
    assert!(p.is_null());
}

#[test]
fn null_pointers_are_rejected_not_dereferenced() {
    assert_eq!(
        unsafe { sqz_params_create(0.0, 0.0, 0.0, 0.0, 0.0, 1.0, ptr::null_mut()) },
        SqzStatus::NullPointer
    );
    let (mut x, mut y, mut z) = (0.0, 0.0, 0.0);
    assert_eq!(
        unsafe { sqz_steady_state(ptr::null(), &mut x, &mut y, &mut z) },
        SqzStatus::NullPointer
    );
    let p = handle(0.0, 0.0, 0.0, 0.0, 0.0);
    assert_eq!(
        unsafe { sqz_steady_state(p, ptr::null_mut(), &mut y, &mut z) },
        SqzStatus::NullPointer
    );
    let mut db = 0.0;
    assert_eq!(unsafe { sqz_squeeze_db(1.5, &mut db) }, SqzStatus::Ok);
    assert!((db - 13.028834457097555).abs() <= 1e-12);
    assert_eq!(
        unsafe { sqz_squeeze_db(-0.5, &mut db) },
        SqzStatus::InvalidParam
    );
    assert_eq!(
        unsafe { sqz_squeeze_db(1.5, ptr::null_mut()) },
        SqzStatus::NullPointer
    );
    // Freeing null is a documented no-op.
    unsafe { sqz_params_free(ptr::null_mut()) };
    unsafe { sqz_params_free(p) };
}

#[test]
fn version_is_a_static_nul_terminated_string() {
    let ptr = sqz_version();
    assert!(!ptr.is_null());
    let s = unsafe { std::ffi::CStr::from_ptr(ptr) };
    assert_eq!(s.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_declares_the_full_surface() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("sqzsync.h");
    let text = std::fs::read_to_string(&header).expect("build script generated the header");
    for symbol in [
        "SqzStatus",
        "SqzParams",
        "sqz_params_create",
        "sqz_params_free",
        "sqz_derived_reservoir",
        "sqz_steady_state",
        "sqz_s_max",
        "sqz_husimi_q",
        "sqz_steady_theta",
        "sqz_epsilon_opt",
        "sqz_squeeze_db",
        "sqz_version",
    ] {
        assert!(text.contains(symbol), "header lacks {symbol}");
    }
    assert!(text.contains("SQZSYNC_H"), "missing include guard");
}
