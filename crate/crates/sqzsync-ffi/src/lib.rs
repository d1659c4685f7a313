// Copyright 2026 sqzsync Contributors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for the simulator core.
//!
//! Parameters travel through an opaque, heap-allocated handle created by
//! [`sqz_params_create`] and released by [`sqz_params_free`]. Every fallible
//! entry point returns an [`SqzStatus`] and writes results through caller
//! output pointers, which are touched only on `SQZ_STATUS_OK`. Computations
//! run behind a panic guard, so no unwinding ever crosses the C boundary.
//!
//! The matching header is generated into `include/sqzsync.h` at build time.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use sqzsync::cycle::{limit_cycle_radius, steady_theta};
use sqzsync::metrics::{epsilon_opt, husimi_q, steady_s_max};
use sqzsync::params::squeeze_db;
use sqzsync::{steady_state, SqzError, SystemParams};

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqzStatus {
    /// Success; the output pointers hold the results.
    Ok = 0,
    /// A parameter is outside the supported domain.
    InvalidParam = 1,
    /// A numerical routine failed.
    Numerical = 2,
    /// A required pointer was null.
    NullPointer = 3,
}

/// Opaque validated parameter set `(n, r, Phi, Delta, eps, gamma0)`.
pub struct SqzParams {
    inner: SystemParams,
}

fn status_of(e: &SqzError) -> SqzStatus {
    if e.is_usage() {
        SqzStatus::InvalidParam
    } else {
        SqzStatus::Numerical
    }
}

/// Runs a pure computation behind a panic guard; a panic reports as
/// `Numerical` instead of unwinding across the C boundary. Pointer writes
/// happen outside the guard, after the computation has succeeded.
fn guarded<T>(body: impl FnOnce() -> Result<T, SqzStatus>) -> Result<T, SqzStatus> {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(Err(SqzStatus::Numerical))
}

/// Validates parameters and writes a freshly allocated handle to `out`.
///
/// # Safety
/// `out` must point to writable memory for one pointer. On `SQZ_STATUS_OK`
/// the written handle owns heap memory and must be released exactly once
/// with [`sqz_params_free`]; on any other status nothing is written.
#[no_mangle]
pub unsafe extern "C" fn sqz_params_create(
    n: f64,
    r: f64,
    phi: f64,
    delta: f64,
    eps: f64,
    gamma0: f64,
    out: *mut *mut SqzParams,
) -> SqzStatus {
    if out.is_null() {
        return SqzStatus::NullPointer;
    }
    match guarded(|| {
        SystemParams::with_gamma0(n, r, phi, delta, eps, gamma0).map_err(|e| status_of(&e))
    }) {
        Ok(p) => {
            *out = Box::into_raw(Box::new(SqzParams { inner: p }));
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Releases a handle created by [`sqz_params_create`]. Passing null is a
/// no-op.
///
/// # Safety
/// `p` must be null or a handle obtained from [`sqz_params_create`] that has
/// not been freed before.
#[no_mangle]
pub unsafe extern "C" fn sqz_params_free(p: *mut SqzParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the derived reservoir quantities: effective occupation `N`,
/// squeezing correlation `M` (real and imaginary parts), and total decay
/// rate `gamma = gamma0 (2N + 1)`.
///
/// # Safety
/// `p` must be a live handle from [`sqz_params_create`]; the four output
/// pointers must each point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn sqz_derived_reservoir(
    p: *const SqzParams,
    n_eff: *mut f64,
    m_re: *mut f64,
    m_im: *mut f64,
    gamma: *mut f64,
) -> SqzStatus {
    if p.is_null() || n_eff.is_null() || m_re.is_null() || m_im.is_null() || gamma.is_null() {
        return SqzStatus::NullPointer;
    }
    let params = (*p).inner;
    match guarded(|| Ok(params.reservoir())) {
        Ok(res) => {
            *n_eff = res.n_eff;
            *m_re = res.m.re;
            *m_im = res.m.im;
            *gamma = res.gamma;
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Writes the steady-state Bloch vector of the driven, dissipative dynamics.
///
/// # Safety
/// `p` must be a live handle; `x`, `y`, `z` must each point to writable
/// memory for one double.
#[no_mangle]
pub unsafe extern "C" fn sqz_steady_state(
    p: *const SqzParams,
    x: *mut f64,
    y: *mut f64,
    z: *mut f64,
) -> SqzStatus {
    if p.is_null() || x.is_null() || y.is_null() || z.is_null() {
        return SqzStatus::NullPointer;
    }
    let params = (*p).inner;
    match guarded(|| steady_state(&params).map_err(|e| status_of(&e))) {
        Ok(v) => {
            *x = v.x;
            *y = v.y;
            *z = v.z;
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Writes the peak synchronization measure `S_max` of the steady state and
/// the locked phase `phi_star` (in `[0, 2 pi)`; 0 when there is no phase
/// preference).
///
/// # Safety
/// `p` must be a live handle; `value` and `phi_star` must each point to
/// writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn sqz_s_max(
    p: *const SqzParams,
    value: *mut f64,
    phi_star: *mut f64,
) -> SqzStatus {
    if p.is_null() || value.is_null() || phi_star.is_null() {
        return SqzStatus::NullPointer;
    }
    let params = (*p).inner;
    match guarded(|| steady_s_max(&params).map_err(|e| status_of(&e))) {
        Ok(peak) => {
            *value = peak.value;
            *phi_star = peak.phi_star;
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Writes the Husimi `Q` value of the steady state at spherical angles
/// `(theta, phi)`.
///
/// # Safety
/// `p` must be a live handle; `q` must point to writable memory for one
/// double.
#[no_mangle]
pub unsafe extern "C" fn sqz_husimi_q(
    p: *const SqzParams,
    theta: f64,
    phi: f64,
    q: *mut f64,
) -> SqzStatus {
    if p.is_null() || q.is_null() {
        return SqzStatus::NullPointer;
    }
    if !theta.is_finite() || !phi.is_finite() {
        return SqzStatus::InvalidParam;
    }
    let params = (*p).inner;
    let computed = guarded(|| {
        let v = steady_state(&params).map_err(|e| status_of(&e))?;
        Ok(husimi_q(&v, theta, phi))
    });
    match computed {
        Ok(value) => {
            *q = value;
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Writes the undriven limit-cycle latitude `theta_s` and its planar radius
/// `r_s = (1 + cos theta_s) / 2`.
///
/// # Safety
/// `p` must be a live handle; `theta_s_out` and `r_s_out` must each point to
/// writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn sqz_steady_theta(
    p: *const SqzParams,
    theta_s_out: *mut f64,
    r_s_out: *mut f64,
) -> SqzStatus {
    if p.is_null() || theta_s_out.is_null() || r_s_out.is_null() {
        return SqzStatus::NullPointer;
    }
    let params = (*p).inner;
    match guarded(|| Ok(steady_theta(params.reservoir().n_eff))) {
        Ok(theta) => {
            *theta_s_out = theta;
            *r_s_out = limit_cycle_radius(theta);
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Writes the drive strength maximizing `S_max` for the handle's reservoir
/// and detuning, together with the attained `S_max`.
///
/// # Safety
/// `p` must be a live handle; `eps_out` and `s_max_out` must each point to
/// writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn sqz_epsilon_opt(
    p: *const SqzParams,
    eps_out: *mut f64,
    s_max_out: *mut f64,
) -> SqzStatus {
    if p.is_null() || eps_out.is_null() || s_max_out.is_null() {
        return SqzStatus::NullPointer;
    }
    let params = (*p).inner;
    match guarded(|| epsilon_opt(&params).map_err(|e| status_of(&e))) {
        Ok(opt) => {
            *eps_out = opt.eps;
            *s_max_out = opt.s_max;
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Converts a squeezing strength `r` to decibels,
/// `10 log10(e^{2r}) = 20 r / ln 10`.
///
/// # Safety
/// `db` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn sqz_squeeze_db(r: f64, db: *mut f64) -> SqzStatus {
    if db.is_null() {
        return SqzStatus::NullPointer;
    }
    if !r.is_finite() || r < 0.0 {
        return SqzStatus::InvalidParam;
    }
    match guarded(|| Ok(squeeze_db(r))) {
        Ok(value) => {
            *db = value;
            SqzStatus::Ok
        }
        Err(status) => status,
    }
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sqz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
