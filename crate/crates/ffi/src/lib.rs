//! C ABI over the taprig core. Handles are opaque pointers owned by the
//! library; every fallible call returns a [`TaprigStatus`] and leaves a
//! human-readable message retrievable via [`taprig_last_error`] on failure.
//!
//! Strings returned through out-parameters are heap-allocated by this
//! library and must be released with [`taprig_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::sync::Arc;

use taprig_core::arm::calibration::{fit_calibration, WsPoint};
use taprig_core::bench::metrics::{success_rate, TaskOutcome};
use taprig_core::geom::PxPoint;
use taprig_core::sim::env::{Environment, ResetOrigin};
use taprig_core::sim::gesture::TouchTrace;
use taprig_core::sim::pack::load_pack;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaprigStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidInput = 5,
    OutOfReach = 6,
    Internal = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: impl std::fmt::Display) {
    let msg = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap());
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn taprig_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn taprig_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string allocated by this library.
///
/// # Safety
/// `s` must be a pointer previously returned through a `char**` out
/// parameter of this library, not yet freed. NULL is accepted.
#[no_mangle]
pub unsafe extern "C" fn taprig_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Opaque simulator environment handle.
pub struct TaprigEnv {
    inner: Environment,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, TaprigStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(TaprigStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        TaprigStatus::InvalidUtf8
    })
}

fn give_string(s: String, out: *mut *mut c_char) -> TaprigStatus {
    match CString::new(s.replace('\0', " ")) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            TaprigStatus::Ok
        }
        Err(e) => {
            set_error(e);
            TaprigStatus::Internal
        }
    }
}

/// Load a screen pack and create an environment positioned at its home
/// screen. On success `*out_env` owns the handle; release it with
/// [`taprig_env_free`].
///
/// # Safety
/// `pack_path` must be a valid NUL-terminated string; `out_env` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn taprig_env_load(
    pack_path: *const c_char,
    out_env: *mut *mut TaprigEnv,
) -> TaprigStatus {
    if out_env.is_null() {
        set_error("out_env is null");
        return TaprigStatus::NullArgument;
    }
    let path = match read_str(pack_path) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match load_pack(path) {
        Ok(pack) => {
            let env = Environment::new(Arc::clone(&pack));
            *out_env = Box::into_raw(Box::new(TaprigEnv { inner: env }));
            TaprigStatus::Ok
        }
        Err(e) => {
            set_error(&e);
            match e {
                taprig_core::sim::pack::PackError::Io(_) => TaprigStatus::Io,
                _ => TaprigStatus::Parse,
            }
        }
    }
}

/// Release an environment handle.
///
/// # Safety
/// `env` must come from [`taprig_env_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn taprig_env_free(env: *mut TaprigEnv) {
    if !env.is_null() {
        drop(Box::from_raw(env));
    }
}

unsafe fn env_mut<'a>(env: *mut TaprigEnv) -> Result<&'a mut Environment, TaprigStatus> {
    if env.is_null() {
        set_error("null environment handle");
        return Err(TaprigStatus::NullArgument);
    }
    Ok(&mut (*env).inner)
}

/// Reset to the phone home screen, restoring declared variable values.
///
/// # Safety
/// `env` must be a live handle from [`taprig_env_load`].
#[no_mangle]
pub unsafe extern "C" fn taprig_env_reset_phone_home(env: *mut TaprigEnv) -> TaprigStatus {
    let env = match env_mut(env) {
        Ok(e) => e,
        Err(s) => return s,
    };
    match env.reset(&ResetOrigin::PhoneHome) {
        Ok(()) => TaprigStatus::Ok,
        Err(e) => {
            set_error(e);
            TaprigStatus::InvalidInput
        }
    }
}

/// Reset to an app's home screen.
///
/// # Safety
/// `env` must be a live handle; `app_id` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn taprig_env_reset_app_home(
    env: *mut TaprigEnv,
    app_id: *const c_char,
) -> TaprigStatus {
    let app = match read_str(app_id) {
        Ok(a) => a.to_string(),
        Err(s) => return s,
    };
    let env = match env_mut(env) {
        Ok(e) => e,
        Err(s) => return s,
    };
    match env.reset(&ResetOrigin::AppHome { app_id: app }) {
        Ok(()) => TaprigStatus::Ok,
        Err(e) => {
            set_error(e);
            TaprigStatus::InvalidInput
        }
    }
}

/// Observe the current screen as a JSON document (step index, raster
/// reference, scene graph, dims). The returned string must be freed with
/// [`taprig_string_free`].
///
/// # Safety
/// `env` must be a live handle; `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn taprig_env_observe_json(
    env: *mut TaprigEnv,
    out_json: *mut *mut c_char,
) -> TaprigStatus {
    if out_json.is_null() {
        set_error("out_json is null");
        return TaprigStatus::NullArgument;
    }
    let env = match env_mut(env) {
        Ok(e) => e,
        Err(s) => return s,
    };
    let obs = env.observe();
    match serde_json::to_string(&obs) {
        Ok(json) => give_string(json, out_json),
        Err(e) => {
            set_error(e);
            TaprigStatus::Internal
        }
    }
}

/// Dispatch a single tap at integer pixel coordinates. `out_changed`, when
/// non-null, reports whether the visible state changed.
///
/// # Safety
/// `env` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn taprig_env_tap(
    env: *mut TaprigEnv,
    x: i32,
    y: i32,
    out_changed: *mut bool,
) -> TaprigStatus {
    let env = match env_mut(env) {
        Ok(e) => e,
        Err(s) => return s,
    };
    let trace = TouchTrace::tap(PxPoint::new(x as f64, y as f64));
    match env.dispatch_touch(&trace) {
        Ok(result) => {
            if !out_changed.is_null() {
                *out_changed = result.changed;
            }
            TaprigStatus::Ok
        }
        Err(e) => {
            set_error(e);
            TaprigStatus::InvalidInput
        }
    }
}

/// Dispatch a straight-line contact swipe between two pixel points.
///
/// # Safety
/// `env` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn taprig_env_swipe(
    env: *mut TaprigEnv,
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
    out_changed: *mut bool,
) -> TaprigStatus {
    let env = match env_mut(env) {
        Ok(e) => e,
        Err(s) => return s,
    };
    let trace = TouchTrace::swipe_line(PxPoint::new(x1, y1), PxPoint::new(x2, y2), 12);
    match env.dispatch_touch(&trace) {
        Ok(result) => {
            if !out_changed.is_null() {
                *out_changed = result.changed;
            }
            TaprigStatus::Ok
        }
        Err(e) => {
            set_error(e);
            TaprigStatus::InvalidInput
        }
    }
}

/// Current screen id; free the string with [`taprig_string_free`].
///
/// # Safety
/// `env` must be a live handle; `out_screen` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn taprig_env_current_screen(
    env: *mut TaprigEnv,
    out_screen: *mut *mut c_char,
) -> TaprigStatus {
    if out_screen.is_null() {
        set_error("out_screen is null");
        return TaprigStatus::NullArgument;
    }
    let env = match env_mut(env) {
        Ok(e) => e,
        Err(s) => return s,
    };
    give_string(env.current_screen_id().to_string(), out_screen)
}

/// Success rate over exact counts: `successes / total`.
#[no_mangle]
pub extern "C" fn taprig_success_rate(
    successes: u32,
    total: u32,
    out_ratio: *mut f64,
) -> TaprigStatus {
    if out_ratio.is_null() {
        set_error("out_ratio is null");
        return TaprigStatus::NullArgument;
    }
    if successes > total {
        set_error("successes exceed total");
        return TaprigStatus::InvalidInput;
    }
    let outcomes: Vec<TaskOutcome> = (0..total)
        .map(|i| TaskOutcome {
            task_id: format!("t{i}"),
            success: i < successes,
            agent_steps_successful: if i < successes { 1 } else { 0 },
            agent_steps_total: 1,
            diagnostics: None,
        })
        .collect();
    match success_rate(&outcomes) {
        Ok(sr) => {
            unsafe { *out_ratio = sr.ratio };
            TaprigStatus::Ok
        }
        Err(e) => {
            set_error(e);
            TaprigStatus::InvalidInput
        }
    }
}

/// Least-squares affine calibration. `pixels_xy` and `workspace_xy` are
/// interleaved x,y arrays of `n_points` points each. Writes the row-major
/// 2x3 affine into `out_affine` and the max fit error into `out_residual`.
///
/// # Safety
/// The arrays must hold at least `2 * n_points` doubles; `out_affine` at
/// least 6.
#[no_mangle]
pub unsafe extern "C" fn taprig_fit_calibration(
    pixels_xy: *const f64,
    workspace_xy: *const f64,
    n_points: usize,
    z_contact: f64,
    z_hover: f64,
    out_affine: *mut f64,
    out_residual: *mut f64,
) -> TaprigStatus {
    if pixels_xy.is_null() || workspace_xy.is_null() || out_affine.is_null() {
        set_error("null array argument");
        return TaprigStatus::NullArgument;
    }
    let pixels = std::slice::from_raw_parts(pixels_xy, n_points * 2);
    let workspace = std::slice::from_raw_parts(workspace_xy, n_points * 2);
    let corr: Vec<(PxPoint, WsPoint)> = (0..n_points)
        .map(|i| {
            (
                PxPoint::new(pixels[2 * i], pixels[2 * i + 1]),
                WsPoint::new(workspace[2 * i], workspace[2 * i + 1]),
            )
        })
        .collect();
    match fit_calibration(&corr, z_contact, z_hover) {
        Ok(map) => {
            std::ptr::copy_nonoverlapping(map.affine.as_ptr(), out_affine, 6);
            if !out_residual.is_null() {
                *out_residual = map.residual;
            }
            TaprigStatus::Ok
        }
        Err(e) => {
            set_error(&e);
            match e {
                taprig_core::arm::ArmError::OutOfReach { .. } => TaprigStatus::OutOfReach,
                _ => TaprigStatus::InvalidInput,
            }
        }
    }
}
