//! C interface to `axdiv`.
//!
//! Every function returns an [`AxdivStatus`]; on failure the message is
//! available from [`axdiv_last_error`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`axdiv_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use axdiv::bounds::bound_report;
use axdiv::ffcount::{build_field, count_points};
use axdiv::hasse::{evaluate_at_variety, hasse_polynomial};
use axdiv::support::VarietySpec;
use axdiv::Error;

/// Opaque handle to a parsed variety description.
pub struct AxdivVariety {
    spec: VarietySpec,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxdivStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    InvalidArgument = 4,
    GuardExceeded = 5,
    MathFailure = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(e: &Error) -> AxdivStatus {
    match e {
        Error::Input { .. } | Error::Io(_) => AxdivStatus::InvalidInput,
        Error::InvalidArgument(_)
        | Error::NotPrime(_)
        | Error::UnsupportedDegree(..)
        | Error::NonUnitCoefficient { .. }
        | Error::DivisibleByPrime { .. }
        | Error::Precision(_) => AxdivStatus::InvalidArgument,
        Error::GuardExceeded { .. } => AxdivStatus::GuardExceeded,
        _ => AxdivStatus::MathFailure,
    }
}

/// Runs `f`, recording errors and panics.
fn guarded(f: impl FnOnce() -> Result<(), (AxdivStatus, String)>) -> AxdivStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AxdivStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside axdiv".into());
            AxdivStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (AxdivStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (AxdivStatus, String) {
    (AxdivStatus::NullPointer, format!("{name} is null"))
}

unsafe fn variety<'a>(v: *const AxdivVariety) -> Result<&'a AxdivVariety, (AxdivStatus, String)> {
    v.as_ref().ok_or_else(|| null("variety"))
}

/// Parses a JSON description into a new handle stored in `*out`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn axdiv_variety_from_json(json: *const c_char, out: *mut *mut AxdivVariety) -> AxdivStatus {
    guarded(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (AxdivStatus::InvalidUtf8, e.to_string()))?;
        let spec = VarietySpec::from_json_str(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(AxdivVariety { spec }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `v` must come from [`axdiv_variety_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn axdiv_variety_free(v: *mut AxdivVariety) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Number of variables and of polynomials.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn axdiv_variety_shape(v: *const AxdivVariety, n: *mut usize, r: *mut usize) -> AxdivStatus {
    guarded(|| {
        let v = variety(v)?;
        if n.is_null() || r.is_null() {
            return Err(null("out"));
        }
        *n = v.spec.system().n();
        *r = v.spec.system().r();
        Ok(())
    })
}

/// The Adolphson–Sperber exponent `μ`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn axdiv_mu(v: *const AxdivVariety, out: *mut i64) -> AxdivStatus {
    guarded(|| {
        let v = variety(v)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = axdiv::bounds::mu(v.spec.system()).map_err(lib_err)?.mu;
        Ok(())
    })
}

/// `|V(F_{p^a})|` by exhaustive evaluation.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn axdiv_count_points(v: *const AxdivVariety, p: u64, a: u32, out: *mut u64) -> AxdivStatus {
    guarded(|| {
        let v = variety(v)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let field = build_field(p, a).map_err(lib_err)?;
        *out = count_points(&v.spec, &field).map_err(lib_err)?;
        Ok(())
    })
}

/// The Hasse polynomial evaluated at the coefficients, modulo `p`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn axdiv_hasse_value(v: *const AxdivVariety, p: u64, a: u32, out: *mut u64) -> AxdivStatus {
    guarded(|| {
        let v = variety(v)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let h = hasse_polynomial(v.spec.system(), p, a).map_err(lib_err)?;
        *out = evaluate_at_variety(&h.poly, &v.spec).map_err(lib_err)?;
        Ok(())
    })
}

/// Bound report as a JSON string; `p = 0` omits the prime-dependent bound.
///
/// # Safety
/// Pointers must be valid; the string is released with [`axdiv_string_free`].
#[no_mangle]
pub unsafe extern "C" fn axdiv_bounds_json(v: *const AxdivVariety, p: u64, a: u32, out: *mut *mut c_char) -> AxdivStatus {
    guarded(|| {
        let v = variety(v)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let prime = (p != 0).then_some(p);
        let report = bound_report(v.spec.system(), prime, a).map_err(lib_err)?;
        let text = serde_json::to_string(&axdiv::harness::envelope("bounds", &report))
            .map_err(|e| (AxdivStatus::MathFailure, e.to_string()))?;
        *out = CString::new(text).expect("JSON has no nul").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn axdiv_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into the library on the same thread.
#[no_mangle]
pub extern "C" fn axdiv_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn axdiv_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
