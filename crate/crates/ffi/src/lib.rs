//! C ABI over `oscint`. Every function returns an [`OscintStatus`]; on failure the message
//! is kept per thread and read with [`oscint_last_error_message`]. Fewnomials live behind
//! the opaque [`OscintFewnomial`] handle and strings returned to the caller are released
//! with [`oscint_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use oscint::decomposition::{default_window, good_components, BadSets};
use oscint::quadrature::{multiplier_sup, pv_multiplier, GridSpec};
use oscint::{Error, Fewnomial};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscintStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed fewnomial or argument (lengths, exponents, zero or non-finite values).
    InvalidInput = 2,
    Parse = 3,
    Overflow = 4,
    ToleranceNotMet = 5,
    InvalidTolerance = 6,
    /// The zero phase where a nonzero one is needed.
    DegeneratePhase = 7,
    /// Internal failure; the library state is unaffected.
    Panic = 8,
}

/// Opaque fewnomial handle.
pub struct OscintFewnomial(Fewnomial);

/// One multiplier value with its absolute error bound.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OscintSample {
    pub re: f64,
    pub im: f64,
    pub abs_err: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OscintStatus {
    match e {
        Error::Overflow => OscintStatus::Overflow,
        Error::ToleranceNotMet { .. } => OscintStatus::ToleranceNotMet,
        Error::InvalidTolerance(_) => OscintStatus::InvalidTolerance,
        Error::DegeneratePhase => OscintStatus::DegeneratePhase,
        Error::Parse(_) => OscintStatus::Parse,
        _ => OscintStatus::InvalidInput,
    }
}

/// Runs `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (OscintStatus, String)>) -> OscintStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            OscintStatus::Ok
        }
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            OscintStatus::Panic
        }
    }
}

fn lib(e: Error) -> (OscintStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (OscintStatus, String) {
    (OscintStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a>(q: *const OscintFewnomial) -> Result<&'a Fewnomial, (OscintStatus, String)> {
    q.as_ref().map(|h| &h.0).ok_or_else(|| null("fewnomial handle"))
}

fn boxed(q: Fewnomial) -> *mut OscintFewnomial {
    Box::into_raw(Box::new(OscintFewnomial(q)))
}

/// Message of the last failed call on this thread, or null after a successful one. The
/// pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn oscint_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn oscint_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds `Σ coeffs[j] t^{exponents[j]}` from `len` terms; `len = 0` gives the zero phase.
///
/// # Safety
/// `coeffs` and `exponents` must point to `len` readable values (or be null when `len` is 0)
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_fewnomial_new(
    coeffs: *const f64,
    exponents: *const u32,
    len: usize,
    out: *mut *mut OscintFewnomial,
) -> OscintStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (c, e) = if len == 0 {
            (Vec::new(), Vec::new())
        } else {
            if coeffs.is_null() || exponents.is_null() {
                return Err(null("coefficient or exponent array"));
            }
            (std::slice::from_raw_parts(coeffs, len).to_vec(), std::slice::from_raw_parts(exponents, len).to_vec())
        };
        let q = Fewnomial::new(c, e).map_err(lib)?;
        *out = boxed(q);
        Ok(())
    })
}

/// Parses `{"coeffs": [...], "exponents": [...]}`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_fewnomial_from_json(json: *const c_char, out: *mut *mut OscintFewnomial) -> OscintStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null("json or out"));
        }
        let s = CStr::from_ptr(json).to_str().map_err(|e| (OscintStatus::Parse, e.to_string()))?;
        *out = boxed(Fewnomial::from_json(s).map_err(lib)?);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `q` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oscint_fewnomial_free(q: *mut OscintFewnomial) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Number of terms.
///
/// # Safety
/// `q` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_fewnomial_len(q: *const OscintFewnomial, out: *mut usize) -> OscintStatus {
    guard(|| {
        let q = handle(q)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = q.len();
        Ok(())
    })
}

/// `Q^{(order)}(t)`.
///
/// # Safety
/// `q` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_fewnomial_eval(q: *const OscintFewnomial, t: f64, order: u32, out: *mut f64) -> OscintStatus {
    guard(|| {
        let q = handle(q)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = q.eval(t, order).map_err(lib)?;
        Ok(())
    })
}

/// JSON text of the fewnomial; release with [`oscint_string_free`].
///
/// # Safety
/// `q` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_fewnomial_to_json(q: *const OscintFewnomial, out: *mut *mut c_char) -> OscintStatus {
    guard(|| {
        let q = handle(q)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(q.to_json()).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// The multiplier `m(ξ)` to absolute accuracy `tol`.
///
/// # Safety
/// `q` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_pv_multiplier(q: *const OscintFewnomial, xi: f64, tol: f64, out: *mut OscintSample) -> OscintStatus {
    guard(|| {
        let q = handle(q)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = pv_multiplier(q, xi, tol).map_err(lib)?;
        *out = OscintSample { re: s.value.re, im: s.value.im, abs_err: s.abs_err_estimate };
        Ok(())
    })
}

/// `sup |m|` over the automatic frequency grid with `per_octave` points per octave
/// (0 selects the default); writes the sup and the frequency where it is attained.
///
/// # Safety
/// `q` must be a live handle; `sup` and `argmax_xi` writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_multiplier_sup(
    q: *const OscintFewnomial,
    per_octave: u32,
    tol: f64,
    sup: *mut f64,
    argmax_xi: *mut f64,
) -> OscintStatus {
    guard(|| {
        let q = handle(q)?;
        if sup.is_null() || argmax_xi.is_null() {
            return Err(null("sup or argmax_xi"));
        }
        let grid = if per_octave == 0 { GridSpec::default() } else { GridSpec::Auto { per_octave } };
        let r = multiplier_sup(q, &grid, tol).map_err(lib)?;
        *sup = r.sup;
        *argmax_xi = r.argmax_xi;
        Ok(())
    })
}

/// Bad scale sets and good components at comparability exponent `gamma`, as JSON with keys
/// `bad0`, `bad1`, `window`, `components`. Release with [`oscint_string_free`].
///
/// # Safety
/// `q` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn oscint_decompose_json(q: *const OscintFewnomial, gamma: u32, out: *mut *mut c_char) -> OscintStatus {
    guard(|| {
        let q = handle(q)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let frame = q.scale_frame().map_err(lib)?;
        let bad = BadSets::new(&frame, gamma).map_err(lib)?;
        let window = default_window(&frame, gamma).map_err(lib)?;
        let comps = good_components(&frame, gamma, window).map_err(lib)?;
        let v = serde_json::json!({ "gamma": gamma, "bad0": bad.level0, "bad1": bad.level1, "window": window, "components": comps });
        *out = CString::new(v.to_string()).expect("json has no nul").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn oscint_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
