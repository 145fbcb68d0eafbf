//! C ABI over the treenorm engines.
//!
//! Inputs and reports use the same JSON encodings as the command line tool.
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `*_free` function. Strings returned through `out_json` are
//! released with [`tn_string_free`]. After a nonzero status,
//! [`tn_last_error`] describes the failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use treenorm::duals::{dual_norm, DualFunctional, DualNormOptions};
use treenorm::rational::parse_q;
use treenorm::slices::{slice_diameter, SliceSpec};
use treenorm::spaces::{norm, SparseVector};
use treenorm::tree::SpaceKind;
use treenorm::{wire, Error};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TnStatus {
    Ok = 0,
    NullArgument = 1,
    Utf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    Precondition = 5,
    Unsupported = 6,
    LimitExceeded = 7,
    Certificate = 8,
    Panic = 9,
}

impl From<&Error> for TnStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parse(_) => TnStatus::Parse,
            Error::NotAChain { .. } | Error::InvalidNode { .. } => TnStatus::InvalidInput,
            Error::Precondition(_) | Error::Constraint(_) => TnStatus::Precondition,
            Error::Unsupported(_) => TnStatus::Unsupported,
            Error::CapExceeded { .. } | Error::LevelCap { .. } | Error::NoConvergence { .. } | Error::Unbounded => {
                TnStatus::LimitExceeded
            }
            Error::Certificate(_) => TnStatus::Certificate,
        }
    }
}

/// Finitely supported vector on tree nodes.
pub struct TnVector {
    inner: SparseVector,
    space: Option<SpaceKind>,
}

/// Linear combination of segment functionals, validated for one space.
pub struct TnFunctional {
    inner: DualFunctional,
    space: SpaceKind,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Status(TnStatus, String),
    Engine(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Engine(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TnStatus::Ok
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Fail::Engine(e))) => {
            set_error(e.to_string());
            TnStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            TnStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Status(TnStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Status(TnStatus::Utf8, format!("{what} is not UTF-8")))
}

unsafe fn space_arg(p: *const c_char, fallback: Option<SpaceKind>) -> Result<SpaceKind, Fail> {
    if p.is_null() {
        return fallback.ok_or_else(|| Fail::Status(TnStatus::NullArgument, "space is null".into()));
    }
    Ok(text(p, "space")?.parse::<SpaceKind>()?)
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(TnStatus::NullArgument, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_json(out: *mut *mut c_char, v: &serde_json::Value) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Status(TnStatus::NullArgument, "output pointer is null".into()));
    }
    let s = CString::new(serde_json::to_string(v).expect("json")).expect("json has no nul");
    *out = s.into_raw();
    Ok(())
}

unsafe fn check_out<T>(out: *mut *mut T) {
    if !out.is_null() {
        *out = ptr::null_mut();
    }
}

/// Parses `{"space"?, "entries": [{"node", "value"}]}` into a new vector.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tn_vector_from_json(json: *const c_char, out: *mut *mut TnVector) -> TnStatus {
    check_out(out);
    guard(|| {
        let (inner, space) = wire::parse_vector(text(json, "json")?)?;
        put(out, TnVector { inner, space })
    })
}

/// # Safety
/// `v` must come from [`tn_vector_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tn_vector_free(v: *mut TnVector) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Number of nonzero coordinates, 0 for a null handle.
///
/// # Safety
/// `v` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tn_vector_len(v: *const TnVector) -> usize {
    v.as_ref().map_or(0, |v| v.inner.len())
}

/// Norm report `{"value", "witness", ...}`. A null `space` uses the one
/// embedded in the vector.
///
/// # Safety
/// `v` must be a live handle, `space` null or a nul-terminated string,
/// `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn tn_vector_norm(v: *const TnVector, space: *const c_char, out_json: *mut *mut c_char) -> TnStatus {
    check_out(out_json);
    guard(|| {
        let v = v.as_ref().ok_or_else(|| Fail::Status(TnStatus::NullArgument, "vector is null".into()))?;
        let kind = space_arg(space, v.space)?;
        put_json(out_json, &wire::norm_json(&norm(&v.inner, kind)?))
    })
}

/// Parses `{"class"?, "terms": [{"coeff", "top", "bottom"}]}` for `space`.
///
/// # Safety
/// `json` and `space` must be nul-terminated strings; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tn_functional_from_json(
    json: *const c_char,
    space: *const c_char,
    out: *mut *mut TnFunctional,
) -> TnStatus {
    check_out(out);
    guard(|| {
        let kind = space_arg(space, None)?;
        let (inner, embedded) = wire::parse_functional(text(json, "json")?, kind)?;
        put(out, TnFunctional { inner, space: embedded.unwrap_or(kind) })
    })
}

/// # Safety
/// `g` must come from [`tn_functional_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tn_functional_free(g: *mut TnFunctional) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Certified dual norm report `{"lower", "upper", ...}`; `level_cap < 0`
/// uses the deepest level of the functional.
///
/// # Safety
/// `g` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn tn_dual_norm(g: *const TnFunctional, level_cap: i64, out_json: *mut *mut c_char) -> TnStatus {
    check_out(out_json);
    guard(|| {
        let g = g.as_ref().ok_or_else(|| Fail::Status(TnStatus::NullArgument, "functional is null".into()))?;
        let opts = DualNormOptions { level_cap: usize::try_from(level_cap).ok(), ..Default::default() };
        put_json(out_json, &wire::dual_norm_json(g.space, &dual_norm(&g.inner, g.space, &opts)?))
    })
}

/// Diameter report for the norming-set slice at `v` with rational `alpha`.
///
/// # Safety
/// `v` must be a live handle, `space` null or a nul-terminated string,
/// `alpha` a nul-terminated string, `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn tn_slice_diameter(
    v: *const TnVector,
    space: *const c_char,
    alpha: *const c_char,
    out_json: *mut *mut c_char,
) -> TnStatus {
    check_out(out_json);
    guard(|| {
        let v = v.as_ref().ok_or_else(|| Fail::Status(TnStatus::NullArgument, "vector is null".into()))?;
        let kind = space_arg(space, v.space)?;
        let alpha = parse_q(text(alpha, "alpha")?)?;
        let spec = SliceSpec::new(v.inner.clone(), alpha, kind);
        put_json(out_json, &wire::diameter_json(&slice_diameter(&spec, None)?))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn tn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static version string.
#[no_mangle]
pub extern "C" fn tn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
