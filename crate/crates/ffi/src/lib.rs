//! C ABI for loading models, running verifications and computing residues.
//!
//! Handles are opaque. Strings returned to the caller are owned by the
//! caller and released with [`locidx_string_free`]. Every fallible call
//! returns a [`LocidxStatus`]; the message of the last failure on the
//! calling thread is available from [`locidx_last_error`].

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use locidx::harness::{render_text, residue_at_point, run_verification, Verdict, VerificationReport};
use locidx::parser::manifest::ModelBundle;
use locidx::parser::{parse_expression, parse_manifest};
use locidx::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocidxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Unsupported = 5,
    Internal = 6,
}

/// A parsed model manifest.
pub struct LocidxModel(ModelBundle);

/// The result of a verification run.
pub struct LocidxReport(VerificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LocidxStatus {
    match e {
        Error::Parse(_) | Error::UnknownVariable(_) => LocidxStatus::Parse,
        Error::Io { .. } => LocidxStatus::Io,
        _ => LocidxStatus::Unsupported,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (LocidxStatus, String)>) -> LocidxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LocidxStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal error".into());
            LocidxStatus::Internal
        }
    }
}

fn fail(e: Error) -> (LocidxStatus, String) {
    (status_of(&e), e.to_string())
}

/// # Safety
/// `p` is null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (LocidxStatus, String)> {
    if p.is_null() {
        return Err((LocidxStatus::NullPointer, format!("{} is null", what)));
    }
    // SAFETY: non-null and NUL-terminated by the caller's contract.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|_| (LocidxStatus::InvalidUtf8, format!("{} is not UTF-8", what)))
}

fn to_c(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn locidx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn locidx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses manifest text into a new model handle.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn locidx_model_parse(text: *const c_char, out: *mut *mut LocidxModel) -> LocidxStatus {
    guard(|| {
        if out.is_null() {
            return Err((LocidxStatus::NullPointer, "out is null".into()));
        }
        // SAFETY: forwarded caller contract.
        let text = unsafe { str_arg(text, "text") }?;
        let m = parse_manifest(text).map_err(fail)?;
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(Box::new(LocidxModel(m))) };
        Ok(())
    })
}

/// Reads and parses a manifest file.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn locidx_model_load(path: *const c_char, out: *mut *mut LocidxModel) -> LocidxStatus {
    guard(|| {
        if out.is_null() {
            return Err((LocidxStatus::NullPointer, "out is null".into()));
        }
        // SAFETY: forwarded caller contract.
        let path = unsafe { str_arg(path, "path") }?;
        let m = locidx::harness::load_model(std::path::Path::new(path)).map_err(fail)?;
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(Box::new(LocidxModel(m))) };
        Ok(())
    })
}

/// # Safety
/// `m` is null or a handle from `locidx_model_parse`/`locidx_model_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locidx_model_free(m: *mut LocidxModel) {
    if !m.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Runs the verification. Failing theorems still return `Ok` with a FAIL report.
///
/// # Safety
/// `m` is a live model handle; `out` points to writable storage.
#[no_mangle]
pub unsafe extern "C" fn locidx_verify(m: *const LocidxModel, out: *mut *mut LocidxReport) -> LocidxStatus {
    guard(|| {
        if m.is_null() || out.is_null() {
            return Err((LocidxStatus::NullPointer, "model or out is null".into()));
        }
        // SAFETY: live handle by contract.
        let r = run_verification(unsafe { &(*m).0 });
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = Box::into_raw(Box::new(LocidxReport(r))) };
        Ok(())
    })
}

/// 1 when the report's verdict is PASS, 0 otherwise (also for null).
///
/// # Safety
/// `r` is null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn locidx_report_passed(r: *const LocidxReport) -> i32 {
    if r.is_null() {
        return 0;
    }
    // SAFETY: live handle by contract.
    i32::from(unsafe { &(*r).0 }.verdict == Verdict::Pass)
}

/// Report as JSON; free with `locidx_string_free`. Null on a null handle.
///
/// # Safety
/// `r` is null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn locidx_report_json(r: *const LocidxReport) -> *mut c_char {
    if r.is_null() {
        return ptr::null_mut();
    }
    // SAFETY: live handle by contract.
    to_c(unsafe { &(*r).0 }.to_json())
}

/// Report as an aligned text table; free with `locidx_string_free`.
///
/// # Safety
/// `r` is null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn locidx_report_text(r: *const LocidxReport) -> *mut c_char {
    if r.is_null() {
        return ptr::null_mut();
    }
    // SAFETY: live handle by contract.
    to_c(render_text(unsafe { &(*r).0 }))
}

/// # Safety
/// `r` is null or a report handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locidx_report_free(r: *mut LocidxReport) {
    if !r.is_null() {
        // SAFETY: allocated by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Exact residue of `object` (null for the first object) at `point`, given as
/// `y=0` or `y=1/2, z=i` in the tangential coordinates of `chart`. The value
/// is written to `out` as a string such as `-3/2` or `1/2+1/3i`.
///
/// # Safety
/// String arguments are NUL-terminated (`object` may be null); `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn locidx_residue(
    m: *const LocidxModel,
    object: *const c_char,
    chart: *const c_char,
    point: *const c_char,
    out: *mut *mut c_char,
) -> LocidxStatus {
    guard(|| {
        if m.is_null() || out.is_null() {
            return Err((LocidxStatus::NullPointer, "model or out is null".into()));
        }
        // SAFETY: forwarded caller contract.
        let (chart, point) = unsafe { (str_arg(chart, "chart")?, str_arg(point, "point")?) };
        let object = if object.is_null() {
            None
        } else {
            // SAFETY: non-null, forwarded caller contract.
            Some(unsafe { str_arg(object, "object") }?)
        };
        let mut coords = BTreeMap::new();
        for part in point.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| (LocidxStatus::Parse, format!("expected name=value, got `{}`", part)))?;
            let value = parse_expression(v.trim(), &[]).map_err(fail)?;
            let c = value.as_constant().ok_or_else(|| (LocidxStatus::Parse, format!("`{}` is not a constant", v.trim())))?;
            coords.insert(k.trim().to_string(), c);
        }
        // SAFETY: live handle by contract.
        let v = residue_at_point(unsafe { &(*m).0 }, object, chart, &coords, None).map_err(fail)?;
        // SAFETY: `out` is non-null and writable.
        unsafe { *out = to_c(v.to_string()) };
        Ok(())
    })
}

/// # Safety
/// `s` is null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn locidx_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: allocated by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P2: &str = include_str!("../../core/corpus/p2_line.man");

    fn model(text: &str) -> *mut LocidxModel {
        let t = CString::new(text).unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(unsafe { locidx_model_parse(t.as_ptr(), &mut m) }, LocidxStatus::Ok);
        m
    }

    #[test]
    fn verify_roundtrip() {
        let m = model(P2);
        let mut r = ptr::null_mut();
        assert_eq!(unsafe { locidx_verify(m, &mut r) }, LocidxStatus::Ok);
        assert_eq!(unsafe { locidx_report_passed(r) }, 1);
        let j = unsafe { locidx_report_json(r) };
        let s = unsafe { CStr::from_ptr(j) }.to_str().unwrap().to_string();
        assert!(s.contains("\"verdict\": \"PASS\""));
        unsafe {
            locidx_string_free(j);
            locidx_report_free(r);
            locidx_model_free(m);
        }
    }

    #[test]
    fn residue_string() {
        let m = model(P2);
        let (c, p) = (CString::new("A").unwrap(), CString::new("y=0").unwrap());
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { locidx_residue(m, ptr::null(), c.as_ptr(), p.as_ptr(), &mut out) }, LocidxStatus::Ok);
        assert_eq!(unsafe { CStr::from_ptr(out) }.to_str().unwrap(), "1/2");
        unsafe {
            locidx_string_free(out);
            locidx_model_free(m);
        }
    }

    #[test]
    fn error_codes() {
        let mut m = ptr::null_mut();
        assert_eq!(unsafe { locidx_model_parse(ptr::null(), &mut m) }, LocidxStatus::NullPointer);
        let bad = CString::new("model m\nbogus\n").unwrap();
        assert_eq!(unsafe { locidx_model_parse(bad.as_ptr(), &mut m) }, LocidxStatus::Parse);
        let msg = unsafe { CStr::from_ptr(locidx_last_error()) }.to_str().unwrap().to_string();
        assert!(msg.contains("parse error"), "{}", msg);
        let path = CString::new("/nonexistent/model.man").unwrap();
        assert_eq!(unsafe { locidx_model_load(path.as_ptr(), &mut m) }, LocidxStatus::Io);
        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(unsafe { locidx_model_parse(invalid.as_ptr() as *const c_char, &mut m) }, LocidxStatus::InvalidUtf8);
    }
}
