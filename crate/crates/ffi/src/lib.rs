//! C ABI over `bircone`.
//!
//! Charts cross the boundary as opaque `BirconeChart` handles built from the
//! JSON descriptor format. Every function returns a `BirconeStatus`; on
//! failure `bircone_last_error` gives a message for the calling thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with `bircone_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bircone::atlas::{self, ModelChart};
use bircone::git_model::{self, PointC4, UnstableLocus};
use bircone::lattice::DivisorClass;
use bircone::{a_model, descriptor, Error};
use num_complex::Complex64;

/// Opaque chart handle.
pub struct BirconeChart {
    inner: ModelChart,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BirconeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed or invariant-violating input.
    InvalidInput = 3,
    /// A well-formed request the mathematics rejects (e.g. a non-flopping wall).
    Domain = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BirconeLocus {
    Empty = 0,
    YZZero = 1,
    WXZero = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> BirconeStatus {
    match err {
        Error::Parse(_)
        | Error::Invalid { .. }
        | Error::RankMismatch { .. }
        | Error::ZeroVector(_)
        | Error::NotPrimitive(_)
        | Error::NotUnimodular(_)
        | Error::Io(_) => BirconeStatus::InvalidInput,
        _ => BirconeStatus::Domain,
    }
}

type FfiResult<T> = Result<T, (BirconeStatus, String)>;

fn fail(err: Error) -> (BirconeStatus, String) {
    (status_of(&err), err.to_string())
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> FfiResult<()>) -> BirconeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BirconeStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BirconeStatus::Panic
        }
    }
}

fn null(what: &str) -> (BirconeStatus, String) {
    (BirconeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn chart_ref<'a>(p: *const BirconeChart) -> FfiResult<&'a ModelChart> {
    p.as_ref().map(|c| &c.inner).ok_or_else(|| null("chart"))
}

unsafe fn class(p: *const i64, len: usize, what: &str) -> FfiResult<DivisorClass> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(DivisorClass::new(std::slice::from_raw_parts(p, len).to_vec()))
}

fn export_string(s: String, out: *mut *mut c_char) -> FfiResult<()> {
    let c = CString::new(s).map_err(|_| (BirconeStatus::Domain, "string contains NUL".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn bircone_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses and validates a chart descriptor.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bircone_chart_from_json(
    json: *const c_char,
    out: *mut *mut BirconeChart,
) -> BirconeStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| (BirconeStatus::InvalidUtf8, "json is not UTF-8".into()))?;
        let chart = descriptor::parse_chart(text, "chart").map_err(fail)?;
        *out = Box::into_raw(Box::new(BirconeChart { inner: chart }));
        Ok(())
    })
}

/// # Safety
/// `chart` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bircone_chart_free(chart: *mut BirconeChart) {
    if !chart.is_null() {
        drop(Box::from_raw(chart));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bircone_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `chart` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_chart_rank(chart: *const BirconeChart, out: *mut usize) -> BirconeStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = c.rank();
        Ok(())
    })
}

/// Serializes the chart as a descriptor document.
///
/// # Safety
/// `chart` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_chart_to_json(chart: *const BirconeChart, out: *mut *mut c_char) -> BirconeStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = serde_json::to_string(&descriptor::chart_to_json(c)).expect("json");
        export_string(text, out)
    })
}

/// Flops `chart` across wall `wall` into a new handle.
///
/// # Safety
/// `chart` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_chart_flop(
    chart: *const BirconeChart,
    wall: usize,
    out: *mut *mut BirconeChart,
) -> BirconeStatus {
    guard(|| {
        let c = chart_ref(chart)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let flopped = atlas::flop(c, wall).map_err(fail)?;
        *out = Box::into_raw(Box::new(BirconeChart { inner: flopped }));
        Ok(())
    })
}

/// `F(A, B, C)` for classes of length `len`.
///
/// # Safety
/// `a`, `b`, `c` must point to `len` readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_cubic_eval(
    chart: *const BirconeChart,
    a: *const i64,
    b: *const i64,
    c: *const i64,
    len: usize,
    out: *mut i64,
) -> BirconeStatus {
    guard(|| {
        let ch = chart_ref(chart)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (a, b, c) = (class(a, len, "a")?, class(b, len, "b")?, class(c, len, "c")?);
        *out = ch.cubic.eval(&a, &b, &c).map_err(fail)?;
        Ok(())
    })
}

/// Reflects `h` across divisorial wall `wall`; writes `len` values to `out`.
///
/// # Safety
/// `h` must point to `len` readable values and `out` to `len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn bircone_reflect_divisorial(
    chart: *const BirconeChart,
    wall: usize,
    h: *const i64,
    len: usize,
    out: *mut i64,
) -> BirconeStatus {
    guard(|| {
        let ch = chart_ref(chart)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let h = class(h, len, "h")?;
        let w = ch.wall(wall).map_err(fail)?;
        let image = atlas::reflect_divisorial(&h, w).map_err(fail)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(image.coords());
        Ok(())
    })
}

/// Runs the flop lemma check at the default samples; writes the JSON report
/// to `report` and the symbolic verdict to `verdict`.
///
/// # Safety
/// `a`, `b`, `c` must point to `len` readable values; `report` and
/// `verdict` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_verify_flop_lemma(
    chart: *const BirconeChart,
    wall: usize,
    a: *const i64,
    b: *const i64,
    c: *const i64,
    len: usize,
    verdict: *mut bool,
    report: *mut *mut c_char,
) -> BirconeStatus {
    guard(|| {
        let ch = chart_ref(chart)?;
        if verdict.is_null() || report.is_null() {
            return Err(null("out"));
        }
        let (a, b, c) = (class(a, len, "a")?, class(b, len, "b")?, class(c, len, "c")?);
        let rep = a_model::verify_flop_lemma(ch, wall, &a, &b, &c, &a_model::default_samples())
            .map_err(fail)?;
        *verdict = rep.symbolic_verdict && rep.max_discrepancy == bircone::rational::int(0);
        export_string(serde_json::to_string(&rep).expect("json"), report)
    })
}

/// Moment map at `(w, x, y, z)` given as 8 doubles `re, im` per coordinate.
///
/// # Safety
/// `coords` must point to 8 readable doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_moment_map(coords: *const f64, out: *mut f64) -> BirconeStatus {
    guard(|| {
        if coords.is_null() {
            return Err(null("coords"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let v = std::slice::from_raw_parts(coords, 8);
        let z = |i: usize| Complex64::new(v[2 * i], v[2 * i + 1]);
        let p = PointC4::new(z(0), z(1), z(2), z(3));
        if !p.is_finite() {
            return Err((BirconeStatus::InvalidInput, "non-finite coordinate".into()));
        }
        *out = git_model::moment_map(&p);
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_unstable_locus(r: f64, out: *mut BirconeLocus) -> BirconeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if !r.is_finite() {
            return Err((BirconeStatus::InvalidInput, "non-finite level".into()));
        }
        *out = match git_model::unstable_locus(r) {
            UnstableLocus::Empty => BirconeLocus::Empty,
            UnstableLocus::YZZero => BirconeLocus::YZZero,
            UnstableLocus::WXZero => BirconeLocus::WXZero,
        };
        Ok(())
    })
}

/// Area of the exceptional curve at level `r` with an `n`-point grid.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bircone_exceptional_area(r: f64, n: usize, out: *mut f64) -> BirconeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = git_model::exceptional_area(r, n).map_err(fail)?;
        Ok(())
    })
}
