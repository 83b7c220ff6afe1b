//! C ABI over the achcr engine.
//!
//! Algebras are opaque handles. Every fallible call returns an
//! [`AchcrStatus`] and writes results through out-pointers; reports are
//! heap-allocated JSON strings released with [`achcr_string_free`]. The
//! message of the last failure on the calling thread is available from
//! [`achcr_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use achcr::report::{self, Input, Outcome, SolveFlags};
use achcr::scalar::rational_string;
use achcr::{sphere, Error};

/// Status codes; the nonzero values below 6 match the `achcr` exit codes.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum AchcrStatus {
    Ok = 0,
    /// The algebra failed validation, or an input was rejected structurally.
    Invalid = 2,
    /// A solver assertion or an identity check failed.
    Solver = 3,
    Parse = 4,
    BadParameter = 5,
    NullPointer = 6,
    /// A string argument was not valid UTF-8.
    Utf8 = 7,
}

/// A structure algebra loaded from a built-in name or a JSON document.
pub struct AchcrAlgebra {
    input: Input,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(e: &Error) -> AchcrStatus {
    set_error(e.to_string());
    match e.exit_code() {
        3 => AchcrStatus::Solver,
        4 => AchcrStatus::Parse,
        5 => AchcrStatus::BadParameter,
        _ => AchcrStatus::Invalid,
    }
}

fn status_of(code: i32) -> AchcrStatus {
    match code {
        0 => AchcrStatus::Ok,
        2 => AchcrStatus::Invalid,
        3 => AchcrStatus::Solver,
        4 => AchcrStatus::Parse,
        _ => AchcrStatus::BadParameter,
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, AchcrStatus> {
    if s.is_null() {
        set_error("null string argument");
        return Err(AchcrStatus::NullPointer);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        AchcrStatus::Utf8
    })
}

unsafe fn write_string(out: *mut *mut c_char, s: String) {
    *out = CString::new(s).expect("reports contain no NUL").into_raw();
}

unsafe fn finish(out: &Outcome, report: *mut *mut c_char) -> AchcrStatus {
    write_string(report, report::render(&out.report));
    let st = status_of(out.exit_code);
    if st != AchcrStatus::Ok {
        set_error(out.report.get("error").and_then(|v| v.as_str()).unwrap_or("check failed").to_string());
    }
    st
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return AchcrStatus::NullPointer;
        })+
    };
}

/// Message of the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn achcr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Loads `builtin:<name>` or a document path.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn achcr_algebra_load(source: *const c_char, out: *mut *mut AchcrAlgebra) -> AchcrStatus {
    non_null!(out);
    let src = match read_str(source) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match report::load_input(src) {
        Ok(input) => {
            *out = Box::into_raw(Box::new(AchcrAlgebra { input }));
            AchcrStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// Parses an algebra document held in memory.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn achcr_algebra_from_json(json: *const c_char, out: *mut *mut AchcrAlgebra) -> AchcrStatus {
    non_null!(out);
    let text = match read_str(json) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match report::parse_document("<memory>", text) {
        Ok(input) => {
            *out = Box::into_raw(Box::new(AchcrAlgebra { input }));
            AchcrStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `alg` must come from a load call and not be used afterwards; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn achcr_algebra_free(alg: *mut AchcrAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// CR dimension `n`, or 0 for a NULL handle.
///
/// # Safety
/// `alg` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn achcr_algebra_dimension(alg: *const AchcrAlgebra) -> usize {
    alg.as_ref().map_or(0, |a| a.input.algebra.n)
}

/// Writes the validation report. Returns `Invalid` if a check fails.
///
/// # Safety
/// `alg` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn achcr_validate(alg: *const AchcrAlgebra, report: *mut *mut c_char) -> AchcrStatus {
    non_null!(alg, report);
    finish(&report::validate(&(*alg).input), report)
}

/// Runs the construction; `truncation` 0 selects the minimal one.
///
/// # Safety
/// `alg` must be a live handle and `report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn achcr_solve(alg: *const AchcrAlgebra, truncation: usize, report: *mut *mut c_char) -> AchcrStatus {
    non_null!(alg, report);
    let flags = SolveFlags { truncation: (truncation > 0).then_some(truncation), timing: false };
    finish(&report::solve(&(*alg).input, &flags), report)
}

/// Runs the comma-separated `checks` (or `all`); `lambda` is a rational
/// string used by the scaling check.
///
/// # Safety
/// `alg` must be a live handle, the strings NUL-terminated and `report` valid.
#[no_mangle]
pub unsafe extern "C" fn achcr_verify(
    alg: *const AchcrAlgebra,
    checks: *const c_char,
    lambda: *const c_char,
    report: *mut *mut c_char,
) -> AchcrStatus {
    non_null!(alg, report);
    let (checks, lambda) = match (read_str(checks), read_str(lambda)) {
        (Ok(c), Ok(l)) => (c, l),
        (Err(st), _) | (_, Err(st)) => return st,
    };
    let checks = match report::parse_checks(checks) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let lambda = match report::parse_lambda(lambda) {
        Ok(l) => l,
        Err(e) => return fail(&e),
    };
    let input = &(*alg).input;
    finish(&report::verify(input, &checks, &lambda, input.options.truncation), report)
}

/// The leading first-variation coefficient `a_{n+1}` at the sphere as `"p/q"`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn achcr_sphere_coefficient(n: usize, out: *mut *mut c_char) -> AchcrStatus {
    non_null!(out);
    match sphere::leading_recursion(n) {
        Ok(v) => {
            write_string(out, rational_string(&v.a));
            AchcrStatus::Ok
        }
        Err(e) => fail(&e),
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards; NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn achcr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
