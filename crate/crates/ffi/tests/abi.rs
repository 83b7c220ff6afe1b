use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use achcr_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    achcr_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = achcr_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

unsafe fn load(src: &str) -> (AchcrStatus, *mut AchcrAlgebra) {
    let mut alg = ptr::null_mut();
    let st = achcr_algebra_load(c(src).as_ptr(), &mut alg);
    (st, alg)
}

#[test]
fn load_solve_and_free() {
    unsafe {
        let (st, alg) = load("builtin:su2");
        assert_eq!(st, AchcrStatus::Ok);
        assert_eq!(achcr_algebra_dimension(alg), 1);
        let mut rep = ptr::null_mut();
        assert_eq!(achcr_validate(alg, &mut rep), AchcrStatus::Ok);
        take(rep);
        assert_eq!(achcr_solve(alg, 0, &mut rep), AchcrStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(rep)).unwrap();
        assert_eq!(v["obstruction"], serde_json::json!({}));
        assert_eq!(v["truncation"], serde_json::json!(7));
        assert_eq!(achcr_verify(alg, c("seed,bianchi").as_ptr(), c("4").as_ptr(), &mut rep), AchcrStatus::Ok);
        take(rep);
        achcr_algebra_free(alg);
    }
}

#[test]
fn report_matches_the_cli_library() {
    unsafe {
        let (_, alg) = load("builtin:heisenberg1");
        let mut rep = ptr::null_mut();
        assert_eq!(achcr_solve(alg, 0, &mut rep), AchcrStatus::Ok);
        let via_abi = take(rep);
        let input = achcr::report::load_input("builtin:heisenberg1").unwrap();
        let direct = achcr::report::render(&achcr::report::solve(&input, &Default::default()).report);
        assert_eq!(via_abi, direct);
        achcr_algebra_free(alg);
    }
}

#[test]
fn documents_parse_from_memory() {
    let doc = r#"{"n":1,"brackets":[{"x":"Z1","y":"Zb1","z":"T","c":{"re":"0","im":"1"}}]}"#;
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(achcr_algebra_from_json(c(doc).as_ptr(), &mut alg), AchcrStatus::Ok);
        assert_eq!(achcr_algebra_dimension(alg), 1);
        achcr_algebra_free(alg);
        assert_eq!(achcr_algebra_from_json(c("{\"n\":").as_ptr(), &mut alg), AchcrStatus::Parse);
        assert!(last_error().contains("parse"));
    }
}

#[test]
fn failures_map_to_status_codes() {
    unsafe {
        let (st, alg) = load("builtin:no_such_algebra");
        assert_ne!(st, AchcrStatus::Ok);
        assert!(alg.is_null());
        assert!(!last_error().is_empty());

        let (st, bad) = load("builtin:twisted_heisenberg2");
        assert_eq!(st, AchcrStatus::Ok);
        let mut rep = ptr::null_mut();
        assert_eq!(achcr_validate(bad, &mut rep), AchcrStatus::Invalid);
        let v: serde_json::Value = serde_json::from_str(&take(rep)).unwrap();
        assert_eq!(v["validation"]["passed"], serde_json::json!(false));
        assert_eq!(achcr_solve(bad, 0, &mut rep), AchcrStatus::Invalid);
        take(rep);
        achcr_algebra_free(bad);

        let (_, alg) = load("builtin:su2");
        assert_eq!(achcr_verify(alg, c("bogus").as_ptr(), c("4").as_ptr(), &mut rep), AchcrStatus::BadParameter);
        assert_eq!(achcr_verify(alg, c("all").as_ptr(), c("0").as_ptr(), &mut rep), AchcrStatus::BadParameter);
        assert_eq!(achcr_solve(alg, 3, &mut rep), AchcrStatus::BadParameter);
        achcr_string_free(rep);
        achcr_algebra_free(alg);
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(achcr_algebra_load(ptr::null(), &mut alg), AchcrStatus::NullPointer);
        assert_eq!(achcr_algebra_load(c("builtin:su2").as_ptr(), ptr::null_mut()), AchcrStatus::NullPointer);
        let mut rep = ptr::null_mut();
        assert_eq!(achcr_solve(ptr::null(), 0, &mut rep), AchcrStatus::NullPointer);
        assert!(last_error().contains("null"));
        assert_eq!(achcr_sphere_coefficient(2, ptr::null_mut()), AchcrStatus::NullPointer);
        assert_eq!(achcr_algebra_dimension(ptr::null()), 0);
        achcr_algebra_free(ptr::null_mut());
        achcr_string_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_rejected() {
    let bytes = CString::new(vec![0xffu8, 0xfe]).unwrap();
    unsafe {
        let mut alg = ptr::null_mut();
        assert_eq!(achcr_algebra_load(bytes.as_ptr(), &mut alg), AchcrStatus::Utf8);
    }
}

#[test]
fn sphere_coefficients() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(achcr_sphere_coefficient(2, &mut out), AchcrStatus::Ok);
        assert_eq!(take(out), "1/4");
        assert_eq!(achcr_sphere_coefficient(1, &mut out), AchcrStatus::Ok);
        assert_eq!(take(out), "-1/1");
        assert_eq!(achcr_sphere_coefficient(0, &mut out), AchcrStatus::BadParameter);
    }
}
