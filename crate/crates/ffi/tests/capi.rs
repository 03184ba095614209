use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gxbtc_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn fixture(name: &str) -> *mut GxTheoryHandle {
    let mut out = ptr::null_mut();
    let status = unsafe { gx_theory_fixture(cstr(name).as_ptr(), &mut out) };
    assert_eq!(status, GxStatus::Ok);
    out
}

fn take_string(p: *mut c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { gx_string_free(p) };
    s
}

fn check(t: *const GxTheoryHandle) -> (f64, bool) {
    let (mut worst, mut passed) = (f64::NAN, false);
    assert_eq!(unsafe { gx_theory_check(t, 1e-9, 4, &mut worst, &mut passed) }, GxStatus::Ok);
    (worst, passed)
}

fn last_error() -> String {
    let p = gx_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn fixture_round_trips_through_json() {
    let tc = fixture("toric-code");
    assert_eq!(unsafe { gx_theory_num_charges(tc) }, 4);
    assert_eq!(unsafe { gx_theory_group_order(tc) }, 1);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { gx_theory_to_json(tc, &mut json) }, GxStatus::Ok);
    let text = cstr(&take_string(json));
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { gx_theory_from_json(text.as_ptr(), &mut back) }, GxStatus::Ok);
    let mut eq = false;
    assert_eq!(unsafe { gx_theories_equivalent(tc, back, 1000, 1e-9, &mut eq) }, GxStatus::Ok);
    assert!(eq);
    unsafe {
        gx_theory_free(back);
        gx_theory_free(tc);
    }
}

#[test]
fn torsor_over_trivial_extension_is_consistent() {
    let tc = fixture("toric-code");
    let mut ext = ptr::null_mut();
    assert_eq!(unsafe { gx_trivial_extension(tc, cstr("Z2").as_ptr(), &mut ext) }, GxStatus::Ok);
    assert_eq!(unsafe { gx_theory_num_charges(ext) }, 8);
    let t = cstr(r#"{"degree":2,"module":"charges","entries":[{"args":[1,1],"value":"e"}]}"#);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gx_apply_torsor(ext, t.as_ptr(), ptr::null(), 0, &mut out) }, GxStatus::Ok);
    let (worst, passed) = check(out);
    assert!(passed && worst < 1e-9, "worst residual {worst}");
    unsafe {
        gx_theory_free(out);
        gx_theory_free(ext);
        gx_theory_free(tc);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { gx_theory_from_json(cstr("{").as_ptr(), &mut out) }, GxStatus::InvalidData);
    assert!(out.is_null());
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { gx_theory_from_json(ptr::null(), &mut out) }, GxStatus::NullPointer);
    assert!(last_error().contains("json"));

    assert_eq!(unsafe { gx_theory_fixture(cstr("nope").as_ptr(), &mut out) }, GxStatus::InvalidData);
    assert!(last_error().contains("nope"));

    let tc = fixture("toric-code");
    let (mut worst, mut passed) = (0.0, false);
    assert_eq!(unsafe { gx_theory_check(tc, -1.0, 4, &mut worst, &mut passed) }, GxStatus::InvalidData);
    let mut eq = false;
    assert_eq!(unsafe { gx_theories_equivalent(tc, tc, 0, 1e-9, &mut eq) }, GxStatus::BudgetExceeded);
    unsafe { gx_theory_free(tc) };
}

#[test]
fn cohomology_structures() {
    for (g, coeff, n, want) in [("Z2", "u1", 3, "Z2"), ("Z2", "u1", 4, "0"), ("Z2xZ2", "z2", 2, "Z2xZ2xZ2"), ("Z3", "u1", 3, "Z3")] {
        let mut out = ptr::null_mut();
        let status = unsafe { gx_cohomology_structure(cstr(g).as_ptr(), cstr(coeff).as_ptr(), n, 0, &mut out) };
        assert_eq!(status, GxStatus::Ok);
        assert_eq!(take_string(out), want, "H^{n}({g}, {coeff})");
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        gx_theory_free(ptr::null_mut());
        gx_string_free(ptr::null_mut());
        assert_eq!(gx_theory_num_charges(ptr::null()), 0);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gxbtc.h")).unwrap();
    for sym in ["gx_theory_from_json", "gx_apply_torsor", "gx_last_error", "GX_STATUS_OK", "typedef struct GxTheoryHandle"] {
        assert!(header.contains(sym), "header lacks {sym}");
    }
}
