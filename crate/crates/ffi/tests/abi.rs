use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use oscint_ffi::*;

fn last_error() -> Option<String> {
    let p = oscint_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn make(coeffs: &[f64], exps: &[u32]) -> *mut OscintFewnomial {
    let mut q = ptr::null_mut();
    let s = unsafe { oscint_fewnomial_new(coeffs.as_ptr(), exps.as_ptr(), coeffs.len(), &mut q) };
    assert_eq!(s, OscintStatus::Ok, "{:?}", last_error());
    q
}

#[test]
fn cubic_anchor_through_abi() {
    let q = make(&[1.0], &[3]);
    let mut out = OscintSample::default();
    assert_eq!(unsafe { oscint_pv_multiplier(q, 0.0, 1e-8, &mut out) }, OscintStatus::Ok);
    assert!(out.re.abs() < 1e-7 && (out.im - std::f64::consts::PI / 3.0).abs() < 1e-7);
    assert!(out.abs_err <= 1e-8);
    assert!(last_error().is_none());
    unsafe { oscint_fewnomial_free(q) };
}

#[test]
fn error_codes_and_messages() {
    let mut q = ptr::null_mut();
    let s = unsafe { oscint_fewnomial_new([1.0, 2.0].as_ptr(), [3, 2].as_ptr(), 2, &mut q) };
    assert_eq!(s, OscintStatus::InvalidInput);
    assert!(q.is_null());
    assert!(last_error().unwrap().contains("increasing"));

    let s = unsafe { oscint_fewnomial_new([5.0].as_ptr(), [1].as_ptr(), 1, &mut q) };
    assert_eq!(s, OscintStatus::InvalidInput);
    assert!(last_error().unwrap().contains("linear"));

    let bad = CString::new("{\"coeffs\":[1]").unwrap();
    assert_eq!(unsafe { oscint_fewnomial_from_json(bad.as_ptr(), &mut q) }, OscintStatus::Parse);

    let mut out = OscintSample::default();
    assert_eq!(unsafe { oscint_pv_multiplier(ptr::null(), 0.0, 1e-6, &mut out) }, OscintStatus::NullPointer);

    let q = make(&[1.0], &[2]);
    assert_eq!(unsafe { oscint_pv_multiplier(q, 0.0, 0.5, &mut out) }, OscintStatus::InvalidTolerance);
    let mut v = 0.0;
    assert_eq!(unsafe { oscint_fewnomial_eval(q, 1e300, 0, &mut v) }, OscintStatus::Overflow);
    unsafe { oscint_fewnomial_free(q) };

    let zero = make(&[], &[]);
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { oscint_decompose_json(zero, 8, &mut json) }, OscintStatus::DegeneratePhase);
    unsafe { oscint_fewnomial_free(zero) };
}

#[test]
fn json_in_and_out() {
    let src = CString::new(r#"{"coeffs":[1,1],"exponents":[2,4]}"#).unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { oscint_fewnomial_from_json(src.as_ptr(), &mut q) }, OscintStatus::Ok);
    let mut n = 0;
    assert_eq!(unsafe { oscint_fewnomial_len(q, &mut n) }, OscintStatus::Ok);
    assert_eq!(n, 2);
    let mut v = 0.0;
    assert_eq!(unsafe { oscint_fewnomial_eval(q, 2.0, 2, &mut v) }, OscintStatus::Ok);
    assert_eq!(v, 2.0 + 12.0 * 4.0);

    let mut json = ptr::null_mut();
    assert_eq!(unsafe { oscint_decompose_json(q, 2, &mut json) }, OscintStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { oscint_string_free(json) };
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["bad0"][0]["lo"], -4);
    assert_eq!(parsed["bad0"][0]["hi"], 4);

    let mut back = ptr::null_mut();
    assert_eq!(unsafe { oscint_fewnomial_to_json(q, &mut back) }, OscintStatus::Ok);
    let mut q2 = ptr::null_mut();
    assert_eq!(unsafe { oscint_fewnomial_from_json(back, &mut q2) }, OscintStatus::Ok);
    unsafe { oscint_string_free(back) };
    let (mut a, mut b) = (0.0, 0.0);
    unsafe {
        oscint_fewnomial_eval(q, 1.3, 0, &mut a);
        oscint_fewnomial_eval(q2, 1.3, 0, &mut b);
        oscint_fewnomial_free(q);
        oscint_fewnomial_free(q2);
    }
    assert_eq!(a, b);
}

#[test]
fn sup_of_zero_phase_is_pi() {
    let q = make(&[], &[]);
    let (mut sup, mut xi) = (0.0, 0.0);
    assert_eq!(unsafe { oscint_multiplier_sup(q, 0, 1e-6, &mut sup, &mut xi) }, OscintStatus::Ok);
    assert!((sup - std::f64::consts::PI).abs() < 1e-6);
    unsafe { oscint_fewnomial_free(q) };
}

#[test]
fn free_accepts_null() {
    unsafe {
        oscint_fewnomial_free(ptr::null_mut());
        oscint_string_free(ptr::null_mut());
    }
}

/// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("liboscint_ffi.a");
    if !lib.exists() {
        panic!("static library not found at {}", lib.display());
    }
    let exe = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("oscint_smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok 0.1.0"));
}
