use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use superanalysis_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; sa_last_error_length() + 1];
    unsafe { sa_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn from_json(s: &str) -> *mut SaSupernumber {
    let c = CString::new(s).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sa_supernumber_from_json(c.as_ptr(), &mut h) }, SaStatus::Ok, "{}", last_error());
    h
}

fn coeff(h: *const SaSupernumber, mask: u32) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { sa_supernumber_coeff(h, mask, &mut re, &mut im) }, SaStatus::Ok);
    (re, im)
}

#[test]
fn generators_anticommute_through_the_abi() {
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(sa_supernumber_new(2, &mut a), SaStatus::Ok);
        assert_eq!(sa_supernumber_new(2, &mut b), SaStatus::Ok);
        assert_eq!(sa_supernumber_add_term(a, 0b01, 1.0, 0.0), SaStatus::Ok);
        assert_eq!(sa_supernumber_add_term(b, 0b10, 1.0, 0.0), SaStatus::Ok);

        let (mut ab, mut ba, mut sum) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(sa_supernumber_mul(a, b, &mut ab), SaStatus::Ok);
        assert_eq!(sa_supernumber_mul(b, a, &mut ba), SaStatus::Ok);
        assert_eq!(sa_supernumber_add(ab, ba, &mut sum), SaStatus::Ok);
        assert_eq!(coeff(ab, 0b11), (1.0, 0.0));
        assert_eq!(coeff(ba, 0b11), (-1.0, 0.0));
        assert_eq!(coeff(sum, 0b11), (0.0, 0.0));

        let mut l = 0;
        assert_eq!(sa_supernumber_generators(sum, &mut l), SaStatus::Ok);
        assert_eq!(l, 2);
        for h in [a, b, ab, ba, sum] {
            sa_supernumber_free(h);
        }
    }
}

#[test]
fn json_roundtrip_inverse_and_berezin() {
    let x = from_json(r#"{"L":2,"terms":[{"mask":0,"re":2.0,"im":0.0},{"mask":3,"re":4.0,"im":0.0}]}"#);
    unsafe {
        let s = sa_supernumber_to_json(x);
        assert!(!s.is_null());
        let y = from_json(CStr::from_ptr(s).to_str().unwrap());
        sa_string_free(s);
        assert_eq!(coeff(y, 3), (4.0, 0.0));

        // (2 + 4 σ1σ2)⁻¹ = 1/2 − σ1σ2
        let mut inv = ptr::null_mut();
        assert_eq!(sa_supernumber_inverse(y, &mut inv), SaStatus::Ok);
        assert_eq!(coeff(inv, 0), (0.5, 0.0));
        assert_eq!(coeff(inv, 3), (-1.0, 0.0));

        let mut prod = ptr::null_mut();
        assert_eq!(sa_supernumber_mul(inv, y, &mut prod), SaStatus::Ok);
        assert_eq!(coeff(prod, 0), (1.0, 0.0));
        assert_eq!(coeff(prod, 3), (0.0, 0.0));

        let mut top = ptr::null_mut();
        assert_eq!(sa_supernumber_berezin(y, 0b11, &mut top), SaStatus::Ok);
        assert_eq!(coeff(top, 0), (4.0, 0.0));

        // exp of a pure soul is 1 + soul
        let soul = from_json(r#"{"L":2,"terms":[{"mask":3,"re":1.5,"im":0.0}]}"#);
        let mut e = ptr::null_mut();
        assert_eq!(sa_supernumber_exp(soul, &mut e), SaStatus::Ok);
        assert_eq!(coeff(e, 0), (1.0, 0.0));
        assert_eq!(coeff(e, 3), (1.5, 0.0));

        for h in [x, y, inv, prod, top, soul, e] {
            sa_supernumber_free(h);
        }
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let soul = from_json(r#"{"L":2,"terms":[{"mask":1,"re":1.0,"im":0.0}]}"#);
        let mut out = ptr::null_mut();
        assert_eq!(sa_supernumber_inverse(soul, &mut out), SaStatus::NotInvertible);
        assert!(out.is_null());
        assert!(last_error().contains("not invertible"), "{}", last_error());

        // a successful call clears the message
        let mut l = 0;
        assert_eq!(sa_supernumber_generators(soul, &mut l), SaStatus::Ok);
        assert_eq!(sa_last_error_length(), 0);

        assert_eq!(sa_supernumber_new(33, &mut out), SaStatus::InvalidArgument);
        assert_eq!(sa_supernumber_berezin(soul, 0b100, &mut out), SaStatus::InvalidArgument);
        assert_eq!(sa_supernumber_mul(soul, ptr::null(), &mut out), SaStatus::NullPointer);
        assert_eq!(sa_supernumber_exp(soul, ptr::null_mut()), SaStatus::NullPointer);
        assert!(sa_supernumber_to_json(ptr::null()).is_null());
        assert_eq!(sa_last_error_length(), "x is null".len());

        let bad = CString::new("{not json").unwrap();
        assert_eq!(sa_supernumber_from_json(bad.as_ptr(), &mut out), SaStatus::Parse);

        // truncation keeps the terminator
        let mut small = [1 as c_char; 4];
        assert_eq!(sa_last_error_message(small.as_mut_ptr(), small.len()), 3);
        assert_eq!(small[3], 0);

        let mut d = 0.0;
        assert_eq!(sa_gue_density(0, 1.0, 0.0, &mut d), SaStatus::Domain);

        sa_supernumber_free(soul);
        sa_supernumber_free(ptr::null_mut());
        sa_string_free(ptr::null_mut());
    }
}

#[test]
fn last_error_is_per_thread() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { sa_supernumber_new(40, &mut out) }, SaStatus::InvalidArgument);
    let other = std::thread::spawn(|| sa_last_error_length()).join().unwrap();
    assert_eq!(other, 0);
    assert!(sa_last_error_length() > 0);
}

#[test]
fn applications() {
    let omegas = [0.7, 1.3, 2.1];
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { sa_witten_supertrace(omegas.as_ptr(), omegas.len(), 0.8, &mut re, &mut im) }, SaStatus::Ok);
    assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12, "{re} {im}");

    // N = 1: Gaussian of variance J²
    let mut d = 0.0;
    assert_eq!(unsafe { sa_gue_density(1, 1.0, 0.5, &mut d) }, SaStatus::Ok);
    let expected = (-0.125f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
    assert!((d - expected).abs() < 1e-12, "{d} vs {expected}");

    assert_eq!(sa_selftest_count(), 9);
    let mut passed = false;
    assert_eq!(unsafe { sa_selftest_run(0, &mut passed) }, SaStatus::InvalidArgument);
    assert_eq!(unsafe { sa_selftest_run(2, &mut passed) }, SaStatus::Ok);
    assert!(passed);
}

fn header() -> PathBuf {
    PathBuf::from(env!("OUT_DIR")).join("superanalysis.h")
}

#[test]
fn header_declares_the_whole_abi() {
    let h = std::fs::read_to_string(header()).unwrap();
    assert_eq!(h, std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/superanalysis.h")).unwrap());
    for f in [
        "sa_last_error_length", "sa_last_error_message", "sa_supernumber_new", "sa_supernumber_from_json",
        "sa_supernumber_to_json", "sa_string_free", "sa_supernumber_free", "sa_supernumber_generators",
        "sa_supernumber_add_term", "sa_supernumber_coeff", "sa_supernumber_add", "sa_supernumber_sub",
        "sa_supernumber_mul", "sa_supernumber_inverse", "sa_supernumber_exp", "sa_supernumber_berezin",
        "sa_gue_density", "sa_witten_supertrace", "sa_selftest_count", "sa_selftest_run",
    ] {
        let declared = h.match_indices(&format!("{f}(")).any(|(i, _)| matches!(h.as_bytes()[i - 1], b' ' | b'*'));
        assert!(declared, "{f} missing from header");
    }
    assert!(h.contains("typedef struct SaSupernumber SaSupernumber;"));
    assert!(h.contains("SA_STATUS_NOT_INVERTIBLE = 4"));
}

const C_PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "superanalysis.h"

int main(void) {
    SaSupernumber *a = NULL, *b = NULL, *ab = NULL, *bad = NULL;
    if (sa_supernumber_from_json("{\"L\":2,\"terms\":[{\"mask\":0,\"re\":3,\"im\":0},{\"mask\":1,\"re\":1,\"im\":0}]}", &a) != SA_STATUS_OK) return 1;
    if (sa_supernumber_new(2, &b) != SA_STATUS_OK) return 2;
    sa_supernumber_add_term(b, 2, 2.0, 0.0);
    if (sa_supernumber_mul(a, b, &ab) != SA_STATUS_OK) return 3;
    double re, im;
    sa_supernumber_coeff(ab, 3, &re, &im);
    char *json = sa_supernumber_to_json(ab);
    printf("%s\n", json);
    sa_string_free(json);
    if (fabs(re - 2.0) > 1e-15) return 4;
    if (sa_supernumber_inverse(b, &bad) != SA_STATUS_NOT_INVERTIBLE) return 5;
    char msg[128];
    sa_last_error_message(msg, sizeof msg);
    printf("%s\n", msg);
    double s_re, s_im, omegas[2] = {0.5, 1.5};
    if (sa_witten_supertrace(omegas, 2, 1.0, &s_re, &s_im) != SA_STATUS_OK || fabs(s_re - 1.0) > 1e-12) return 6;
    sa_supernumber_free(a);
    sa_supernumber_free(b);
    sa_supernumber_free(ab);
    return 0;
}
"#;

/// Compile a C client against the generated header and link it to the static library.
#[test]
fn c_client_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    // cargo builds the library's staticlib next to the test binary
    let lib = exe.parent().unwrap().join("libsuperanalysis_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let dir = std::env::temp_dir().join(format!("superanalysis-ffi-c-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("client.c");
    let bin = dir.join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();

    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .args(["-std=c11", "-Wall", "-Werror", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C client failed to build");

    let out = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "client exit {:?}: {stdout}", out.status.code());
    assert!(stdout.contains("\"mask\":3"), "{stdout}");
    assert!(stdout.contains("not invertible"), "{stdout}");
    let _ = std::fs::remove_dir_all(&dir);
}
