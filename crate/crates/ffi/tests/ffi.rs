use std::ffi::{CStr, CString};
use std::ptr;

use plap_bounds_ffi::*;

fn square(labels: [u32; 4]) -> *mut PlbDomain {
    let xy = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
    let mut out = ptr::null_mut();
    let st = unsafe { plb_domain_new(xy.as_ptr(), 4, labels.as_ptr(), ptr::null(), ptr::null(), &mut out) };
    assert_eq!(st, PlbStatus::Ok);
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    let p = plb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn domain_queries() {
    let d = square([0, 0, 0, 1]);
    let mut inside = false;
    let mut area = 0.0;
    unsafe {
        assert_eq!(plb_domain_contains(d, 0.5, 0.5, &mut inside), PlbStatus::Ok);
        assert!(inside);
        assert_eq!(plb_domain_contains(d, 1.5, 0.5, &mut inside), PlbStatus::Ok);
        assert!(!inside);
        assert_eq!(plb_domain_area(d, &mut area), PlbStatus::Ok);
        plb_domain_free(d);
    }
    assert!((area - 1.0).abs() < 1e-12);
    assert!(plb_last_error_message().is_null());
}

#[test]
fn null_and_invalid_arguments() {
    let mut x = 0.0;
    unsafe {
        assert_eq!(plb_domain_area(ptr::null(), &mut x), PlbStatus::NullPointer);
        assert!(last_error().contains("domain"));
        assert_eq!(plb_mu_interval(2.0, ptr::null_mut()), PlbStatus::NullPointer);

        let xy = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let mut out = ptr::null_mut();
        let st = plb_domain_new(xy.as_ptr(), 4, [0u32, 0, 7, 0].as_ptr(), ptr::null(), ptr::null(), &mut out);
        assert_eq!(st, PlbStatus::InvalidArgument);
        assert!(out.is_null());
        assert!(last_error().contains("label"));

        let bowtie = [0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let st = plb_domain_new(bowtie.as_ptr(), 4, [0u32; 4].as_ptr(), ptr::null(), ptr::null(), &mut out);
        assert_eq!(st, PlbStatus::Geometry);

        assert_eq!(plb_radial_eigenvalue(0.5, 1.0, 2.0, 2, 9, &mut x), PlbStatus::InvalidArgument);
        plb_domain_free(ptr::null_mut());
        plb_certificates_free(ptr::null_mut());
    }
}

#[test]
fn bad_exponent() {
    let mut x = 0.0;
    let st = unsafe { plb_mu_interval(1.0, &mut x) };
    assert_eq!(st, PlbStatus::Radial);
    assert!(last_error().contains("(1, inf)"));
}

#[test]
fn one_dimensional_values() {
    let mut mu = 0.0;
    let mut lam = 0.0;
    unsafe {
        assert_eq!(plb_mu_interval(2.0, &mut mu), PlbStatus::Ok);
        assert_eq!(
            plb_radial_eigenvalue(0.5, 1.0, 2.0, 2, PlbArrangement::DirichletBoth as u32, &mut lam),
            PlbStatus::Ok
        );
    }
    let pi2 = std::f64::consts::PI.powi(2);
    assert!((mu - pi2 / 4.0).abs() < 1e-8);
    // the curvature term pulls the value just below the strip value
    assert!(lam < pi2 / 0.25 && lam > 0.95 * pi2 / 0.25, "{lam}");
}

#[test]
fn method_names() {
    let name = |m: PlbMethod| unsafe { CStr::from_ptr(plb_method_name(m as u32)) }.to_str().unwrap();
    assert_eq!(name(PlbMethod::Box), "Box");
    assert_eq!(name(PlbMethod::RadialHardy), "RadialHardy");
    assert!(plb_method_name(99).is_null());
}

#[test]
fn best_bounds_list() {
    let d = square([0, 0, 0, 1]);
    let mut cfg = plb_config_default();
    cfg.grid_h = 1.0 / 16.0;
    cfg.n_angles = 90;
    cfg.n_boundary_samples = 256;
    let mut list = ptr::null_mut();
    unsafe {
        assert_eq!(plb_best_bounds(d, 2.0, 2, &cfg, &mut list), PlbStatus::Ok);
        let n = plb_certificates_len(list);
        assert!(n >= 5);
        let mut first = std::mem::zeroed::<PlbCertificate>();
        assert_eq!(plb_certificates_get(list, 0, &mut first), PlbStatus::Ok);
        assert!(first.applicable);
        // at least the box value pi^2/4; the grid eigenvalue sits within a
        // few percent of 5 pi^2 / 4 at this spacing
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(first.value >= pi2 / 4.0 - 1e-6 && first.value <= 1.03 * 1.25 * pi2, "{}", first.value);
        let mut prev = first.value;
        for i in 1..n {
            let mut c = first;
            assert_eq!(plb_certificates_get(list, i, &mut c), PlbStatus::Ok);
            if c.applicable {
                assert!(c.value <= prev);
                prev = c.value;
            } else {
                assert!(c.value.is_nan());
            }
        }
        assert_eq!(plb_certificates_get(list, n, &mut first), PlbStatus::OutOfRange);
        assert!(last_error().contains("out of range"));
        plb_certificates_free(list);
        plb_domain_free(d);
    }
}

#[test]
fn from_toml_and_oracle() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../domains/square-neumann-west.toml");
    let text = CString::new(std::fs::read_to_string(path).unwrap()).unwrap();
    let mut d = ptr::null_mut();
    let mut p = 0.0;
    let mut dim = 0u32;
    let mut lam = 0.0;
    unsafe {
        assert_eq!(plb_domain_from_toml(text.as_ptr(), &mut d, &mut p, &mut dim), PlbStatus::Ok);
        assert_eq!(dim, 2);
        assert_eq!(plb_oracle_eigenvalue(d, p, 1.0 / 32.0, &mut lam), PlbStatus::Ok);
        plb_domain_free(d);
        let bad = CString::new("name = 1").unwrap();
        assert_eq!(plb_domain_from_toml(bad.as_ptr(), &mut d, ptr::null_mut(), ptr::null_mut()), PlbStatus::InvalidArgument);
    }
    let exact = 1.25 * std::f64::consts::PI.powi(2);
    assert!((lam - exact).abs() < 0.05 * exact, "{lam}");
}

#[test]
fn header_is_generated() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/plap_bounds.h")).unwrap();
    for f in ["plb_best_bounds", "plb_domain_new", "plb_certificates_free", "PLB_STATUS_OUT_OF_RANGE"] {
        assert!(h.contains(f), "{f}");
    }
}
