use std::ffi::{CStr, CString};
use std::ptr;

use dcmwalk_ffi::*;

const HEADER: &str = include_str!("../include/dcmwalk.h");

fn last_error() -> String {
    let p = dcm_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn toy() -> *mut DcmDistribution {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { dcm_distribution_toy(&mut d) }, DcmStatus::Ok);
    assert!(!d.is_null());
    d
}

#[test]
fn toy_params_match_reference() {
    let d = toy();
    let mut p = DcmParams {
        lambda: 0.0,
        nu: 0.0,
        s_minus: 0.0,
        nu_hat: 0.0,
        h_hat: 0.0,
        h_plus: 0.0,
        a0: 0.0,
        phi_a0: 0.0,
        exponent: 0.0,
    };
    assert_eq!(unsafe { dcm_params(d, &mut p) }, DcmStatus::Ok);
    assert!((p.lambda - 2.5).abs() < 1e-12);
    assert!((p.h_hat - 0.936426).abs() < 1e-5);
    assert!((p.nu_hat - 0.181095).abs() < 1e-5);
    assert!((p.s_minus - 0.4812099).abs() < 1e-6);
    assert!((p.a0 - 1.06671).abs() < 1e-4);
    assert!((p.phi_a0 - 1.65129).abs() < 1e-4);
    assert!((p.exponent - 1.56708).abs() < 1e-4);
    unsafe { dcm_distribution_free(d) };
}

#[test]
fn json_matches_builtin_toy() {
    let json = CString::new(include_str!("../../../data/toy.json")).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { dcm_distribution_from_json(json.as_ptr(), &mut d) }, DcmStatus::Ok);
    let t = toy();
    let mut a = std::mem::MaybeUninit::<DcmParams>::uninit();
    let mut b = std::mem::MaybeUninit::<DcmParams>::uninit();
    unsafe {
        assert_eq!(dcm_params(d, a.as_mut_ptr()), DcmStatus::Ok);
        assert_eq!(dcm_params(t, b.as_mut_ptr()), DcmStatus::Ok);
        let (a, b) = (a.assume_init(), b.assume_init());
        assert_eq!(a.exponent.to_bits(), b.exponent.to_bits());
        assert_eq!(a.s_minus.to_bits(), b.s_minus.to_bits());
        dcm_distribution_free(d);
        dcm_distribution_free(t);
    }
}

#[test]
fn bad_json_is_validation_error() {
    let json = CString::new(r#"{"pmf": [{"in": 1, "out": 1, "p": 0.5}]}"#).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { dcm_distribution_from_json(json.as_ptr(), &mut d) }, DcmStatus::Validation);
    assert!(d.is_null());
    assert!(last_error().contains("sum"));

    let garbage = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { dcm_distribution_from_json(garbage.as_ptr(), &mut d) }, DcmStatus::Validation);
}

#[test]
fn unbalanced_law_fails_in_params() {
    let json = CString::new(r#"{"pmf": [{"in": 1, "out": 2, "p": 1.0}]}"#).unwrap();
    let mut d = ptr::null_mut();
    let mut p = std::mem::MaybeUninit::<DcmParams>::uninit();
    unsafe {
        assert_eq!(dcm_distribution_from_json(json.as_ptr(), &mut d), DcmStatus::Ok);
        assert_eq!(dcm_params(d, p.as_mut_ptr()), DcmStatus::Validation);
        dcm_distribution_free(d);
    }
}

#[test]
fn null_pointers_are_reported() {
    let mut d = ptr::null_mut();
    unsafe {
        assert_eq!(dcm_distribution_from_json(ptr::null(), &mut d), DcmStatus::NullPointer);
        assert_eq!(dcm_distribution_toy(ptr::null_mut()), DcmStatus::NullPointer);
        assert_eq!(dcm_params(ptr::null(), ptr::null_mut()), DcmStatus::NullPointer);
        assert_eq!(dcm_rout_exponent(2, ptr::null_mut()), DcmStatus::NullPointer);
        assert_eq!(dcm_graph_sample(ptr::null(), 10, 1, &mut ptr::null_mut()), DcmStatus::NullPointer);
        assert_eq!(dcm_graph_from_edges(2, ptr::null(), ptr::null(), 1, &mut ptr::null_mut()), DcmStatus::NullPointer);
        assert_eq!(dcm_stationary(ptr::null(), 1e-12, &mut ptr::null_mut()), DcmStatus::NullPointer);
        assert_eq!(dcm_graph_n(ptr::null()), 0);
        assert_eq!(dcm_graph_m(ptr::null()), 0);
        dcm_distribution_free(ptr::null_mut());
        dcm_graph_free(ptr::null_mut());
        dcm_stationary_free(ptr::null_mut());
    }
    assert!(!last_error().is_empty());
}

#[test]
fn rout_exponent() {
    let mut e = 0.0;
    assert_eq!(unsafe { dcm_rout_exponent(2, &mut e) }, DcmStatus::Ok);
    assert!(e.is_finite() && e > 1.0);
    let mut e3 = 0.0;
    assert_eq!(unsafe { dcm_rout_exponent(3, &mut e3) }, DcmStatus::Ok);
    assert!(e3 > 1.0 && e3 < e);
    assert_ne!(unsafe { dcm_rout_exponent(1, &mut e) }, DcmStatus::Ok);
}

#[test]
fn cycle_stationary_round_trip() {
    let src = [0u32, 1, 2];
    let dst = [1u32, 2, 0];
    let mut g = ptr::null_mut();
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(dcm_graph_from_edges(3, src.as_ptr(), dst.as_ptr(), 3, &mut g), DcmStatus::Ok);
        assert_eq!((dcm_graph_n(g), dcm_graph_m(g)), (3, 3));
        assert_eq!(dcm_stationary(g, 1e-13, &mut s), DcmStatus::Ok);
        let mut sum = std::mem::MaybeUninit::<DcmStationarySummary>::uninit();
        assert_eq!(dcm_stationary_summary(s, sum.as_mut_ptr()), DcmStatus::Ok);
        let sum = sum.assume_init();
        assert_eq!(sum.support_size, 3);
        assert!((sum.pi_min - 1.0 / 3.0).abs() < 1e-9);
        assert!((sum.pi_max - 1.0 / 3.0).abs() < 1e-9);

        let mut small = [0.0; 2];
        assert_eq!(dcm_stationary_pi(s, small.as_mut_ptr(), 2), DcmStatus::Capacity);
        assert!(last_error().contains("buffer"));
        let mut buf = [0.0; 3];
        assert_eq!(dcm_stationary_pi(s, buf.as_mut_ptr(), 3), DcmStatus::Ok);
        assert!(buf.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-9));
        dcm_stationary_free(s);
        dcm_graph_free(g);
    }
}

#[test]
fn edges_out_of_range_rejected() {
    let src = [0u32, 5];
    let dst = [1u32, 0];
    let mut g = ptr::null_mut();
    let st = unsafe { dcm_graph_from_edges(2, src.as_ptr(), dst.as_ptr(), 2, &mut g) };
    assert_eq!(st, DcmStatus::Validation);
    assert!(g.is_null());
}

#[test]
fn sampled_graph_is_deterministic() {
    let d = toy();
    let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(dcm_graph_sample(d, 2000, 7, &mut a), DcmStatus::Ok);
        assert_eq!(dcm_graph_sample(d, 2000, 7, &mut b), DcmStatus::Ok);
        assert_eq!(dcm_graph_n(a), 2000);
        assert_eq!(dcm_graph_m(a), dcm_graph_m(b));
        let (mut sa, mut sb) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(dcm_stationary(a, 1e-12, &mut sa), DcmStatus::Ok);
        assert_eq!(dcm_stationary(b, 1e-12, &mut sb), DcmStatus::Ok);
        let mut pa = vec![0.0; 2000];
        let mut pb = vec![0.0; 2000];
        assert_eq!(dcm_stationary_pi(sa, pa.as_mut_ptr(), 2000), DcmStatus::Ok);
        assert_eq!(dcm_stationary_pi(sb, pb.as_mut_ptr(), 2000), DcmStatus::Ok);
        assert_eq!(pa, pb);
        assert!((pa.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        dcm_stationary_free(sa);
        dcm_stationary_free(sb);
        dcm_graph_free(a);
        dcm_graph_free(b);
        dcm_distribution_free(d);
    }
}

#[test]
fn header_declares_every_export() {
    let src = include_str!("../src/lib.rs");
    let names: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert_eq!(names.len(), 15);
    for name in names {
        assert!(HEADER.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["DcmDistribution", "DcmGraph", "DcmStationary", "DcmParams", "DcmStationarySummary"] {
        assert!(HEADER.contains(ty), "{ty} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = std::process::Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(cc.status.success());
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("check.c");
    std::fs::write(
        &c,
        "#include \"dcmwalk.h\"\nint main(void) { DcmDistribution *d = 0; return dcm_distribution_toy(&d) == DCM_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let out = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&c)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
