mod common;

use common::*;
use dcmwalk::bp::BpParameters;
use dcmwalk::degree::{thin_tail_family, toy_distribution, truncated_poisson_out_regular, BiDegreeDistribution};
use dcmwalk::rate::{analyze, rate_function, rout_exponent, rout_survival, spine_log_law, ExtReal, FiniteLogLaw};
use proptest::prelude::*;

fn toy_law() -> (BpParameters, FiniteLogLaw) {
    let d = toy_distribution();
    let p = BpParameters::from_distribution(&d).unwrap();
    let law = spine_log_law(&d, &p).unwrap().unwrap();
    (p, law)
}

/// z log(z/p) + (1-z) log((1-z)/(1-p)), with 0 log 0 = 0.
fn be(z: f64, p: f64) -> f64 {
    let t = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    t(z, p) + t(1.0 - z, 1.0 - p)
}

#[test]
fn golden_constants() {
    let (p, r) = analyze(&toy_distribution(), 101).unwrap();
    assert!((p.lambda - 2.5).abs() < 1e-12);
    assert!((p.h_hat.unwrap() - TOY_H_HAT).abs() < 1e-4);
    assert!((p.nu_hat - TOY_NU_HAT).abs() < 1e-4);
    assert!((r.a0.unwrap() - TOY_A0).abs() < 1e-4);
    assert!((r.phi_a0.as_f64() - TOY_PHI_A0).abs() < 1e-4);
    assert!((r.exponent - TOY_EXPONENT).abs() < 1e-4);
    assert!(!r.a0_at_boundary && !r.degenerate);
}

#[test]
fn survival_matches_pgf_iteration() {
    let (p, _) = toy_law();
    // In-offspring of D̂ is 0 or 5 with equal weight.
    let q = extinction(&[0.5, 0.0, 0.0, 0.0, 0.0, 0.5]);
    assert!((p.s_minus - (1.0 - q)).abs() < 1e-12);
}

#[test]
fn spine_law_is_two_point() {
    let (_, law) = toy_law();
    let a = law.atoms();
    assert_eq!(a.len(), 2);
    assert!((a[0].0 - 2f64.ln()).abs() < 1e-15 && (a[1].0 - 3f64.ln()).abs() < 1e-15);
    assert!((a[1].1 - 0.6).abs() < 1e-12);
}

#[test]
fn rate_function_matches_bernoulli_transform() {
    let (_, law) = toy_law();
    let (l2, l32) = (2f64.ln(), 1.5f64.ln());
    for i in 0..100 {
        let z = l2 + l32 * i as f64 / 99.0;
        let x = ((z - l2) / l32).clamp(0.0, 1.0);
        let got = rate_function(&law, z).as_f64();
        assert!((got - be(x, 0.6)).abs() < 1e-9, "z={z}: {got} vs {}", be(x, 0.6));
    }
    assert_eq!(rate_function(&law, l2 - 1e-9), ExtReal::PosInf);
    assert_eq!(rate_function(&law, 3f64.ln() + 1e-9), ExtReal::PosInf);
}

#[test]
fn rate_vanishes_at_mean() {
    let (p, law) = toy_law();
    let h = p.h_hat.unwrap();
    assert!((law.mean() - h).abs() < 1e-12);
    assert!(rate_function(&law, h).as_f64() <= 1e-10);
}

#[test]
fn rate_monotone_away_from_mean() {
    let (_, law) = toy_law();
    let m = law.mean();
    let (lo, hi) = (law.min_value(), law.max_value());
    let mut prev = f64::INFINITY;
    for i in 0..=200 {
        let z = lo + (m - lo) * i as f64 / 200.0;
        let v = rate_function(&law, z).as_f64();
        assert!(v <= prev + 1e-12);
        prev = v;
    }
    let mut prev = 0.0;
    for i in 0..=200 {
        let z = m + (hi - m) * i as f64 / 200.0;
        let v = rate_function(&law, z).as_f64();
        assert!(v + 1e-12 >= prev);
        prev = v;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn rate_convex(u in 0.0f64..1.0, v in 0.0f64..1.0, w in 0.0f64..1.0) {
        let (_, law) = toy_law();
        let (lo, hi) = (law.min_value(), law.max_value());
        let mut zs = [lo + (hi - lo) * u, lo + (hi - lo) * v, lo + (hi - lo) * w];
        zs.sort_by(f64::total_cmp);
        prop_assume!(zs[2] - zs[0] > 1e-9);
        let t = (zs[2] - zs[1]) / (zs[2] - zs[0]);
        let f = |z: f64| rate_function(&law, z).as_f64();
        prop_assert!(f(zs[1]) <= t * f(zs[0]) + (1.0 - t) * f(zs[2]) + 1e-9);
    }

    #[test]
    fn rate_nonnegative_on_random_laws(p in 0.01f64..0.99, a in 0.1f64..3.0, b in 0.1f64..3.0, z in 0.0f64..1.0) {
        let law = FiniteLogLaw::new([(a, p), (a + b, 1.0 - p)]).unwrap();
        let x = a + b * z;
        let got = rate_function(&law, x).as_f64();
        prop_assert!(got >= 0.0);
        prop_assert!((got - be(z, 1.0 - p)).abs() < 1e-8);
    }
}

#[test]
fn thin_tail_family_has_a0_one() {
    let mut prev = 0.0;
    for m in [5u32, 10, 20] {
        let (p, r) = analyze(&thin_tail_family(m).unwrap(), 11).unwrap();
        assert!((r.a0.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.phi_a0.as_f64() - p.nu_hat.ln().abs()).abs() < 1e-9);
        assert!(r.exponent > prev);
        prev = r.exponent;
    }
}

#[test]
fn min_in_degree_two_is_degenerate() {
    for entries in [
        vec![((2, 2), 1.0)],
        vec![((2, 2), 0.5), ((3, 3), 0.5)],
        vec![((2, 3), 0.5), ((3, 2), 0.5)],
        vec![((4, 2), 0.5), ((2, 4), 0.5)],
    ] {
        let d = BiDegreeDistribution::new(entries).unwrap();
        let (p, r) = analyze(&d, 11).unwrap();
        assert_eq!(p.nu_hat, 0.0);
        assert_eq!(r.exponent, 1.0);
        assert!(r.degenerate);
    }
}

#[test]
fn rout_against_bisection_oracle() {
    for r in [2u32, 3, 5] {
        let s = rout_survival_oracle(r as f64);
        assert!((rout_survival(r) - s).abs() < 1e-12);
        let lr = (r as f64).ln();
        let closed = 1.0 + lr / (s * r as f64 - lr);
        assert!((rout_exponent(r).unwrap() - closed).abs() < 1e-12);
        let (_, rep) = analyze(&truncated_poisson_out_regular(r, 60).unwrap(), 11).unwrap();
        assert!((rep.exponent - closed).abs() < 2e-3, "r={r}: {} vs {closed}", rep.exponent);
    }
    assert!(rout_exponent(1).is_err());
}
