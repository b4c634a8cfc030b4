use super::*;
use crate::expr::rational;
use std::f64::consts::{E, PI};

fn defaults(kind: ProfileKind) -> ProfileFunction {
    make_profile(kind, ProfileParams::default()).unwrap()
}

#[test]
fn every_default_profile_validates() {
    for kind in ProfileKind::ALL {
        let p = defaults(kind);
        let rep = validate_profile(&p, 401);
        assert!(rep.passed, "{kind}: {}", rep.to_json());
    }
}

#[test]
fn f_is_even_and_g_is_odd() {
    let f = defaults(ProfileKind::F);
    let g = defaults(ProfileKind::G);
    for i in 0..=200 {
        let t = -1.0 + i as f64 / 100.0;
        assert!((f.eval(0, t) - f.eval(0, -t)).abs() < 1e-12);
        assert!((g.eval(0, t) + g.eval(0, -t)).abs() < 1e-12);
    }
    assert!((f.eval(0, -0.9) - (-0.9f64).exp()).abs() < 1e-15);
    assert!((f.eval(0, 0.8) - (-0.8f64).exp()).abs() < 1e-15);
    assert_eq!(g.eval(0, -0.95), 1.0);
    assert_eq!(g.eval(0, 0.95), -1.0);
}

#[test]
fn pairs_satisfy_coupling() {
    let rep = validate_pair(&defaults(ProfileKind::F), &defaults(ProfileKind::G), 401);
    assert!(rep.passed && rep.min_value.unwrap() > 0.0, "{}", rep.to_json());
    let rep = validate_pair(&defaults(ProfileKind::H1), &defaults(ProfileKind::H2), 401);
    assert!(rep.passed && rep.min_value.unwrap() > 0.0, "{}", rep.to_json());
    let sq = ProfileParams { variable: Variable::Square, ..Default::default() };
    let h1 = make_profile(ProfileKind::H1, sq.clone()).unwrap();
    let h2 = make_profile(ProfileKind::H2, sq).unwrap();
    assert!(validate_pair(&h1, &h2, 401).passed);
}

#[test]
fn disk_profiles_near_axis() {
    let h1 = defaults(ProfileKind::H1);
    let h2 = defaults(ProfileKind::H2);
    assert_eq!(h2.eval(0, 0.0), 0.0);
    assert_eq!(h2.eval(1, 0.0), 0.0);
    assert_eq!(h1.eval(1, 0.0), 0.0);
    assert_eq!(h1.eval(0, 0.0), 2.0);
    let r = 1e-3;
    assert!((h2.eval(0, r) / (r * r) - 1.0).abs() < 1e-12);
    assert!((h2.eval(0, 0.5) - 0.25).abs() < 1e-15);
    assert_eq!(h2.eval(0, 3.0), 1.0);
    assert!((h1.eval(0, 2.0) - (-1.0f64).exp()).abs() < 1e-15);
    let q = make_profile(ProfileKind::H1, ProfileParams { h1_model: H1Model::Quartic, ..Default::default() }).unwrap();
    assert!((q.eval(0, 0.5) - (2.0 - 0.0625)).abs() < 1e-15);
    let quot = make_profile(ProfileKind::H2, ProfileParams { variable: Variable::SquareQuotient, ..Default::default() }).unwrap();
    for s in [0.1, 0.7, 0.9, 4.0] {
        let h2s = make_profile(ProfileKind::H2, ProfileParams { variable: Variable::Square, ..Default::default() }).unwrap();
        assert!((quot.eval(0, s) - h2s.eval(0, s) / s).abs() < 1e-14);
    }
}

#[test]
fn u_matches_documented_examples() {
    let u = defaults(ProfileKind::U);
    let len = 2.0 * PI * 10.0;
    assert_eq!(u.eval(0, 0.05), 0.0);
    assert_eq!(u.eval(0, len - 0.05), 1.0);
    assert_eq!(u.eval(1, 0.05), 0.0);
    assert_eq!(u.eval(1, len - 0.05), 0.0);
    let sup = (0..=10000).map(|i| u.eval(1, len * i as f64 / 10000.0).abs()).fold(0.0, f64::max);
    assert!(sup <= STEP_SLOPE_MAX / (len - 0.2));
    assert!(sup * 10.0 < 0.4);
}

#[test]
fn k_matches_documented_examples() {
    let k = defaults(ProfileKind::K);
    assert!((k.eval(0, -1.05) - E.recip()).abs() < 1e-15);
    assert!((k.eval(0, 0.0) - 1.0).abs() < 1e-15);
    assert!((k.eval(1, 0.0) - 1.0).abs() < 1e-15);
    assert!((k.eval(0, 1.02) - E).abs() < 1e-15);
}

#[test]
fn collar_profiles() {
    let g1 = defaults(ProfileKind::G1);
    let g2 = defaults(ProfileKind::G2);
    assert_eq!(g1.eval(0, -1.0), 1.0);
    assert!((g1.eval(0, -0.5) - (-0.5f64).exp()).abs() < 1e-15);
    assert!((g2.eval(0, 0.5) - (-0.5f64).exp()).abs() < 1e-15);
    assert_eq!(g2.eval(0, 1.0), 1.0);
}

#[test]
fn broken_g_reports_oddness_violations() {
    let body: Expr = "1 - 2 x^2".parse().unwrap();
    let g = defaults(ProfileKind::G).with_realization(&body, "x").unwrap();
    let rep = validate_profile(&g, 101);
    assert!(!rep.passed);
    assert!(rep.violations.iter().any(|v| v.constraint == "odd"));
}

#[test]
fn infeasible_parameters_are_rejected() {
    let bad = |kind, p: ProfileParams| make_profile(kind, p).is_err();
    assert!(bad(ProfileKind::K, ProfileParams { eps: 0.3, ..Default::default() }));
    assert!(bad(ProfileKind::H2, ProfileParams { big_r: 0.5, ..Default::default() }));
    assert!(bad(ProfileKind::G, ProfileParams { width: 0.6, ..Default::default() }));
    assert!(bad(ProfileKind::U, ProfileParams { interval: Some((0.0, 0.1)), ..Default::default() }));
}

#[test]
fn rewrite_uses_segments_and_facts() {
    let f = defaults(ProfileKind::F);
    let e = f.at(Expr::var("t")).diff("t");
    let lo = rational(-1, 1);
    let hi = rational(-1, 2);
    let got = f.rewrite(&e, Some(("t", &lo, &hi)));
    assert_eq!(got, Expr::exp(Expr::var("t")));
    let inside = f.rewrite(&e, Some(("t", &rational(-1, 1), &rational(0, 1))));
    assert_eq!(inside, e);
    let at0 = f.rewrite(&Expr::profile("f", 1, Expr::zero()), None);
    assert!(at0.is_zero());
    let g = defaults(ProfileKind::G);
    let shifted = g.at(Expr::var("t") + Expr::constant(rational(-1, 10)));
    let hi_seg = g.rewrite(&shifted, Some(("t", &rational(1, 1), &rational(11, 10))));
    assert_eq!(hi_seg, Expr::int(-1));
}
