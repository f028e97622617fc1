//! Cross-checks between independent routes to the same integrals.

use hyperhs::reductions::{f_o21, f_o22_double, f_o22_phi1, i_o21_special, i_o22_special};
use hyperhs::verifiers::{direct_o11, direct_o21, o11_gaussian};
use hyperhs::{Measure, QuadConfig};
use std::f64::consts::PI;

#[test]
fn direct_o21_matches_reduced_pipeline() {
    let cfg = QuadConfig::default().with_rel_tol(1e-6);
    for (x, z) in [(1.0, -1.0), (0.5, -0.5)] {
        let direct = direct_o21(x, z, Measure::Conjectured, &cfg).unwrap();
        let reduced = i_o21_special(x, z, &cfg).unwrap();
        assert!(direct.converged && reduced.converged);
        let rel = (direct.value - reduced.value).norm() / reduced.value.norm();
        assert!(rel < 1e-3, "({x}, {z}): {rel:e}");
    }
}

#[test]
fn o22_pipeline_is_gaussian_with_known_constant() {
    let cfg = QuadConfig::default().with_rel_tol(1e-5);
    for (x, z) in [(1.0, -1.0), (0.5, -1.5), (2.0, -0.5)] {
        let r = i_o22_special(x, z, &cfg).unwrap();
        assert!(r.converged);
        let expected = 32.0 * PI * (-x * x - z * z).exp();
        assert!((r.value.re / expected - 1.0).abs() < 1e-6, "({x}, {z})");
        assert!(r.value.im.abs() < 1e-6 * expected);
    }
}

#[test]
fn o22_reduced_forms_agree() {
    let cfg = QuadConfig::default().with_rel_tol(1e-8);
    for a in [0.7, 2.5] {
        let d = f_o22_double(a, &cfg).unwrap();
        let p = f_o22_phi1(a, &cfg).unwrap();
        assert!((d.value - p.value).norm() < 1e-4, "a = {a}");
    }
}

#[test]
fn o21_scan_edges() {
    let cfg = QuadConfig::default();
    for a in [0.1, 10.0] {
        let r = f_o21(a, &cfg).unwrap();
        assert!(r.converged && (r.value.re - 1.0).abs() < 1e-8, "a = {a}");
    }
}

#[test]
fn o11_ratio_is_constant_for_signed_measure() {
    let cfg = QuadConfig::default().with_rel_tol(1e-8);
    let pts = [(1.0, 1.0, 0.0), (1.5, 0.5, 0.3), (0.8, 1.2, 0.2)];
    let ratios: Vec<_> = pts
        .iter()
        .map(|&(a1, a2, o)| direct_o11(a1, a2, o, Measure::Conjectured, &cfg).unwrap().value / o11_gaussian(a1, a2, o))
        .collect();
    for r in &ratios {
        assert!((r / ratios[0] - 1.0).norm() < 1e-6);
    }
}

#[test]
fn invalid_sources_are_rejected() {
    let cfg = QuadConfig::default();
    assert!(i_o21_special(-1.0, 1.0, &cfg).is_err());
    assert!(f_o21(-0.5, &cfg).is_err());
    assert!(direct_o11(1.0, 1.0, 2.0, Measure::Conjectured, &cfg).is_err());
}
