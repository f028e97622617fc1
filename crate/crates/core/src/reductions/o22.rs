//! `O(2,2)` with `A = diag(x, x, z, z)`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::sync::Mutex;

use num_complex::Complex;

use super::{require_positive, require_split, with_rule_error, SpectralRules};
use crate::quadrature::{integrate_1d, integrate_2d, QuadConfig, QuadResult, Region};
use crate::specfun::{bessel_j0, phi1, Phi1Params};
use crate::Error;

/// `(1/2π)∫₀^{2π} e^{i Tr[O diag(a) Oᵀ diag(b)]} dφ` over plane rotations `O`:
/// `e^{i(a1+a2)(b1+b2)/2} J0((a1−a2)(b1−b2)/2)`.
pub fn so2_pair_integral(a1: f64, a2: f64, b1: f64, b2: f64) -> Complex<f64> {
    Complex::new(0.0, 0.5 * (a1 + a2) * (b1 + b2)).exp() * bessel_j0(0.5 * (a1 - a2) * (b1 - b2))
}

/// `𝓕[a] = ∫₁^∞ dt ∫₀^{(t−1)²} dv e^{−a²(t²−1+v)/4}
/// [¼a⁴t²(t²−v) − a²t² + 1] / √([(t+1)²−v][(t−1)²−v])`,
/// identically 1. The inner range uses `v = (t−1)² sin²ψ`.
pub fn f_o22_double(a: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_positive("a", a)?;
    let a2 = a * a;
    let t_max = (1.0 + 400.0 / a2).sqrt();
    let region = Region::Rectangle {
        x: (1.0, t_max),
        y: (0.0, FRAC_PI_2),
    };
    let r = integrate_2d(
        |t: f64, psi: f64| {
            let sp = psi.sin();
            let v = ((t - 1.0) * sp).powi(2);
            let poly = 0.25 * a2 * a2 * t * t * (t * t - v) - a2 * t * t + 1.0;
            let jac = 2.0 * (t - 1.0) * sp / ((t + 1.0).powi(2) - v).sqrt();
            Complex::from((-0.25 * a2 * (t * t - 1.0 + v)).exp() * poly * jac)
        },
        &region,
        cfg,
    )?;
    Ok(r)
}

/// Integrand of [`f_o22_phi1`] at `x > 1`.
fn phi1_integrand(a: f64, x: f64) -> Result<f64, Error> {
    let a2 = a * a;
    let xm = x - 1.0;
    let big_x = (xm / x).powi(2);
    let big_y = -a2 * xm * xm;
    let p = Phi1Params::new(1.0, 0.5, 1.5, big_x, big_y)?;
    let q = Phi1Params::new(2.0, 0.5, 2.5, big_x, big_y)?;
    let lin = 2.0 * x - 1.0;
    let bracket = (a2 * lin * lin - 2.0).powi(2) * phi1(&p)?
        - 8.0 / 3.0 * a2 * a2 * xm * xm * lin * lin * phi1(&q)?;
    Ok((-a2 * (x * x - x)).exp() * xm / x * bracket)
}

/// `𝓕[a]` as a single integral over `x ∈ (1, ∞)` of Humbert `Φ1` terms.
pub fn f_o22_phi1(a: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_positive("a", a)?;
    let a2 = a * a;
    // e^{−a²(x²−x)} against a polynomial of degree 8 in a·x
    let mut x_max = 2.0f64;
    for _ in 0..50 {
        let budget = 80.0 + 8.0 * (1.0 + a * x_max).ln();
        x_max = 0.5 + (0.25 + budget / a2).sqrt();
    }
    let failure = Mutex::new(None);
    let r = integrate_1d(
        |x: f64| match phi1_integrand(a, x) {
            Ok(v) => Complex::from(v),
            Err(e) => {
                failure.lock().unwrap().get_or_insert(e);
                Complex::from(0.0)
            }
        },
        1.0,
        x_max,
        cfg,
    )?;
    match failure.into_inner().unwrap() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Spectral part of the `O(2,2)` pipeline at coset point `(u, v)`.
///
/// The spectrum `(p1, p2, p3, p4)` is rotated into pair means `(b, c)` and
/// half-differences `(a1, a2)` of each block; the coset angles have turned
/// the half-differences into `J0(A|u−v|·|a_i|)`. The signed density
/// `|p1−p2|(p1−p3)(p1−p4)(p2−p3)(p2−p4)|p3−p4|` becomes
/// `16|a1||a2|((b−c)² − a1²)((b−c)² − a2²)` and each `|a_i|` folds onto
/// `s_i = a_i²` against `e^{−s_i}`.
fn o22_spectral(rules: &SpectralRules, x: f64, z: f64, u: f64, v: f64) -> Complex<f64> {
    let ad = x - z;
    let sum = ad * (u + v);
    let alpha = 2.0 * z + sum;
    let gamma = 2.0 * x - sum;
    let am = rules.gaussian_moments(FRAC_1_SQRT_2, alpha, 4);
    let cm = rules.gaussian_moments(FRAC_1_SQRT_2, gamma, 4);
    // E_k = ∫∫ (b − c)^k e^{−b²−c²} e^{iαb + iγc}
    let binom = [[1.0, 0.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0, 0.0], [1.0, 3.0, 3.0, 1.0, 0.0], [1.0, 4.0, 6.0, 4.0, 1.0]];
    let e = |k: usize| -> Complex<f64> {
        (0..=k)
            .map(|j| {
                let sign = if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 };
                am[j] * cm[k - j] * (binom[k][j] * sign)
            })
            .sum()
    };
    let s = rules.bessel_moments(ad * (u - v).abs(), 2);
    let (e0, e2, e4) = (e(0), e(2), e(4));
    (e4 * (s[0] * s[0]) - e2 * (4.0 * s[1] * s[0]) + e0 * (2.0 * s[2] * s[0] - 2.0 * s[1] * s[1])) * 16.0
}

fn o22_pipeline(x: f64, z: f64, nodes: usize, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    let rules = SpectralRules::new(nodes)?;
    let u_max = 1.0 + if cfg.tail_cutoff.is_finite() {
        cfg.tail_cutoff
    } else {
        (2.0 * (x.abs() + z.abs()) + 20.0) / (x - z)
    };
    let xi_max = u_max.sqrt().acosh();
    let bounds = |xi: f64| (0.0, xi);
    let region = Region::Variable {
        x: (0.0, xi_max),
        bounds: &bounds,
    };
    let r = integrate_2d(
        |xi: f64, eta: f64| {
            let u = xi.cosh().powi(2);
            let v = eta.cosh().powi(2);
            o22_spectral(&rules, x, z, u, v) * (8.0 * (u - v).abs())
        },
        &region,
        cfg,
    )?;
    Ok(r)
}

/// Full `O(2,2)` pipeline: coset coordinates `u = cosh²ξ`, `v = cosh²η`
/// with measure `|u−v| du dv / √(u(u−1)v(v−1))`, and the four-dimensional
/// spectral integral by moments. The value is `32π e^{−x²−z²}`.
///
/// As in [`super::i_o21_special`], the difference between `gauss_nodes`
/// and `gauss_nodes + 8` spectral nodes is added to the error estimate.
pub fn i_o22_special(x: f64, z: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_split(x, z)?;
    let fine = o22_pipeline(x, z, cfg.gauss_nodes + 8, cfg)?;
    let coarse = o22_pipeline(x, z, cfg.gauss_nodes, cfg)?;
    let rule_err = (fine.value - coarse.value).norm();
    let mut r = with_rule_error(fine, rule_err, cfg);
    r.n_evals += coarse.n_evals;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn pair_integral_special_cases() {
        let v = so2_pair_integral(0.3, 1.1, 0.7, 0.7);
        assert!((v - Complex::new(0.0, 1.4 * 0.7).exp()).norm() < 1e-15);
        let v = so2_pair_integral(0.8, 0.8, 1.3, -1.3);
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn pair_integral_matches_angular_quadrature() {
        let cfg = QuadConfig::default().with_rel_tol(1e-13).with_abs_tol(1e-14);
        let (a1, a2, b1, b2) = (1.3, -0.4, 0.9, 2.2);
        let r = integrate_1d(
            |phi: f64| {
                let (s, c) = phi.sin_cos();
                // Tr[O diag(a) Oᵀ diag(b)]
                let tr = b1 * (a1 * c * c + a2 * s * s) + b2 * (a1 * s * s + a2 * c * c);
                Complex::new(0.0, tr).exp() / (2.0 * PI)
            },
            0.0,
            2.0 * PI,
            &cfg,
        )
        .unwrap();
        assert!((r.value - so2_pair_integral(a1, a2, b1, b2)).norm() < 1e-10);
    }

    #[test]
    fn double_form_is_one() {
        let cfg = QuadConfig::default().with_rel_tol(1e-8);
        for a in [0.5, 1.0, 3.0] {
            let r = f_o22_double(a, &cfg).unwrap();
            assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn phi1_form_agrees() {
        let cfg = QuadConfig::default().with_rel_tol(1e-8);
        for a in [1.0, 2.0] {
            let r = f_o22_phi1(a, &cfg).unwrap();
            assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-5);
        }
        assert_eq!(phi1_integrand(1.5, 1.0).unwrap(), 0.0);
    }
}
