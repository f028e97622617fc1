//! Invariant checks shared by the command-line self-test and the acceptance
//! suite. Each check returns a [`CheckOutcome`] rather than panicking.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::linalg::{Matrix, Signature};
use crate::measures::{naive_density, polar_to_z, ps_density, sector_count, PolarPoint, Spectrum};
use crate::quadrature::{integrate_1d, QuadConfig};
use crate::reductions::{ab_coeffs, cd_coeffs, term_integral};
use crate::specfun::{bessel_j0, bessel_j0_asymptotic, bessel_j0_series, dawson, phi1, Phi1Params, J0_SERIES_LIMIT};
use crate::verifiers::coset_volume_o3;
use crate::Error;

/// Result of one invariant check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    /// Set when an integral failed to converge or a routine returned an
    /// error, as opposed to a value outside tolerance.
    pub numerical_failure: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn verdict(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            pass,
            numerical_failure: false,
            detail,
        }
    }

    fn failed(name: &str, detail: String) -> Self {
        Self {
            name: name.into(),
            pass: false,
            numerical_failure: true,
            detail,
        }
    }
}

/// Seed of every randomised check.
pub const CHECK_SEED: u64 = 0x5eed_2024;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(CHECK_SEED)
}

/// Central-difference determinant of `∂(Z11, Z12, Z21, Z22)/∂(r, s, φ1, φ2)`.
pub fn polar_fd_determinant(pp: &PolarPoint<f64>, h: f64) -> Result<f64, Error> {
    let base = [pp.r, pp.s, pp.angle1, pp.angle2];
    let eval = |v: [f64; 4]| {
        polar_to_z(&PolarPoint {
            r: v[0],
            s: v[1],
            angle1: v[2],
            angle2: v[3],
        })
    };
    let mut jac = Matrix::zeros(4, 4);
    for j in 0..4 {
        let (mut up, mut dn) = (base, base);
        up[j] += h;
        dn[j] -= h;
        let (zu, zd) = (eval(up), eval(dn));
        for (i, (a, b)) in zu.as_slice().iter().zip(zd.as_slice()).enumerate() {
            jac[(i, j)] = (a - b) / (2.0 * h);
        }
    }
    jac.det()
}

/// Compares `jacobian(r, s)` with the finite-difference determinant at
/// `n` random polar points, to `1e−6` relative to `max(1, |det|)`.
pub fn jacobian_check(n: usize, jacobian: impl Fn(f64, f64) -> f64) -> CheckOutcome {
    let name = "polar jacobian vs finite differences";
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let pp = PolarPoint {
            r: rng.gen_range(0.05..2.0),
            s: rng.gen_range(0.05..2.0),
            angle1: rng.gen_range(0.0..2.0 * PI),
            angle2: rng.gen_range(0.0..2.0 * PI),
        };
        let fd = match polar_fd_determinant(&pp, 1e-5) {
            Ok(v) => v.abs(),
            Err(e) => return CheckOutcome::failed(name, e.to_string()),
        };
        worst = worst.max((fd - jacobian(pp.r, pp.s)).abs() / fd.max(1.0));
    }
    CheckOutcome::verdict(name, worst < 1e-6, format!("{n} points, max deviation {worst:.2e}"))
}

/// `C² + D² = A² + B²` at `n` random coset points and spectra.
pub fn coupling_norm_check(n: usize) -> CheckOutcome {
    let name = "C^2 + D^2 = A^2 + B^2";
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let r: f64 = rng.gen_range(0.0..0.95);
        let theta = rng.gen_range(0.0..2.0 * PI);
        let w = rng.gen_range(-1.0..1.0);
        let p: [f64; 3] = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let (a, b) = ab_coeffs(r, theta, p[0], p[1], p[2], w);
        let t = r * r / (1.0 - r * r);
        let (c, d) = cd_coeffs(t, theta, 0.5 * (p[0] - p[1]), 0.5 * (p[0] + p[1]) - p[2], w);
        let lhs = c * c + d * d;
        let rhs = a * a + b * b;
        worst = worst.max((lhs - rhs).abs() / rhs.max(1.0));
    }
    CheckOutcome::verdict(name, worst < 1e-10, format!("{n} points, max deviation {worst:.2e}"))
}

/// `term_integral(n, a) = (−1)ⁿ/n!` to `1e−6` for `n ≤ n_max` and each `a`.
pub fn term_integral_check(n_max: usize, a_values: &[f64], cfg: &QuadConfig) -> CheckOutcome {
    let name = "term integrals (-1)^n/n!";
    let mut worst = 0.0f64;
    let mut factorial = 1.0;
    for n in 0..=n_max {
        if n > 0 {
            factorial *= n as f64;
        }
        let expect = if n % 2 == 0 { 1.0 } else { -1.0 } / factorial;
        for &a in a_values {
            match term_integral(n, a, cfg) {
                Ok(r) if r.converged => worst = worst.max((r.value.re - expect).abs()),
                Ok(_) => return CheckOutcome::failed(name, format!("n = {n}, a = {a} did not converge")),
                Err(e) => return CheckOutcome::failed(name, e.to_string()),
            }
        }
    }
    CheckOutcome::verdict(name, worst < 1e-6, format!("n <= {n_max}, max deviation {worst:.2e}"))
}

/// The series, the asymptotic expansion and `(1/π)∫₀^π cos(x sin θ) dθ`
/// agree to `1e−10` on `[0, 40]`, each branch on its own side of the seam
/// and [`bessel_j0`] everywhere.
pub fn bessel_check(cfg: &QuadConfig) -> CheckOutcome {
    let name = "J0 series/asymptotic/integral";
    let cfg = cfg.with_rel_tol(cfg.rel_tol.min(1e-13)).with_abs_tol(cfg.abs_tol.min(1e-14));
    let mut worst = 0.0f64;
    for i in 0..=160 {
        let x = 0.25 * i as f64;
        let r = match integrate_1d(|th: f64| Complex::from((x * th.sin()).cos() / PI), 0.0, PI, &cfg) {
            Ok(r) if r.converged => r.value.re,
            Ok(_) => return CheckOutcome::failed(name, format!("integral at x = {x} did not converge")),
            Err(e) => return CheckOutcome::failed(name, e.to_string()),
        };
        let branch = if x <= J0_SERIES_LIMIT {
            bessel_j0_series(x)
        } else {
            bessel_j0_asymptotic(x)
        };
        worst = worst.max((branch - r).abs()).max((bessel_j0(x) - r).abs());
    }
    CheckOutcome::verdict(name, worst < 1e-10, format!("161 points, max deviation {worst:.2e}"))
}

/// `Φ1(1, ½; 3/2; x, 0) = artanh(√x)/√x` and `Φ1(1, ½; 3/2; 0, y) = D(√−y)/√−y`,
/// the `₂F₁` and `₁F₁` limits, to `1e−9`.
pub fn phi1_limits_check() -> CheckOutcome {
    let name = "Phi1 limits 2F1 and 1F1";
    let mut worst = 0.0f64;
    for x in [0.05f64, 0.3, 0.6, 0.9] {
        let expect = x.sqrt().atanh() / x.sqrt();
        match Phi1Params::new(1.0, 0.5, 1.5, x, 0.0).and_then(|p| phi1(&p)) {
            Ok(v) => worst = worst.max((v - expect).abs() / expect),
            Err(e) => return CheckOutcome::failed(name, e.to_string()),
        }
    }
    for y in [-0.5f64, -3.0, -12.0, -40.0] {
        let s = (-y).sqrt();
        let expect = dawson(s) / s;
        match Phi1Params::new(1.0, 0.5, 1.5, 0.0, y).and_then(|p| phi1(&p)) {
            Ok(v) => worst = worst.max((v - expect).abs() / expect),
            Err(e) => return CheckOutcome::failed(name, e.to_string()),
        }
    }
    CheckOutcome::verdict(name, worst < 1e-9, format!("max relative deviation {worst:.2e}"))
}

/// `|ps_density| = naive_density` on `n` random `(2, 2)` spectra, and
/// sector counts equal binomials for `(m, n) ≤ (3, 3)`.
pub fn measure_identity_check(n: usize) -> CheckOutcome {
    let name = "measure identities";
    let mut rng = rng();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let mut draw = || rng.gen_range(-3.0f64..3.0);
        let p = Spectrum::new(vec![draw(), draw()], vec![draw(), draw()]);
        let (s, a) = (ps_density(&p).abs(), naive_density(&p));
        worst = worst.max((s - a).abs() / a.max(f64::MIN_POSITIVE));
    }
    let binom = |m: u64, n: u64| (1..=m).fold(1u64, |acc, k| acc * (n + k) / k);
    let mut counts_ok = true;
    for m in 1..=3usize {
        for k in 1..=3usize {
            let sig = Signature::new(m, k).expect("valid signature");
            counts_ok &= sector_count(sig) == binom(m as u64, k as u64);
        }
    }
    CheckOutcome::verdict(
        name,
        worst < 1e-12 && counts_ok,
        format!("{n} spectra, max deviation {worst:.2e}, sector counts {}", if counts_ok { "ok" } else { "wrong" }),
    )
}

/// The `O(3)` coset volume is `2π` within `1e−8`.
pub fn coset_volume_check(cfg: &QuadConfig) -> CheckOutcome {
    let name = "O(3) coset volume 2pi";
    match coset_volume_o3(cfg) {
        Ok(r) if r.converged => {
            let dev = (r.value.re - 2.0 * PI).abs();
            CheckOutcome::verdict(name, dev < 1e-8, format!("deviation {dev:.2e}"))
        }
        Ok(_) => CheckOutcome::failed(name, "did not converge".into()),
        Err(e) => CheckOutcome::failed(name, e.to_string()),
    }
}

/// Options for [`run_all`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteOptions {
    /// Scale the Jacobian under test by `1.01`; a deliberate fault that the
    /// suite must detect.
    pub perturb_jacobian: bool,
}

/// Runs every check in a fixed order.
pub fn run_all(cfg: &QuadConfig, opts: SuiteOptions) -> Vec<CheckOutcome> {
    let scale = if opts.perturb_jacobian { 1.01 } else { 1.0 };
    vec![
        jacobian_check(100, |r, s| scale * crate::measures::polar_jacobian(r, s)),
        coupling_norm_check(200),
        term_integral_check(6, &[0.5, 1.0, 2.0], cfg),
        bessel_check(cfg),
        phi1_limits_check(),
        measure_identity_check(1000),
        coset_volume_check(cfg),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_determinant_of_identity_point() {
        let pp = PolarPoint {
            r: 1.5,
            s: 0.5,
            angle1: 0.0,
            angle2: 0.0,
        };
        let d = polar_fd_determinant(&pp, 1e-5).unwrap();
        assert!((d.abs() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn default_suite_passes() {
        for c in run_all(&QuadConfig::default(), SuiteOptions::default()) {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn perturbed_jacobian_is_caught() {
        let c = jacobian_check(10, |r, s| 1.01 * crate::measures::polar_jacobian(r, s));
        assert!(!c.pass && !c.numerical_failure);
    }

    #[test]
    fn tiny_budget_is_a_numerical_failure() {
        let cfg = QuadConfig::default().with_max_evals(10);
        assert!(coset_volume_check(&cfg).numerical_failure);
    }
}
