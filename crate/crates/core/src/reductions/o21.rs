//! `O(2,1)` with `A = diag(x, x, z)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex;

use super::{quartic_cutoff, require_positive, require_split, with_rule_error, SpectralRules};
use crate::quadrature::{integrate_1d, QuadConfig, QuadResult};
use crate::Error;

/// Integrand of `F(a)` after `y = √(1+t)`:
/// `e^{−a(y⁴−y²)/2}[1 − a(2y⁴ − y²)] = d/dy[y e^{−a(y⁴−y²)/2}]`.
pub fn f_o21_integrand(a: f64, y: f64) -> f64 {
    let y2 = y * y;
    let y4 = y2 * y2;
    (-0.5 * a * (y4 - y2)).exp() * (1.0 - a * (2.0 * y4 - y2))
}

/// `F(a) = −½ ∫₀^∞ dt/√(1+t) e^{−(t²+t)a/2}[1 − a(2t²+3t+1)]`, identically 1.
pub fn f_o21(a: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_positive("a", a)?;
    let upper = quartic_cutoff(0.5 * a, 90.0, |y| (1.0 + 2.0 * a * y.powi(4)).ln());
    let r = integrate_1d(|y| Complex::from(f_o21_integrand(a, y)), 1.0, upper, cfg)?;
    // dt/√(1+t) = 2dy, times the −½ normalisation
    Ok(r.scale(-1.0))
}

/// Spectral integral at coset radius `t` with `τ = t(x − z)`:
///
/// `∫ d³p 𝒟P e^{−½Σp²} e^{i(2xb+zc)} e^{iτ(b−c)} J0(τa)`
///
/// with `a = (p1−p2)/2`, `b = (p1+p2)/2`, `c = p3`, where the coset angle has
/// already produced the Bessel factor. In these variables the signed density
/// is `4|a|((b−c)² − a²)`; folding `a` onto `s = a²` leaves a polynomial in
/// `(b, c, s)` against the weights `e^{−b²}`, `e^{−c²/2}` and `e^{−s}`, so
/// the tensor Hermite×Hermite×Laguerre rule factorises into moments.
pub fn i_o21_spectral(x: f64, z: f64, t: f64, nodes: usize) -> Result<Complex<f64>, Error> {
    let rules = SpectralRules::new(nodes)?;
    Ok(spectral_with(&rules, x, z, t))
}

fn spectral_with(rules: &SpectralRules, x: f64, z: f64, t: f64) -> Complex<f64> {
    let tau = t * (x - z);
    let b = rules.gaussian_moments(FRAC_1_SQRT_2, 2.0 * x + tau, 2);
    let c = rules.gaussian_moments(1.0, z - tau, 2);
    let s = rules.bessel_moments(tau, 1);
    let poly = b[2] * c[0] - b[1] * c[1] * 2.0 + b[0] * c[2];
    (poly * s[0] - b[0] * c[0] * s[1]) * 4.0
}

/// Upper limit of the coset radius beyond which the spectral integral is
/// below `e^{−100}` of its peak.
fn t_cutoff(x: f64, z: f64) -> f64 {
    (2.0 * (x.abs() + z.abs()) + 20.0) / (x - z)
}

fn o21_pipeline(x: f64, z: f64, nodes: usize, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    let rules = SpectralRules::new(nodes)?;
    let upper = if cfg.tail_cutoff.is_finite() {
        cfg.tail_cutoff
    } else {
        t_cutoff(x, z)
    };
    let r = integrate_1d(
        |t: f64| spectral_with(&rules, x, z, t) / (1.0 + t).sqrt(),
        0.0,
        upper,
        cfg,
    )?;
    Ok(r)
}

/// `∫₀^∞ dt/√(1+t)` of [`i_o21_spectral`]. Its ratio to `e^{−½(2x²+z²)}` is
/// constant; with this normalisation the value is `−4√2π e^{−½(2x²+z²)}`.
///
/// The spectral rule uses `gauss_nodes + 8` points, and its difference from
/// the `gauss_nodes` result is added to the error estimate.
pub fn i_o21_special(x: f64, z: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_split(x, z)?;
    let fine = o21_pipeline(x, z, cfg.gauss_nodes + 8, cfg)?;
    let coarse = o21_pipeline(x, z, cfg.gauss_nodes, cfg)?;
    let rule_err = (fine.value - coarse.value).norm();
    let mut r = with_rule_error(fine, rule_err, cfg);
    r.n_evals += coarse.n_evals;
    Ok(r)
}

/// Closed form of [`i_o21_special`], used as a reference in tests.
#[cfg(test)]
pub(crate) fn i_o21_special_exact(x: f64, z: f64) -> f64 {
    -4.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI * (-0.5 * (2.0 * x * x + z * z)).exp()
}
