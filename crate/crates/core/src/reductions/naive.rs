//! Extra contributions produced by the naive measure `|Δ(P)|` in the limit
//! of nearly equal source eigenvalues, with Bessel factors set to one.
//! These are approximations valid only for small `x − z`.

use num_complex::Complex;

use super::{require_positive, require_split};
use crate::quadrature::{integrate_1d_breaks, QuadConfig, QuadResult};
use crate::specfun::dawson;
use crate::Error;

/// `∫₀¹ a(1 − a²) e^{−n²a²} da = [e^{−n²} + n² − 1]/(2n⁴)`, with a Taylor
/// expansion near `n = 0` where the closed form cancels.
pub fn a_moment_closed_form(n: f64) -> f64 {
    let n2 = n * n;
    if n2 < 0.05 {
        // Σ_{k≥2} (−n²)^{k−2}/(2·k!)
        let mut term = 0.25;
        let mut sum = 0.0;
        for k in 2..20 {
            sum += term;
            term *= -n2 / (k + 1) as f64;
        }
        return sum;
    }
    ((-n2).exp() + n2 - 1.0) / (2.0 * n2 * n2)
}

/// Extra `O(2,1)` contribution `∫₀^∞ dt/√(1+t)` of
/// `½[d²(3t+2)² − 2] e^{−d²(3t+2)²/12} − e^{−d²(3t+2)²/48}` with `d = x − z`,
/// times `e^{−(2x+z)²/6}`. It grows like `d^{−1/2}` as `d → 0`.
pub fn naive_o21_tail(x: f64, z: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_split(x, z)?;
    let d = x - z;
    let d2 = d * d;
    // y = √(1+t): dt/√(1+t) = 2dy and 3t + 2 = 3y² − 1
    let y_max = ((12.0 * 48f64.sqrt() / d + 1.0) / 3.0).sqrt();
    let mut points = vec![1.0];
    let mut p = y_max;
    let mut inner = Vec::new();
    while p > 1.0 + 1e-3 {
        inner.push(p);
        p = 1.0 + (p - 1.0) / 4.0;
    }
    points.extend(inner.into_iter().rev());
    points.push(2.0 * y_max);
    let r = integrate_1d_breaks(
        |y: f64| {
            let q2 = (3.0 * y * y - 1.0).powi(2) * d2;
            let v = 0.5 * (q2 - 2.0) * (-q2 / 12.0).exp() - (-q2 / 48.0).exp();
            Complex::from(2.0 * v)
        },
        &points,
        cfg,
    )?;
    Ok(r.scale((-(2.0 * x + z).powi(2) / 6.0).exp()))
}

/// `d_k = (2k−1)!!/2^{k+1}`, coefficients of `D(s) ~ Σ d_k s^{−2k−1}`.
fn dawson_coeffs(n: usize) -> Vec<f64> {
    let mut d = vec![0.5];
    for k in 1..n {
        let prev = d[k - 1];
        d.push(prev * (2 * k - 1) as f64 / 2.0);
    }
    d
}

/// Beyond this `s` the cancelling combinations of the Dawson function are
/// replaced by their asymptotic series.
const DAWSON_SERIES_FROM: f64 = 8.0;

/// `s/2 − (s² − ½) D(s)`.
fn by_parts_numerator(s: f64) -> f64 {
    if s < DAWSON_SERIES_FROM {
        return 0.5 * s - (s * s - 0.5) * dawson(s);
    }
    let d = dawson_coeffs(16);
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for j in 2..16 {
        let term = (j - 1) as f64 * d[j - 1] * s.powi(1 - 2 * j as i32);
        if term >= last {
            break;
        }
        sum -= term;
        last = term;
    }
    sum
}

/// `8 − 8s² + 4s(4s² − 6) D(s)`.
fn log_form_bracket(s: f64) -> f64 {
    if s < DAWSON_SERIES_FROM {
        return 8.0 - 8.0 * s * s + 4.0 * s * (4.0 * s * s - 6.0) * dawson(s);
    }
    let d = dawson_coeffs(16);
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for j in 2..16 {
        let term = 16.0 * (j - 1) as f64 * d[j] * s.powi(-2 * j as i32);
        if term >= last {
            break;
        }
        sum += term;
        last = term;
    }
    sum
}

fn half_line_points() -> Vec<f64> {
    vec![0.0, 1.0, 4.0, DAWSON_SERIES_FROM, 32.0, f64::INFINITY]
}

/// Extra `O(2,2)` contribution in integrated-by-parts form,
/// `∫₀^∞ 2[s/2 − (s² − ½)D(s)]/(4s + a) ds` with `a = x − z` and `D` the
/// Dawson function. In the original variables `s = aX/2` and
/// `D(s) = (√π/2)e^{−s²}Erfi(s)`. The value behaves like `c₀ − c₁a`.
pub fn naive_o22_tail(a: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_positive("a", a)?;
    let r = integrate_1d_breaks(
        |s: f64| Complex::from(2.0 * by_parts_numerator(s) / (4.0 * s + a)),
        &half_line_points(),
        cfg,
    )?;
    Ok(r)
}

/// The same contribution before integrating by parts,
/// `(2/a)∫₀^∞ ln(4s/a + 1)[8 − 8s² + 4s(4s² − 6)D(s)] ds`, which equals
/// `−32/a` times [`naive_o22_tail`].
pub fn naive_o22_tail_log_form(a: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_positive("a", a)?;
    let r = integrate_1d_breaks(
        |s: f64| Complex::from((4.0 * s / a).ln_1p() * log_form_bracket(s)),
        &half_line_points(),
        cfg,
    )?;
    Ok(r.scale(2.0 / a))
}
