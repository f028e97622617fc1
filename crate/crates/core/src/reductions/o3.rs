//! The compact dual `O(3)` with `A = diag(x, x, z)`.

use std::f64::consts::SQRT_2;

use num_complex::Complex;

use crate::quadrature::{gauss_legendre_on, integrate_1d, integrate_gaussian_nd, QuadConfig, QuadResult};
use crate::Error;

/// Integrand of `𝓕₁(a)` after `y = √(1−t)`, equal to
/// `d/dy[y e^{−a(y⁴−y²)/2}]`.
pub fn f1_o3_integrand(a: f64, y: f64) -> f64 {
    let y2 = y * y;
    let y4 = y2 * y2;
    (-0.5 * a * (y4 - y2)).exp() * (1.0 - a * (2.0 * y4 - y2))
}

/// `𝓕₁(a) = ½∫₀¹ dt/√(1−t) e^{−a(t²−t)/2}[1 − a(2t² − 3t + 1)]`,
/// identically 1 for `a ≥ 0`.
pub fn f1_o3(a: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!("a must be non-negative, got {a}")));
    }
    Ok(integrate_1d(|y| Complex::from(f1_o3_integrand(a, y)), 0.0, 1.0, cfg)?)
}

/// `∫₀^{|n|} 4a(a² − n²) da`, by a rule exact for cubics.
fn inner_a(n: f64) -> f64 {
    let (x, w) = gauss_legendre_on(3, 0.0, n.abs()).expect("3-point rule");
    x.iter().zip(&w).map(|(&a, &wt)| wt * 4.0 * a * (a * a - n * n)).sum()
}

/// Extra contribution of the naive measure to the `O(3)` integral as
/// `x → z`, with the Bessel factor set to one:
///
/// `2∫∫ db dc e^{−b² − c²/2 + i(2xb + zc)} ∫₀^{|b−c|} 4a(a² − (b−c)²) da`.
///
/// Its ratio to `e^{−½(2x²+z²)}` depends only on `x − z`.
pub fn o3_naive_tail(x: f64, z: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    if !(x.is_finite() && z.is_finite()) {
        return Err(Error::InvalidArgument("x and z must be finite".into()));
    }
    // b = p0/√2 turns e^{−b²} into the standard weight e^{−p0²/2}
    let r = integrate_gaussian_nd(
        |p: &[f64]| {
            let b = p[0] / SQRT_2;
            let c = p[1];
            let phase = Complex::new(0.0, 2.0 * x * b + z * c).exp();
            phase * (2.0 * inner_a(b - c) / SQRT_2)
        },
        2,
        cfg,
    )?;
    Ok(r)
}

/// Closed form of [`o3_naive_tail`]:
/// `−2√2π e^{−x²−z²/2} (d⁴ − 9d² + 27/4)` with `d = x − z`.
#[cfg(test)]
pub(crate) fn o3_naive_tail_exact(x: f64, z: f64) -> f64 {
    let d2 = (x - z).powi(2);
    -2.0 * SQRT_2 * std::f64::consts::PI * (-x * x - 0.5 * z * z).exp() * (d2 * d2 - 9.0 * d2 + 6.75)
}
