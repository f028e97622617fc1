//! `O(2,1)` with `A = diag(x + w, x − w, z)`: the two-variable kernel `F(w)`
//! and the order-by-order identities of its expansion in `w`.

use std::f64::consts::PI;

use num_complex::Complex;

use super::{quartic_cutoff, require_positive};
use crate::quadrature::{integrate_1d, integrate_2d, QuadConfig, QuadResult, Region};
use crate::Error;

/// Coupling coefficients `(A, B)` of the coset integral in polar form
/// `Z = r(cos θ, sin θ)`, for spectrum `(p1, p2, p3)`.
pub fn ab_coeffs(r: f64, theta: f64, p1: f64, p2: f64, p3: f64, w: f64) -> (f64, f64) {
    let r2 = r * r;
    let q = (1.0 - r2).sqrt();
    let (s2, c2) = (2.0 * theta).sin_cos();
    let (s4, c4) = (4.0 * theta).sin_cos();
    let (qp, qm) = ((1.0 + q).powi(2), (1.0 - q).powi(2));
    let pre = w / (4.0 * (1.0 - r2));
    let a = pre
        * ((qp + 2.0 * r2 * c2 + c4 * qm) * p1 + (2.0 * r2 * c2 - qp - c4 * qm) * p2
            - 4.0 * r2 * c2 * p3);
    let b = -pre * ((2.0 * r2 * s2 + s4 * qm) * p1 + (2.0 * r2 * s2 - s4 * qm) * p2 - 4.0 * r2 * s2 * p3);
    (a, b)
}

/// `(C, D)` with `C² + D² = A² + B²` after `t = r²/(1 − r²)`,
/// `a = (p1 − p2)/2` and `b − c = (p1 + p2)/2 − p3`.
pub fn cd_coeffs(t: f64, theta: f64, a: f64, bc_diff: f64, w: f64) -> (f64, f64) {
    let (s2, c2) = (2.0 * theta).sin_cos();
    let c = w * (t * bc_diff + a * (t + 2.0) * c2);
    let d = 2.0 * w * a * (t + 1.0).sqrt() * s2;
    (c, d)
}

/// Upper limit of `t` for [`f_w`]: past it the weight is below `e^{−75}`.
fn f_w_t_cutoff(w: f64, a_diff: f64) -> f64 {
    11.5 / (a_diff - w.abs())
}

/// `F(w)` at `x − z = a_diff`, normalised so that `F(w) = e^{−w²}`.
///
/// `∫₁^∞ dy ∫₀^π dφ 2 e^{−τA − ¾τ² − κ²/4}(½ − (A + 3τ/2)² + κ²/4)` times
/// `−1/π`, with `t = y² − 1`, `τ = t(A + w cos φ)` and
/// `κ² = (tA + w(t+2)cos φ)² + 4w²(t+1)sin²φ`. Admissibility requires
/// `|w| < A`.
pub fn f_w(w: f64, a_diff: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_positive("a_diff", a_diff)?;
    if !w.is_finite() || w.abs() >= a_diff {
        return Err(Error::Inadmissible(format!("need |w| < x − z, got w = {w}, x − z = {a_diff}")));
    }
    let y_max = (1.0 + f_w_t_cutoff(w, a_diff)).sqrt();
    let region = Region::Rectangle {
        x: (1.0, y_max),
        y: (0.0, PI),
    };
    let r = integrate_2d(
        |y: f64, phi: f64| {
            let t = y * y - 1.0;
            let (sp, cp) = phi.sin_cos();
            let tau = t * (a_diff + w * cp);
            let k2 = (t * a_diff + w * (t + 2.0) * cp).powi(2) + 4.0 * w * w * (t + 1.0) * sp * sp;
            let shift = a_diff + 1.5 * tau;
            let v = 2.0 * (-tau * a_diff - 0.75 * tau * tau - 0.25 * k2).exp() * (0.5 - shift * shift + 0.25 * k2);
            Complex::from(v)
        },
        &region,
        cfg,
    )?;
    Ok(r.scale(-1.0 / PI))
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Coefficient `C_n(y)` of `w^{2n}` in the expansion of `F(w)`:
///
/// `Σ_{m=0}^{n} (−1)^{n−m} y^{2(n−m)} (y²−1)^{2m} (2m)! / ((n−m)! m!²)
///  · Σ_{k=0}^{m} (−1)^k (Ay²)^{2m−2k} / (4^k k! (2m−2k)!)`,
///
/// zero for `n < 0`. At `y = 1` it reduces to `(−1)ⁿ/n!`.
pub fn cn_coeff(n: i64, y: f64, a_diff: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let n = n as usize;
    let y2 = y * y;
    let ay2 = a_diff * y2;
    let mut total = 0.0;
    for m in 0..=n {
        let mut inner = 0.0;
        for k in 0..=m {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * ay2.powi((2 * m - 2 * k) as i32) / (4f64.powi(k as i32) * factorial(k) * factorial(2 * m - 2 * k));
        }
        let sign = if (n - m).is_multiple_of(2) { 1.0 } else { -1.0 };
        let outer = sign * y2.powi((n - m) as i32) * (y2 - 1.0).powi(2 * m as i32) * factorial(2 * m)
            / (factorial(n - m) * factorial(m).powi(2));
        total += outer * inner;
    }
    total
}

/// Coefficients `a_{n,i}` for `1 ≤ n ≤ n_max`, `0 ≤ i < n`, with
/// `a_{1,0} = 2`, `a_{n,n−1} = 2/n` and `a_{n,i} = −a_{n−1,i}/n`.
///
/// Row `n` of the result has `n` entries; row 0 is empty.
pub fn a_recursion(n_max: usize) -> Vec<Vec<f64>> {
    let mut table: Vec<Vec<f64>> = vec![Vec::new()];
    for n in 1..=n_max {
        let nf = n as f64;
        let mut row: Vec<f64> = table[n - 1].iter().map(|&v| -v / nf).collect();
        row.push(2.0 / nf);
        table.push(row);
    }
    table
}

/// `∫₁^∞ e^{−A²(y⁴−y²)} {[1/y² − 2(1−2y²)A²] C_n + 2(1−2y²) C_{n−1}} dy`,
/// expected to equal `(−1)ⁿ/n!`.
pub fn term_integral(n: usize, a_diff: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_positive("a_diff", a_diff)?;
    let a2 = a_diff * a_diff;
    let nf = n as f64;
    // C_n grows like (A y²)^{2n} y^{4n}/n!², so allow for y^{8n} and A^{4n}
    let upper = quartic_cutoff(a2, 80.0, |y| {
        8.0 * nf * y.ln() + 4.0 * nf * a_diff.max(1.0).ln() + (2.0 + 4.0 * a2 * y.powi(2)).ln()
    });
    let ni = n as i64;
    let r = integrate_1d(
        |y: f64| {
            let y2 = y * y;
            let g = (-a2 * (y2 * y2 - y2)).exp();
            let lin = 1.0 - 2.0 * y2;
            let v = (1.0 / y2 - 2.0 * lin * a2) * cn_coeff(ni, y, a_diff) + 2.0 * lin * cn_coeff(ni - 1, y, a_diff);
            Complex::from(g * v)
        },
        1.0,
        upper,
        cfg,
    )?;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cn_anchors() {
        for (y, a) in [(1.0, 1.0), (1.7, 0.4), (3.0, 2.0)] {
            assert_abs_diff_eq!(cn_coeff(0, y, a), 1.0, epsilon = 1e-15);
            assert_eq!(cn_coeff(-1, y, a), 0.0);
        }
        for n in 0..8 {
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 } / factorial(n as usize);
            assert_abs_diff_eq!(cn_coeff(n, 1.0, 0.8), expect, epsilon = 1e-15);
        }
    }

    #[test]
    fn recursion_anchors() {
        let a = a_recursion(4);
        assert_eq!(a[1], vec![2.0]);
        assert_eq!(a[2], vec![-1.0, 1.0]);
        assert_abs_diff_eq!(a[3][2], 2.0 / 3.0);
        assert_abs_diff_eq!(a[3][0], 1.0 / 3.0);
    }

    #[test]
    fn antiderivative_reproduces_term_integrand() {
        // −e^{g}/y [C_n + y²(y²−1) Σ_i a_{n,i} C_i] with g = −A²(y⁴−y²)
        let a = a_recursion(5);
        for n in 1..=5usize {
            for (y, ad) in [(1.2, 1.0), (1.6, 0.5), (1.1, 2.0)] {
                let anti = |y: f64| {
                    let y2 = y * y;
                    let g = (-ad * ad * (y2 * y2 - y2)).exp();
                    let s: f64 = (0..n).map(|i| a[n][i] * cn_coeff(i as i64, y, ad)).sum();
                    -g / y * (cn_coeff(n as i64, y, ad) + y2 * (y2 - 1.0) * s)
                };
                let h = 1e-5;
                let fd = (anti(y + h) - anti(y - h)) / (2.0 * h);
                let y2 = y * y;
                let g = (-ad * ad * (y2 * y2 - y2)).exp();
                let lin = 1.0 - 2.0 * y2;
                let direct = g
                    * ((1.0 / y2 - 2.0 * lin * ad * ad) * cn_coeff(n as i64, y, ad)
                        + 2.0 * lin * cn_coeff(n as i64 - 1, y, ad));
                assert!((fd - direct).abs() < 1e-7 * (1.0 + direct.abs()), "n={n} y={y}: {fd} vs {direct}");
            }
        }
    }

    #[test]
    fn term_integrals_low_order() {
        let cfg = QuadConfig::default();
        assert_abs_diff_eq!(term_integral(0, 1.0, &cfg).unwrap().value.re, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(term_integral(1, 1.0, &cfg).unwrap().value.re, -1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(term_integral(2, 0.5, &cfg).unwrap().value.re, 0.5, epsilon = 1e-7);
    }

    #[test]
    fn cd_trivial_cases() {
        assert_eq!(cd_coeffs(0.3, 0.4, 1.0, 2.0, 0.0), (0.0, 0.0));
        let (c, d) = cd_coeffs(0.5, 0.0, 1.5, -0.7, 0.8);
        assert_eq!(d, 0.0);
        assert_abs_diff_eq!(c, 0.8 * (0.5 * -0.7 + 1.5 * 2.5), epsilon = 1e-15);
    }

    #[test]
    fn f_w_is_gaussian_in_w() {
        let cfg = QuadConfig::default().with_rel_tol(1e-9);
        for (w, ad) in [(0.3, 1.0), (0.1, 0.5)] {
            let r = f_w(w, ad, &cfg).unwrap();
            assert!(r.converged);
            assert_abs_diff_eq!(r.value.re, (-w * w).exp(), epsilon = 1e-7);
        }
        assert!(f_w(1.0, 1.0, &cfg).is_err());
    }
}
