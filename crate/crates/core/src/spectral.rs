//! Fourier transforms `∫ ρ(p) e^{−|p|²/2} e^{−i b·p} d³p` of densities that
//! depend only on eigenvalue differences and are homogeneous of some degree.
//!
//! Such a density is constant along `(1,1,1)`, so that direction is a plain
//! Gaussian integral. The orthogonal plane is written in polar coordinates:
//! the radial integral has a closed form in terms of the Dawson function and
//! the angular one is split at every line `p_i = p_j`, where absolute values
//! in the density have kinks, with a Gauss–Legendre rule on each arc.
//! Pointwise tensor rules converge only like `1/n` across those kinks.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex;

use crate::quadrature::{gauss_legendre_on, sum_complex, QuadError};
use crate::specfun::dawson;

/// Beyond this `|k|` the moments come from their endpoint expansion; the
/// upward recurrence loses about `|k|ⁿ` ulps.
pub const RADIAL_ASYMPTOTIC_K: f64 = 9.0;

/// `(C_n, J_n) = (∫₀^∞ Rⁿ e^{−R²/2} cos kR dR, ∫₀^∞ Rⁿ e^{−R²/2} sin kR dR)`
/// for `n = 0..=n_max`.
pub fn radial_moments(k: f64, n_max: usize) -> Vec<(f64, f64)> {
    if k.abs() > RADIAL_ASYMPTOTIC_K {
        let (ak, sign) = (k.abs(), k.signum());
        // the series carries only one component; the other is half the
        // full-line transform √(2π) iⁿ Heₙ(k) e^{−k²/2}
        let half_line = (PI / 2.0).sqrt() * (-0.5 * ak * ak).exp();
        let (mut he_prev, mut he) = (0.0, 1.0);
        return (0..=n_max)
            .map(|n| {
                if n > 0 {
                    let next = ak * he - (n - 1) as f64 * he_prev;
                    he_prev = he;
                    he = next;
                }
                let quarter = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let exact = quarter * half_line * he;
                let (c, j) = radial_moment_asymptotic(ak, n);
                if n % 2 == 0 {
                    (exact, sign * j)
                } else {
                    (c, sign * exact)
                }
            })
            .collect();
    }
    let root_half_pi = (PI / 2.0).sqrt();
    let g = (-0.5 * k * k).exp();
    let mut out = Vec::with_capacity(n_max + 1);
    let c0 = root_half_pi * g;
    let j0 = std::f64::consts::SQRT_2 * dawson(k * FRAC_1_SQRT_2);
    out.push((c0, j0));
    if n_max >= 1 {
        out.push((1.0 - k * j0, k * c0));
    }
    for n in 2..=n_max {
        let (cm2, jm2) = out[n - 2];
        let (cm1, jm1) = out[n - 1];
        let nf = (n - 1) as f64;
        out.push((nf * cm2 - k * jm1, nf * jm2 + k * cm1));
    }
    out
}

/// `C_n + iJ_n ≈ Σ_m f^{(m)}(0) (i/k)^{m+1}` for `f = Rⁿ e^{−R²/2}`, summed
/// to its smallest term. The neglected part is of order `e^{−k²/2}`.
fn radial_moment_asymptotic(k: f64, n: usize) -> (f64, f64) {
    let mut acc = Complex::new(0.0, 0.0);
    // f^{(m)}(0) = m! (−½)^j / j! at m = n + 2j
    let mut m = n;
    let mut j = 0usize;
    let mut deriv: f64 = (1..=n).map(|v| v as f64).product();
    let mut last = f64::INFINITY;
    let ik = Complex::new(0.0, 1.0 / k);
    let mut pow = ik.powu(n as u32 + 1);
    loop {
        let term = pow * deriv;
        let size = term.norm();
        if size >= last || size < 1e-300 {
            break;
        }
        acc += term;
        last = size;
        if size <= 1e-17 * acc.norm() {
            break;
        }
        // advance m by 2: f^{(m+2)}(0)/f^{(m)}(0) = (m+1)(m+2)(−½)/(j+1)
        deriv *= -0.5 * ((m + 1) * (m + 2)) as f64 / (j + 1) as f64;
        pow *= ik * ik;
        m += 2;
        j += 1;
    }
    (acc.re, acc.im)
}

/// Orthonormal basis `(n, u1, u2)` with `n ∥ (1,1,1)`.
const INV_SQRT3: f64 = 0.577_350_269_189_625_8;
const U1: [f64; 3] = [FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];
const U2: [f64; 3] = [0.408_248_290_463_863, 0.408_248_290_463_863, -0.816_496_580_927_726];

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Angles in `[0, 2π)` where some `p_i − p_j` vanishes on the unit circle
/// of the plane orthogonal to `(1,1,1)`.
fn sector_boundaries() -> Vec<f64> {
    let mut angles = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            let alpha = U1[i] - U1[j];
            let beta = U2[i] - U2[j];
            let w = (-alpha).atan2(beta);
            for cand in [w, w + PI] {
                angles.push(cand.rem_euclid(2.0 * PI));
            }
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    angles
}

/// Precomputed angular nodes for [`fourier_3d`].
#[derive(Debug, Clone)]
pub struct AngularRule {
    dirs: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl AngularRule {
    /// `nodes_per_arc` Gauss–Legendre points on each of the six sectors.
    pub fn new(nodes_per_arc: usize) -> Result<Self, QuadError> {
        let mut cuts = sector_boundaries();
        cuts.push(cuts[0] + 2.0 * PI);
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        for w in cuts.windows(2) {
            let (x, wt) = gauss_legendre_on(nodes_per_arc, w[0], w[1])?;
            for (om, wv) in x.into_iter().zip(wt) {
                let (s, c) = om.sin_cos();
                dirs.push([
                    c * U1[0] + s * U2[0],
                    c * U1[1] + s * U2[1],
                    c * U1[2] + s * U2[2],
                ]);
                weights.push(wv);
            }
        }
        Ok(Self { dirs, weights })
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
}

/// `∫_{ℝ³} ρ(p) e^{−|p|²/2} e^{−i b·p} d³p` for `ρ` translation invariant
/// along `(1,1,1)` and homogeneous of the given degree.
pub fn fourier_3d<F>(density: F, degree: usize, b: [f64; 3], rule: &AngularRule) -> Complex<f64>
where
    F: Fn([f64; 3]) -> f64,
{
    let along = dot(&b, &[INV_SQRT3; 3]);
    let gauss = (2.0 * PI).sqrt() * (-0.5 * along * along).exp();
    let n = degree + 1;
    let terms = rule.dirs.iter().zip(&rule.weights).map(|(e, &w)| {
        let rho = density(*e);
        if rho == 0.0 {
            return Complex::new(0.0, 0.0);
        }
        let k = dot(&b, e);
        let (cn, jn) = radial_moments(k, n)[n];
        Complex::new(cn, -jn) * (w * rho)
    });
    sum_complex(terms) * gauss
}
