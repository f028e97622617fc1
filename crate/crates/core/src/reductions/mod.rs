//! Reduced integrals and the closed-form identities they are tested against.
//!
//! Each `f_*` function is an integral expected to equal one for every value
//! of its parameter; each `i_*` function is a full spectral-plus-coset
//! pipeline whose ratio to `e^{−½ Tr A²}` should not depend on the source.

mod general;
mod naive;
mod o21;
mod o22;
mod o3;

pub use general::{a_recursion, ab_coeffs, cd_coeffs, cn_coeff, f_w, term_integral};
pub use naive::{a_moment_closed_form, naive_o21_tail, naive_o22_tail, naive_o22_tail_log_form};
pub use o21::{f_o21, f_o21_integrand, i_o21_special, i_o21_spectral};
pub use o22::{f_o22_double, f_o22_phi1, i_o22_special, so2_pair_integral};
pub use o3::{f1_o3, f1_o3_integrand, o3_naive_tail};

use num_complex::Complex;

use crate::quadrature::{gauss_hermite_rule, gauss_laguerre_rule, QuadResult};
use crate::specfun::bessel_j0;
use crate::Error;

/// Diagonal source matrix `A = diag(x_1…x_m, z_1…z_n)`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SourceDiag {
    x_entries: Vec<f64>,
    z_entries: Vec<f64>,
}

impl SourceDiag {
    /// Requires every `x > 0` and every `z < 0`, so that `A·L` is positive
    /// definite.
    pub fn new(x_entries: Vec<f64>, z_entries: Vec<f64>) -> Result<Self, Error> {
        if x_entries.is_empty() || z_entries.is_empty() {
            return Err(Error::InvalidArgument("both blocks must be non-empty".into()));
        }
        if let Some(x) = x_entries.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Inadmissible(format!("block-1 entry {x} must be positive")));
        }
        if let Some(z) = z_entries.iter().find(|&&z| !(z < 0.0) || !z.is_finite()) {
            return Err(Error::Inadmissible(format!("block-2 entry {z} must be negative")));
        }
        Ok(Self { x_entries, z_entries })
    }

    pub fn x_entries(&self) -> &[f64] {
        &self.x_entries
    }

    pub fn z_entries(&self) -> &[f64] {
        &self.z_entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.x_entries.iter().chain(&self.z_entries).copied().collect()
    }

    /// `e^{−½ Tr A²}`.
    pub fn gaussian(&self) -> f64 {
        (-0.5 * self.diagonal().iter().map(|v| v * v).sum::<f64>()).exp()
    }
}

/// `A = diag(x + w, x − w, z)` in mean/half-difference form.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct XwzCoords {
    pub x: f64,
    pub w: f64,
    pub z: f64,
}

impl XwzCoords {
    pub fn new(x: f64, w: f64, z: f64) -> Result<Self, Error> {
        if !(x - w.abs() > 0.0 && z < 0.0) {
            return Err(Error::Inadmissible(format!(
                "need x ± w > 0 > z, got x = {x}, w = {w}, z = {z}"
            )));
        }
        Ok(Self { x, w, z })
    }

    pub fn from_diag(x1: f64, x2: f64, z: f64) -> Result<Self, Error> {
        Self::new((x1 + x2) / 2.0, (x1 - x2) / 2.0, z)
    }

    pub fn source(&self) -> SourceDiag {
        SourceDiag {
            x_entries: vec![self.x + self.w, self.x - self.w],
            z_entries: vec![self.z],
        }
    }
}

pub(crate) fn require_positive(name: &str, v: f64) -> Result<(), Error> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

pub(crate) fn require_split(x: f64, z: f64) -> Result<(), Error> {
    if x > 0.0 && z < 0.0 && x.is_finite() && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Inadmissible(format!("need x > 0 > z, got x = {x}, z = {z}")))
    }
}

/// Upper limit `Y` with `c·(Y⁴ − Y²) ≥ budget + log_poly(Y)`, where
/// `log_poly` bounds the logarithm of the polynomial factor of an integrand
/// decaying like `e^{−c(y⁴−y²)}`.
pub(crate) fn quartic_cutoff(c: f64, budget: f64, log_poly: impl Fn(f64) -> f64) -> f64 {
    let mut y = 2.0f64;
    for _ in 0..50 {
        let target = (budget + log_poly(y).max(0.0)) / c;
        let next = (0.5 + (0.25 + target).sqrt()).sqrt();
        if (next - y).abs() < 1e-9 * y {
            return next.max(1.0 + 1e-6);
        }
        y = next;
    }
    y
}

/// Replaces the error estimate by the larger of itself and `extra`, and
/// clears `converged` if the combined error misses the tolerance.
pub(crate) fn with_rule_error(r: QuadResult<f64>, extra: f64, cfg: &crate::QuadConfig) -> QuadResult<f64> {
    let err_est = r.err_est + extra;
    QuadResult {
        err_est,
        converged: r.converged && cfg.accepts(r.value.norm(), err_est),
        ..r
    }
}

/// Gauss–Hermite and Gauss–Laguerre nodes for spectral moments.
pub(crate) struct SpectralRules {
    hermite: (Vec<f64>, Vec<f64>),
    laguerre: (Vec<f64>, Vec<f64>),
}

impl SpectralRules {
    pub(crate) fn new(n: usize) -> Result<Self, Error> {
        Ok(Self {
            hermite: gauss_hermite_rule(n)?,
            laguerre: gauss_laguerre_rule(n)?,
        })
    }

    /// `∫ v^k e^{−v²/(2σ²)} e^{iωv} dv` for `k = 0..=k_max`.
    ///
    /// The contour is shifted to `v = u + iωσ²`, leaving the Gaussian weight
    /// against the polynomial `(u + iωσ²)^k`. Sampling `e^{iωv}` at the nodes
    /// instead would alias once `ωσ` exceeds the node spacing.
    pub(crate) fn gaussian_moments(&self, sigma: f64, omega: f64, k_max: usize) -> Vec<Complex<f64>> {
        let (x, w) = &self.hermite;
        let shift = Complex::new(0.0, omega * sigma * sigma);
        let damping = (-0.5 * (omega * sigma).powi(2)).exp();
        let mut out = vec![Complex::new(0.0, 0.0); k_max + 1];
        for (&p, &wt) in x.iter().zip(w) {
            let v = shift + sigma * p;
            let mut f = Complex::from(wt * sigma * damping);
            for slot in out.iter_mut() {
                *slot += f;
                f *= v;
            }
        }
        out
    }

    /// `∫₀^∞ s^j e^{−s} J0(κ√s) ds` for `j = 0..=j_max`.
    pub(crate) fn bessel_moments(&self, kappa: f64, j_max: usize) -> Vec<f64> {
        let (x, w) = &self.laguerre;
        let mut out = vec![0.0; j_max + 1];
        for (&s, &wt) in x.iter().zip(w) {
            let mut f = wt * bessel_j0(kappa * s.sqrt());
            for slot in out.iter_mut() {
                *slot += f;
                f *= s;
            }
        }
        out
    }
}
