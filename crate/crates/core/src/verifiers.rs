//! End-to-end verdicts: Gaussianity ratio tests, direct low-dimensional
//! evaluations of the transformation, least-squares fits and the compact
//! coset volume.

use std::f64::consts::PI;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{conjugated_couplings, Matrix};
use crate::measures::{Measure, Spectrum};
use crate::quadrature::{integrate_1d_breaks, integrate_2d, QuadConfig, QuadResult, Region};
use crate::reductions::{f_w, require_split, XwzCoords};
use crate::spectral::{fourier_3d, radial_moments, AngularRule};
use crate::Error;

/// Ratios of integral values to `e^{−½ Tr A²}` over a grid of sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianityReport {
    /// Source parameters of each grid point, as supplied by the caller.
    pub grid: Vec<Vec<f64>>,
    pub ratios: Vec<Complex<f64>>,
    /// Mean ratio.
    pub const_est: Complex<f64>,
    /// `max |ratio_i/const_est − 1|`.
    pub max_rel_dev: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl GaussianityReport {
    pub fn with_grid(mut self, grid: Vec<Vec<f64>>) -> Self {
        self.grid = grid;
        self
    }
}

/// Passes iff every ratio `value_i/predictor_i` is within `threshold` of
/// their mean, relatively.
pub fn gaussianity_test(
    values: &[Complex<f64>],
    predictors: &[f64],
    threshold: f64,
) -> Result<GaussianityReport, Error> {
    if values.len() != predictors.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            found: predictors.len(),
        });
    }
    if values.len() < 2 {
        return Err(Error::InvalidArgument("need at least two grid points".into()));
    }
    if predictors.iter().any(|&p| p == 0.0 || !p.is_finite()) {
        return Err(Error::InvalidArgument("predictors must be finite and nonzero".into()));
    }
    let ratios: Vec<Complex<f64>> = values.iter().zip(predictors).map(|(v, p)| v / p).collect();
    let const_est = ratios.iter().sum::<Complex<f64>>() / ratios.len() as f64;
    if const_est.norm() == 0.0 {
        return Err(Error::InvalidArgument("mean ratio vanishes".into()));
    }
    let max_rel_dev = ratios
        .iter()
        .map(|r| (r / const_est - 1.0).norm())
        .fold(0.0, f64::max);
    Ok(GaussianityReport {
        grid: Vec::new(),
        ratios,
        const_est,
        max_rel_dev,
        threshold,
        pass: max_rel_dev < threshold,
    })
}

/// Evaluates `f` at every grid point concurrently; results keep grid order.
pub fn evaluate_grid<P, F>(grid: &[P], f: F) -> Result<Vec<QuadResult<f64>>, Error>
where
    P: Sync,
    F: Fn(&P) -> Result<QuadResult<f64>, Error> + Sync,
{
    grid.par_iter().map(|p| f(p)).collect() // f is Sync but not Send
}

/// Least-squares coefficients with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// `[intercept, slope]`.
    pub coefficients: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub residual_norm: f64,
}

/// Ordinary least squares `y = c₀ + c₁x`. Standard errors use `n − 2`
/// degrees of freedom and are zero for two points.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<FitReport, Error> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InvalidArgument("a line needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("fit data must be finite".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Singular);
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let sigma2 = if n > 2 { rss / (nf - 2.0) } else { 0.0 };
    let se_slope = (sigma2 / sxx).sqrt();
    let se_intercept = (sigma2 * (1.0 / nf + mx * mx / sxx)).sqrt();
    Ok(FitReport {
        coefficients: vec![intercept, slope],
        stderrs: vec![se_intercept, se_slope],
        residual_norm: rss.sqrt(),
    })
}

/// Log-log fit `ln y = c₀ + c₁ ln x`; `c₁` is the power.
pub fn power_fit(xs: &[f64], ys: &[f64]) -> Result<FitReport, Error> {
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidArgument("power fits need positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// `O(1,1)` boost.
fn boost(theta: f64) -> Matrix<f64> {
    let (c, s) = (theta.cosh(), theta.sinh());
    Matrix::from_rows(2, 2, vec![c, s, s, c]).expect("2x2 boost")
}

/// `e^{−½ Tr Â²}` for `Â = [[a1, −a],[a, −a2]]`.
pub fn o11_gaussian(a1: f64, a2: f64, a_off: f64) -> f64 {
    (-0.5 * (a1 * a1 + a2 * a2 - 2.0 * a_off * a_off)).exp()
}

/// `O(1,1)` integral `∫dθ ∫d²p ρ(p) e^{−½|p|²} e^{−i Tr T⁻¹PTÂ}` with
/// `Â = Â₊L`, `Â₊ = [[a1, a],[a, a2]]` positive definite.
///
/// The spectral integral is done in closed form. For the signed measure
/// `p1 − p2` it is `−2πi(b1−b2)e^{−|b|²/2}`; for `|p1 − p2|` it is
/// `2√2·√(2π) e^{−(b1+b2)²/4} C₁((b1−b2)/√2)`, with `C₁` the first cosine
/// radial moment. Here `b_i = (TÂT⁻¹)_ii`.
pub fn direct_o11(a1: f64, a2: f64, a_off: f64, measure: Measure, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    if !(a1 > 0.0 && a2 > 0.0 && a_off.abs() < (a1 * a2).sqrt()) || !a_off.is_finite() {
        return Err(Error::Inadmissible(format!(
            "need a1 > 0, a2 > 0, |a| < √(a1 a2), got ({a1}, {a2}, {a_off})"
        )));
    }
    let a_hat = Matrix::from_rows(2, 2, vec![a1, -a_off, a_off, -a2])?;
    let couplings = |theta: f64| -> (f64, f64) {
        let t = boost(theta);
        let m = t
            .matmul(&a_hat)
            .and_then(|m| m.matmul(&boost(-theta)))
            .expect("2x2 products");
        (m[(0, 0)], m[(1, 1)])
    };
    let integrand = |theta: f64| -> Complex<f64> {
        let (b1, b2) = couplings(theta);
        match measure {
            Measure::Conjectured => {
                Complex::new(0.0, -2.0 * PI * (b1 - b2)) * (-0.5 * (b1 * b1 + b2 * b2)).exp()
            }
            Measure::Naive => {
                let q = (b1 - b2) / std::f64::consts::SQRT_2;
                let c1 = radial_moments(q, 1)[1].0;
                Complex::from(
                    (2.0 * PI).sqrt() * (-0.25 * (b1 + b2).powi(2)).exp() * 2.0 * std::f64::consts::SQRT_2 * c1,
                )
            }
        }
    };
    let theta_max = if cfg.tail_cutoff.is_finite() {
        cfg.tail_cutoff
    } else {
        // the conjectured integrand decays like e^{−|b|²/2}, the naive one
        // only like e^{−4|θ|}, which also bounds its remaining tail
        let mut th: f64 = 1.0;
        while th < O11_THETA_CAP
            && [th, -th].iter().any(|&t| integrand(t).norm() > 0.01 * cfg.abs_tol)
        {
            th += 0.5;
        }
        th
    };
    Ok(integrate_1d_breaks(integrand, &[-theta_max, 0.0, theta_max], cfg)?)
}

/// Largest rapidity considered by [`direct_o11`]; `cosh` of it still
/// squares to a finite number.
pub const O11_THETA_CAP: f64 = 40.0;

/// `O(2,1)` coset element for `Z = √(t/(1+t)) (cos θ, sin θ)ᵀ`, written as
/// a boost of rapidity `asinh √t` along `(cos θ, sin θ)`.
pub fn o21_boost(t: f64, theta: f64) -> Matrix<f64> {
    let (c, s) = ((1.0 + t).sqrt(), t.sqrt());
    let (sn, cs) = theta.sin_cos();
    let n = [cs, sn];
    let mut m = Matrix::zeros(3, 3);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = if i == j { 1.0 } else { 0.0 } + (c - 1.0) * n[i] * n[j];
        }
        m[(i, 2)] = s * n[i];
        m[(2, i)] = s * n[i];
    }
    m[(2, 2)] = c;
    m
}

/// Gauss–Legendre points per spectral sector available to [`direct_o21`].
const DIRECT_ARC_LADDER: [usize; 7] = [16, 24, 32, 48, 64, 96, 128];

/// The transform oscillates across directions on an angular scale `1/|b|`,
/// so the points per sector must grow linearly with `|b|`.
fn arc_nodes_for(b_norm: f64) -> Option<usize> {
    let need = 3.5 * b_norm + 4.0;
    DIRECT_ARC_LADDER.iter().copied().find(|&n| n as f64 >= need)
}

/// Largest `|b|` resolved by the finest rule in the ladder.
pub const DIRECT_MAX_COUPLING: f64 = (128.0 - 4.0) / 3.5;

/// Independent evaluation of the `O(2,1)` integral with `Â = diag(x, x, z)`:
/// the coset is parameterised by `(t, θ)` and the spectral integral is
/// a sector-aware transform of the chosen density, so no reduction to a
/// Bessel kernel is used. With the signed measure the value equals
/// [`crate::reductions::i_o21_special`].
///
/// The default radial range is `t ≤ (|x| + |z| + 8)/(x − z)` for the signed
/// density, past which the coset-averaged integrand is below `e^{−64}` of
/// its peak, and `t ≤ DIRECT_MAX_COUPLING/(x − z)` for the naive one.
/// Couplings with `|b|` above [`DIRECT_MAX_COUPLING`] are treated as zero.
pub fn direct_o21(x: f64, z: f64, measure: Measure, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    require_split(x, z)?;
    let rules = DIRECT_ARC_LADDER
        .iter()
        .map(|&n| AngularRule::new(n).map(|r| (n, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let a_diag = [x, x, z];
    let density = |p: [f64; 3]| measure.density(&Spectrum::new(vec![p[0], p[1]], vec![p[2]]));
    let t_max = if cfg.tail_cutoff.is_finite() {
        cfg.tail_cutoff
    } else {
        match measure {
            Measure::Conjectured => (x.abs() + z.abs() + 8.0) / (x - z),
            // the naive transform decays only by a power of |b|
            Measure::Naive => DIRECT_MAX_COUPLING / (x - z),
        }
    };
    // θ → θ + π leaves the couplings unchanged
    let integrand = |t: f64, theta: f64| -> Complex<f64> {
        let s = o21_boost(t, theta);
        let b = conjugated_couplings(&s, &a_diag).expect("3x3 boost is invertible");
        let b = [b[0], b[1], b[2]];
        let Some(n) = arc_nodes_for(b.iter().map(|v| v * v).sum::<f64>().sqrt()) else {
            return Complex::new(0.0, 0.0);
        };
        let rule = &rules.iter().find(|(m, _)| *m == n).expect("ladder entry").1;
        fourier_3d(density, 3, b, rule) / (2.0 * (1.0 + t).sqrt()) * (2.0 / PI)
    };
    let region = Region::Rectangle {
        x: (0.0, t_max),
        y: (0.0, PI),
    };
    // absolute accuracy below the angular-rule noise cannot be reached
    let scale = (-0.5 * (2.0 * x * x + z * z)).exp();
    let cfg = cfg.with_abs_tol(cfg.abs_tol.max(1e-3 * cfg.rel_tol * scale));
    Ok(integrate_2d(integrand, &region, &cfg)?)
}

/// `O(2,1)` integral with `Â = diag(x+w, x−w, z)` through the kernel
/// [`f_w`]: `e^{−x² − z²/2} F(w)`, which equals `e^{−½ Tr Â²}`.
pub fn o21_general(c: XwzCoords, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    let r = f_w(c.w, c.x - c.z, cfg)?;
    Ok(r.scale((-c.x * c.x - 0.5 * c.z * c.z).exp()))
}

/// `∫_{ℝ²} (1 + |Z|²)^{−3/2} dZ` as a radial integral to `R = 10³` plus the
/// exact tail `2π/√(1+R²)`. The total is `2π`.
pub fn coset_volume_o3(cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    coset_volume_o3_truncated(1e3, cfg)
}

/// As [`coset_volume_o3`] with radial truncation at `radius`.
pub fn coset_volume_o3_truncated(radius: f64, cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let mut points = vec![0.0];
    let mut p = 1.0;
    while p < radius {
        points.push(p);
        p *= 10.0;
    }
    points.push(radius);
    let r = integrate_1d_breaks(
        |r: f64| Complex::from(2.0 * PI * r * (1.0 + r * r).powf(-1.5)),
        &points,
        cfg,
    )?;
    let tail = 2.0 * PI / (1.0 + radius * radius).sqrt();
    Ok(QuadResult {
        value: r.value + tail,
        ..r
    })
}

/// [`coset_volume_o3`] as an iterated Cartesian integral over `ℝ²`.
pub fn coset_volume_o3_cartesian(cfg: &QuadConfig) -> Result<QuadResult<f64>, Error> {
    let region = Region::Rectangle {
        x: (f64::NEG_INFINITY, f64::INFINITY),
        y: (f64::NEG_INFINITY, f64::INFINITY),
    };
    Ok(integrate_2d(
        |a: f64, b: f64| Complex::from((1.0 + a * a + b * b).powf(-1.5)),
        &region,
        cfg,
    )?)
}
