//! Bessel `J0`, the imaginary error function and its scaled relatives, and
//! the Humbert confluent series `Φ1`.

use num_complex::Complex;
use num_traits::Float;

use crate::quadrature::{integrate_1d, QuadConfig};
use crate::Error;

fn c<T: Float>(x: f64) -> T {
    T::from(x).unwrap()
}

/// Below this the power series is summed in double-word arithmetic; above it
/// the Hankel expansion is accurate to well under 1e-16.
pub const J0_SERIES_LIMIT: f64 = 25.0;

/// `erfi` switches from its power series to the asymptotic expansion here.
pub const ERFI_SERIES_LIMIT: f64 = 6.0;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy)]
struct DoubleWord<T> {
    hi: T,
    lo: T,
}

impl<T: Float> DoubleWord<T> {
    fn from(x: T) -> Self {
        Self { hi: x, lo: T::zero() }
    }

    fn fast_two_sum(a: T, b: T) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn two_sum(a: T, b: T) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn two_prod(a: T, b: T) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        Self::fast_two_sum(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        Self::fast_two_sum(p.hi, p.lo + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_scalar(self, d: T) -> Self {
        let q = self.hi / d;
        let p = Self::two_prod(q, d);
        let r = (self.hi - p.hi - p.lo + self.lo) / d;
        Self::fast_two_sum(q, r)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn value(self) -> T {
        self.hi + self.lo
    }
}

/// Power series `Σ (−x²/4)^k / (k!)²`, summed in double-word arithmetic so the
/// cancellation between terms of size `e^{|x|}` costs no accuracy.
pub fn bessel_j0_series<T: Float>(x: T) -> T {
    let q = DoubleWord::two_prod(x, x).div_scalar(c(4.0)).neg();
    let mut term = DoubleWord::from(T::one());
    let mut sum = term;
    let mut k = 1usize;
    loop {
        let kk = T::from(k * k).unwrap();
        term = term.mul(q).div_scalar(kk);
        sum = sum.add(term);
        if term.hi.abs() <= T::epsilon() * T::epsilon() && T::from(k).unwrap() > x.abs() {
            break;
        }
        k += 1;
        if k > 1000 {
            break;
        }
    }
    sum.value()
}

/// Hankel asymptotic expansion `√(2/πx)(P cos χ − Q sin χ)`, `χ = x − π/4`.
///
/// The `P` and `Q` series are truncated at their smallest term.
pub fn bessel_j0_asymptotic<T: Float>(x: T) -> T {
    let x = x.abs();
    let mut p = T::one();
    let mut q = T::zero();
    let mut ck = T::one();
    let mut xk = T::one();
    let mut last = T::infinity();
    for k in 1..200usize {
        let kf = T::from(k).unwrap();
        let odd = T::from(2 * k - 1).unwrap();
        ck = ck * odd * odd / (c::<T>(8.0) * kf);
        xk = xk * x;
        let term = ck / xk;
        if term >= last || term < T::epsilon() * c(1e-3) {
            break;
        }
        last = term;
        let sign = match k % 4 {
            0 | 3 => T::one(),
            _ => -T::one(),
        };
        if k % 2 == 0 {
            p = p + sign * term;
        } else {
            q = q + sign * term;
        }
    }
    let (s, co) = x.sin_cos();
    let half_sqrt2 = c::<T>(std::f64::consts::FRAC_1_SQRT_2);
    let cos_chi = (co + s) * half_sqrt2;
    let sin_chi = (s - co) * half_sqrt2;
    (c::<T>(2.0) / (c::<T>(std::f64::consts::PI) * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0<T: Float>(x: T) -> T {
    if x.abs() < c(J0_SERIES_LIMIT) {
        bessel_j0_series(x)
    } else {
        bessel_j0_asymptotic(x)
    }
}

fn erfi_series<T: Float>(x: T) -> T {
    let x2 = x * x;
    let mut pow = x;
    let mut sum = x;
    let mut k = 1usize;
    loop {
        let kf = T::from(k).unwrap();
        pow = pow * x2 / kf;
        let term = pow / T::from(2 * k + 1).unwrap();
        sum = sum + term;
        if term.abs() <= T::epsilon() * sum.abs() * c(0.1) {
            break;
        }
        k += 1;
    }
    sum * c::<T>(2.0 / std::f64::consts::PI.sqrt())
}

/// `Σ (2k−1)!!/(2x²)^k`, so that `erfi(x) ≈ e^{x²}/(x√π)` times this sum.
fn erfi_asymptotic_sum<T: Float>(x: T) -> T {
    let inv = T::one() / (c::<T>(2.0) * x * x);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..400usize {
        let next = term * T::from(2 * k - 1).unwrap() * inv;
        if next >= term {
            break;
        }
        term = next;
        sum = sum + term;
        if term < T::epsilon() * c(1e-2) {
            break;
        }
    }
    sum
}

/// Imaginary error function `(2/√π)∫₀ˣ e^{t²} dt`.
///
/// Returns [`Error::Overflow`] once the value leaves the floating-point range
/// (about `|x| > 26.6` in `f64`); use [`exp_erfi_product`] there.
pub fn erfi<T: Float>(x: T) -> Result<T, Error> {
    let v = if x.abs() <= c(ERFI_SERIES_LIMIT) {
        erfi_series(x)
    } else {
        let ax = x.abs();
        let v = (ax * ax).exp() / (ax * c::<T>(std::f64::consts::PI.sqrt())) * erfi_asymptotic_sum(ax);
        v * x.signum()
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow)
    }
}

/// `e^{−s}·erfi(x)`, evaluated without forming `erfi(x)` for large `|x|`.
pub fn exp_erfi_product<T: Float>(s: T, x: T) -> Result<T, Error> {
    let v = if x.abs() <= c(ERFI_SERIES_LIMIT) {
        (-s).exp() * erfi_series(x)
    } else {
        let ax = x.abs();
        (ax * ax - s).exp() / (ax * c::<T>(std::f64::consts::PI.sqrt())) * erfi_asymptotic_sum(ax) * x.signum()
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow)
    }
}

/// Dawson function `D(x) = (√π/2) e^{−x²} erfi(x)`.
pub fn dawson<T: Float>(x: T) -> T {
    let v = exp_erfi_product(x * x, x).expect("e^{-x^2} erfi(x) is bounded");
    v * c::<T>(std::f64::consts::PI.sqrt() / 2.0)
}

/// Arguments of the Humbert series `Φ1(α, β; γ; x, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi1Params {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub x: f64,
    pub y: f64,
}

impl Phi1Params {
    pub fn new(alpha: f64, beta: f64, gamma: f64, x: f64, y: f64) -> Result<Self, Error> {
        if ![alpha, beta, gamma, x, y].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("phi1 arguments must be finite".into()));
        }
        if gamma <= 0.0 && gamma == gamma.round() {
            return Err(Error::InvalidArgument(format!(
                "gamma = {gamma} is a non-positive integer"
            )));
        }
        if x.abs() >= 1.0 {
            return Err(Error::InvalidArgument(format!("|x| = {} must be < 1", x.abs())));
        }
        Ok(Self {
            alpha,
            beta,
            gamma,
            x,
            y,
        })
    }

    fn has_integral_form(&self) -> bool {
        self.gamma > self.alpha && self.alpha > 0.0
    }
}

/// Beyond this anti-diagonal order `m + n` the double series is abandoned.
pub const PHI1_MAX_ORDER: usize = 4_000;

/// Large negative `y` makes the series cancel badly; below this threshold the
/// Euler integral is used instead whenever `γ > α > 0`.
pub const PHI1_INTEGRAL_BELOW: f64 = -5.0;

/// `Φ1 = Σ_{m,n} (α)_{m+n}(β)_m / ((γ)_{m+n} m! n!) x^m y^n`.
pub fn phi1(p: &Phi1Params) -> Result<f64, Error> {
    if p.y < PHI1_INTEGRAL_BELOW && p.has_integral_form() {
        phi1_integral(p)
    } else {
        phi1_series(p)
    }
}

/// Direct summation over anti-diagonals `m + n = N`.
pub fn phi1_series(p: &Phi1Params) -> Result<f64, Error> {
    let mut xs: Vec<f64> = vec![1.0]; // (β)_m x^m / m!
    let mut ys: Vec<f64> = vec![1.0]; // y^n / n!
    let mut ratio = 1.0; // (α)_N / (γ)_N
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut quiet = 0;
    let mut peak = 1.0f64;
    for big_n in 1.. {
        let nf = big_n as f64;
        ratio *= (p.alpha + nf - 1.0) / (p.gamma + nf - 1.0);
        let last_x = *xs.last().unwrap();
        xs.push(last_x * (p.beta + nf - 1.0) * p.x / nf);
        let last_y = *ys.last().unwrap();
        ys.push(last_y * p.y / nf);
        let mut diag = 0.0;
        let mut diag_abs = 0.0;
        for m in 0..=big_n {
            let t = xs[m] * ys[big_n - m];
            diag += t;
            diag_abs += t.abs();
        }
        diag *= ratio;
        diag_abs *= ratio.abs();
        peak = peak.max(diag_abs);
        let t = sum + diag;
        comp += if sum.abs() >= diag.abs() {
            (sum - t) + diag
        } else {
            (diag - t) + sum
        };
        sum = t;
        if !sum.is_finite() {
            return Err(Error::Overflow);
        }
        if diag_abs <= 1e-16 * (sum + comp).abs() && nf > p.y.abs() + 2.0 {
            quiet += 1;
            if quiet >= 2 {
                let total = sum + comp;
                // cancellation between terms of size `peak` leaves too few digits
                if peak * f64::EPSILON > 1e-8 * total.abs() {
                    return Err(Error::NonConvergence { terms: big_n });
                }
                return Ok(total);
            }
        } else {
            quiet = 0;
        }
        if big_n >= PHI1_MAX_ORDER {
            return Err(Error::NonConvergence { terms: big_n });
        }
    }
    unreachable!()
}

/// Euler representation
/// `Γ(γ)/(Γ(α)Γ(γ−α)) ∫₀¹ u^{α−1}(1−u)^{γ−α−1}(1−xu)^{−β} e^{yu} du`,
/// valid for `γ > α > 0`.
///
/// The two endpoint powers are absorbed by `u = s^{1/α}` on `[0, ½]` and
/// `1 − u = w^{1/(γ−α)}` on `[½, 1]`.
pub fn phi1_integral(p: &Phi1Params) -> Result<f64, Error> {
    if !p.has_integral_form() {
        return Err(Error::InvalidArgument(
            "integral representation needs gamma > alpha > 0".into(),
        ));
    }
    use statrs::function::gamma::ln_gamma;
    let (a, b, g, x, y) = (p.alpha, p.beta, p.gamma, p.x, p.y);
    let ga = g - a;
    let cfg = QuadConfig::default()
        .with_rel_tol(1e-13)
        .with_abs_tol(1e-300);
    let left = integrate_1d(
        |s: f64| {
            let u = s.powf(1.0 / a);
            Complex::from((1.0 - u).powf(ga - 1.0) * (1.0 - x * u).powf(-b) * (y * u).exp() / a)
        },
        0.0,
        0.5f64.powf(a),
        &cfg,
    )?;
    let right = integrate_1d(
        |w: f64| {
            let u = 1.0 - w.powf(1.0 / ga);
            Complex::from(u.powf(a - 1.0) * (1.0 - x * u).powf(-b) * (y * u).exp() / ga)
        },
        0.0,
        0.5f64.powf(ga),
        &cfg,
    )?;
    if !left.converged || !right.converged {
        return Err(Error::NonConvergence {
            terms: left.n_evals + right.n_evals,
        });
    }
    let norm = (ln_gamma(g) - ln_gamma(a) - ln_gamma(ga)).exp();
    Ok(norm * (left.value.re + right.value.re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn j0_reference_values() {
        assert_eq!(bessel_j0(0.0f64), 1.0);
        assert_abs_diff_eq!(bessel_j0(2.404825557695773f64), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bessel_j0(1.0f64), 0.765197686557967, epsilon = 1e-15);
        assert_abs_diff_eq!(bessel_j0(-1.0f64), 0.765197686557967, epsilon = 1e-15);
        // J0(30) and J0(50), values from DLMF tables
        assert_abs_diff_eq!(bessel_j0(30.0f64), -0.086367983581040225, epsilon = 1e-15);
        assert_abs_diff_eq!(bessel_j0(50.0f64), 0.055812327669251746, epsilon = 1e-15);
    }

    #[test]
    fn j0_branches_agree_at_seam() {
        for x in [20.0f64, 22.5, 25.0, 27.0] {
            assert_abs_diff_eq!(bessel_j0_series(x), bessel_j0_asymptotic(x), epsilon = 5e-15);
        }
    }

    #[test]
    fn j0_single_precision() {
        assert_abs_diff_eq!(bessel_j0(1.0f32), 0.7651977, epsilon = 1e-6);
        assert_abs_diff_eq!(bessel_j0(30.0f32), -0.08636798, epsilon = 1e-5);
    }

    #[test]
    fn erfi_values() {
        assert_eq!(erfi(0.0f64).unwrap(), 0.0);
        assert_relative_eq!(erfi(1.0f64).unwrap(), 1.650425758797543, max_relative = 1e-14);
        for x in [0.3f64, 2.0, 5.5, 7.0, 12.0] {
            assert_eq!(erfi(-x).unwrap(), -erfi(x).unwrap());
        }
        assert!(matches!(erfi(27.0f64), Err(Error::Overflow)));
        assert!(exp_erfi_product(900.0f64, 30.0).unwrap().is_finite());
    }

    #[test]
    fn erfi_continuous_at_branch_switch() {
        let below = erfi_series(6.0f64);
        let above = (36.0f64).exp() / (6.0 * std::f64::consts::PI.sqrt()) * erfi_asymptotic_sum(6.0f64);
        assert_relative_eq!(below, above, max_relative = 1e-14);
    }

    #[test]
    fn dawson_values() {
        // maximum of the Dawson function
        assert_relative_eq!(dawson(0.9241388730f64), 0.5410442246, max_relative = 1e-9);
        assert_relative_eq!(dawson(10.0f64), 0.050253847187598, max_relative = 1e-12);
        assert_relative_eq!(dawson(100.0f64), 0.0050002500375, max_relative = 1e-10);
    }

    #[test]
    fn phi1_limits() {
        let p = Phi1Params::new(1.0, 0.5, 1.5, 0.0, 0.0).unwrap();
        assert_eq!(phi1(&p).unwrap(), 1.0);
        assert!(Phi1Params::new(1.0, 0.5, 1.5, 1.0, 0.0).is_err());
        assert!(Phi1Params::new(1.0, 0.5, -2.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn phi1_series_and_integral_agree() {
        for (a, b, g, x, y) in [
            (1.0, 0.5, 1.5, 0.3, -2.0),
            (2.0, 0.5, 2.5, 0.6, -4.0),
            (1.0, 0.5, 1.5, -0.4, 3.0),
        ] {
            let p = Phi1Params::new(a, b, g, x, y).unwrap();
            assert_relative_eq!(phi1_series(&p).unwrap(), phi1_integral(&p).unwrap(), max_relative = 1e-11);
        }
        let p = Phi1Params::new(1.0, 0.5, 1.5, 0.3, -2.0).unwrap();
        assert_relative_eq!(phi1(&p).unwrap(), 0.34683008313853, max_relative = 1e-12);
    }

    #[test]
    fn phi1_large_negative_y_uses_integral() {
        let p = Phi1Params::new(2.0, 0.5, 2.5, 0.8, -400.0).unwrap();
        assert!(phi1_series(&p).is_err());
        let v = phi1(&p).unwrap();
        assert!(v > 0.0 && v < 0.05);
    }
}
