//! Deterministic numerical integration.
//!
//! * adaptive 7/15-point Gauss–Kronrod on finite and infinite intervals,
//! * iterated 2D integration over rectangles and regions with variable inner
//!   bounds,
//! * Gauss–Hermite, Gauss–Laguerre and Gauss–Legendre rules and tensor
//!   products of the Hermite rule.
//!
//! Every final sum is formed in a fixed order with compensated summation, so
//! results do not depend on how many threads evaluated the integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;
use num_traits::Float;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadError {
    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid integration interval [{lower}, {upper}]")]
    InvalidInterval { lower: f64, upper: f64 },
    #[error("integrand returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("rule size {0} outside the supported range")]
    RuleSize(usize),
}

/// Tolerances and budgets shared by all integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Budget on integrand evaluations; exceeding it clears `converged`.
    pub max_evals: usize,
    /// Per-axis node count of Gaussian-weighted rules.
    pub gauss_nodes: usize,
    /// Truncation length for semi-infinite intervals. Infinite means the
    /// interval is mapped onto `[0, 1)` instead.
    pub tail_cutoff: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_evals: 5_000_000,
            gauss_nodes: 64,
            tail_cutoff: f64::INFINITY,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(mut self, v: f64) -> Self {
        self.rel_tol = v;
        self
    }

    pub fn with_abs_tol(mut self, v: f64) -> Self {
        self.abs_tol = v;
        self
    }

    pub fn with_max_evals(mut self, v: usize) -> Self {
        self.max_evals = v;
        self
    }

    pub fn with_gauss_nodes(mut self, v: usize) -> Self {
        self.gauss_nodes = v;
        self
    }

    pub fn with_tail_cutoff(mut self, v: f64) -> Self {
        self.tail_cutoff = v;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(QuadError::InvalidConfig("tolerances must be positive".into()));
        }
        if self.max_evals == 0 {
            return Err(QuadError::InvalidConfig("max_evals must be positive".into()));
        }
        if self.gauss_nodes == 0 {
            return Err(QuadError::InvalidConfig("gauss_nodes must be at least 1".into()));
        }
        if !(self.tail_cutoff > 0.0) {
            return Err(QuadError::InvalidConfig("tail_cutoff must be positive".into()));
        }
        Ok(())
    }

    /// Whether `err` meets the tolerance for an integral of size `value`.
    pub fn accepts(&self, value: f64, err: f64) -> bool {
        err <= self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Outcome of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult<T> {
    pub value: Complex<T>,
    pub err_est: T,
    pub n_evals: usize,
    pub converged: bool,
}

impl<T: Float> QuadResult<T> {
    pub fn scale(self, s: T) -> Self {
        Self {
            value: self.value * s,
            err_est: self.err_est * s.abs(),
            ..self
        }
    }

    pub fn scale_complex(self, s: Complex<T>) -> Self {
        Self {
            value: self.value * s,
            err_est: self.err_est * s.norm(),
            ..self
        }
    }

    /// Sum of two independent estimates.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            err_est: self.err_est + other.err_est,
            n_evals: self.n_evals + other.n_evals,
            converged: self.converged && other.converged,
        }
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Float> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }
}

impl<T: Float> CompensatedSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        self.comp = self.comp
            + if self.sum.abs() >= x.abs() {
                (self.sum - t) + x
            } else {
                (x - t) + self.sum
            };
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated sum of complex values in iteration order.
pub fn sum_complex<T: Float>(values: impl IntoIterator<Item = Complex<T>>) -> Complex<T> {
    let mut re = CompensatedSum::default();
    let mut im = CompensatedSum::default();
    for v in values {
        re.add(v.re);
        im.add(v.im);
    }
    Complex::new(re.value(), im.value())
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Abscissae of the 15-point Kronrod rule on `[a, b]`, in a fixed order.
fn kronrod_nodes<T: Float>(a: T, b: T) -> [T; 15] {
    let two = T::one() + T::one();
    let center = (a + b) / two;
    let half = (b - a) / two;
    let mut x = [center; 15];
    for j in 0..7 {
        let d = half * T::from(XGK[j]).unwrap();
        x[2 * j] = center - d;
        x[2 * j + 1] = center + d;
    }
    x
}

/// Integrand sample together with an absolute error already present in it
/// (non-zero when the sample is itself an inner integral).
type Sample<T> = (Complex<T>, T);

struct Panel<T> {
    a: T,
    b: T,
    value: Complex<T>,
    err: T,
    /// Part of `err` that refinement cannot reduce.
    floor: T,
    seq: usize,
}

impl<T: Float> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Float> Eq for Panel<T> {}
impl<T: Float> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Float> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .partial_cmp(&other.err)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Returns the value, the error estimate and the rounding floor of the
/// estimate.
fn gk15<T: Float>(a: T, b: T, f: &[Sample<T>; 15]) -> (Complex<T>, T, T) {
    let half = (b - a) / (T::one() + T::one());
    let fc = f[14].0;
    let mut kron = fc * T::from(WGK[7]).unwrap();
    let mut gauss = fc * T::from(WG[3]).unwrap();
    let mut inner_err = f[14].1 * T::from(WGK[7]).unwrap();
    let mut resabs = fc.norm() * T::from(WGK[7]).unwrap();
    for j in 0..7 {
        let w = T::from(WGK[j]).unwrap();
        let pair = f[2 * j].0 + f[2 * j + 1].0;
        kron = kron + pair * w;
        resabs = resabs + (f[2 * j].0.norm() + f[2 * j + 1].0.norm()) * w;
        inner_err = inner_err + (f[2 * j].1 + f[2 * j + 1].1) * w;
        if j % 2 == 1 {
            gauss = gauss + pair * T::from(WG[j / 2]).unwrap();
        }
    }
    let mean = kron * T::from(0.5).unwrap();
    let mut resasc = (fc - mean).norm() * T::from(WGK[7]).unwrap();
    for j in 0..7 {
        let w = T::from(WGK[j]).unwrap();
        resasc = resasc + ((f[2 * j].0 - mean).norm() + (f[2 * j + 1].0 - mean).norm()) * w;
    }
    let scale = half.abs();
    let value = kron * half;
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut err = ((kron - gauss) * half).norm();
    if resasc != T::zero() && err != T::zero() {
        let r = (T::from(200.0).unwrap() * err / resasc).powf(T::from(1.5).unwrap());
        err = resasc * r.min(T::one());
    }
    let mut floor = T::from(50.0).unwrap() * T::epsilon() * resabs;
    if resabs > T::min_positive_value() / (T::from(50.0).unwrap() * T::epsilon()) {
        err = err.max(floor);
    } else {
        floor = T::zero();
    }
    let inner = inner_err * scale;
    (value, err + inner, floor + inner)
}

/// Adaptive driver shared by every 1D and 2D routine. `eval` maps a batch
/// of abscissae (already in the finite integration variable) to samples.
fn adaptive<T, E>(eval: &E, breaks: &[T], cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: Float,
    E: Fn(&[T; 15]) -> Result<([Sample<T>; 15], usize), QuadError>,
{
    cfg.validate()?;
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel<T>> = Vec::new();
    let mut n_evals = 0usize;
    let mut seq = 0usize;
    let mut total = Complex::new(T::zero(), T::zero());
    let mut total_err = T::zero();
    let fresh = |a: T, b: T, n_evals: &mut usize, seq: &mut usize| -> Result<Panel<T>, QuadError> {
        let x = kronrod_nodes(a, b);
        let (f, n) = eval(&x)?;
        *n_evals += n;
        let (value, err, floor) = gk15(a, b, &f);
        *seq += 1;
        Ok(Panel {
            a,
            b,
            value,
            err,
            floor,
            seq: *seq,
        })
    };
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let p = fresh(w[0], w[1], &mut n_evals, &mut seq)?;
        total = total + p.value;
        total_err = total_err + p.err;
        heap.push(p);
    }
    let tol = |v: Complex<T>| -> T {
        T::from(cfg.abs_tol)
            .unwrap()
            .max(T::from(cfg.rel_tol).unwrap() * v.norm())
    };
    let mut converged = false;
    let mut unresolved = false;
    let mut iter = 0usize;
    loop {
        if total_err <= tol(total) {
            converged = true;
            break;
        }
        if n_evals + 30 > cfg.max_evals {
            break;
        }
        let Some(worst) = heap.pop() else {
            // every remaining panel is at its rounding floor
            converged = !unresolved;
            break;
        };
        if worst.err <= worst.floor {
            done.push(worst);
            continue;
        }
        let two = T::one() + T::one();
        let mid = (worst.a + worst.b) / two;
        let width = (worst.b - worst.a).abs();
        let tiny = T::from(100.0).unwrap() * T::epsilon() * worst.a.abs().max(worst.b.abs()).max(T::min_positive_value());
        if width <= tiny || mid == worst.a || mid == worst.b {
            unresolved = true;
            done.push(worst);
            continue;
        }
        let left = fresh(worst.a, mid, &mut n_evals, &mut seq)?;
        let right = fresh(mid, worst.b, &mut n_evals, &mut seq)?;
        total = total - worst.value + left.value + right.value;
        total_err = total_err - worst.err + left.err + right.err;
        heap.push(left);
        heap.push(right);
        iter += 1;
        if iter.is_multiple_of(64) {
            total_err = heap.iter().chain(done.iter()).fold(T::zero(), |s, p| s + p.err);
        }
    }
    let mut panels: Vec<Panel<T>> = heap.into_vec();
    panels.extend(done);
    panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal).then(p.seq.cmp(&q.seq)));
    let value = sum_complex(panels.iter().map(|p| p.value));
    let mut err = CompensatedSum::default();
    for p in &panels {
        err.add(p.err);
    }
    let err_est = err.value();
    let converged = converged && err_est.is_finite() && n_evals <= cfg.max_evals;
    Ok(QuadResult {
        value,
        err_est,
        n_evals,
        converged,
    })
}

/// Change of variables taking an interval with infinite ends onto a finite one.
#[derive(Clone, Copy)]
enum Map<T> {
    Identity,
    /// `t = a + u/(1−u)`, `u ∈ [0, 1)`.
    Upper(T),
    /// `t = b − u/(1−u)`.
    Lower(T),
    /// `t = u/(1−u²)`, `u ∈ (−1, 1)`.
    Both,
}

impl<T: Float> Map<T> {
    fn apply(&self, u: T) -> (T, T) {
        let one = T::one();
        match *self {
            Map::Identity => (u, one),
            Map::Upper(a) => {
                let d = one - u;
                (a + u / d, one / (d * d))
            }
            Map::Lower(b) => {
                let d = one - u;
                (b - u / d, one / (d * d))
            }
            Map::Both => {
                let d = one - u * u;
                (u / d, (one + u * u) / (d * d))
            }
        }
    }
}

/// Resolves `[lower, upper]` into a map and the finite range it acts on,
/// applying `tail_cutoff` to semi-infinite intervals when it is finite.
fn resolve<T: Float>(lower: T, upper: T, cfg: &QuadConfig) -> Result<(Map<T>, T, T), QuadError> {
    let bad = || QuadError::InvalidInterval {
        lower: lower.to_f64().unwrap_or(f64::NAN),
        upper: upper.to_f64().unwrap_or(f64::NAN),
    };
    if lower.is_nan() || upper.is_nan() || lower > upper {
        return Err(bad());
    }
    let cut = T::from(cfg.tail_cutoff).unwrap();
    let one = T::one();
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => Ok((Map::Identity, lower, upper)),
        (true, false) if cut.is_finite() => Ok((Map::Identity, lower, lower + cut)),
        (true, false) => Ok((Map::Upper(lower), T::zero(), one)),
        (false, true) if cut.is_finite() => Ok((Map::Identity, upper - cut, upper)),
        (false, true) => Ok((Map::Lower(upper), T::zero(), one)),
        (false, false) if cut.is_finite() => Ok((Map::Identity, -cut, cut)),
        (false, false) => {
            if lower == upper {
                return Err(bad());
            }
            Ok((Map::Both, -one, one))
        }
    }
}

/// Pulls finite breakpoints back through `map`.
fn pull_back<T: Float>(map: Map<T>, t: T) -> T {
    let one = T::one();
    match map {
        Map::Identity => t,
        Map::Upper(a) => {
            let d = t - a;
            d / (one + d)
        }
        Map::Lower(b) => {
            let d = b - t;
            d / (one + d)
        }
        Map::Both => {
            if t == T::zero() {
                T::zero()
            } else {
                let two = one + one;
                (-one + (one + two * two * t * t).sqrt()) / (two * t)
            }
        }
    }
}

fn check<T: Float>(v: Complex<T>, at: T) -> Result<Complex<T>, QuadError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(QuadError::NonFinite {
            at: at.to_f64().unwrap_or(f64::NAN),
        })
    }
}

fn integrate_samples<T, S>(
    sample: S,
    points: &[T],
    cfg: &QuadConfig,
    parallel: bool,
) -> Result<QuadResult<T>, QuadError>
where
    T: Float + Send + Sync,
    S: Fn(T) -> Result<(Sample<T>, usize), QuadError> + Sync,
{
    if points.len() < 2 {
        return Err(QuadError::InvalidInterval {
            lower: f64::NAN,
            upper: f64::NAN,
        });
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(QuadError::InvalidInterval {
            lower: points[0].to_f64().unwrap_or(f64::NAN),
            upper: points[points.len() - 1].to_f64().unwrap_or(f64::NAN),
        });
    }
    let (lower, upper) = (points[0], points[points.len() - 1]);
    let (map, u0, u1) = resolve(lower, upper, cfg)?;
    let mut breaks = vec![u0];
    for &p in &points[1..points.len() - 1] {
        let u = pull_back(map, p);
        if u > u0 && u < u1 {
            breaks.push(u);
        }
    }
    breaks.push(u1);
    let one_sample = |u: T| -> Result<(Sample<T>, usize), QuadError> {
        let (t, jac) = map.apply(u);
        if !t.is_finite() || jac == T::zero() {
            return Ok(((Complex::new(T::zero(), T::zero()), T::zero()), 0));
        }
        let ((v, e), n) = sample(t)?;
        Ok(((check(v * jac, t)?, e * jac), n))
    };
    let eval = |x: &[T; 15]| -> Result<([Sample<T>; 15], usize), QuadError> {
        let rows: Vec<Result<(Sample<T>, usize), QuadError>> = if parallel {
            x.par_iter().map(|&u| one_sample(u)).collect()
        } else {
            x.iter().map(|&u| one_sample(u)).collect()
        };
        let mut out = [(Complex::new(T::zero(), T::zero()), T::zero()); 15];
        let mut n = 0;
        for (slot, r) in out.iter_mut().zip(rows) {
            let (s, k) = r?;
            *slot = s;
            n += k;
        }
        Ok((out, n))
    };
    adaptive(&eval, &breaks, cfg)
}

/// Adaptive integral of `f` over `[lower, upper]`; either end may be infinite.
pub fn integrate_1d<T, F>(f: F, lower: T, upper: T, cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: Float + Send + Sync,
    F: Fn(T) -> Complex<T> + Sync,
{
    integrate_1d_breaks(f, &[lower, upper], cfg)
}

/// As [`integrate_1d`] with interior breakpoints; `points` must be sorted
/// and its first and last entries are the integration limits.
pub fn integrate_1d_breaks<T, F>(f: F, points: &[T], cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: Float + Send + Sync,
    F: Fn(T) -> Complex<T> + Sync,
{
    integrate_samples(|t| Ok(((f(t), T::zero()), 1)), points, cfg, false)
}

/// As [`integrate_1d_breaks`], evaluating the nodes of each panel
/// concurrently. Meant for expensive integrands.
pub fn integrate_1d_par<T, F>(f: F, points: &[T], cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: Float + Send + Sync,
    F: Fn(T) -> Complex<T> + Sync,
{
    integrate_samples(|t| Ok(((f(t), T::zero()), 1)), points, cfg, true)
}

/// Integrates `f` where each sample is itself an estimate: the closure
/// returns a [`QuadResult`], whose error is carried into the outer estimate.
pub fn integrate_nested<T, F>(f: F, points: &[T], cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: Float + Send + Sync,
    F: Fn(T) -> Result<QuadResult<T>, QuadError> + Sync,
{
    let all_converged = std::sync::atomic::AtomicBool::new(true);
    let mut r = integrate_samples(
        |t| {
            let inner = f(t)?;
            if !inner.converged {
                all_converged.store(false, std::sync::atomic::Ordering::Relaxed);
            }
            Ok(((inner.value, inner.err_est), inner.n_evals))
        },
        points,
        cfg,
        true,
    )?;
    r.converged = r.converged && all_converged.load(std::sync::atomic::Ordering::Relaxed);
    Ok(r)
}

/// Integration domain for [`integrate_2d`]. The outer variable is `x`.
pub enum Region<'a, T> {
    Rectangle { x: (T, T), y: (T, T) },
    /// `x ∈ (x.0, x.1)`, `y ∈ bounds(x)`.
    Variable {
        x: (T, T),
        bounds: &'a (dyn Fn(T) -> (T, T) + Sync),
    },
}

/// Iterated adaptive integral of `f(x, y)` over `region`. Inner integrals run
/// at a tenth of the outer tolerances, and their error estimates are
/// integrated into the outer one.
pub fn integrate_2d<T, F>(f: F, region: &Region<'_, T>, cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: Float + Send + Sync,
    F: Fn(T, T) -> Complex<T> + Sync,
{
    cfg.validate()?;
    let inner_cfg = cfg.with_rel_tol(cfg.rel_tol * 0.1).with_abs_tol(cfg.abs_tol * 0.1);
    let (x, bounds): ((T, T), Box<dyn Fn(T) -> (T, T) + Sync>) = match region {
        Region::Rectangle { x, y } => {
            let y = *y;
            (*x, Box::new(move |_| y))
        }
        Region::Variable { x, bounds } => (*x, Box::new(|t| bounds(t))),
    };
    integrate_nested(
        |xv| {
            let (lo, hi) = bounds(xv);
            if lo == hi {
                return Ok(QuadResult {
                    value: Complex::new(T::zero(), T::zero()),
                    err_est: T::zero(),
                    n_evals: 0,
                    converged: true,
                });
            }
            integrate_1d(|yv| f(xv, yv), lo, hi, &inner_cfg)
        },
        &[x.0, x.1],
        cfg,
    )
}

/// Largest supported Gaussian rule.
pub const MAX_RULE: usize = 200;

fn rule_size(k: usize) -> Result<(), QuadError> {
    if (1..=MAX_RULE).contains(&k) {
        Ok(())
    } else {
        Err(QuadError::RuleSize(k))
    }
}

fn to_t<T: Float>(v: Vec<f64>) -> Vec<T> {
    v.into_iter().map(|x| T::from(x).unwrap()).collect()
}

/// `k`-point Gauss–Hermite rule for the weight `e^{−p²/2}` on ℝ
/// (`Σ w = √(2π)`), nodes ascending.
pub fn gauss_hermite_rule<T: Float>(k: usize) -> Result<(Vec<T>, Vec<T>), QuadError> {
    rule_size(k)?;
    let n = k;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let s2 = std::f64::consts::SQRT_2;
    let mut nodes: Vec<f64> = x.iter().map(|v| v * s2).collect();
    let mut weights: Vec<f64> = w.iter().map(|v| v * s2).collect();
    nodes.reverse();
    weights.reverse();
    Ok((to_t(nodes), to_t(weights)))
}

/// `k`-point Gauss–Laguerre rule for the weight `e^{−s}` on `[0, ∞)`.
pub fn gauss_laguerre_rule<T: Float>(k: usize) -> Result<(Vec<T>, Vec<T>), QuadError> {
    rule_size(k)?;
    let n = k;
    let nf = n as f64;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    Ok((to_t(x), to_t(w)))
}

/// `k`-point Gauss–Legendre rule on `[−1, 1]`, nodes ascending.
pub fn gauss_legendre_rule<T: Float>(k: usize) -> Result<(Vec<T>, Vec<T>), QuadError> {
    rule_size(k)?;
    let n = k;
    let nf = n as f64;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    Ok((to_t(x), to_t(w)))
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on<T: Float>(k: usize, a: T, b: T) -> Result<(Vec<T>, Vec<T>), QuadError> {
    let (x, w) = gauss_legendre_rule::<T>(k)?;
    let two = T::one() + T::one();
    let (c, h) = ((a + b) / two, (b - a) / two);
    Ok((x.iter().map(|&t| c + h * t).collect(), w.iter().map(|&v| v * h).collect()))
}

/// Tensor product of a one-dimensional rule.
#[derive(Debug, Clone)]
pub struct TensorRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    dims: usize,
}

impl<T: Float + Send + Sync> TensorRule<T> {
    pub fn hermite(k: usize, dims: usize) -> Result<Self, QuadError> {
        let (nodes, weights) = gauss_hermite_rule(k)?;
        Ok(Self { nodes, weights, dims })
    }

    pub fn len(&self) -> usize {
        self.nodes.len().pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `Σ w_{i1}…w_{id} f(x_{i1}, …, x_{id})`, slices over the first axis
    /// evaluated concurrently and combined in index order.
    pub fn apply<F>(&self, f: &F) -> Result<Complex<T>, QuadError>
    where
        F: Fn(&[T]) -> Complex<T> + Sync,
    {
        let k = self.nodes.len();
        let rest = k.pow(self.dims as u32 - 1);
        let partial: Vec<Result<Complex<T>, QuadError>> = (0..k)
            .into_par_iter()
            .map(|i0| {
                let mut re = CompensatedSum::default();
                let mut im = CompensatedSum::default();
                let mut p = vec![T::zero(); self.dims];
                for flat in 0..rest {
                    let mut w = self.weights[i0];
                    p[0] = self.nodes[i0];
                    let mut r = flat;
                    for slot in p.iter_mut().skip(1) {
                        let idx = r % k;
                        r /= k;
                        *slot = self.nodes[idx];
                        w = w * self.weights[idx];
                    }
                    let v = check(f(&p), p[0])? * w;
                    re.add(v.re);
                    im.add(v.im);
                }
                Ok(Complex::new(re.value(), im.value()))
            })
            .collect();
        let mut out = Vec::with_capacity(k);
        for r in partial {
            out.push(r?);
        }
        Ok(sum_complex(out))
    }
}

/// `∫_{ℝ^d} e^{−|p|²/2} f(p) dp` by tensor Gauss–Hermite rules with
/// `gauss_nodes` and `gauss_nodes + 8` points per axis; the larger rule is
/// reported and their difference is the error estimate.
pub fn integrate_gaussian_nd<T, F>(f: F, dims: usize, cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: Float + Send + Sync,
    F: Fn(&[T]) -> Complex<T> + Sync,
{
    cfg.validate()?;
    if dims == 0 || dims > 4 {
        return Err(QuadError::InvalidConfig(format!("dims = {dims} outside 1..=4")));
    }
    let coarse = TensorRule::hermite(cfg.gauss_nodes, dims)?;
    let fine = TensorRule::hermite(cfg.gauss_nodes + 8, dims)?;
    let lo = coarse.apply(&f)?;
    let hi = fine.apply(&f)?;
    let err_est = (hi - lo).norm();
    let n_evals = coarse.len() + fine.len();
    Ok(QuadResult {
        value: hi,
        err_est,
        n_evals,
        converged: cfg.accepts(hi.norm().to_f64().unwrap(), err_est.to_f64().unwrap())
            && n_evals <= cfg.max_evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> QuadConfig {
        QuadConfig::default().with_rel_tol(1e-13).with_abs_tol(1e-15)
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate_1d(|_| Complex::new(1.0, 0.0), 0.0, 1.0, &cfg()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn exponential_on_half_line() {
        let r = integrate_1d(|t: f64| Complex::from((-t).exp()), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tail_cutoff_truncates() {
        let c = cfg().with_tail_cutoff(40.0);
        let r = integrate_1d(|t: f64| Complex::from((-t).exp()), 0.0, f64::INFINITY, &c).unwrap();
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-12);
        let c = cfg().with_tail_cutoff(80.0);
        let r2 = integrate_1d(|t: f64| Complex::from((-t).exp()), 0.0, f64::INFINITY, &c).unwrap();
        assert_abs_diff_eq!(r.value.re, r2.value.re, epsilon = 1e-12);
    }

    #[test]
    fn whole_line_and_negative_half_line() {
        let g = |t: f64| Complex::from((-t * t).exp());
        let r = integrate_1d(g, f64::NEG_INFINITY, f64::INFINITY, &cfg()).unwrap();
        assert_abs_diff_eq!(r.value.re, std::f64::consts::PI.sqrt(), epsilon = 1e-12);
        let r = integrate_1d(g, f64::NEG_INFINITY, 0.0, &cfg()).unwrap();
        assert_abs_diff_eq!(r.value.re, std::f64::consts::PI.sqrt() / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn inverse_sqrt_endpoint() {
        let r = integrate_1d(|t: f64| Complex::from(1.0 / t.sqrt()), 0.0, 1.0, &cfg().with_rel_tol(1e-10)).unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value.re, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn breakpoints_handle_kinks() {
        let r = integrate_1d_breaks(|t: f64| Complex::from((t - 0.3).abs()), &[0.0, 0.3, 1.0], &cfg()).unwrap();
        assert!(r.n_evals == 30);
        assert_abs_diff_eq!(r.value.re, 0.045 + 0.245, epsilon = 1e-14);
    }

    #[test]
    fn complex_oscillation() {
        let r = integrate_1d(|t: f64| Complex::new(0.0, 5.0 * t).exp(), 0.0, 1.0, &cfg()).unwrap();
        let exact = (Complex::new(0.0, 5.0).exp() - 1.0) / Complex::new(0.0, 5.0);
        assert!((r.value - exact).norm() < 1e-13);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let c = cfg().with_max_evals(10);
        let r = integrate_1d(|t: f64| Complex::from(t.sin()), 0.0, 1.0, &c).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let r = integrate_1d(|_t: f64| Complex::from(f64::NAN), 0.0, 1.0, &cfg());
        assert!(matches!(r, Err(QuadError::NonFinite { .. })));
    }

    #[test]
    fn invalid_inputs() {
        assert!(integrate_1d(|_t: f64| Complex::from(1.0), 1.0, 0.0, &cfg()).is_err());
        assert!(integrate_1d(|_t: f64| Complex::from(1.0), 0.0, 1.0, &cfg().with_rel_tol(0.0)).is_err());
    }

    #[test]
    fn two_dimensional_cases() {
        let unit = Region::Rectangle { x: (0.0, 1.0), y: (0.0, 1.0) };
        let r = integrate_2d(|_, _| Complex::from(1.0), &unit, &cfg()).unwrap();
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-13);

        let inf = f64::INFINITY;
        let plane = Region::Rectangle { x: (-inf, inf), y: (-inf, inf) };
        let r = integrate_2d(|u: f64, v: f64| Complex::from((-u * u - v * v).exp()), &plane, &cfg().with_rel_tol(1e-11))
            .unwrap();
        assert!(r.converged);
        assert_abs_diff_eq!(r.value.re, std::f64::consts::PI, epsilon = 1e-10);

        // triangle 0 < y < x < 1
        let tri = |x: f64| (0.0, x);
        let region = Region::Variable { x: (0.0, 1.0), bounds: &tri };
        let r = integrate_2d(|x: f64, y: f64| Complex::from(x * y), &region, &cfg()).unwrap();
        assert_abs_diff_eq!(r.value.re, 0.125, epsilon = 1e-13);
    }

    #[test]
    fn hermite_rule_moments() {
        let (x, w) = gauss_hermite_rule::<f64>(1).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_abs_diff_eq!(w[0], (2.0 * std::f64::consts::PI).sqrt(), epsilon = 1e-14);
        let root2pi = (2.0 * std::f64::consts::PI).sqrt();
        for k in [2usize, 3, 10, 64, 150] {
            let (x, w) = gauss_hermite_rule::<f64>(k).unwrap();
            let m = |p: i32| x.iter().zip(&w).map(|(a, b)| a.powi(p) * b).sum::<f64>() / root2pi;
            assert_abs_diff_eq!(m(0), 1.0, epsilon = 1e-13);
            assert_abs_diff_eq!(m(2), 1.0, epsilon = 1e-12);
            if k >= 3 {
                assert_abs_diff_eq!(m(4), 3.0, epsilon = 1e-11);
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
        assert!(gauss_hermite_rule::<f64>(0).is_err());
        assert!(gauss_hermite_rule::<f64>(201).is_err());
    }

    #[test]
    fn laguerre_and_legendre_moments() {
        for k in [1usize, 5, 40, 100] {
            let (x, w) = gauss_laguerre_rule::<f64>(k).unwrap();
            // ∫ s^j e^{-s} ds = j!
            let mut fact = 1.0;
            for j in 0..(2 * k).min(12) {
                if j > 0 {
                    fact *= j as f64;
                }
                let m: f64 = x.iter().zip(&w).map(|(a, b)| a.powi(j as i32) * b).sum();
                assert!((m - fact).abs() <= 1e-11 * fact, "k={k} j={j} m={m}");
            }
            let (x, w) = gauss_legendre_rule::<f64>(k).unwrap();
            let m2: f64 = x.iter().zip(&w).map(|(a, b)| a * a * b).sum();
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
            if k >= 2 {
                assert_abs_diff_eq!(m2, 2.0 / 3.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn gaussian_nd_cases() {
        let c = cfg().with_gauss_nodes(40).with_rel_tol(1e-10);
        let r = integrate_gaussian_nd(|_p: &[f64]| Complex::from(1.0), 2, &c).unwrap();
        assert_abs_diff_eq!(r.value.re, 2.0 * std::f64::consts::PI, epsilon = 1e-12);

        let b = [1.0, 2.0];
        let phase = |p: &[f64]| Complex::new(0.0, -(b[0] * p[0] + b[1] * p[1])).exp();
        let r = integrate_gaussian_nd(phase, 2, &c).unwrap();
        let exact = 2.0 * std::f64::consts::PI * (-2.5f64).exp();
        assert!((r.value - exact).norm() < 1e-10);
        assert!(r.converged);

        let lin = |p: &[f64]| phase(p) * (p[0] - p[1]);
        let r = integrate_gaussian_nd(lin, 2, &c).unwrap();
        let exact = Complex::new(0.0, -(b[0] - b[1])) * exact;
        assert!((r.value - exact).norm() < 1e-10);
    }

    #[test]
    fn single_precision_integration() {
        let c = QuadConfig::default().with_rel_tol(1e-5).with_abs_tol(1e-6);
        let r = integrate_1d(|t: f32| Complex::from(t * t), 0.0f32, 1.0f32, &c).unwrap();
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-6);
    }
}
