//! Acceptance suite: one PASS/FAIL line per criterion, with the tolerances
//! pinned below. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use hyperhs::checks;
use hyperhs::measures::polar_jacobian;
use hyperhs::reductions::{
    f1_o3, f_o21, f_o22_double, f_o22_phi1, f_w, i_o21_special, i_o22_special, naive_o21_tail, naive_o22_tail,
    o3_naive_tail, term_integral,
};
use hyperhs::verifiers::{
    direct_o11, direct_o21, gaussianity_test, linear_fit, o11_gaussian, power_fit,
};
use hyperhs::{Complex, Measure, QuadConfig};
use rayon::prelude::*;

const F_O21_TOL: f64 = 1e-8;
const F_O21_BUDGET: Duration = Duration::from_secs(10);
const F_O22_TOL: f64 = 1e-5;
const F_O22_BUDGET: Duration = Duration::from_secs(300);
const PHI1_CROSS_TOL: f64 = 1e-4;
const F_W_TOL: f64 = 1e-5;
const TERM_TOL: f64 = 1e-6;
const PASS_THRESHOLD: f64 = 1e-3;
const FAIL_THRESHOLD: f64 = 0.05;
const SLOPE: f64 = -0.5;
const SLOPE_BAND: f64 = 0.05;
const SIGNIFICANCE: f64 = 10.0;
const F1_O3_TOL: f64 = 1e-8;
const O3_TAIL_TOL: f64 = 1e-4;

type Verdict = Result<String, String>;

fn log_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (min.ln() + (max.ln() - min.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn lin_grid(min: f64, max: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Largest `|f(a) − 1|` over `grid`, requiring convergence.
fn max_dev_from_one(grid: &[f64], f: impl Fn(f64) -> Result<hyperhs::QuadResult, hyperhs::Error> + Sync) -> Result<f64, String> {
    let devs: Vec<Result<f64, String>> = grid
        .par_iter()
        .map(|&a| {
            let r = f(a).map_err(err)?;
            if !r.converged {
                return Err(format!("a = {a} did not converge"));
            }
            Ok((r.value.re - 1.0).abs())
        })
        .collect();
    devs.into_iter().try_fold(0.0f64, |m, d| Ok(m.max(d?)))
}

fn f_o21_identity() -> Verdict {
    let start = Instant::now();
    let dev = max_dev_from_one(&log_grid(0.1, 10.0, 50), |a| f_o21(a, &QuadConfig::default()))?;
    let t = start.elapsed();
    let msg = format!("max |F-1| = {dev:.2e} (tol {F_O21_TOL:e}), {:.2}s (budget {}s)", t.as_secs_f64(), F_O21_BUDGET.as_secs());
    if dev < F_O21_TOL && t < F_O21_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn o22_grid() -> Vec<f64> {
    lin_grid(0.5, 5.0, 20)
}

fn o22_cfg() -> QuadConfig {
    QuadConfig::default().with_rel_tol(1e-8)
}

fn f_o22_identity() -> Verdict {
    let start = Instant::now();
    let dev = max_dev_from_one(&o22_grid(), |a| f_o22_double(a, &o22_cfg()))?;
    let t = start.elapsed();
    let msg = format!("max |F-1| = {dev:.2e} (tol {F_O22_TOL:e}), {:.1}s (budget {}s)", t.as_secs_f64(), F_O22_BUDGET.as_secs());
    if dev < F_O22_TOL && t < F_O22_BUDGET {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn phi1_cross_form() -> Verdict {
    let cfg = o22_cfg();
    let devs: Vec<Result<f64, String>> = o22_grid()
        .par_iter()
        .map(|&a| {
            let d = f_o22_double(a, &cfg).map_err(err)?;
            let p = f_o22_phi1(a, &cfg).map_err(err)?;
            if !(d.converged && p.converged) {
                return Err(format!("a = {a} did not converge"));
            }
            Ok((d.value.re - p.value.re).abs())
        })
        .collect();
    let dev = devs.into_iter().try_fold(0.0f64, |m, d| Ok::<_, String>(m.max(d?)))?;
    let msg = format!("max |double - phi1| = {dev:.2e} (tol {PHI1_CROSS_TOL:e})");
    if dev < PHI1_CROSS_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn general_o21() -> Verdict {
    let cfg = QuadConfig::default().with_rel_tol(1e-9);
    // F(w)e^{w²} over w at x − z = 2
    let ratios: Vec<f64> = [0.1, 0.5, 1.0, 1.5]
        .iter()
        .map(|&w| f_w(w, 2.0, &cfg).map(|r| r.value.re * (w * w).exp()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let w_dev = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    // F(0.3) over x − z
    let at: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&d| f_w(0.3, d, &cfg).map(|r| r.value.re))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let d_dev = at.iter().map(|v| (v - at[0]).abs()).fold(0.0, f64::max);
    let mut t_dev = 0.0f64;
    let mut fact = 1.0;
    for n in 0..=6usize {
        if n > 0 {
            fact *= n as f64;
        }
        let expect = if n % 2 == 0 { 1.0 } else { -1.0 } / fact;
        for a in [0.5, 1.0, 2.0] {
            let r = term_integral(n, a, &QuadConfig::default()).map_err(err)?;
            t_dev = t_dev.max((r.value.re - expect).abs());
        }
    }
    let msg = format!(
        "F(w)e^(w^2) spread {w_dev:.2e}, x-z spread {d_dev:.2e} (tol {F_W_TOL:e}); term integrals n<=6 dev {t_dev:.2e} (tol {TERM_TOL:e})"
    );
    if w_dev < F_W_TOL && d_dev < F_W_TOL && t_dev < TERM_TOL {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn o11_grid() -> Vec<[f64; 3]> {
    vec![
        [1.0, 1.0, 0.0],
        [2.0, 1.0, 0.0],
        [1.5, 0.8, 0.3],
        [1.0, 2.0, -0.5],
        [2.5, 1.5, 1.0],
    ]
}

fn o11_report(measure: Measure, threshold: f64) -> Result<hyperhs::GaussianityReport, String> {
    let cfg = QuadConfig::default().with_rel_tol(1e-8);
    let grid = o11_grid();
    let values: Vec<Complex> = grid
        .iter()
        .map(|p| direct_o11(p[0], p[1], p[2], measure, &cfg).map(|r| r.value))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let preds: Vec<f64> = grid.iter().map(|p| o11_gaussian(p[0], p[1], p[2])).collect();
    gaussianity_test(&values, &preds, threshold).map_err(err)
}

fn xz_gaussian(x: f64, z: f64, copies: (usize, usize)) -> f64 {
    (-0.5 * (copies.0 as f64 * x * x + copies.1 as f64 * z * z)).exp()
}

fn full_pipelines() -> Verdict {
    let mut grid = Vec::new();
    for x in [0.5, 1.0, 2.0] {
        for z in [-0.5, -1.0, -2.0] {
            grid.push((x, z));
        }
    }
    let cfg = QuadConfig::default().with_rel_tol(1e-8);
    let values: Vec<Complex> = grid
        .par_iter()
        .map(|&(x, z)| i_o21_special(x, z, &cfg).map(|r| r.value))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let preds: Vec<f64> = grid.iter().map(|&(x, z)| xz_gaussian(x, z, (2, 1))).collect();
    let o21 = gaussianity_test(&values, &preds, PASS_THRESHOLD).map_err(err)?;
    let o11 = o11_report(Measure::Conjectured, PASS_THRESHOLD)?;
    let o22_grid = [(1.0, -1.0), (0.5, -1.5)];
    let cfg22 = QuadConfig::default().with_rel_tol(1e-5).with_gauss_nodes(32);
    let values: Vec<Complex> = o22_grid
        .par_iter()
        .map(|&(x, z)| i_o22_special(x, z, &cfg22).map(|r| r.value))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let preds: Vec<f64> = o22_grid.iter().map(|&(x, z)| xz_gaussian(x, z, (2, 2))).collect();
    let o22 = gaussianity_test(&values, &preds, PASS_THRESHOLD).map_err(err)?;
    let msg = format!(
        "max rel dev: O(2,1) {:.2e}, O(1,1) {:.2e}, O(2,2) {:.2e} (threshold {PASS_THRESHOLD:e})",
        o21.max_rel_dev, o11.max_rel_dev, o22.max_rel_dev
    );
    if o21.pass && o11.pass && o22.pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn naive_refutation() -> Verdict {
    let o11 = o11_report(Measure::Naive, FAIL_THRESHOLD)?;
    let grid = [(1.0, -1.0), (0.5, -2.0), (2.0, -0.5)];
    let cfg = QuadConfig::default().with_rel_tol(1e-3);
    let values: Vec<Complex> = grid
        .iter()
        .map(|&(x, z)| direct_o21(x, z, Measure::Naive, &cfg).map(|r| r.value))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let preds: Vec<f64> = grid.iter().map(|&(x, z)| xz_gaussian(x, z, (2, 1))).collect();
    let o21 = gaussianity_test(&values, &preds, FAIL_THRESHOLD).map_err(err)?;
    let ds = [1e-5, 2e-5, 4e-5, 8e-5];
    let tails: Vec<f64> = ds
        .iter()
        .map(|&d| naive_o21_tail(0.5 * d, -0.5 * d, &QuadConfig::default()).map(|r| r.value.re.abs()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let slope = power_fit(&ds, &tails).map_err(err)?.coefficients[1];
    let a = lin_grid(0.02, 0.2, 10);
    let vals: Vec<f64> = a
        .iter()
        .map(|&a| naive_o22_tail(a, &QuadConfig::default()).map(|r| r.value.re))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let fit = linear_fit(&a, &vals).map_err(err)?;
    let sig = fit.coefficients[1].abs() / fit.stderrs[1];
    let msg = format!(
        "naive dev: O(1,1) {:.3}, O(2,1) {:.3} (must exceed {FAIL_THRESHOLD}); slope {slope:.4} ({SLOPE}±{SLOPE_BAND}); c1/sigma {sig:.1} (> {SIGNIFICANCE})",
        o11.max_rel_dev, o21.max_rel_dev
    );
    if !o11.pass && !o21.pass && (slope - SLOPE).abs() < SLOPE_BAND && sig > SIGNIFICANCE {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn compact_duals() -> Verdict {
    let dev = max_dev_from_one(&log_grid(0.1, 10.0, 50), |a| f1_o3(a, &QuadConfig::default()))?;
    let grid: Vec<(f64, f64)> = [-0.5, 0.0, 0.5, 1.0, 1.5].iter().map(|&x| (x, x - 0.1)).collect();
    let values: Vec<Complex> = grid
        .iter()
        .map(|&(x, z)| o3_naive_tail(x, z, &QuadConfig::default()).map(|r| r.value))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let preds: Vec<f64> = grid.iter().map(|&(x, z)| xz_gaussian(x, z, (2, 1))).collect();
    let rep = gaussianity_test(&values, &preds, O3_TAIL_TOL).map_err(err)?;
    let msg = format!(
        "max |F1-1| = {dev:.2e} (tol {F1_O3_TOL:e}); tail ratio dev {:.2e} (tol {O3_TAIL_TOL:e})",
        rep.max_rel_dev
    );
    if dev < F1_O3_TOL && rep.pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn from_check(c: checks::CheckOutcome) -> Verdict {
    let msg = format!("{}: {}", c.name, c.detail);
    if c.pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn jacobian_oracle() -> Verdict {
    from_check(checks::jacobian_check(100, polar_jacobian))
}

fn measure_identities() -> Verdict {
    let a = checks::measure_identity_check(1000);
    let b = checks::coset_volume_check(&QuadConfig::default());
    let msg = format!("{}; {}: {}", a.detail, b.name, b.detail);
    if a.pass && b.pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn special_functions() -> Verdict {
    let a = checks::bessel_check(&QuadConfig::default());
    let b = checks::phi1_limits_check();
    let msg = format!("{}: {}; {}: {}", a.name, a.detail, b.name, b.detail);
    if a.pass && b.pass {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("F(a)=1 for O(2,1)", f_o21_identity),
        ("F(a)=1 for O(2,2)", f_o22_identity),
        ("Phi1 cross-form", phi1_cross_form),
        ("general O(2,1)", general_o21),
        ("full-pipeline Gaussianity", full_pipelines),
        ("naive-measure refutation", naive_refutation),
        ("compact duals", compact_duals),
        ("Jacobian oracle", jacobian_oracle),
        ("measure identities", measure_identities),
        ("special functions", special_functions),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("PASS [{:>2}] {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL [{:>2}] {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
