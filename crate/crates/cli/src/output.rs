//! CSV and JSON serialisation. Everything is rendered into one string and
//! written once, so output order never depends on evaluation order.

use std::fmt::Write as _;
use std::path::Path;

use hyperhs::quadrature::QuadResult;
use serde::Serialize;

use crate::Failure;

/// Header of every scan table.
pub const CSV_HEADER: &str = "a,value,err_est,n_evals,converged";

/// One scan row.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub a: f64,
    pub value: f64,
    pub err_est: f64,
    pub n_evals: usize,
    pub converged: bool,
}

impl Row {
    pub fn new(a: f64, r: &QuadResult<f64>) -> Self {
        Self {
            a,
            value: r.value.re,
            err_est: r.err_est,
            n_evals: r.n_evals,
            converged: r.converged,
        }
    }
}

/// Seventeen significant digits, enough to round-trip an `f64`.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv(rows: &[Row]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        writeln!(s, "{},{},{},{},{}", num(r.a), num(r.value), num(r.err_est), r.n_evals, r.converged)
            .expect("writing to a String");
    }
    s
}

/// Complex number as `{re, im}`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

impl From<num_complex::Complex<f64>> for ReIm {
    fn from(c: num_complex::Complex<f64>) -> Self {
        Self { re: c.re, im: c.im }
    }
}

pub fn json<T: Serialize>(v: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `path`, or to standard output.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
