//! Grid construction and parsing.

use crate::{Failure, GridArgs};

/// Defaults of a one-parameter grid.
#[derive(Debug, Clone, Copy)]
pub struct GridDefaults {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

/// Builds the grid from flags over `defaults`. Requires `min < max`
/// (a single point uses `min`), positive bounds for log spacing and at
/// least one point.
pub fn build(args: &GridArgs, defaults: GridDefaults) -> Result<Vec<f64>, Failure> {
    let min = args.a_min.unwrap_or(defaults.min);
    let max = args.a_max.unwrap_or(defaults.max);
    let points = args.points.unwrap_or(defaults.points);
    let log = args.log || (defaults.log && args.a_min.is_none() && args.a_max.is_none());
    if !(min.is_finite() && max.is_finite()) {
        return Err(Failure::Usage("grid bounds must be finite".into()));
    }
    if !(min < max) {
        return Err(Failure::Usage(format!("grid needs a-min < a-max, got {min} and {max}")));
    }
    if points == 0 {
        return Err(Failure::Usage("grid needs at least one point".into()));
    }
    if log && min <= 0.0 {
        return Err(Failure::Usage("logarithmic grids need a positive a-min".into()));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            if log {
                (min.ln() + f * (max.ln() - min.ln())).exp()
            } else {
                min + f * (max - min)
            }
        })
        .collect())
}

/// Parses `p,p,...;p,p,...` into points of exactly `dim` numbers.
pub fn parse_points(raw: &str, dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let mut out = Vec::new();
    for chunk in raw.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let point = chunk
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| Failure::Usage(format!("bad grid point {chunk:?}: {e}")))?;
        if point.len() != dim || point.iter().any(|v| !v.is_finite()) {
            return Err(Failure::Usage(format!("grid point {chunk:?} needs {dim} finite numbers")));
        }
        out.push(point);
    }
    if out.is_empty() {
        return Err(Failure::Usage("empty grid".into()));
    }
    Ok(out)
}
