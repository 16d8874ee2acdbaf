use crate::error::{Error, Result};
use crate::ingest::ReturnSeries;

/// `1 − ρ²` at or below this is treated as perfect correlation.
const DEGENERATE: f64 = 1e-12;

/// Sample Pearson correlation, clamped to `[-1, 1]`.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("lengths differ: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::invalid("need at least 2 observations"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance { ticker: "x".into() });
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance { ticker: "y".into() });
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// [`pearson`] with zero-variance errors naming the offending ticker.
pub fn pearson_series(x: &ReturnSeries, y: &ReturnSeries) -> Result<f64> {
    pearson(&x.returns, &y.returns).map_err(|e| match e {
        Error::ZeroVariance { ticker } if ticker == "x" => Error::ZeroVariance {
            ticker: x.ticker.clone(),
        },
        Error::ZeroVariance { .. } => Error::ZeroVariance {
            ticker: y.ticker.clone(),
        },
        other => other,
    })
}

/// First-order partial correlation `ρ(X,Y|Z)` from the three pairwise
/// coefficients; `None` when `|ρ_XZ|` or `|ρ_YZ|` is 1.
pub fn partial_corr_from_coefficients(rxy: f64, rxz: f64, ryz: f64) -> Option<f64> {
    let a = 1.0 - rxz * rxz;
    let b = 1.0 - ryz * ryz;
    if a <= DEGENERATE || b <= DEGENERATE {
        return None;
    }
    Some(((rxy - rxz * ryz) / (a * b).sqrt()).clamp(-1.0, 1.0))
}

pub fn partial_corr(x: &ReturnSeries, y: &ReturnSeries, z: &ReturnSeries) -> Result<f64> {
    let rxy = pearson_series(x, y)?;
    let rxz = pearson_series(x, z)?;
    let ryz = pearson_series(y, z)?;
    partial_corr_from_coefficients(rxy, rxz, ryz).ok_or_else(|| {
        let conditioned = if 1.0 - rxz * rxz <= DEGENERATE { &x.ticker } else { &y.ticker };
        Error::DegenerateConditioning {
            conditioned: conditioned.clone(),
            condition: z.ticker.clone(),
        }
    })
}
