//! Significance threshold for conditional mutual information.
//!
//! Under conditional independence, the plug-in `I(X,Y|Z)` from `m` samples is
//! approximately Gamma distributed with shape `κ = |Z|(|X|−1)(|Y|−1)/2` and
//! scale `1/m` (equivalently `2m·I ~ χ²` with `2κ` degrees of freedom).

use statrs::distribution::{ContinuousCDF, Gamma};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaParams {
    pub kappa: f64,
    pub theta: f64,
    pub m: usize,
    pub bins_x: usize,
    pub bins_y: usize,
    pub bins_z: usize,
}

impl GammaParams {
    pub fn new(bins_x: usize, bins_y: usize, bins_z: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("sample size must be positive"));
        }
        if bins_x < 2 || bins_y < 2 || bins_z < 1 {
            return Err(Error::invalid(format!(
                "bins must be at least 2/2/1, got {bins_x}/{bins_y}/{bins_z}"
            )));
        }
        Ok(Self {
            kappa: (bins_z * (bins_x - 1) * (bins_y - 1)) as f64 / 2.0,
            theta: 1.0 / m as f64,
            m,
            bins_x,
            bins_y,
            bins_z,
        })
    }
}

/// The `(1 − alpha)` quantile of `Gamma(κ, θ)`.
pub fn gamma_threshold(params: &GammaParams, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let dist = Gamma::new(params.kappa, 1.0 / params.theta)
        .map_err(|e| Error::invalid(format!("gamma parameters: {e}")))?;
    Ok(dist.inverse_cdf(1.0 - alpha))
}

/// `true` where a value strictly exceeds the threshold; NaN is never significant.
pub fn significance_mask(values: &[f64], params: &GammaParams, alpha: f64) -> Result<Vec<bool>> {
    let threshold = gamma_threshold(params, alpha)?;
    Ok(values.iter().map(|&v| v > threshold).collect())
}
