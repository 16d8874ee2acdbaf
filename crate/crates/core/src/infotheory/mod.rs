//! Entropy, mutual information and correlation estimators.
//!
//! All information quantities are in nats. Two entropy estimators are provided:
//! the plug-in (maximum likelihood) estimate and the Schürmann–Grassberger
//! Bayesian estimate under a symmetric Dirichlet prior with pseudo-count
//! `1/|χ|` per cell.

mod correlation;
mod digamma;
mod kernel;
mod table;

use std::fmt;
use std::str::FromStr;

pub use correlation::{partial_corr, partial_corr_from_coefficients, pearson, pearson_series};
pub use digamma::digamma;
pub use kernel::EntropyKernel;
pub use table::ContingencyTable;

use crate::error::{Error, Result};

/// Which alphabet size sets the Schürmann–Grassberger prior on a joint table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum AlphabetConvention {
    /// `|χ|` is the number of joint cells (64 for a 4×4×4 table).
    #[default]
    Joint,
    /// The pseudo-count is `1/b` for a per-axis alphabet of `b` states, taken as the
    /// geometric mean of the axis sizes; `|χ|` in the normaliser stays the cell count.
    PerAxis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Estimator {
    /// Plug-in estimate `-Σ p ln p` with `p = #(x)/m`.
    Ml,
    /// Schürmann–Grassberger estimate.
    Sg(AlphabetConvention),
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::Sg(AlphabetConvention::Joint)
    }
}

impl Estimator {
    pub fn tag(&self) -> &'static str {
        match self {
            Estimator::Ml => "ml",
            Estimator::Sg(AlphabetConvention::Joint) => "sg",
            Estimator::Sg(AlphabetConvention::PerAxis) => "sg-per-axis",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ml" => Ok(Estimator::Ml),
            "sg" | "sg-joint" => Ok(Estimator::Sg(AlphabetConvention::Joint)),
            "sg-per-axis" => Ok(Estimator::Sg(AlphabetConvention::PerAxis)),
            _ => Err(Error::UnknownTag {
                kind: "estimator",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub estimator: Estimator,
}

/// Dirichlet pseudo-count per cell for a table with the given axis sizes.
pub fn sg_prior(dims: &[usize], convention: AlphabetConvention) -> f64 {
    let cells: usize = dims.iter().product();
    match convention {
        AlphabetConvention::Joint => 1.0 / cells as f64,
        AlphabetConvention::PerAxis => 1.0 / (cells as f64).powf(1.0 / dims.len() as f64),
    }
}

pub fn entropy(table: &ContingencyTable, estimator: Estimator) -> Result<EntropyEstimate> {
    match estimator {
        Estimator::Ml => entropy_ml(table),
        Estimator::Sg(c) => entropy_sg(table, c),
    }
}

/// Plug-in entropy; empty cells contribute zero.
pub fn entropy_ml(table: &ContingencyTable) -> Result<EntropyEstimate> {
    if table.m() == 0 {
        return Err(Error::EmptyTable);
    }
    let m = table.m() as f64;
    let value = -table
        .counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / m;
            p * p.ln()
        })
        .sum::<f64>();
    Ok(EntropyEstimate {
        value: value.max(0.0),
        estimator: Estimator::Ml,
    })
}

/// Schürmann–Grassberger entropy:
/// `Ĥ = 1/(m+|χ|N) Σ_x (#(x)+N)(ψ(m+|χ|N+1) − ψ(#(x)+N+1))`.
pub fn entropy_sg(table: &ContingencyTable, convention: AlphabetConvention) -> Result<EntropyEstimate> {
    if table.m() == 0 {
        return Err(Error::EmptyTable);
    }
    let prior = sg_prior(table.dims(), convention);
    let total = table.m() as f64 + table.alphabet_size() as f64 * prior;
    let lead = digamma(total + 1.0);
    let sum: f64 = table
        .counts()
        .iter()
        .map(|&c| {
            let k = c as f64 + prior;
            k * (lead - digamma(k + 1.0))
        })
        .sum();
    Ok(EntropyEstimate {
        value: sum / total,
        estimator: Estimator::Sg(convention),
    })
}

fn require_arity(table: &ContingencyTable, arity: usize) -> Result<()> {
    if table.arity() != arity {
        return Err(Error::Arity {
            expected: arity,
            actual: table.arity(),
        });
    }
    Ok(())
}

/// `I(X,Y) = H(X) + H(Y) − H(X,Y)` on a two-axis table.
pub fn mutual_info(xy: &ContingencyTable, estimator: Estimator) -> Result<f64> {
    require_arity(xy, 2)?;
    let hx = entropy(&xy.marginal(&[0])?, estimator)?.value;
    let hy = entropy(&xy.marginal(&[1])?, estimator)?.value;
    let hxy = entropy(xy, estimator)?.value;
    Ok(hx + hy - hxy)
}

/// `I(X,Y|Z) = H(X,Z) + H(Y,Z) − H(Z) − H(X,Y,Z)` on an `(X, Y, Z)` table.
pub fn partial_mutual_info(xyz: &ContingencyTable, estimator: Estimator) -> Result<f64> {
    require_arity(xyz, 3)?;
    let hxz = entropy(&xyz.marginal(&[0, 2])?, estimator)?.value;
    let hyz = entropy(&xyz.marginal(&[1, 2])?, estimator)?.value;
    let hz = entropy(&xyz.marginal(&[2])?, estimator)?.value;
    let hxyz = entropy(xyz, estimator)?.value;
    Ok(hxz + hyz - hz - hxyz)
}
