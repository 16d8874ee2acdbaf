//! The six dependency structures compared across networks.
//!
//! | # | structure | value |
//! |---|-----------|-------|
//! | 1 | [`corr_distance`] | `√(2(1−ρ))` |
//! | 2 | [`mi_distance`] | `H(X,Y) − I(X,Y)` |
//! | 3 | [`pcorr_min_distance`] | `√(2(1−min_Z ρ(X,Y\|Z)))` |
//! | 4 | [`pmi_min_distance`] | `H(X,Y) − min_Z I(X,Y\|Z)` |
//! | 5 | [`avg_influence_corr`] | `⟨ρ(X,Y) − ρ(X,Y\|Z)⟩_Y` |
//! | 6 | [`avg_influence_mi`] | `⟨I(X,Y) − I(X,Y\|Z)⟩_Y` |
//!
//! Measures 1–4 are symmetric distances; 5–6 are directed influence matrices
//! indexed `(X, Z)`.

mod gamma;
mod pmi_block;

use std::fmt;
use std::str::FromStr;

pub use gamma::{gamma_threshold, significance_mask, GammaParams};
pub use pmi_block::PmiBlock;

use crate::error::{Error, Result};
use crate::infotheory::{
    mutual_info, partial_corr_from_coefficients, partial_mutual_info, pearson_series, ContingencyTable,
    Estimator,
};
use crate::ingest::{DiscreteSeries, ReturnSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    CorrDistance = 1,
    MiDistance = 2,
    PcorrMinDistance = 3,
    PmiMinDistance = 4,
    CorrInfluence = 5,
    MiInfluence = 6,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::CorrDistance,
        Measure::MiDistance,
        Measure::PcorrMinDistance,
        Measure::PmiMinDistance,
        Measure::CorrInfluence,
        Measure::MiInfluence,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Result<Self> {
        Self::ALL.get((n as usize).wrapping_sub(1)).copied().ok_or(Error::UnknownTag {
            kind: "measure",
            value: n.to_string(),
        })
    }

    pub fn tag(self) -> &'static str {
        match self {
            Measure::CorrDistance => "corr-dist",
            Measure::MiDistance => "mi-dist",
            Measure::PcorrMinDistance => "pcorr-min-dist",
            Measure::PmiMinDistance => "pmi-min-dist",
            Measure::CorrInfluence => "corr-influence",
            Measure::MiInfluence => "mi-influence",
        }
    }

    pub fn is_influence(self) -> bool {
        matches!(self, Measure::CorrInfluence | Measure::MiInfluence)
    }

    /// Whether the measure works on discretized states rather than raw returns.
    pub fn uses_states(self) -> bool {
        matches!(self, Measure::MiDistance | Measure::PmiMinDistance | Measure::MiInfluence)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(n) = s.parse::<u8>() {
            return Self::from_number(n);
        }
        Self::ALL.into_iter().find(|m| m.tag() == s).ok_or(Error::UnknownTag {
            kind: "measure",
            value: s.to_string(),
        })
    }
}

/// Symmetric distance matrix over tickers; the diagonal holds zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix {
    pub tickers: Vec<String>,
    pub measure: Measure,
    /// Row-major `n × n`.
    pub values: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    fn from_pairs(tickers: Vec<String>, measure: Measure, f: impl Fn(usize, usize) -> Result<f64>) -> Result<Self> {
        let n = tickers.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j)?;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self {
            tickers,
            measure,
            values,
        })
    }

    /// Unordered pairs `(i, j)`, `i < j`, sorted by increasing distance. Ties go
    /// to the lexicographically smaller `(ticker, ticker)` pair, each pair's
    /// names ordered lexicographically first.
    pub fn sorted_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let names = |&(i, j): &(usize, usize)| {
            let (a, b) = (&self.tickers[i], &self.tickers[j]);
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        pairs.sort_by(|p, q| {
            self.get(p.0, p.1)
                .total_cmp(&self.get(q.0, q.1))
                .then_with(|| names(p).cmp(&names(q)))
        });
        pairs
    }

    pub fn check_finite(&self) -> Result<()> {
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.get(i, j).is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

/// Directed average-influence matrix; entry `(x, z)` is the influence of `z` on `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct InfluenceMatrix {
    pub tickers: Vec<String>,
    pub measure: Measure,
    /// Row-major `n × n`, row = influenced ticker, column = influencing ticker.
    pub values: Vec<f64>,
}

impl InfluenceMatrix {
    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.values[x * self.n() + z]
    }

    /// Ordered `(x, z)` entries sorted by decreasing influence, ties broken on the
    /// `(source, target)` = `(ticker_z, ticker_x)` names.
    pub fn sorted_entries(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let mut entries: Vec<(usize, usize)> =
            (0..n).flat_map(|x| (0..n).filter(move |&z| z != x).map(move |z| (x, z))).collect();
        entries.sort_by(|&(x1, z1), &(x2, z2)| {
            self.get(x2, z2)
                .total_cmp(&self.get(x1, z1))
                .then_with(|| (&self.tickers[z1], &self.tickers[x1]).cmp(&(&self.tickers[z2], &self.tickers[x2])))
        });
        entries
    }

    pub fn check_finite(&self) -> Result<()> {
        let n = self.n();
        for x in 0..n {
            for z in 0..n {
                if x != z && !self.get(x, z).is_finite() {
                    return Err(Error::NonFinite { row: x, col: z });
                }
            }
        }
        Ok(())
    }
}

/// Either shape of dependency structure.
#[derive(Clone, Debug, PartialEq)]
pub enum DependencyMatrix {
    Distance(SimilarityMatrix),
    Influence(InfluenceMatrix),
}

impl DependencyMatrix {
    pub fn tickers(&self) -> &[String] {
        match self {
            DependencyMatrix::Distance(m) => &m.tickers,
            DependencyMatrix::Influence(m) => &m.tickers,
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            DependencyMatrix::Distance(m) => &m.values,
            DependencyMatrix::Influence(m) => &m.values,
        }
    }

    pub fn measure(&self) -> Measure {
        match self {
            DependencyMatrix::Distance(m) => m.measure,
            DependencyMatrix::Influence(m) => m.measure,
        }
    }
}

fn check_returns(series: &[ReturnSeries], min: usize) -> Result<Vec<String>> {
    if series.len() < min {
        return Err(Error::invalid(format!("need at least {min} tickers, got {}", series.len())));
    }
    let len = series[0].len();
    if let Some(s) = series.iter().find(|s| s.len() != len) {
        return Err(Error::invalid(format!("`{}` has {} returns, expected {len}", s.ticker, s.len())));
    }
    if let Some(s) = series.iter().find(|s| s.returns.iter().all(|&r| r == s.returns[0])) {
        return Err(Error::ZeroVariance {
            ticker: s.ticker.clone(),
        });
    }
    Ok(series.iter().map(|s| s.ticker.clone()).collect())
}

pub(crate) fn check_states(states: &[DiscreteSeries], min: usize) -> Result<Vec<String>> {
    if states.len() < min {
        return Err(Error::invalid(format!("need at least {min} tickers, got {}", states.len())));
    }
    let (len, bins) = (states[0].len(), states[0].bins);
    if len == 0 {
        return Err(Error::invalid("empty state series"));
    }
    if let Some(s) = states.iter().find(|s| s.len() != len || s.bins != bins) {
        return Err(Error::invalid(format!(
            "`{}` has {} states over {} bins, expected {len} over {bins}",
            s.ticker,
            s.len(),
            s.bins
        )));
    }
    Ok(states.iter().map(|s| s.ticker.clone()).collect())
}

/// Pairwise Pearson coefficients, row-major `n × n` with ones on the diagonal.
pub fn correlation_matrix(series: &[ReturnSeries]) -> Result<Vec<f64>> {
    check_returns(series, 1)?;
    let n = series.len();
    let mut rho = vec![1.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let r = pearson_series(&series[i], &series[j])?;
            rho[i * n + j] = r;
            rho[j * n + i] = r;
        }
    }
    Ok(rho)
}

fn corr_to_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).max(0.0).sqrt()
}

/// Measure 1: `d = √(2(1−ρ))`.
pub fn corr_distance(series: &[ReturnSeries]) -> Result<SimilarityMatrix> {
    let tickers = check_returns(series, 2)?;
    let n = tickers.len();
    let rho = correlation_matrix(series)?;
    SimilarityMatrix::from_pairs(tickers, Measure::CorrDistance, |i, j| Ok(corr_to_distance(rho[i * n + j])))
}

/// Measure 2: `d = H(X,Y) − I(X,Y)`.
pub fn mi_distance(states: &[DiscreteSeries], estimator: Estimator) -> Result<SimilarityMatrix> {
    let tickers = check_states(states, 2)?;
    SimilarityMatrix::from_pairs(tickers, Measure::MiDistance, |i, j| {
        let xy = ContingencyTable::from_series(&[&states[i], &states[j]])?;
        let hxy = crate::infotheory::entropy(&xy, estimator)?.value;
        Ok(hxy - mutual_info(&xy, estimator)?)
    })
}

/// Minimum of `ρ(i,j|z)` over every `z ∉ {i, j}`, skipping degenerate `z`.
fn min_partial_corr(rho: &[f64], n: usize, i: usize, j: usize, tickers: &[String]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for z in (0..n).filter(|&z| z != i && z != j) {
        match partial_corr_from_coefficients(rho[i * n + j], rho[i * n + z], rho[j * n + z]) {
            Some(p) => best = Some(best.map_or(p, |b| b.min(p))),
            None => log::warn!(
                "skipping degenerate conditioning of ({}, {}) on {}",
                tickers[i],
                tickers[j],
                tickers[z]
            ),
        }
    }
    best.ok_or_else(|| Error::DegenerateConditioning {
        conditioned: format!("{}/{}", tickers[i], tickers[j]),
        condition: "every other ticker".into(),
    })
}

/// Measure 3: `d = √(2(1 − min_Z ρ(X,Y|Z)))`.
pub fn pcorr_min_distance(series: &[ReturnSeries]) -> Result<SimilarityMatrix> {
    let tickers = check_returns(series, 3)?;
    let n = tickers.len();
    let rho = correlation_matrix(series)?;
    let t = tickers.clone();
    SimilarityMatrix::from_pairs(tickers, Measure::PcorrMinDistance, |i, j| {
        Ok(corr_to_distance(min_partial_corr(&rho, n, i, j, &t)?))
    })
}

/// Measure 4: `d = H(X,Y) − min_Z I(X,Y|Z)`.
pub fn pmi_min_distance(states: &[DiscreteSeries], estimator: Estimator) -> Result<SimilarityMatrix> {
    Ok(pmi_min_distance_from_block(&PmiBlock::compute(states, estimator)?))
}

pub fn pmi_min_distance_from_block(block: &PmiBlock) -> SimilarityMatrix {
    let n = block.n();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = block.joint_entropy(i, j) - block.min_pmi(i, j);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    SimilarityMatrix {
        tickers: block.tickers().to_vec(),
        measure: Measure::PmiMinDistance,
        values,
    }
}

/// MI influence `d(X,Y|Z) = I(X,Y) − I(X,Y|Z)`, computed directly from the
/// three state series. Negative values (synergy) are returned as is.
pub fn mi_influence(states: &[DiscreteSeries], estimator: Estimator, x: usize, y: usize, z: usize) -> Result<f64> {
    for index in [x, y, z] {
        if index >= states.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: states.len(),
            });
        }
    }
    if x == y || y == z || x == z {
        return Err(Error::invalid(format!("indices must be distinct, got ({x}, {y}, {z})")));
    }
    let xyz = ContingencyTable::from_series(&[&states[x], &states[y], &states[z]])?;
    let mi = mutual_info(&xyz.marginal(&[0, 1])?, estimator)?;
    Ok(mi - partial_mutual_info(&xyz, estimator)?)
}

/// Measure 5: entry `(x, z)` = mean over `y ∉ {x, z}` of `ρ(x,y) − ρ(x,y|z)`.
///
/// Degenerate `(y, z)` combinations are left out of the mean.
pub fn avg_influence_corr(series: &[ReturnSeries]) -> Result<InfluenceMatrix> {
    let tickers = check_returns(series, 3)?;
    let n = tickers.len();
    let rho = correlation_matrix(series)?;
    let mut values = vec![0.0; n * n];
    for x in 0..n {
        for z in (0..n).filter(|&z| z != x) {
            let mut sum = 0.0;
            let mut count = 0usize;
            for y in (0..n).filter(|&y| y != x && y != z) {
                let rxy = rho[x * n + y];
                match partial_corr_from_coefficients(rxy, rho[x * n + z], rho[y * n + z]) {
                    Some(p) => {
                        sum += rxy - p;
                        count += 1;
                    }
                    None => log::warn!(
                        "skipping degenerate conditioning of ({}, {}) on {}",
                        tickers[x],
                        tickers[y],
                        tickers[z]
                    ),
                }
            }
            if count == 0 {
                return Err(Error::DegenerateConditioning {
                    conditioned: tickers[x].clone(),
                    condition: tickers[z].clone(),
                });
            }
            values[x * n + z] = sum / count as f64;
        }
    }
    Ok(InfluenceMatrix {
        tickers,
        measure: Measure::CorrInfluence,
        values,
    })
}

/// Measure 6: entry `(x, z)` = mean over `y ∉ {x, z}` of `I(x,y) − I(x,y|z)`.
pub fn avg_influence_mi(states: &[DiscreteSeries], estimator: Estimator) -> Result<InfluenceMatrix> {
    Ok(avg_influence_mi_from_block(&PmiBlock::compute(states, estimator)?))
}

pub fn avg_influence_mi_from_block(block: &PmiBlock) -> InfluenceMatrix {
    let n = block.n();
    let mut values = vec![0.0; n * n];
    for x in 0..n {
        for z in (0..n).filter(|&z| z != x) {
            let sum: f64 = (0..n)
                .filter(|&y| y != x && y != z)
                .map(|y| block.mi(x, y) - block.pmi(x, y, z))
                .sum();
            values[x * n + z] = sum / (n - 2) as f64;
        }
    }
    InfluenceMatrix {
        tickers: block.tickers().to_vec(),
        measure: Measure::MiInfluence,
        values,
    }
}

/// Builds any of the six structures. `block` is reused for measures 4 and 6
/// when given; it must have been computed from `states` with `estimator`.
pub fn compute_measure(
    measure: Measure,
    returns: &[ReturnSeries],
    states: &[DiscreteSeries],
    estimator: Estimator,
    block: Option<&PmiBlock>,
) -> Result<DependencyMatrix> {
    let owned;
    let block = match (measure, block) {
        (Measure::PmiMinDistance | Measure::MiInfluence, Some(b)) => Some(b),
        (Measure::PmiMinDistance | Measure::MiInfluence, None) => {
            owned = PmiBlock::compute(states, estimator)?;
            Some(&owned)
        }
        _ => None,
    };
    Ok(match measure {
        Measure::CorrDistance => DependencyMatrix::Distance(corr_distance(returns)?),
        Measure::MiDistance => DependencyMatrix::Distance(mi_distance(states, estimator)?),
        Measure::PcorrMinDistance => DependencyMatrix::Distance(pcorr_min_distance(returns)?),
        Measure::PmiMinDistance => DependencyMatrix::Distance(pmi_min_distance_from_block(block.unwrap())),
        Measure::CorrInfluence => DependencyMatrix::Influence(avg_influence_corr(returns)?),
        Measure::MiInfluence => DependencyMatrix::Influence(avg_influence_mi_from_block(block.unwrap())),
    })
}
