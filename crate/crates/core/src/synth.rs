//! Synthetic markets with planted structure.
//!
//! Algorithm (stable across releases, so recorded fixtures stay valid):
//!
//! * every random stream is a `ChaCha8Rng` seeded with `seed` and switched to
//!   its own stream id — ticker `i` uses stream `i`, sector factor `s` uses
//!   `FACTOR_STREAM | s`; draws are standard normals from `rand_distr`;
//! * sector members: `u = √c·F_s + √(1−c)·ε_i`;
//! * chain `(X, Z, Y)`: `Z = w·X + √(1−w²)·ε_Z`, then
//!   `Y = w·L(q(Z)) + √(1−w²)·ε_Y` where `q` is the rank discretizer and `L`
//!   maps a state to its standardized level, so `X ⟂ Y | q(Z)` exactly;
//! * nonlinear pair `(X, Y, g)`: `Y = w·g(X) + √(1−w²)·ε_Y` with `g` even and
//!   unit-variance, so `corr(X, Y) = 0`;
//! * returns are `scale · u`; prices start at `initial_price` on weekdays
//!   from `start_date`.
//!
//! Planted tickers (mediators, chain targets, nonlinear targets) carry only
//! the structure written above, not their sector factor.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{discretize_quartiles, PriceSeries, ReturnSeries, SectorMap, DEFAULT_BINS};

const FACTOR_STREAM: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// `(x² − 1)/√2`
    Square,
    /// `(|x| − √(2/π)) / √(1 − 2/π)`
    Abs,
}

impl Transform {
    pub fn tag(self) -> &'static str {
        match self {
            Transform::Square => "square",
            Transform::Abs => "abs",
        }
    }

    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Square => (x * x - 1.0) / std::f64::consts::SQRT_2,
            Transform::Abs => {
                let mean = (2.0 / std::f64::consts::PI).sqrt();
                (x.abs() - mean) / (1.0 - mean * mean).sqrt()
            }
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Transform::Square),
            "abs" => Ok(Transform::Abs),
            _ => Err(Error::UnknownTag {
                kind: "transform",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Chain {
    pub source: usize,
    pub mediator: usize,
    pub target: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonlinearPair {
    pub x: usize,
    pub y: usize,
    pub transform: Transform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub n_tickers: usize,
    pub m_samples: usize,
    /// Block sizes; must sum to `n_tickers`.
    pub sectors: Vec<usize>,
    /// Intra-block coupling `c ∈ [0, 1)`.
    pub coupling: f64,
    pub chains: Vec<Chain>,
    pub nonlinear: Vec<NonlinearPair>,
    /// Weight `w ∈ (0, 1]` of planted links.
    pub link_strength: f64,
    /// States used for the mediator in chains.
    pub bins: usize,
    pub scale: f64,
    pub initial_price: f64,
    pub start_date: NaiveDate,
    pub seed: u64,
}

impl SynthSpec {
    /// `n` independent tickers in one block with zero coupling.
    pub fn independent(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n_tickers: n,
            m_samples: m,
            sectors: vec![n],
            coupling: 0.0,
            chains: Vec::new(),
            nonlinear: Vec::new(),
            link_strength: 0.9,
            bins: DEFAULT_BINS,
            scale: 0.01,
            initial_price: 100.0,
            start_date: NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date"),
            seed,
        }
    }

    /// Equal blocks of `size` members each.
    pub fn blocks(blocks: usize, size: usize, coupling: f64, m: usize, seed: u64) -> Self {
        Self {
            sectors: vec![size; blocks],
            coupling,
            ..Self::independent(blocks * size, m, seed)
        }
    }

    pub fn ticker(&self, i: usize) -> String {
        let width = self.n_tickers.saturating_sub(1).to_string().len().max(3);
        format!("T{i:0width$}")
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_tickers;
        if n == 0 {
            return Err(Error::invalid("n_tickers must be positive"));
        }
        if self.sectors.iter().sum::<usize>() != n || self.sectors.contains(&0) {
            return Err(Error::invalid(format!(
                "sector sizes {:?} must be positive and sum to {n}",
                self.sectors
            )));
        }
        if !(0.0..1.0).contains(&self.coupling) {
            return Err(Error::invalid(format!("coupling {} outside [0, 1)", self.coupling)));
        }
        if !(self.link_strength > 0.0 && self.link_strength <= 1.0) {
            return Err(Error::invalid(format!(
                "link strength {} outside (0, 1]",
                self.link_strength
            )));
        }
        if !(2..=256).contains(&self.bins) {
            return Err(Error::invalid(format!("bins {} outside 2..=256", self.bins)));
        }
        if self.m_samples < self.bins.max(2) {
            return Err(Error::invalid(format!("m_samples {} too small", self.m_samples)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) || !(self.initial_price > 0.0 && self.initial_price.is_finite()) {
            return Err(Error::invalid("scale and initial price must be positive"));
        }
        let mut used = vec![false; n];
        let planted = self
            .chains
            .iter()
            .flat_map(|c| [c.source, c.mediator, c.target])
            .chain(self.nonlinear.iter().flat_map(|p| [p.x, p.y]));
        for i in planted {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if used[i] {
                return Err(Error::invalid(format!("ticker {i} used by more than one planted relation")));
            }
            used[i] = true;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ChainRecord {
    pub source: String,
    pub mediator: String,
    pub target: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct NonlinearRecord {
    pub x: String,
    pub y: String,
    pub transform: Transform,
}

/// What was planted, keyed by ticker name.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GroundTruth {
    pub generator: &'static str,
    pub seed: u64,
    pub n_tickers: usize,
    pub m_samples: usize,
    pub coupling: f64,
    pub link_strength: f64,
    pub bins: usize,
    pub sectors: Vec<Vec<String>>,
    pub chains: Vec<ChainRecord>,
    pub nonlinear: Vec<NonlinearRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthMarket {
    pub returns: Vec<ReturnSeries>,
    pub sectors: SectorMap,
    pub truth: GroundTruth,
    dates: Vec<NaiveDate>,
    initial_price: f64,
}

impl SynthMarket {
    /// `m + 1` trading dates (weekdays).
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    /// Prices implied by the returns.
    pub fn prices(&self) -> Vec<PriceSeries> {
        self.returns
            .iter()
            .map(|r| {
                let mut p = Vec::with_capacity(r.len() + 1);
                let mut level = self.initial_price;
                p.push(level);
                for x in &r.returns {
                    level *= x.exp();
                    p.push(level);
                }
                PriceSeries::new(r.ticker.clone(), self.dates.clone(), p).expect("positive finite prices")
            })
            .collect()
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn normals(seed: u64, id: u64, m: usize) -> Vec<f64> {
    StandardNormal.sample_iter(stream(seed, id)).take(m).collect()
}

fn weekdays(start: NaiveDate, count: usize) -> Result<Vec<NaiveDate>> {
    let mut out = Vec::with_capacity(count);
    let mut d = start;
    while out.len() < count {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d
            .checked_add_days(Days::new(1))
            .ok_or_else(|| Error::invalid("date range overflow"))?;
    }
    Ok(out)
}

/// Standardized level of each of `bins` equally likely states.
fn state_levels(bins: usize) -> Vec<f64> {
    let mid = (bins as f64 - 1.0) / 2.0;
    let sd = ((bins * bins - 1) as f64 / 12.0).sqrt();
    (0..bins).map(|k| (k as f64 - mid) / sd).collect()
}

pub fn generate(spec: &SynthSpec) -> Result<SynthMarket> {
    spec.validate()?;
    let (n, m, seed) = (spec.n_tickers, spec.m_samples, spec.seed);
    let c = spec.coupling;

    let mut sector_of = Vec::with_capacity(n);
    for (s, &size) in spec.sectors.iter().enumerate() {
        sector_of.extend(std::iter::repeat_n(s, size));
    }
    let factors: Vec<Vec<f64>> = (0..spec.sectors.len())
        .into_par_iter()
        .map(|s| normals(seed, FACTOR_STREAM | s as u64, m))
        .collect();
    let noise: Vec<Vec<f64>> = (0..n).into_par_iter().map(|i| normals(seed, i as u64, m)).collect();

    let mut u: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let f = &factors[sector_of[i]];
            noise[i]
                .iter()
                .zip(f)
                .map(|(e, f)| c.sqrt() * f + (1.0 - c).sqrt() * e)
                .collect()
        })
        .collect();

    let w = spec.link_strength;
    let rest = (1.0 - w * w).max(0.0).sqrt();
    let levels = state_levels(spec.bins);
    for ch in &spec.chains {
        u[ch.mediator] = u[ch.source]
            .iter()
            .zip(&noise[ch.mediator])
            .map(|(x, e)| w * x + rest * e)
            .collect();
        let states = discretize_quartiles(&ReturnSeries::new("", u[ch.mediator].clone()), spec.bins)?;
        u[ch.target] = states
            .states
            .iter()
            .zip(&noise[ch.target])
            .map(|(&k, e)| w * levels[k as usize] + rest * e)
            .collect();
    }
    for p in &spec.nonlinear {
        u[p.y] = u[p.x]
            .iter()
            .zip(&noise[p.y])
            .map(|(x, e)| w * p.transform.apply(*x) + rest * e)
            .collect();
    }

    let tickers: Vec<String> = (0..n).map(|i| spec.ticker(i)).collect();
    let returns = u
        .into_iter()
        .zip(&tickers)
        .map(|(v, t)| ReturnSeries::new(t.clone(), v.into_iter().map(|x| spec.scale * x).collect()))
        .collect();
    let sectors: SectorMap = tickers
        .iter()
        .zip(&sector_of)
        .map(|(t, s)| (t.clone(), format!("S{s}")))
        .collect();

    let mut blocks = vec![Vec::new(); spec.sectors.len()];
    for (t, &s) in tickers.iter().zip(&sector_of) {
        blocks[s].push(t.clone());
    }
    let truth = GroundTruth {
        generator: "chacha8-normal-v1",
        seed,
        n_tickers: n,
        m_samples: m,
        coupling: c,
        link_strength: w,
        bins: spec.bins,
        sectors: blocks,
        chains: spec
            .chains
            .iter()
            .map(|ch| ChainRecord {
                source: tickers[ch.source].clone(),
                mediator: tickers[ch.mediator].clone(),
                target: tickers[ch.target].clone(),
            })
            .collect(),
        nonlinear: spec
            .nonlinear
            .iter()
            .map(|p| NonlinearRecord {
                x: tickers[p.x].clone(),
                y: tickers[p.y].clone(),
                transform: p.transform,
            })
            .collect(),
    };
    Ok(SynthMarket {
        returns,
        sectors,
        truth,
        dates: weekdays(spec.start_date, m + 1)?,
        initial_price: spec.initial_price,
    })
}
