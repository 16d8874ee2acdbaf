use rayon::prelude::*;

use super::check_states;
use crate::error::{Error, Result};
use crate::infotheory::{EntropyKernel, Estimator};
use crate::ingest::DiscreteSeries;

/// Every entropy term needed by measures 4 and 6, computed once.
///
/// Holds `H(X)`, `H(X,Y)` for every pair and `I(X,Y|Z)` for every unordered
/// pair and every third ticker, i.e. `n·(n−1)·(n−2)/2` conditional terms.
#[derive(Clone, Debug, PartialEq)]
pub struct PmiBlock {
    tickers: Vec<String>,
    estimator: Estimator,
    bins: usize,
    m: usize,
    h1: Vec<f64>,
    h2: Vec<f64>,
    /// `(x·n + y)·n + z`, filled for both `(x, y)` orders; NaN where indices repeat.
    cube: Vec<f64>,
}

impl PmiBlock {
    pub fn compute(states: &[DiscreteSeries], estimator: Estimator) -> Result<Self> {
        let tickers = check_states(states, 3)?;
        let n = tickers.len();
        let bins = states[0].bins;
        let m = states[0].len();
        if bins > 16 {
            return Err(Error::invalid(format!("PMI block supports at most 16 bins, got {bins}")));
        }
        let k1 = EntropyKernel::new(estimator, m, &[bins]);
        let k2 = EntropyKernel::new(estimator, m, &[bins, bins]);
        let k3 = EntropyKernel::new(estimator, m, &[bins, bins, bins]);

        let codes: Vec<&[u8]> = states.iter().map(|s| s.states.as_slice()).collect();

        let h1: Vec<f64> = codes
            .iter()
            .map(|c| {
                let mut counts = vec![0u32; bins];
                for &s in *c {
                    counts[s as usize] += 1;
                }
                k1.entropy(&counts)
            })
            .collect();

        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let pair_codes = |i: usize, j: usize| -> Vec<u8> {
            codes[i].iter().zip(codes[j]).map(|(&a, &b)| a * bins as u8 + b).collect()
        };

        let h2_pairs: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut counts = vec![0u32; bins * bins];
                for c in pair_codes(i, j) {
                    counts[c as usize] += 1;
                }
                k2.entropy(&counts)
            })
            .collect();
        let mut h2 = vec![f64::NAN; n * n];
        for (&(i, j), &h) in pairs.iter().zip(&h2_pairs) {
            h2[i * n + j] = h;
            h2[j * n + i] = h;
        }
        for i in 0..n {
            h2[i * n + i] = h1[i];
        }

        let rows: Vec<Vec<f64>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let xy = pair_codes(i, j);
                let mut counts = vec![0u32; bins * bins * bins];
                let mut row = vec![f64::NAN; n];
                for z in (0..n).filter(|&z| z != i && z != j) {
                    counts.iter_mut().for_each(|c| *c = 0);
                    for (&a, &c) in xy.iter().zip(codes[z]) {
                        counts[a as usize * bins + c as usize] += 1;
                    }
                    let hxyz = k3.entropy(&counts);
                    row[z] = h2[i * n + z] + h2[j * n + z] - h1[z] - hxyz;
                }
                row
            })
            .collect();

        let mut cube = vec![f64::NAN; n * n * n];
        for (&(i, j), row) in pairs.iter().zip(&rows) {
            cube[(i * n + j) * n..(i * n + j + 1) * n].copy_from_slice(row);
            cube[(j * n + i) * n..(j * n + i + 1) * n].copy_from_slice(row);
        }

        Ok(Self {
            tickers,
            estimator,
            bins,
            m,
            h1,
            h2,
            cube,
        })
    }

    /// Reassembles a block from its serialized parts.
    pub fn from_parts(
        tickers: Vec<String>,
        estimator: Estimator,
        bins: usize,
        m: usize,
        h1: Vec<f64>,
        h2: Vec<f64>,
        cube: Vec<f64>,
    ) -> Result<Self> {
        let n = tickers.len();
        if h1.len() != n || h2.len() != n * n || cube.len() != n * n * n {
            return Err(Error::invalid("PMI block parts have inconsistent sizes"));
        }
        Ok(Self {
            tickers,
            estimator,
            bins,
            m,
            h1,
            h2,
            cube,
        })
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Sample length.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entropy(&self, x: usize) -> f64 {
        self.h1[x]
    }

    pub fn joint_entropy(&self, x: usize, y: usize) -> f64 {
        self.h2[x * self.n() + y]
    }

    pub fn mi(&self, x: usize, y: usize) -> f64 {
        self.h1[x] + self.h1[y] - self.joint_entropy(x, y)
    }

    /// `I(x, y | z)` for distinct indices.
    pub fn pmi(&self, x: usize, y: usize, z: usize) -> f64 {
        let n = self.n();
        self.cube[(x * n + y) * n + z]
    }

    pub fn min_pmi(&self, x: usize, y: usize) -> f64 {
        (0..self.n())
            .filter(|&z| z != x && z != y)
            .map(|z| self.pmi(x, y, z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Row-major `n × n` matrix of `min_z I(x, y | z)`; zeros on the diagonal.
    pub fn min_pmi_matrix(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                out[i * n + j] = self.min_pmi(i, j);
            }
        }
        out
    }

    pub fn h1(&self) -> &[f64] {
        &self.h1
    }

    pub fn h2(&self) -> &[f64] {
        &self.h2
    }

    pub fn cube(&self) -> &[f64] {
        &self.cube
    }
}
