use crate::error::{Error, Result};
use crate::ingest::DiscreteSeries;

/// Dense joint count table over one to three discrete variables.
///
/// Cells are stored row-major: the last axis varies fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContingencyTable {
    dims: Vec<usize>,
    counts: Vec<u64>,
    m: u64,
}

impl ContingencyTable {
    pub fn new(dims: Vec<usize>, counts: Vec<u64>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::invalid(format!("arity must be 1..=3, got {}", dims.len())));
        }
        if dims.contains(&0) {
            return Err(Error::invalid("zero-sized axis"));
        }
        let cells: usize = dims.iter().product();
        if counts.len() != cells {
            return Err(Error::invalid(format!(
                "{} counts for a {:?} table",
                counts.len(),
                dims
            )));
        }
        let m = counts.iter().sum();
        Ok(Self { dims, counts, m })
    }

    /// Counts co-occurring states; axis order follows `series`.
    pub fn from_series(series: &[&DiscreteSeries]) -> Result<Self> {
        let axes: Vec<(&[u8], usize)> = series.iter().map(|s| (s.states.as_slice(), s.bins)).collect();
        Self::from_codes(&axes)
    }

    /// Counts co-occurring codes; each axis is `(codes, bins)`.
    pub fn from_codes(axes: &[(&[u8], usize)]) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::invalid(format!("arity must be 1..=3, got {}", axes.len())));
        }
        let len = axes[0].0.len();
        if axes.iter().any(|(c, _)| c.len() != len) {
            return Err(Error::invalid("series lengths differ"));
        }
        let dims: Vec<usize> = axes.iter().map(|&(_, b)| b).collect();
        let mut counts = vec![0u64; dims.iter().product()];
        for t in 0..len {
            let mut idx = 0;
            for &(codes, bins) in axes {
                let c = codes[t] as usize;
                if c >= bins {
                    return Err(Error::invalid(format!("state {c} outside 0..{bins}")));
                }
                idx = idx * bins + c;
            }
            counts[idx] += 1;
        }
        Self::new(dims, counts)
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sample size (sum of counts).
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Number of cells, `Π dims`.
    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, index: &[usize]) -> u64 {
        self.counts[self.flat(index)]
    }

    fn flat(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = flat % d;
            flat /= d;
        }
    }

    /// Sums out every axis not listed in `keep`; kept axes appear in `keep` order.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&a| a >= self.arity()) {
            return Err(Error::invalid(format!("bad axes {keep:?} for arity {}", self.arity())));
        }
        for (i, a) in keep.iter().enumerate() {
            if keep[..i].contains(a) {
                return Err(Error::invalid(format!("axis {a} repeated")));
            }
        }
        let dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let mut counts = vec![0u64; dims.iter().product()];
        let mut index = vec![0; self.arity()];
        for (flat, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            self.unflatten(flat, &mut index);
            let target = keep.iter().zip(&dims).fold(0, |acc, (&a, &d)| acc * d + index[a]);
            counts[target] += c;
        }
        Self::new(dims, counts)
    }

    /// Reorders axes; `perm[k]` is the source axis placed at position `k`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.arity() {
            return Err(Error::Arity {
                expected: self.arity(),
                actual: perm.len(),
            });
        }
        self.marginal(perm)
    }
}
