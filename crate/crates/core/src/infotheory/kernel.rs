use super::{digamma, sg_prior, Estimator};

/// Entropy of count vectors with a fixed sample size and table shape, via a
/// per-count lookup table.
///
/// Both estimators reduce to `lead - scale * Σ_x f(#(x))`:
/// plug-in uses `f(k) = k ln k`, `lead = ln m`, `scale = 1/m`;
/// Schürmann–Grassberger uses `f(k) = (k+N) ψ(k+N+1)`, `lead = ψ(m+|χ|N+1)`,
/// `scale = 1/(m+|χ|N)`.
#[derive(Clone, Debug)]
pub struct EntropyKernel {
    cells: usize,
    lead: f64,
    scale: f64,
    lut: Vec<f64>,
}

impl EntropyKernel {
    /// Kernel for tables of shape `dims` holding exactly `m` observations.
    pub fn new(estimator: Estimator, m: usize, dims: &[usize]) -> Self {
        let cells: usize = dims.iter().product();
        match estimator {
            Estimator::Ml => {
                let lut = (0..=m)
                    .map(|k| if k == 0 { 0.0 } else { k as f64 * (k as f64).ln() })
                    .collect();
                let mf = m as f64;
                Self {
                    cells,
                    lead: mf.ln(),
                    scale: 1.0 / mf,
                    lut,
                }
            }
            Estimator::Sg(convention) => {
                let prior = sg_prior(dims, convention);
                let total = m as f64 + cells as f64 * prior;
                let lut = (0..=m)
                    .map(|k| {
                        let a = k as f64 + prior;
                        a * digamma(a + 1.0)
                    })
                    .collect();
                Self {
                    cells,
                    lead: digamma(total + 1.0),
                    scale: 1.0 / total,
                    lut,
                }
            }
        }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// `counts` must cover every cell (zeros included) and sum to `m`.
    #[inline]
    pub fn entropy(&self, counts: &[u32]) -> f64 {
        debug_assert_eq!(counts.len(), self.cells);
        let sum: f64 = counts.iter().map(|&k| self.lut[k as usize]).sum();
        self.lead - self.scale * sum
    }
}
