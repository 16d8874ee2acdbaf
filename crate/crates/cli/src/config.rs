//! Pipeline configuration: flags, `key = value` files, and the canonical form
//! that identifies a run.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pminet::ingest::DEFAULT_BINS;
use pminet::{Estimator, Measure, Topology};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub prices: Option<PathBuf>,
    pub sectors: Option<PathBuf>,
    #[serde(serialize_with = "as_number")]
    pub measure: Measure,
    #[serde(serialize_with = "as_tag")]
    pub estimator: Estimator,
    pub bins: usize,
    #[serde(serialize_with = "as_tag")]
    pub topology: Topology,
    pub alpha: f64,
    pub out: PathBuf,
    pub seed: u64,
}

fn as_number<S: serde::Serializer>(m: &Measure, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u8(m.number())
}

fn as_tag<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            prices: None,
            sectors: None,
            measure: Measure::PmiMinDistance,
            estimator: Estimator::default(),
            bins: DEFAULT_BINS,
            topology: Topology::Tree,
            alpha: 0.05,
            out: PathBuf::from("pminet-out"),
            seed: 0,
        }
    }
}

pub const KEYS: [&str; 9] = [
    "prices",
    "sectors",
    "measure",
    "estimator",
    "bins",
    "topology",
    "alpha",
    "out",
    "seed",
];

impl PipelineConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "prices" => self.prices = Some(PathBuf::from(value)),
            "sectors" => self.sectors = Some(PathBuf::from(value)),
            "measure" => self.measure = value.parse()?,
            "estimator" => self.estimator = value.parse()?,
            "bins" => self.bins = value.parse().with_context(|| format!("bins `{value}`"))?,
            "topology" => {
                let t: Topology = value.parse()?;
                if t == Topology::Unrestricted {
                    bail!("topology must be `mst` or `pmfg`");
                }
                self.topology = t;
            }
            "alpha" => self.alpha = value.parse().with_context(|| format!("alpha `{value}`"))?,
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = value.parse().with_context(|| format!("seed `{value}`"))?,
            _ => bail!("unknown config key `{key}` (expected one of {})", KEYS.join(", ")),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment. Relative paths are
    /// resolved against the file's directory.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected `key = value`", path.display(), lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let value = match key {
                "prices" | "sectors" | "out" if Path::new(value).is_relative() => {
                    base.join(value).to_string_lossy().into_owned()
                }
                _ => value.to_string(),
            };
            self.set(key, &value)
                .with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            bail!("bins must be at least 2, got {}", self.bins);
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha must be in (0, 1), got {}", self.alpha);
        }
        Ok(())
    }

    pub fn require_prices(&self) -> Result<&Path> {
        self.prices.as_deref().context("no price file given (--prices or `prices =` in the config)")
    }

    pub fn require_sectors(&self) -> Result<&Path> {
        self.sectors.as_deref().context("no sector file given (--sectors or `sectors =` in the config)")
    }

    /// Config rendered as a `key = value` file that `apply_file` reads back.
    pub fn to_file_text(&self) -> String {
        let mut s = String::new();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        if let Some(p) = path(&self.prices) {
            s += &format!("prices = {p}\n");
        }
        if let Some(p) = path(&self.sectors) {
            s += &format!("sectors = {p}\n");
        }
        s += &format!(
            "measure = {}\nestimator = {}\nbins = {}\ntopology = {}\nalpha = {}\nout = {}\nseed = {}\n",
            self.measure.number(),
            self.estimator,
            self.bins,
            self.topology,
            self.alpha,
            self.out.display(),
            self.seed
        );
        s
    }

    /// Location-independent description: input files enter by content digest,
    /// the output directory not at all.
    pub fn canonical(&self, prices_digest: Option<&str>, sectors_digest: Option<&str>) -> String {
        format!(
            "prices={}\nsectors={}\nmeasure={}\nestimator={}\nbins={}\ntopology={}\nalpha={}\nseed={}\n",
            prices_digest.unwrap_or("-"),
            sectors_digest.unwrap_or("-"),
            self.measure.number(),
            self.estimator,
            self.bins,
            self.topology,
            self.alpha,
            self.seed
        )
    }
}
