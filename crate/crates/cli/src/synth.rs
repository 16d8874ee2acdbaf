//! `synth` command: writes a generated market in the standard input layout.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pminet::ingest::write_columns;
use pminet::synth::{generate, Chain, NonlinearPair, SynthMarket, SynthSpec};

/// Parses `source:mediator:target`.
pub fn parse_chain(s: &str) -> Result<Chain> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts[..] else {
        bail!("chain `{s}` must be `source:mediator:target`");
    };
    Ok(Chain {
        source: a.trim().parse().with_context(|| format!("chain `{s}`"))?,
        mediator: b.trim().parse().with_context(|| format!("chain `{s}`"))?,
        target: c.trim().parse().with_context(|| format!("chain `{s}`"))?,
    })
}

/// Parses `x:y[:transform]`; the transform defaults to `square`.
pub fn parse_nonlinear(s: &str) -> Result<NonlinearPair> {
    let parts: Vec<&str> = s.split(':').collect();
    let (x, y, t) = match parts[..] {
        [x, y] => (x, y, "square"),
        [x, y, t] => (x, y, t),
        _ => bail!("nonlinear pair `{s}` must be `x:y[:transform]`"),
    };
    Ok(NonlinearPair {
        x: x.trim().parse().with_context(|| format!("pair `{s}`"))?,
        y: y.trim().parse().with_context(|| format!("pair `{s}`"))?,
        transform: t.trim().parse()?,
    })
}

pub struct SynthFiles {
    pub prices: PathBuf,
    pub sectors: PathBuf,
    pub truth: PathBuf,
}

pub fn write_market(market: &SynthMarket, dir: &Path) -> Result<SynthFiles> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let prices = market.prices();
    let tickers: Vec<&str> = prices.iter().map(|p| p.ticker.as_str()).collect();
    let cols: Vec<&[f64]> = prices.iter().map(|p| p.prices.as_slice()).collect();
    let mut buf = Vec::new();
    write_columns(&mut buf, market.dates(), &tickers, &cols)?;
    let files = SynthFiles {
        prices: dir.join("prices.csv"),
        sectors: dir.join("sectors.csv"),
        truth: dir.join("truth.json"),
    };
    fs::write(&files.prices, buf)?;
    let mut sectors = String::from("ticker,sector\n");
    for (t, s) in market.sectors.iter() {
        sectors += &format!("{t},{s}\n");
    }
    fs::write(&files.sectors, sectors)?;
    fs::write(&files.truth, serde_json::to_string_pretty(&market.truth)? + "\n")?;
    Ok(files)
}

pub fn run(spec: &SynthSpec, dir: &Path) -> Result<SynthFiles> {
    let market = generate(spec).context("stage `synth`")?;
    write_market(&market, dir).context("stage `synth`: writing output")
}
