//! Stage orchestration: ingest → states → matrix → network → metrics → export.
//!
//! Every command runs inside a [`Session`] that owns the run directory
//! `<out>/run-<digest12>/`, the shared cache under `<out>/cache/`, and the
//! manifest that records inputs, artifacts, cache events and timings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use pminet::export::{export_graph, write_matrix, ExportFormat, ExportOptions};
use pminet::ingest::{discretize_quartiles, load_prices, load_sectors, log_returns};
use pminet::netbuild::{build_influence_graph, build_mst, build_pmfg};
use pminet::netmetrics::{compare_all, markov_centrality, network_report, sector_ratio, CorrelationTable, NetworkReport};
use pminet::similarity::{compute_measure, gamma_threshold, DependencyMatrix, GammaParams};
use pminet::{DiscreteSeries, Estimator, Measure, Network, PmiBlock, ReturnSeries, SectorMap, Topology};
use serde::Serialize;

use crate::cache::{sha256_hex, Cache};
use crate::config::PipelineConfig;

pub const TOOL: &str = "pminet";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExclusionRecord {
    pub ticker: String,
    pub row: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: PipelineConfig,
    pub config_digest: String,
    pub inputs: BTreeMap<String, InputRecord>,
    pub excluded: Vec<ExclusionRecord>,
    pub artifacts: BTreeMap<String, String>,
    pub cache: BTreeMap<String, String>,
    pub timings_ms: BTreeMap<String, f64>,
}

/// Loaded price data.
pub struct Inputs {
    pub returns: Vec<ReturnSeries>,
    /// Date of each return (the later of its two prices).
    pub dates: Vec<NaiveDate>,
    pub sectors: Option<SectorMap>,
}

pub struct Session {
    pub config: PipelineConfig,
    pub run_dir: PathBuf,
    pub manifest: Manifest,
    pub inputs: Inputs,
    cache: Cache,
    states: Option<Vec<DiscreteSeries>>,
    blocks: Vec<PmiBlock>,
    matrices: Vec<DependencyMatrix>,
    prices_digest: String,
}

fn input_record(path: &Path) -> Result<InputRecord> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InputRecord {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

fn ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

impl Session {
    /// Loads inputs and creates the run directory.
    pub fn open(config: PipelineConfig, command: &str) -> Result<Self> {
        config.validate().context("stage `config`")?;
        let start = Instant::now();
        let (inputs, records, excluded) = load_inputs(&config).context("stage `ingest`")?;
        let prices_digest = records["prices"].sha256.clone();
        let sectors_digest = records.get("sectors").map(|r| r.sha256.as_str());
        let digest = sha256_hex(config.canonical(Some(&prices_digest), sectors_digest).as_bytes());
        let run_dir = config.out.join(format!("run-{}", &digest[..12]));
        fs::create_dir_all(&run_dir).with_context(|| format!("stage `ingest`: creating {}", run_dir.display()))?;
        let mut timings_ms = BTreeMap::new();
        timings_ms.insert("ingest".to_string(), ms(start));
        Ok(Self {
            cache: Cache::new(config.out.join("cache")),
            manifest: Manifest {
                tool: TOOL,
                version: VERSION,
                command: command.to_string(),
                config: config.clone(),
                config_digest: digest,
                inputs: records,
                excluded,
                artifacts: BTreeMap::new(),
                cache: BTreeMap::new(),
                timings_ms,
            },
            config,
            run_dir,
            inputs,
            states: None,
            blocks: Vec::new(),
            matrices: Vec::new(),
            prices_digest,
        })
    }

    pub fn digest(&self) -> &str {
        &self.manifest.config_digest
    }

    fn time<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self).with_context(|| format!("stage `{stage}`"))?;
        *self.manifest.timings_ms.entry(stage.to_string()).or_insert(0.0) += ms(start);
        Ok(out)
    }

    /// Writes `bytes` under the run directory and records their digest.
    pub fn write_artifact(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.run_dir.join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.artifacts.insert(name.to_string(), sha256_hex(bytes));
        Ok(path)
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        let name = format!("manifest-{}.json", self.manifest.command);
        let path = self.run_dir.join(&name);
        self.manifest.artifacts.remove(&name);
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn sectors(&self) -> Result<&SectorMap> {
        self.inputs
            .sectors
            .as_ref()
            .context("this command needs a sector file (--sectors)")
    }

    pub fn states(&mut self) -> Result<&[DiscreteSeries]> {
        if self.states.is_none() {
            let bins = self.config.bins;
            let states = self.time("discretize", |s| {
                s.inputs
                    .returns
                    .iter()
                    .map(|r| discretize_quartiles(r, bins).map_err(Into::into))
                    .collect::<Result<Vec<_>>>()
            })?;
            self.states = Some(states);
        }
        Ok(self.states.as_deref().expect("just computed"))
    }

    /// PMI block for `estimator`, from memory, the cache, or computed and stored.
    pub fn pmi_block(&mut self, estimator: Estimator) -> Result<&PmiBlock> {
        if let Some(i) = self.blocks.iter().position(|b| b.estimator() == estimator) {
            return Ok(&self.blocks[i]);
        }
        let path = self.cache.block_path(&self.prices_digest, estimator, self.config.bins);
        let key = format!("pmi_block:{estimator}");
        let block = self.time("pmi_block", |s| {
            if let Some(b) = s.cache.load_block(&path) {
                s.manifest.cache.insert(key, "hit".into());
                return Ok(b);
            }
            s.states()?;
            let b = PmiBlock::compute(s.states.as_deref().expect("computed"), estimator)?;
            s.cache.store_block(&path, &b)?;
            s.manifest.cache.insert(key, "miss".into());
            Ok(b)
        })?;
        self.blocks.push(block);
        Ok(self.blocks.last().expect("just pushed"))
    }

    pub fn matrix(&mut self, measure: Measure) -> Result<DependencyMatrix> {
        if let Some(m) = self.matrices.iter().find(|m| m.measure() == measure) {
            return Ok(m.clone());
        }
        let m = self.load_or_compute_matrix(measure)?;
        self.matrices.push(m.clone());
        Ok(m)
    }

    fn load_or_compute_matrix(&mut self, measure: Measure) -> Result<DependencyMatrix> {
        let estimator = self.config.estimator;
        let path = self.cache.matrix_path(&self.prices_digest, measure, estimator, self.config.bins);
        let key = format!("matrix:{}", measure.number());
        if let Some(m) = self.cache.load_matrix(&path) {
            self.manifest.cache.insert(key, "hit".into());
            return Ok(m);
        }
        let needs_block = matches!(measure, Measure::PmiMinDistance | Measure::MiInfluence);
        if needs_block {
            self.pmi_block(estimator)?;
        }
        if measure.uses_states() && !needs_block {
            self.states()?;
        }
        let stage = format!("matrix:{}", measure.number());
        let m = self.time(&stage, |s| {
            let block = s.blocks.iter().find(|b| b.estimator() == estimator);
            let states = s.states.as_deref().unwrap_or(&[]);
            Ok(compute_measure(measure, &s.inputs.returns, states, estimator, block)?)
        })?;
        self.cache.store_matrix(&path, &m).context("stage `cache`")?;
        self.manifest.cache.insert(key, "miss".into());
        Ok(m)
    }

    pub fn network(&mut self, measure: Measure, topology: Topology) -> Result<Network> {
        let matrix = self.matrix(measure)?;
        let stage = format!("network:{}:{}", measure.number(), topology);
        let sectors = self.inputs.sectors.clone();
        self.time(&stage, |_| {
            let net = match (&matrix, topology) {
                (DependencyMatrix::Distance(d), Topology::Tree) => build_mst(d)?,
                (DependencyMatrix::Distance(d), Topology::Planar) => build_pmfg(d)?,
                (DependencyMatrix::Influence(i), t) => build_influence_graph(i, t)?,
                (_, Topology::Unrestricted) => bail!("unrestricted topology is not a filter"),
            };
            Ok(match &sectors {
                Some(s) => net.with_sectors(s)?,
                None => net,
            })
        })
    }

    fn export_options(&self) -> ExportOptions {
        ExportOptions {
            config_digest: Some(self.digest().to_string()),
        }
    }

    /// Writes `<stem>.edges.csv`, `<stem>.graphml` and `<stem>.dot`.
    pub fn write_network(&mut self, stem: &str, net: &Network) -> Result<()> {
        for format in ExportFormat::ALL {
            self.write_network_format(stem, net, format)?;
        }
        Ok(())
    }

    pub fn write_network_format(&mut self, stem: &str, net: &Network, format: ExportFormat) -> Result<PathBuf> {
        let mut buf = Vec::new();
        export_graph(net, format, &self.export_options(), &mut buf)?;
        self.write_artifact(&format!("{stem}.{}", format.extension()), &buf)
    }
}

fn load_inputs(config: &PipelineConfig) -> Result<(Inputs, BTreeMap<String, InputRecord>, Vec<ExclusionRecord>)> {
    let prices_path = config.require_prices()?;
    let mut records = BTreeMap::new();
    records.insert("prices".to_string(), input_record(prices_path)?);
    let load = load_prices(prices_path)?;
    let excluded: Vec<ExclusionRecord> = load
        .exclusions
        .iter()
        .map(|e| {
            log::warn!("excluding `{}` (row {}): {}", e.ticker, e.row, e.reason);
            ExclusionRecord {
                ticker: e.ticker.clone(),
                row: e.row,
                reason: e.reason.clone(),
            }
        })
        .collect();
    if load.series.len() < 2 {
        bail!("{} usable tickers; need at least 2", load.series.len());
    }
    let dates = load.series[0].timestamps[1..].to_vec();
    let returns = load.series.iter().map(log_returns).collect::<pminet::Result<Vec<_>>>()?;
    let sectors = match &config.sectors {
        Some(p) => {
            records.insert("sectors".to_string(), input_record(p)?);
            let map = load_sectors(p)?;
            map.require_all(returns.iter().map(|r| r.ticker.as_str()))?;
            Some(map)
        }
        None => None,
    };
    Ok((
        Inputs {
            returns,
            dates,
            sectors,
        },
        records,
        excluded,
    ))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn returns_csv(s: &Session) -> Result<Vec<u8>> {
    let tickers: Vec<&str> = s.inputs.returns.iter().map(|r| r.ticker.as_str()).collect();
    let cols: Vec<&[f64]> = s.inputs.returns.iter().map(|r| r.returns.as_slice()).collect();
    csv_bytes(|b| pminet::ingest::write_columns(b, &s.inputs.dates, &tickers, &cols))
}

fn states_csv(s: &mut Session) -> Result<Vec<u8>> {
    let dates = s.inputs.dates.clone();
    let states = s.states()?;
    let tickers: Vec<&str> = states.iter().map(|r| r.ticker.as_str()).collect();
    let cols: Vec<&[u8]> = states.iter().map(|r| r.states.as_slice()).collect();
    csv_bytes(|b| pminet::ingest::write_columns(b, &dates, &tickers, &cols))
}

fn matrix_csv(m: &DependencyMatrix) -> Result<Vec<u8>> {
    csv_bytes(|b| write_matrix(m.tickers(), m.values(), b))
}

pub fn network_stem(measure: Measure, topology: Topology) -> String {
    format!("m{}-{}", measure.number(), topology)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn metrics_csv(rows: &[(String, &NetworkReport)]) -> String {
    let mut s = String::from("network,nodes,edges,sector_ratio,clustering\n");
    for (id, r) in rows {
        let _ = writeln!(
            s,
            "{id},{},{},{},{}",
            r.node_count,
            r.edge_count,
            r.sector_ratio,
            fmt_opt(r.clustering)
        );
    }
    s
}

fn centrality_csv(net: &Network) -> Result<String> {
    let c = markov_centrality(net)?;
    let mut s = String::from("ticker,centrality\n");
    for (t, v) in c.tickers.iter().zip(&c.values) {
        let _ = writeln!(s, "{t},{v}");
    }
    Ok(s)
}

pub fn cmd_returns(s: &mut Session) -> Result<()> {
    let bytes = returns_csv(s)?;
    s.write_artifact("returns.csv", &bytes)?;
    Ok(())
}

pub fn cmd_discretize(s: &mut Session) -> Result<()> {
    let bytes = states_csv(s).context("stage `discretize`")?;
    s.write_artifact("states.csv", &bytes)?;
    Ok(())
}

pub fn cmd_matrix(s: &mut Session) -> Result<()> {
    let m = s.matrix(s.config.measure)?;
    s.write_artifact(&format!("matrix-m{}.csv", s.config.measure.number()), &matrix_csv(&m)?)?;
    Ok(())
}

pub fn cmd_network(s: &mut Session) -> Result<Network> {
    let (measure, topology) = (s.config.measure, s.config.topology);
    let net = s.network(measure, topology)?;
    s.write_network(&network_stem(measure, topology), &net)
        .context("stage `export`")?;
    Ok(net)
}

pub fn cmd_metrics(s: &mut Session) -> Result<NetworkReport> {
    let (measure, topology) = (s.config.measure, s.config.topology);
    let net = s.network(measure, topology)?;
    let sectors = s.sectors().context("stage `metrics`")?.clone();
    let (report, centrality) = s.time("metrics", |_| Ok((network_report(&net, &sectors)?, centrality_csv(&net)?)))?;
    let stem = network_stem(measure, topology);
    s.write_artifact(&format!("{stem}.metrics.csv"), metrics_csv(&[(stem.clone(), &report)]).as_bytes())?;
    s.write_artifact(&format!("{stem}.centrality.csv"), centrality.as_bytes())?;
    Ok(report)
}

/// Full single-network pipeline.
pub fn cmd_run(s: &mut Session) -> Result<()> {
    cmd_returns(s)?;
    cmd_discretize(s)?;
    cmd_matrix(s)?;
    let net = cmd_network(s)?;
    if s.inputs.sectors.is_some() {
        cmd_metrics(s)?;
    } else {
        let stem = network_stem(s.config.measure, s.config.topology);
        let c = s.time("metrics", |_| centrality_csv(&net))?;
        s.write_artifact(&format!("{stem}.centrality.csv"), c.as_bytes())?;
    }
    Ok(())
}

/// Outcome of the twelve-network comparison.
pub struct CompareSummary {
    pub reports: Vec<(Measure, NetworkReport, NetworkReport)>,
    pub baseline_ratio: f64,
    pub trees: CorrelationTable,
    pub planar: CorrelationTable,
    pub text: String,
}

fn table_csv(t: &CorrelationTable) -> String {
    let mut s = String::from("measure");
    for m in Measure::ALL {
        let _ = write!(s, ",{}", m.number());
    }
    s.push('\n');
    for (i, m) in Measure::ALL.iter().enumerate() {
        let _ = write!(s, "{}", m.number());
        for j in 0..t.size {
            let _ = write!(s, ",{}", t.get(i, j));
        }
        s.push('\n');
    }
    s
}

fn pct(v: f64) -> String {
    format!("{:.2}%", 100.0 * v)
}

pub fn cmd_compare(s: &mut Session) -> Result<CompareSummary> {
    let sectors = s.sectors().context("stage `compare`")?.clone();
    let mut networks = Vec::with_capacity(12);
    for topology in [Topology::Tree, Topology::Planar] {
        for measure in Measure::ALL {
            let net = s.network(measure, topology)?;
            s.write_network(&format!("networks/{}", network_stem(measure, topology)), &net)
                .context("stage `export`")?;
            networks.push(net);
        }
    }
    let distance = match s.matrix(Measure::CorrDistance)? {
        DependencyMatrix::Distance(d) => d,
        DependencyMatrix::Influence(_) => unreachable!("measure 1 is a distance"),
    };
    let (comparison, reports, baseline) = s.time("compare", |_| {
        let complete = Network::complete(&distance);
        let baseline = sector_ratio(&complete, &sectors)?;
        let mut reports = Vec::new();
        for (k, m) in Measure::ALL.iter().enumerate() {
            reports.push((
                *m,
                network_report(&networks[k], &sectors)?,
                network_report(&networks[6 + k], &sectors)?,
            ));
        }
        Ok((compare_all(&networks)?, reports, baseline))
    })?;

    let mut csv = String::from("network,tree_sector_ratio,graph_sector_ratio,graph_clustering\n");
    for (m, tree, graph) in &reports {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            m.number(),
            tree.sector_ratio,
            graph.sector_ratio,
            fmt_opt(graph.clustering)
        );
    }
    let _ = writeln!(csv, "reference,{baseline},{baseline},1");

    let mut text = String::new();
    let _ = writeln!(text, "Network comparison (config {})", &s.digest()[..12]);
    let _ = writeln!(text, "{:<22} {:>11} {:>12} {:>11}", "network", "tree ratio", "graph ratio", "clustering");
    for (m, tree, graph) in &reports {
        let _ = writeln!(
            text,
            "{:<22} {:>11} {:>12} {:>11}",
            format!("{} {}", m.number(), m.tag()),
            pct(tree.sector_ratio),
            pct(graph.sector_ratio),
            graph.clustering.map_or("-".into(), pct)
        );
    }
    let _ = writeln!(
        text,
        "{:<22} {:>11} {:>12} {:>11}",
        "reference (complete)",
        pct(baseline),
        pct(baseline),
        pct(1.0)
    );
    let above = reports.iter().filter(|(_, t, _)| t.sector_ratio > baseline).count();
    let lo = reports.iter().map(|(_, t, _)| t.sector_ratio).fold(f64::INFINITY, f64::min);
    let hi = reports.iter().map(|(_, t, _)| t.sector_ratio).fold(f64::NEG_INFINITY, f64::max);
    let _ = writeln!(
        text,
        "tree sector ratios {}–{} vs baseline {}: {above}/6 above (published band 48.89–66.67% vs ~11.3%)",
        pct(lo),
        pct(hi),
        pct(baseline)
    );

    s.write_artifact("mc-trees.csv", table_csv(&comparison.trees).as_bytes())?;
    s.write_artifact("mc-planar.csv", table_csv(&comparison.planar).as_bytes())?;
    s.write_artifact("comparison.csv", csv.as_bytes())?;
    s.write_artifact("comparison.txt", text.as_bytes())?;
    Ok(CompareSummary {
        reports,
        baseline_ratio: baseline,
        trees: comparison.trees,
        planar: comparison.planar,
        text,
    })
}

/// Scores every `(x, y | z)` triple against the Gamma threshold. The Gamma law
/// describes the plug-in estimate, so the block is computed with `ml`.
pub fn cmd_significance(s: &mut Session) -> Result<(usize, usize)> {
    let alpha = s.config.alpha;
    let block = s.pmi_block(Estimator::Ml)?;
    let params = GammaParams::new(block.bins(), block.bins(), block.bins(), block.m())?;
    let threshold = gamma_threshold(&params, alpha)?;
    let n = block.n();
    let t = block.tickers();
    let mut csv = String::from("x,y,z,pmi,threshold,significant\n");
    let (mut total, mut hits) = (0, 0);
    for x in 0..n {
        for y in x + 1..n {
            for z in (0..n).filter(|&z| z != x && z != y) {
                let v = block.pmi(x, y, z);
                let sig = v > threshold;
                total += 1;
                hits += usize::from(sig);
                let _ = writeln!(csv, "{},{},{},{v},{threshold},{sig}", t[x], t[y], t[z]);
            }
        }
    }
    s.write_artifact(&format!("significance-a{alpha}.csv"), csv.as_bytes())?;
    Ok((hits, total))
}

/// Writes one format of the configured network.
pub fn cmd_export(s: &mut Session, format: ExportFormat) -> Result<PathBuf> {
    let (measure, topology) = (s.config.measure, s.config.topology);
    let net = s.network(measure, topology)?;
    s.write_network_format(&network_stem(measure, topology), &net, format)
        .context("stage `export`")
}
