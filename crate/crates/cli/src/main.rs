use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use pminet::export::ExportFormat;
use pminet::synth::SynthSpec;
use pminet::{Estimator, Measure, Topology};
use pminet_cli::pipeline::{self, Session};
use pminet_cli::{synth, PipelineConfig};

#[derive(Parser)]
#[command(name = "pminet", version, about = "Dependency networks of stock returns from (partial) mutual information")]
struct Cli {
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Wide price CSV: `date,<TICKER>,...`.
    #[arg(long)]
    prices: Option<PathBuf>,
    /// `ticker,sector` CSV.
    #[arg(long)]
    sectors: Option<PathBuf>,
    /// Measure 1-6 (or its tag, e.g. `pmi-min-dist`).
    #[arg(long)]
    measure: Option<Measure>,
    /// mst or pmfg.
    #[arg(long)]
    topology: Option<Topology>,
    /// ml, sg or sg-per-axis.
    #[arg(long)]
    estimator: Option<Estimator>,
    /// States per series (default 4)
    #[arg(long)]
    bins: Option<usize>,
    /// Significance level for `significance` (default 0.05)
    #[arg(long)]
    alpha: Option<f64>,
    /// Recorded in the config digest
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; runs go to `<out>/run-<digest>/`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = &self.prices {
            cfg.prices = Some(v.clone());
        }
        if let Some(v) = &self.sectors {
            cfg.sectors = Some(v.clone());
        }
        if let Some(v) = self.measure {
            cfg.measure = v;
        }
        if let Some(v) = self.topology {
            cfg.set("topology", v.tag())?;
        }
        if let Some(v) = self.estimator {
            cfg.estimator = v;
        }
        if let Some(v) = self.bins {
            cfg.bins = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline for one measure and topology.
    Run(Common),
    /// Log returns CSV.
    Returns(Common),
    /// Quantile states CSV.
    Discretize(Common),
    /// Dependency matrix CSV for one measure.
    Matrix(Common),
    /// Filtered network as edge list, GraphML and DOT.
    Network(Common),
    /// Sector ratio, clustering and Markov centrality of one network.
    Metrics(Common),
    /// All twelve networks: comparison table and centrality correlations.
    Compare(Common),
    /// Gamma significance of every conditional MI triple.
    Significance(Common),
    /// One network in a single format.
    Export {
        #[command(flatten)]
        common: Common,
        /// edgelist, graphml or dot.
        #[arg(long, default_value = "graphml")]
        format: ExportFormat,
    },
    /// Generate a synthetic market with planted structure.
    Synth(SynthArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Comma-separated sector block sizes; their sum is the number of tickers.
    #[arg(long, value_delimiter = ',', default_value = "10,10,10")]
    blocks: Vec<usize>,
    /// Trading days (returns) to generate.
    #[arg(long, default_value_t = 2500)]
    samples: usize,
    /// Within-block factor coupling in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    coupling: f64,
    /// Mediation chain `source:mediator:target` (repeatable).
    #[arg(long = "chain")]
    chains: Vec<String>,
    /// Zero-correlation pair `x:y[:square|abs]` (repeatable).
    #[arg(long)]
    nonlinear: Vec<String>,
    /// Weight of planted links in (0, 1].
    #[arg(long, default_value_t = 0.9)]
    link_strength: f64,
    #[arg(long, default_value_t = 4)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for prices.csv, sectors.csv and truth.json.
    #[arg(long, default_value = "synth")]
    out: PathBuf,
}

fn open(common: &Common, name: &str) -> Result<Session> {
    Session::open(common.resolve()?, name)
}

fn finish(session: Session) -> Result<()> {
    println!("{}", session.run_dir.display());
    session.finish()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let mut s = open(&c, "run")?;
            pipeline::cmd_run(&mut s)?;
            finish(s)
        }
        Command::Returns(c) => {
            let mut s = open(&c, "returns")?;
            pipeline::cmd_returns(&mut s)?;
            finish(s)
        }
        Command::Discretize(c) => {
            let mut s = open(&c, "discretize")?;
            pipeline::cmd_discretize(&mut s)?;
            finish(s)
        }
        Command::Matrix(c) => {
            let mut s = open(&c, "matrix")?;
            pipeline::cmd_matrix(&mut s)?;
            finish(s)
        }
        Command::Network(c) => {
            let mut s = open(&c, "network")?;
            pipeline::cmd_network(&mut s)?;
            finish(s)
        }
        Command::Metrics(c) => {
            let mut s = open(&c, "metrics")?;
            let r = pipeline::cmd_metrics(&mut s)?;
            eprintln!(
                "sector ratio {:.4}, clustering {}, {} edges",
                r.sector_ratio,
                r.clustering.map_or("-".into(), |c| format!("{c:.4}")),
                r.edge_count
            );
            finish(s)
        }
        Command::Compare(c) => {
            let mut s = open(&c, "compare")?;
            let summary = pipeline::cmd_compare(&mut s)?;
            eprint!("{}", summary.text);
            finish(s)
        }
        Command::Significance(c) => {
            let mut s = open(&c, "significance")?;
            let (hits, total) = pipeline::cmd_significance(&mut s)?;
            eprintln!("{hits} of {total} conditional MI triples significant at alpha {}", s.config.alpha);
            finish(s)
        }
        Command::Export { common, format } => {
            let mut s = open(&common, "export")?;
            pipeline::cmd_export(&mut s, format)?;
            finish(s)
        }
        Command::Synth(a) => {
            let n = a.blocks.iter().sum();
            let spec = SynthSpec {
                sectors: a.blocks.clone(),
                coupling: a.coupling,
                chains: a.chains.iter().map(|c| synth::parse_chain(c)).collect::<Result<_>>()?,
                nonlinear: a.nonlinear.iter().map(|c| synth::parse_nonlinear(c)).collect::<Result<_>>()?,
                link_strength: a.link_strength,
                bins: a.bins,
                ..SynthSpec::independent(n, a.samples, a.seed)
            };
            let files = synth::run(&spec, &a.out)?;
            println!("{}", files.prices.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
