use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pminet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pminet"))
        .args(args)
        .output()
        .expect("spawn pminet")
}

fn ok(args: &[&str]) -> String {
    let out = pminet(args);
    assert!(
        out.status.success(),
        "pminet {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Market {
    _dir: tempfile::TempDir,
    root: PathBuf,
    prices: String,
    sectors: String,
}

fn market(blocks: &str, samples: usize) -> Market {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let syn = root.join("syn");
    ok(&[
        "synth",
        "--blocks",
        blocks,
        "--samples",
        &samples.to_string(),
        "--seed",
        "5",
        "--out",
        syn.to_str().unwrap(),
    ]);
    Market {
        _dir: dir,
        prices: syn.join("prices.csv").display().to_string(),
        sectors: syn.join("sectors.csv").display().to_string(),
        root,
    }
}

impl Market {
    fn out(&self, name: &str) -> String {
        self.root.join(name).display().to_string()
    }

    fn run(&self, cmd: &str, out: &str, extra: &[&str]) -> PathBuf {
        let mut args = vec![cmd, "--prices", &self.prices, "--sectors", &self.sectors, "--out", out];
        args.extend_from_slice(extra);
        PathBuf::from(ok(&args).trim())
    }
}

fn manifest(run_dir: &Path, command: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(run_dir.join(format!("manifest-{command}.json"))).unwrap()).unwrap()
}

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(str::to_string).collect()
}

#[test]
fn measure_two_tree_has_n_minus_one_edges_and_a_manifest() {
    let m = market("4,4,4", 400);
    let run = m.run("run", &m.out("o"), &["--measure", "2", "--topology", "mst"]);
    assert_eq!(data_lines(&run.join("m2-mst.edges.csv")).len(), 11);
    let man = manifest(&run, "run");
    assert_eq!(man["tool"], "pminet");
    assert_eq!(man["config"]["measure"], 2);
    assert!(man["inputs"]["prices"]["sha256"].as_str().unwrap().len() == 64);
    for name in ["returns.csv", "states.csv", "matrix-m2.csv", "m2-mst.graphml", "m2-mst.dot", "m2-mst.metrics.csv"] {
        assert!(man["artifacts"][name].is_string(), "{name}");
    }
    let digest = man["config_digest"].as_str().unwrap();
    assert!(run.file_name().unwrap().to_str().unwrap().ends_with(&digest[..12]));
    assert!(fs::read_to_string(run.join("m2-mst.graphml")).unwrap().contains(digest));
    assert!(fs::read_to_string(run.join("m2-mst.dot")).unwrap().contains(digest));
}

#[test]
fn reruns_are_byte_identical() {
    let m = market("3,3,3", 300);
    let a = m.run("run", &m.out("a"), &["--measure", "4", "--topology", "pmfg"]);
    let b = m.run("run", &m.out("b"), &["--measure", "4", "--topology", "pmfg"]);
    assert_eq!(a.file_name(), b.file_name());
    let man = manifest(&a, "run");
    let artifacts = man["artifacts"].as_object().unwrap();
    assert!(artifacts.len() >= 7);
    for name in artifacts.keys() {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_eq!(manifest(&b, "run")["artifacts"], man["artifacts"]);
}

#[test]
fn measure_six_reuses_the_pmi_block_of_measure_four() {
    let m = market("4,3,3", 500);
    let out = m.out("o");
    let four = m.run("matrix", &out, &["--measure", "4"]);
    let six = m.run("matrix", &out, &["--measure", "6"]);
    let (m4, m6) = (manifest(&four, "matrix"), manifest(&six, "matrix"));
    assert_eq!(m4["cache"]["pmi_block:sg"], "miss");
    assert_eq!(m4["cache"]["matrix:4"], "miss");
    assert_eq!(m6["cache"]["pmi_block:sg"], "hit");
    assert_eq!(m6["cache"]["matrix:6"], "miss");
    assert!(m4["timings_ms"]["pmi_block"].is_number());
    assert!(m6["timings_ms"]["pmi_block"].is_number());
    // the block was loaded, so states were never needed
    assert!(m6["timings_ms"]["discretize"].is_null());

    let again = m.run("matrix", &out, &["--measure", "4"]);
    assert_eq!(manifest(&again, "matrix")["cache"]["matrix:4"], "hit");
    assert_eq!(fs::read(again.join("matrix-m4.csv")).unwrap(), fs::read(four.join("matrix-m4.csv")).unwrap());
}

#[test]
fn compare_writes_two_six_by_six_tables() {
    let m = market("4,4,4", 400);
    let run = m.run("compare", &m.out("o"), &[]);
    for name in ["mc-trees.csv", "mc-planar.csv"] {
        let text = fs::read_to_string(run.join(name)).unwrap();
        let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
        assert_eq!(rows.len(), 7);
        assert!(rows.iter().all(|r| r.len() == 7));
        for i in 1..7 {
            assert_eq!(rows[i][i].parse::<f64>().unwrap(), 1.0);
            for j in 1..7 {
                assert_eq!(rows[i][j], rows[j][i]);
            }
        }
    }
    let table = data_lines(&run.join("comparison.csv"));
    assert_eq!(table.len(), 7);
    assert!(table[6].starts_with("reference,"));
    for measure in 1..=6 {
        for topo in ["mst", "pmfg"] {
            assert!(run.join(format!("networks/m{measure}-{topo}.edges.csv")).exists());
        }
    }
    let tree = data_lines(&run.join("networks/m6-mst.edges.csv"));
    assert!(tree.len() >= 11);
    assert!(tree.iter().all(|l| l.ends_with(",true")));
}

#[test]
fn config_file_matches_flags() {
    let m = market("3,3", 200);
    let conf = m.root.join("run.conf");
    fs::write(
        &conf,
        format!(
            "# same as the flags below\nprices = {}\nsectors = {}\nmeasure = 3\ntopology = pmfg\nout = {}\n",
            m.prices,
            m.sectors,
            m.out("o")
        ),
    )
    .unwrap();
    let from_file = PathBuf::from(ok(&["network", "--config", conf.to_str().unwrap()]).trim());
    let from_flags = m.run("network", &m.out("o"), &["--measure", "3", "--topology", "pmfg"]);
    assert_eq!(from_file, from_flags);
    // flags override the file
    let overridden = PathBuf::from(ok(&["network", "--config", conf.to_str().unwrap(), "--measure", "1"]).trim());
    assert_ne!(overridden, from_flags);
    assert!(overridden.join("m1-pmfg.edges.csv").exists());
}

#[test]
fn single_format_export_and_significance() {
    let m = market("3,3", 300);
    let run = m.run("export", &m.out("o"), &["--format", "dot", "--measure", "1"]);
    let dot = fs::read_to_string(run.join("m1-mst.dot")).unwrap();
    assert!(dot.contains("graph \"mst\" {"));
    assert!(!run.join("m1-mst.graphml").exists());

    let run = m.run("significance", &m.out("o"), &["--alpha", "0.01"]);
    let rows = data_lines(&run.join("significance-a0.01.csv"));
    // 6 tickers: C(6,2) pairs × 4 conditions
    assert_eq!(rows.len(), 60);
    assert!(rows.iter().all(|r| r.ends_with(",true") || r.ends_with(",false")));
}

#[test]
fn failures_exit_nonzero_with_stage() {
    let out = pminet(&["run", "--prices", "/definitely/missing.csv"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage `ingest`"));

    let m = market("3,3", 100);
    let out = pminet(&["returns", "--prices", &m.prices, "--bins", "1", "--out", &m.out("o")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage `config`"));

    let out = pminet(&["compare", "--prices", &m.prices, "--out", &m.out("o")]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sector file"));

    let out = pminet(&["network", "--prices", &m.prices, "--measure", "9"]);
    assert!(!out.status.success());
}
