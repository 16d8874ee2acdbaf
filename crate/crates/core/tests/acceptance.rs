//! Acceptance suite: one PASS/FAIL line per criterion, tolerances pinned below.
//!
//! Run with `cargo test -p pminet --test acceptance`. Criterion 11 is a soft,
//! non-gating check; point `PMINET_PRICES` and `PMINET_SECTORS` at a real
//! multi-year dataset to run it on market data instead of the synthetic
//! stand-in.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use pminet::infotheory::{entropy_ml, entropy_sg, mutual_info, partial_mutual_info, pearson, sg_prior};
use pminet::ingest::{discretize_quartiles, load_prices, load_sectors, log_returns};
use pminet::netbuild::{build_influence_graph, build_mst, build_pmfg};
use pminet::netmetrics::{clustering_coefficient, markov_centrality, sector_ratio};
use pminet::similarity::{
    compute_measure, gamma_threshold, significance_mask, mi_distance, pmi_min_distance, DependencyMatrix, GammaParams,
};
use pminet::synth::{generate, Chain, NonlinearPair, SynthSpec, Transform};
use pminet::{
    AlphabetConvention, ContingencyTable, DiscreteSeries, Edge, Estimator, Measure, Network, ReturnSeries, SectorMap,
    SimilarityMatrix, Topology,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustworkx_core::petgraph::graph::UnGraph;

const LN4: f64 = 2.0 * std::f64::consts::LN_2;

// criterion 1
const C1_TABLES: usize = 1000;
const C1_TOL: f64 = 1e-10;
const C1_LIMIT: Duration = Duration::from_secs(5);
// criterion 2
const C2_TABLES: usize = 500;
const C2_TOL: f64 = 1e-10;
// criterion 3
const C3_M: usize = 100_000;
const C3_BIAS_TOL: f64 = 0.01;
const C3_TABLES: usize = 100;
const C3_TOL: f64 = 1e-12;
// criterion 4
const C4_TOL: f64 = 1e-12;
// criterion 5
const C5_MATRICES: usize = 200;
const C5_N: usize = 20;
// criterion 6
const C6_MATRICES: usize = 100;
const C6_SIZES: [usize; 3] = [10, 20, 30];
const C6_LIMIT: Duration = Duration::from_secs(60);
// criterion 7
const C7_M: usize = 2000;
const C7_TRIALS: u64 = 500;
const C7_ALPHA: f64 = 0.05;
const C7_RATE: (f64, f64) = (0.02, 0.10);
// criterion 8
const C8_M: usize = 10_000;
const C8_SEEDS: u64 = 100;
const C8_CLOSE: f64 = 0.05;
const C8_GAP: f64 = 0.2;
const C8_FRACTION: f64 = 0.9;
// criterion 9
const C9_M: usize = 10_000;
const C9_SEEDS: u64 = 100;
const C9_NULL_PAIRS: u64 = 200;
const C9_RHO: f64 = 0.05;
const C9_FRACTION: f64 = 0.9;
// criterion 10
const C10_MAX_N: usize = 7;
const C10_TOL: f64 = 1e-9;
// criterion 12
const C12_N: usize = 91;
const C12_M: usize = 2500;
const C12_LIMIT: Duration = Duration::from_secs(600);

struct Outcome {
    pass: bool,
    gating: bool,
    detail: String,
}

fn gate(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        gating: true,
        detail,
    }
}

// ---------------------------------------------------------------- helpers

fn table(dims: &[usize], counts: Vec<u64>) -> ContingencyTable {
    ContingencyTable::new(dims.to_vec(), counts).unwrap()
}

/// Random counts summing to at most `max_m` (never all zero).
fn random_counts(rng: &mut ChaCha8Rng, cells: usize, max_m: u64) -> Vec<u64> {
    let m = rng.random_range(1..=max_m);
    let mut counts = vec![0u64; cells];
    // sparse tables are common at small m; bias some cells towards zero
    let live: Vec<usize> = (0..cells).filter(|_| rng.random_bool(0.8)).collect();
    let live = if live.is_empty() { vec![0] } else { live };
    for _ in 0..m {
        counts[live[rng.random_range(0..live.len())]] += 1;
    }
    counts
}

fn states_of(r: &ReturnSeries) -> Vec<u8> {
    discretize_quartiles(r, 4).unwrap().states
}

fn ml_table(series: &[&[u8]]) -> ContingencyTable {
    ContingencyTable::from_codes(&series.iter().map(|s| (*s, 4usize)).collect::<Vec<_>>()).unwrap()
}

fn random_distance_matrix(rng: &mut ChaCha8Rng, n: usize) -> SimilarityMatrix {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.random_range(0.1..2.0);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    SimilarityMatrix {
        tickers: (0..n).map(|i| format!("S{i:02}")).collect(),
        measure: Measure::CorrDistance,
        values,
    }
}

fn prim_weights(m: &SimilarityMatrix) -> Vec<f64> {
    let n = m.n();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut picked = Vec::new();
    for step in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[v] = true;
        if step > 0 {
            picked.push(best[v]);
        }
        for u in 0..n {
            if !in_tree[u] && m.get(v, u) < best[u] {
                best[u] = m.get(v, u);
            }
        }
    }
    picked.sort_by(f64::total_cmp);
    picked
}

fn sorted_weights(net: &Network) -> Vec<f64> {
    let mut w: Vec<f64> = net.edges.iter().map(|e| e.weight).collect();
    w.sort_by(f64::total_cmp);
    w
}

fn edge_keys(net: &Network) -> HashSet<(usize, usize)> {
    net.skeleton().into_iter().collect()
}

fn rustworkx_planar(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut g = UnGraph::<(), ()>::from_edges(edges.iter().map(|&(a, b)| (a as u32, b as u32)));
    while g.node_count() < n {
        g.add_node(());
    }
    rustworkx_core::planar::is_planar(&g)
}

fn graph(n: usize, edges: &[(usize, usize)]) -> Network {
    let tickers: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
    let mut net = Network::empty(&tickers, false, Topology::Planar);
    net.edges = edges
        .iter()
        .map(|&(source, target)| Edge {
            source,
            target,
            weight: 1.0,
        })
        .collect();
    net
}

// ---------------------------------------------------------------- criteria

fn c1_estimator_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..C1_TABLES {
        let counts = random_counts(&mut rng, 16, 500);
        let m: u64 = counts.iter().sum();
        let mi = mutual_info(&table(&[4, 4], counts.clone()), Estimator::Ml).unwrap();
        // Σ p(x,y) ln p(x,y) / (p(x) p(y))
        let p = |x: usize, y: usize| counts[4 * x + y] as f64 / m as f64;
        let px: Vec<f64> = (0..4).map(|x| (0..4).map(|y| p(x, y)).sum()).collect();
        let py: Vec<f64> = (0..4).map(|y| (0..4).map(|x| p(x, y)).sum()).collect();
        let mut kl = 0.0;
        for x in 0..4 {
            for y in 0..4 {
                if p(x, y) > 0.0 {
                    kl += p(x, y) * (p(x, y) / (px[x] * py[y])).ln();
                }
            }
        }
        worst = worst.max((mi - kl).abs());
    }
    let t = start.elapsed();
    gate(
        worst < C1_TOL && t < C1_LIMIT,
        format!(
            "ml MI vs KL double sum: max |Δ| = {worst:.2e} over {C1_TABLES} 4×4 tables (tol {C1_TOL:e}); {:.2} s (limit {} s)",
            t.as_secs_f64(),
            C1_LIMIT.as_secs()
        ),
    )
}

fn c2_pmi_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for _ in 0..C2_TABLES {
        let counts = random_counts(&mut rng, 64, 2000);
        let m: u64 = counts.iter().sum();
        let pmi = partial_mutual_info(&table(&[4, 4, 4], counts.clone()), Estimator::Ml).unwrap();
        // Σ_z p(z) Σ_{x,y} p(x,y|z) ln p(x,y|z) / (p(x|z) p(y|z))
        let c = |x: usize, y: usize, z: usize| counts[16 * x + 4 * y + z] as f64;
        let mut direct = 0.0;
        for z in 0..4 {
            let nz: f64 = (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).map(|(x, y)| c(x, y, z)).sum();
            if nz == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for x in 0..4 {
                let nxz: f64 = (0..4).map(|y| c(x, y, z)).sum();
                for y in 0..4 {
                    let nyz: f64 = (0..4).map(|x2| c(x2, y, z)).sum();
                    let nxyz = c(x, y, z);
                    if nxyz > 0.0 {
                        inner += nxyz / nz * (nxyz * nz / (nxz * nyz)).ln();
                    }
                }
            }
            direct += nz / m as f64 * inner;
        }
        worst = worst.max((pmi - direct).abs());
    }
    gate(
        worst < C2_TOL,
        format!("four-entropy PMI vs conditional double sum: max |Δ| = {worst:.2e} over {C2_TABLES} 4×4×4 tables (tol {C2_TOL:e})"),
    )
}

/// The SG formula written out with statrs' digamma.
fn sg_oracle(counts: &[u64]) -> f64 {
    use statrs::function::gamma::digamma;
    let a = counts.len() as f64;
    let prior = 1.0 / a;
    let m: f64 = counts.iter().sum::<u64>() as f64;
    let total = m + a * prior;
    counts
        .iter()
        .map(|&k| (k as f64 + prior) * (digamma(total + 1.0) - digamma(k as f64 + prior + 1.0)))
        .sum::<f64>()
        / total
}

fn c3_sg_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut counts = vec![0u64; 4];
    for _ in 0..C3_M {
        counts[rng.random_range(0..4)] += 1;
    }
    let sg = entropy_sg(&table(&[4], counts), AlphabetConvention::Joint).unwrap().value;
    let bias = (sg - LN4).abs();

    let mut worst: f64 = 0.0;
    for i in 0..C3_TABLES {
        // one- and two-axis tables; the joint prior spreads 1/|cells| per cell
        let dims: Vec<usize> = if i % 2 == 0 {
            vec![rng.random_range(2..=16)]
        } else {
            vec![rng.random_range(2..=5), rng.random_range(2..=5)]
        };
        let cells: usize = dims.iter().product();
        let c = random_counts(&mut rng, cells, 60);
        assert!((sg_prior(&dims, AlphabetConvention::Joint) - 1.0 / cells as f64).abs() < 1e-15);
        let got = entropy_sg(&table(&dims, c.clone()), AlphabetConvention::Joint).unwrap().value;
        worst = worst.max((got - sg_oracle(&c)).abs());
    }
    gate(
        bias < C3_BIAS_TOL && worst < C3_TOL,
        format!(
            "|Ĥ_sg − ln 4| = {bias:.2e} at m = {C3_M} (tol {C3_BIAS_TOL}); vs digamma oracle max |Δ| = {worst:.2e} over {C3_TABLES} tables (tol {C3_TOL:e})"
        ),
    )
}

fn c4_synergy() -> Outcome {
    let mut counts = vec![0u64; 64];
    for x in 0..4 {
        for y in 0..4 {
            counts[16 * x + 4 * y + (x + y) % 4] = 1;
        }
    }
    let t = table(&[4, 4, 4], counts);
    let mi = mutual_info(&t.marginal(&[0, 1]).unwrap(), Estimator::Ml).unwrap();
    let pmi = partial_mutual_info(&t, Estimator::Ml).unwrap();
    gate(
        mi.abs() < C4_TOL && (pmi - LN4).abs() < C4_TOL,
        format!("Z = X+Y mod 4: I(X,Y) = {mi:.2e}, I(X,Y|Z) − ln 4 = {:.2e} (tol {C4_TOL:e})", pmi - LN4),
    )
}

fn c5_mst_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut failures = Vec::new();
    for k in 0..C5_MATRICES {
        let m = random_distance_matrix(&mut rng, C5_N);
        let tree = build_mst(&m).unwrap();
        let again = build_mst(&m).unwrap();
        let weights = sorted_weights(&tree);
        let total: f64 = weights.iter().sum();
        let oracle = prim_weights(&m);
        let oracle_total: f64 = oracle.iter().sum();
        if tree.edges.len() != C5_N - 1 || weights != oracle || total != oracle_total || tree != again {
            failures.push(k);
        }
    }
    gate(
        failures.is_empty(),
        format!(
            "{}/{C5_MATRICES} N={C5_N} trees equal Prim's total exactly with N−1 edges and identical reruns{}",
            C5_MATRICES - failures.len(),
            if failures.is_empty() { String::new() } else { format!("; failing {failures:?}") }
        ),
    )
}

fn c6_pmfg_contract() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut bad = 0;
    for k in 0..C6_MATRICES {
        let n = C6_SIZES[k % C6_SIZES.len()];
        let m = random_distance_matrix(&mut rng, n);
        let pmfg = build_pmfg(&m).unwrap();
        let keys = edge_keys(&pmfg);
        let tree = edge_keys(&build_mst(&m).unwrap());
        let edges: Vec<(usize, usize)> = keys.iter().copied().collect();
        if pmfg.edges.len() != 3 * n - 6 || !rustworkx_planar(n, &edges) || !tree.is_subset(&keys) {
            bad += 1;
        }
    }

    // N = 5 with distinct distances: every pair fits except the largest
    let m = random_distance_matrix(&mut ChaCha8Rng::seed_from_u64(607), 5);
    let largest = m.sorted_pairs().last().copied().unwrap();
    let k5 = edge_keys(&build_pmfg(&m).unwrap());
    let want: HashSet<(usize, usize)> = (0..5)
        .flat_map(|i| (i + 1..5).map(move |j| (i, j)))
        .filter(|&p| p != largest)
        .collect();
    let t = start.elapsed();
    gate(
        bad == 0 && k5 == want && t < C6_LIMIT,
        format!(
            "{}/{C6_MATRICES} PMFGs (N ∈ {C6_SIZES:?}) have 3N−6 edges, pass the rustworkx planarity check and contain the MST; N=5 case {} K₅ minus its largest edge; {:.1} s (limit {} s)",
            C6_MATRICES - bad,
            if k5 == want { "equals" } else { "differs from" },
            t.as_secs_f64(),
            C6_LIMIT.as_secs()
        ),
    )
}

fn c7_gamma_calibration() -> Outcome {
    let params = GammaParams::new(4, 4, 4, C7_M).unwrap();
    let threshold = gamma_threshold(&params, C7_ALPHA).unwrap();
    let fired: usize = (0..C7_TRIALS)
        .into_par_iter()
        .map(|seed| {
            let market = generate(&SynthSpec::independent(3, C7_M, 7000 + seed)).unwrap();
            let s: Vec<Vec<u8>> = market.returns.iter().map(states_of).collect();
            let pmi = partial_mutual_info(&ml_table(&[&s[0], &s[1], &s[2]]), Estimator::Ml).unwrap();
            usize::from(significance_mask(&[pmi], &params, C7_ALPHA).unwrap()[0])
        })
        .sum();
    let rate = fired as f64 / C7_TRIALS as f64;
    gate(
        (C7_RATE.0..=C7_RATE.1).contains(&rate),
        format!(
            "κ = {}, θ = 1/{C7_M}, threshold {threshold:.5}: fired on {fired}/{C7_TRIALS} independent triples, rate {rate:.3} (band [{}, {}])",
            params.kappa, C7_RATE.0, C7_RATE.1
        ),
    )
}

fn c8_mediation() -> Outcome {
    // X → Z → Y plus two unrelated tickers, so the minimum runs over three candidates
    let results: Vec<(bool, f64, f64)> = (0..C8_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let mut spec = SynthSpec::independent(5, C8_M, 8000 + seed);
            spec.chains.push(Chain {
                source: 0,
                mediator: 1,
                target: 2,
            });
            let market = generate(&spec).unwrap();
            let states: Vec<DiscreteSeries> =
                market.returns.iter().map(|r| discretize_quartiles(r, 4).unwrap()).collect();
            let d4 = pmi_min_distance(&states, Estimator::Ml).unwrap().get(0, 2);
            let d2 = mi_distance(&states, Estimator::Ml).unwrap().get(0, 2);
            let hxy = entropy_ml(&ml_table(&[&states[0].states, &states[2].states])).unwrap().value;
            let (close, gap) = ((d4 - hxy).abs(), d4 - d2);
            (close < C8_CLOSE && gap > C8_GAP, close, gap)
        })
        .collect();
    let ok = results.iter().filter(|r| r.0).count();
    let worst_close = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let min_gap = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    gate(
        ok as f64 >= C8_FRACTION * C8_SEEDS as f64,
        format!(
            "{ok}/{C8_SEEDS} seeds with |d₄ − H(X,Y)| < {C8_CLOSE} and d₄ − d₂ > {C8_GAP} (need ≥ {:.0}%); worst |d₄ − H| = {worst_close:.4}, smallest gap = {min_gap:.3}",
            100.0 * C8_FRACTION
        ),
    )
}

fn pair_mi(returns: &[ReturnSeries]) -> f64 {
    mutual_info(&ml_table(&[&states_of(&returns[0]), &states_of(&returns[1])]), Estimator::Ml).unwrap()
}

fn c9_nonlinearity() -> Outcome {
    let mut null: Vec<f64> = (0..C9_NULL_PAIRS)
        .into_par_iter()
        .map(|seed| pair_mi(&generate(&SynthSpec::independent(2, C9_M, 90_000 + seed)).unwrap().returns))
        .collect();
    null.sort_by(f64::total_cmp);
    let q95 = null[(0.95 * (null.len() - 1) as f64).round() as usize];

    let results: Vec<(bool, f64, f64)> = (0..C9_SEEDS)
        .into_par_iter()
        .map(|seed| {
            let mut spec = SynthSpec::independent(2, C9_M, 9000 + seed);
            spec.nonlinear.push(NonlinearPair {
                x: 0,
                y: 1,
                transform: Transform::Square,
            });
            let market = generate(&spec).unwrap();
            let rho = pearson(&market.returns[0].returns, &market.returns[1].returns).unwrap();
            let mi = pair_mi(&market.returns);
            (rho.abs() < C9_RHO && mi > q95, rho.abs(), mi)
        })
        .collect();
    let ok = results.iter().filter(|r| r.0).count();
    let max_rho = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let min_mi = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    gate(
        ok as f64 >= C9_FRACTION * C9_SEEDS as f64,
        format!(
            "{ok}/{C9_SEEDS} square-coupled pairs with |ρ| < {C9_RHO} and MI above the null 95th percentile {q95:.5} ({C9_NULL_PAIRS} independent pairs); max |ρ| = {max_rho:.3}, min MI = {min_mi:.3}"
        ),
    )
}

/// Expected hitting times into `target` by Gauss–Jordan elimination on
/// `h_s − Σ_k P_sk h_k = 1`, `h_target = 0`.
fn hitting_times(adj: &[Vec<usize>], target: usize) -> Vec<f64> {
    let n = adj.len();
    let idx: Vec<usize> = (0..n).filter(|&v| v != target).collect();
    let pos = |v: usize| if v < target { v } else { v - 1 };
    let k = idx.len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (r, &s) in idx.iter().enumerate() {
        a[r][r] += 1.0;
        a[r][k] = 1.0;
        for &t in &adj[s] {
            if t != target {
                a[r][pos(t)] -= 1.0 / adj[s].len() as f64;
            }
        }
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
        a.swap(col, piv);
        let p = a[col][col];
        for c in col..=k {
            a[col][c] /= p;
        }
        for r in 0..k {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in col..=k {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut h = vec![0.0; n];
    for (r, &s) in idx.iter().enumerate() {
        h[s] = a[r][k];
    }
    h
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0u32;
        for &(a, b) in edges {
            if frontier >> a & 1 == 1 {
                next |= 1 << b;
            }
            if frontier >> b & 1 == 1 {
                next |= 1 << a;
            }
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == (1 << n) - 1
}

fn c10_metrics_oracles() -> Outcome {
    let mut graphs = 0usize;
    let mut worst: f64 = 0.0;
    for n in 2..=C10_MAX_N {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let (count, err) = (0u64..1 << pairs.len())
            .into_par_iter()
            .filter_map(|mask| {
                let edges: Vec<(usize, usize)> =
                    pairs.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &p)| p).collect();
                if !connected(n, &edges) {
                    return None;
                }
                let net = graph(n, &edges);
                let c = markov_centrality(&net).unwrap();
                let adj = net.adjacency();
                let err = (0..n)
                    .map(|v| {
                        let want = n as f64 / hitting_times(&adj, v).iter().sum::<f64>();
                        ((c.values[v] - want) / want.max(1.0)).abs()
                    })
                    .fold(0.0, f64::max);
                Some((1usize, err))
            })
            .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
        graphs += count;
        worst = worst.max(err);
    }

    // fixtures: triangle, star, K4 minus an edge; sector splits on a path and on K4
    let mut fixtures = Vec::new();
    fixtures.push(("triangle clustering", clustering_coefficient(&graph(3, &[(0, 1), (1, 2), (0, 2)])).unwrap(), 1.0));
    fixtures.push((
        "star clustering",
        clustering_coefficient(&graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])).unwrap(),
        0.0,
    ));
    fixtures.push((
        "K4−e clustering",
        clustering_coefficient(&graph(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])).unwrap(),
        0.75,
    ));
    let sectors: SectorMap = [("N0", "A"), ("N1", "A"), ("N2", "B"), ("N3", "B")].into_iter().collect();
    fixtures.push((
        "A₁A₂, B₁B₂, A₁B₁ sector ratio",
        sector_ratio(&graph(4, &[(0, 1), (2, 3), (0, 2)]), &sectors).unwrap(),
        2.0 / 3.0,
    ));
    let complete = |n: usize| -> Vec<(usize, usize)> { (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect() };
    let one: SectorMap = (0..5).map(|i| (format!("N{i}"), "A")).collect();
    fixtures.push(("one-sector complete graph", sector_ratio(&graph(5, &complete(5)), &one).unwrap(), 1.0));
    // blocks of 2, 3 and 4 on K₉: (1 + 3 + 6) / 36
    let sized: SectorMap = (0..9).map(|i| (format!("N{i}"), ["A", "A", "B", "B", "B", "C", "C", "C", "C"][i])).collect();
    fixtures.push(("sized-sector complete graph", sector_ratio(&graph(9, &complete(9)), &sized).unwrap(), 10.0 / 36.0));
    let wrong: Vec<&str> = fixtures
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-15)
        .map(|(name, _, _)| *name)
        .collect();
    gate(
        worst < C10_TOL && wrong.is_empty(),
        format!(
            "Markov centrality vs absorbing-chain oracle on all {graphs} connected labeled graphs with N ≤ {C10_MAX_N}: max rel |Δ| = {worst:.2e} (tol {C10_TOL:e}); {}/{} clustering/sector fixtures exact{}",
            fixtures.len() - wrong.len(),
            fixtures.len(),
            if wrong.is_empty() { String::new() } else { format!(" (wrong: {wrong:?})") }
        ),
    )
}

fn tree_ratios(returns: &[ReturnSeries], sectors: &SectorMap) -> (Vec<f64>, f64) {
    let states: Vec<DiscreteSeries> = returns.iter().map(|r| discretize_quartiles(r, 4).unwrap()).collect();
    let block = pminet::PmiBlock::compute(&states, Estimator::default()).unwrap();
    let mut ratios = Vec::new();
    let mut baseline = 0.0;
    for measure in Measure::ALL {
        let tree = match compute_measure(measure, returns, &states, Estimator::default(), Some(&block)).unwrap() {
            DependencyMatrix::Distance(d) => {
                if measure == Measure::CorrDistance {
                    baseline = sector_ratio(&Network::complete(&d), sectors).unwrap();
                }
                build_mst(&d).unwrap()
            }
            DependencyMatrix::Influence(i) => build_influence_graph(&i, Topology::Tree).unwrap(),
        };
        ratios.push(sector_ratio(&tree, sectors).unwrap());
    }
    (ratios, baseline)
}

fn c11_soft_context() -> Outcome {
    let user = std::env::var("PMINET_PRICES").ok().zip(std::env::var("PMINET_SECTORS").ok());
    let (source, returns, sectors) = match user {
        Some((p, s)) => {
            let load = load_prices(&p).unwrap();
            let returns: Vec<ReturnSeries> = load.series.iter().map(|s| log_returns(s).unwrap()).collect();
            (format!("user data {p}"), returns, load_sectors(&s).unwrap())
        }
        None => {
            // ~90 tickers in 9 sectors, ten years of trading days
            let market = generate(&SynthSpec::blocks(9, 10, 0.3, 2500, 11)).unwrap();
            (
                "synthetic stand-in (set PMINET_PRICES / PMINET_SECTORS for real data)".to_string(),
                market.returns,
                market.sectors,
            )
        }
    };
    let (ratios, baseline) = tree_ratios(&returns, &sectors);
    let shown: Vec<String> = ratios.iter().map(|r| format!("{:.2}%", 100.0 * r)).collect();
    let far_above = ratios.iter().all(|&r| r > 2.0 * baseline);
    Outcome {
        pass: far_above,
        gating: false,
        detail: format!(
            "{source}: tree sector ratios [{}] vs complete-graph baseline {:.2}% (published band 48.89–66.67% vs ~11.3%); all far above baseline: {}",
            shown.join(", "),
            100.0 * baseline,
            if far_above { "yes" } else { "no" }
        ),
    }
}

fn c12_performance() -> Outcome {
    let market = generate(&SynthSpec::blocks(7, 13, 0.3, C12_M, 12)).unwrap();
    assert_eq!(market.returns.len(), C12_N);
    let start = Instant::now();
    let states: Vec<DiscreteSeries> = market.returns.iter().map(|r| discretize_quartiles(r, 4).unwrap()).collect();
    let d = pmi_min_distance(&states, Estimator::default()).unwrap();
    let t = start.elapsed();
    let finite = (0..C12_N).all(|i| (0..C12_N).all(|j| d.get(i, j).is_finite()));
    gate(
        finite && t < C12_LIMIT,
        format!(
            "measure-4 matrix at N={C12_N}, m={C12_M} ({} conditional MI evaluations, {} threads): {:.2} s (limit {} s)",
            C12_N * (C12_N - 1) / 2 * (C12_N - 2),
            rayon::current_num_threads(),
            t.as_secs_f64(),
            C12_LIMIT.as_secs()
        ),
    )
}

fn main() -> ExitCode {
    // `cargo test` forwards harness flags; this target only runs the full suite
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("estimator oracle equivalence", c1_estimator_oracle),
        ("PMI identity", c2_pmi_identity),
        ("SG estimator convergence", c3_sg_convergence),
        ("synergy case", c4_synergy),
        ("MST optimality", c5_mst_optimality),
        ("PMFG contract", c6_pmfg_contract),
        ("Gamma calibration", c7_gamma_calibration),
        ("mediation removal", c8_mediation),
        ("nonlinearity detection", c9_nonlinearity),
        ("metrics oracles", c10_metrics_oracles),
        ("soft contextual check", c11_soft_context),
        ("performance envelope", c12_performance),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let status = match (o.pass, o.gating) {
            (true, true) => "PASS",
            (false, true) => "FAIL",
            (true, false) => "PASS (soft)",
            (false, false) => "MISS (soft)",
        };
        if o.gating && !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {status:<11} {name}: {}", k + 1, o.detail);
    }
    println!("acceptance: {} of 11 gating criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
