//! Node-, cluster- and network-level comparison metrics.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::infotheory::pearson;
use crate::ingest::SectorMap;
use crate::netbuild::{Network, Topology};

/// Markov centrality per node, in network node order.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralityVector {
    pub tickers: Vec<String>,
    pub values: Vec<f64>,
}

/// One row of the network comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkReport {
    pub sector_ratio: f64,
    /// `None` for trees (no triangles are possible).
    pub clustering: Option<f64>,
    pub edge_count: usize,
    pub node_count: usize,
}

/// `C(v) = n / Σ_s MFPT(s → v)` for the uniform random walk on the unweighted
/// skeleton.
///
/// Mean first-passage times come from the fundamental matrix
/// `Z = (I − P + 1πᵀ)⁻¹`: `MFPT(s → v) = (Z_vv − Z_sv) / π_v`.
pub fn markov_centrality(network: &Network) -> Result<CentralityVector> {
    let n = network.node_count();
    if n < 2 {
        return Err(Error::invalid("Markov centrality needs at least 2 nodes"));
    }
    let components = network.components();
    if components.len() > 1 {
        return Err(Error::Disconnected {
            components: components
                .iter()
                .map(|c| c.iter().map(|&v| network.nodes[v].ticker.clone()).collect())
                .collect(),
        });
    }
    let adj = network.adjacency();
    let total_degree: usize = adj.iter().map(Vec::len).sum();
    let pi: Vec<f64> = adj.iter().map(|a| a.len() as f64 / total_degree as f64).collect();

    let mut system = DMatrix::<f64>::identity(n, n);
    for (s, nbrs) in adj.iter().enumerate() {
        let p = 1.0 / nbrs.len() as f64;
        for &t in nbrs {
            system[(s, t)] -= p;
        }
        for (v, &w) in pi.iter().enumerate() {
            system[(s, v)] += w;
        }
    }
    let z = system
        .try_inverse()
        .ok_or_else(|| Error::invalid("singular random-walk system"))?;

    let values = (0..n)
        .map(|v| {
            let total: f64 = (0..n).map(|s| (z[(v, v)] - z[(s, v)]) / pi[v]).sum();
            n as f64 / total
        })
        .collect();
    Ok(CentralityVector {
        tickers: network.tickers().map(str::to_string).collect(),
        values,
    })
}

/// Fraction of adjacencies whose endpoints share a sector.
pub fn sector_ratio(network: &Network, sectors: &SectorMap) -> Result<f64> {
    let sector = |v: usize| {
        let t = &network.nodes[v].ticker;
        sectors.get(t).ok_or_else(|| Error::MissingSector(t.clone()))
    };
    for v in 0..network.node_count() {
        sector(v)?;
    }
    let skeleton = network.skeleton();
    if skeleton.is_empty() {
        return Err(Error::invalid("network has no edges"));
    }
    let mut within = 0usize;
    for &(a, b) in &skeleton {
        if sector(a)? == sector(b)? {
            within += 1;
        }
    }
    Ok(within as f64 / skeleton.len() as f64)
}

/// Transitivity: `3 × triangles / connected triples`.
pub fn clustering_coefficient(network: &Network) -> Result<f64> {
    let n = network.node_count();
    if n < 3 {
        return Err(Error::invalid("clustering needs at least 3 nodes"));
    }
    let adj = network.adjacency();
    let mut neighbor = vec![vec![false; n]; n];
    for (v, nbrs) in adj.iter().enumerate() {
        for &u in nbrs {
            neighbor[v][u] = true;
        }
    }
    let triples: usize = adj.iter().map(|a| a.len() * a.len().saturating_sub(1) / 2).sum();
    if triples == 0 {
        return Err(Error::NoConnectedTriple);
    }
    let mut triangles = 0usize;
    for (a, b) in network.skeleton() {
        // count each triangle once via its lowest-index third vertex ordering
        triangles += adj[a].iter().filter(|&&c| c > b && neighbor[b][c]).count();
    }
    Ok(3.0 * triangles as f64 / triples as f64)
}

/// Pearson correlation of two centrality vectors over the same tickers.
pub fn centrality_correlation(a: &CentralityVector, b: &CentralityVector) -> Result<f64> {
    if a.tickers != b.tickers {
        return Err(Error::invalid("centrality vectors cover different tickers"));
    }
    pearson(&a.values, &b.values).map_err(|e| match e {
        Error::ZeroVariance { .. } => Error::invalid("constant centrality vector"),
        other => other,
    })
}

pub fn network_report(network: &Network, sectors: &SectorMap) -> Result<NetworkReport> {
    let clustering = match network.topology {
        Topology::Tree => None,
        _ => Some(clustering_coefficient(network)?),
    };
    Ok(NetworkReport {
        sector_ratio: sector_ratio(network, sectors)?,
        clustering,
        edge_count: network.skeleton().len(),
        node_count: network.node_count(),
    })
}

/// Pairwise centrality correlations among networks of one topology class.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationTable {
    pub size: usize,
    /// Row-major `size × size`.
    pub values: Vec<f64>,
}

impl CorrelationTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub trees: CorrelationTable,
    pub planar: CorrelationTable,
}

fn correlation_table(networks: &[&Network]) -> Result<CorrelationTable> {
    let centrality: Vec<CentralityVector> = networks.iter().map(|n| markov_centrality(n)).collect::<Result<_>>()?;
    let k = centrality.len();
    let mut values = vec![1.0; k * k];
    for i in 0..k {
        for j in i + 1..k {
            let r = centrality_correlation(&centrality[i], &centrality[j])?;
            values[i * k + j] = r;
            values[j * k + i] = r;
        }
    }
    Ok(CorrelationTable { size: k, values })
}

/// Splits `networks` into trees and planar graphs (keeping their order) and
/// correlates Markov centralities within each class.
pub fn compare_all(networks: &[Network]) -> Result<Comparison> {
    let first = networks.first().ok_or_else(|| Error::invalid("no networks to compare"))?;
    let names: Vec<&str> = first.tickers().collect();
    if networks.iter().any(|n| n.tickers().ne(names.iter().copied())) {
        return Err(Error::invalid("networks cover different tickers"));
    }
    let trees: Vec<&Network> = networks.iter().filter(|n| n.topology == Topology::Tree).collect();
    let planar: Vec<&Network> = networks.iter().filter(|n| n.topology == Topology::Planar).collect();
    if trees.is_empty() || trees.len() != planar.len() || trees.len() + planar.len() != networks.len() {
        return Err(Error::invalid(format!(
            "expected equally many trees and planar graphs, got {} and {} of {}",
            trees.len(),
            planar.len(),
            networks.len()
        )));
    }
    Ok(Comparison {
        trees: correlation_table(&trees)?,
        planar: correlation_table(&planar)?,
    })
}
