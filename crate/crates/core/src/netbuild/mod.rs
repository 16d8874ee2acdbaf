//! Greedy network filters: minimum spanning trees, planar maximally filtered
//! graphs and directed influence graphs.

mod planarity;
mod union_find;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

pub use planarity::{is_planar, planarity_check};
pub use union_find::UnionFind;

use crate::error::{Error, Result};
use crate::ingest::SectorMap;
use crate::similarity::{InfluenceMatrix, SimilarityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    Tree,
    Planar,
    Unrestricted,
}

impl Topology {
    pub fn tag(self) -> &'static str {
        match self {
            Topology::Tree => "mst",
            Topology::Planar => "pmfg",
            Topology::Unrestricted => "full",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mst" | "tree" => Ok(Topology::Tree),
            "pmfg" | "planar" => Ok(Topology::Planar),
            "full" | "unrestricted" => Ok(Topology::Unrestricted),
            _ => Err(Error::UnknownTag {
                kind: "topology",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub ticker: String,
    pub sector: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// A filtered network. Directed networks may hold both orientations of a pair
/// as two records over one undirected adjacency.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub directed: bool,
    pub topology: Topology,
}

impl Network {
    pub fn empty(tickers: &[String], directed: bool, topology: Topology) -> Self {
        Self {
            nodes: tickers
                .iter()
                .map(|t| Node {
                    ticker: t.clone(),
                    sector: None,
                })
                .collect(),
            edges: Vec::new(),
            directed,
            topology,
        }
    }

    /// Every pair connected; weights taken from `matrix`.
    pub fn complete(matrix: &SimilarityMatrix) -> Self {
        let mut net = Self::empty(&matrix.tickers, false, Topology::Unrestricted);
        let n = matrix.n();
        for i in 0..n {
            for j in i + 1..n {
                net.edges.push(Edge {
                    source: i,
                    target: j,
                    weight: matrix.get(i, j),
                });
            }
        }
        net
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tickers(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.ticker.as_str())
    }

    pub fn index_of(&self, ticker: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.ticker == ticker)
    }

    /// Distinct undirected adjacencies `(min, max)` in first-seen order.
    pub fn skeleton(&self) -> Vec<(usize, usize)> {
        let mut seen = HashSet::new();
        self.edges
            .iter()
            .map(|e| (e.source.min(e.target), e.source.max(e.target)))
            .filter(|p| seen.insert(*p))
            .collect()
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for (a, b) in self.skeleton() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Attaches sector labels to the nodes.
    pub fn with_sectors(mut self, sectors: &SectorMap) -> Result<Self> {
        for node in &mut self.nodes {
            let s = sectors
                .get(&node.ticker)
                .ok_or_else(|| Error::MissingSector(node.ticker.clone()))?;
            node.sector = Some(s.to_string());
        }
        Ok(self)
    }

    /// Connected components of the skeleton, each sorted by node index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut uf = UnionFind::new(n);
        for (a, b) in self.skeleton() {
            uf.union(a, b);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut root_group = vec![usize::MAX; n];
        for v in 0..n {
            let r = uf.find(v);
            if root_group[r] == usize::MAX {
                root_group[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[root_group[r]].push(v);
        }
        groups
    }
}

/// Kruskal over the increasing distance list: a pair is kept iff it joins two
/// components.
pub fn build_mst(matrix: &SimilarityMatrix) -> Result<Network> {
    let n = matrix.n();
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 nodes, got {n}")));
    }
    matrix.check_finite()?;
    let mut net = Network::empty(&matrix.tickers, false, Topology::Tree);
    let mut uf = UnionFind::new(n);
    for (i, j) in matrix.sorted_pairs() {
        if uf.union(i, j) {
            net.edges.push(Edge {
                source: i,
                target: j,
                weight: matrix.get(i, j),
            });
            if net.edges.len() == n - 1 {
                break;
            }
        }
    }
    Ok(net)
}

/// Planar maximally filtered graph: walk the increasing distance list and keep
/// a pair iff the graph stays planar, until `3n − 6` edges are in.
pub fn build_pmfg(matrix: &SimilarityMatrix) -> Result<Network> {
    let n = matrix.n();
    if n < 3 {
        return Err(Error::invalid(format!("need at least 3 nodes, got {n}")));
    }
    matrix.check_finite()?;
    let target = 3 * n - 6;
    let mut net = Network::empty(&matrix.tickers, false, Topology::Planar);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(target);
    for (i, j) in matrix.sorted_pairs() {
        if planarity_check(n, &pairs, (i, j)) {
            pairs.push((i, j));
            net.edges.push(Edge {
                source: i,
                target: j,
                weight: matrix.get(i, j),
            });
            if pairs.len() == target {
                break;
            }
        }
    }
    Ok(net)
}

/// Directed influence network: entries `d(x|z)` in decreasing order become
/// edges `z → x`, accepted iff the undirected skeleton stays a forest
/// (`Topology::Tree`) or planar (`Topology::Planar`).
///
/// A record whose pair is already adjacent leaves the skeleton unchanged and is
/// kept as a second directed record. The tree variant stops once `n − 1`
/// adjacencies exist.
pub fn build_influence_graph(infl: &InfluenceMatrix, topology: Topology) -> Result<Network> {
    let n = infl.n();
    if n < 3 {
        return Err(Error::invalid(format!("need at least 3 nodes, got {n}")));
    }
    infl.check_finite()?;
    if topology == Topology::Unrestricted {
        return Err(Error::invalid("influence graphs are built as trees or planar graphs"));
    }
    let max_adjacencies = match topology {
        Topology::Tree => n - 1,
        _ => 3 * n - 6,
    };
    let mut net = Network::empty(&infl.tickers, true, topology);
    let mut adjacent: HashSet<(usize, usize)> = HashSet::new();
    let mut skeleton: Vec<(usize, usize)> = Vec::new();
    let mut uf = UnionFind::new(n);

    for (x, z) in infl.sorted_entries() {
        let key = (x.min(z), x.max(z));
        let accept = if adjacent.contains(&key) {
            true
        } else if skeleton.len() == max_adjacencies {
            false
        } else {
            let ok = match topology {
                Topology::Tree => uf.union(x, z),
                _ => planarity_check(n, &skeleton, key),
            };
            if ok {
                adjacent.insert(key);
                skeleton.push(key);
            }
            ok
        };
        if accept {
            net.edges.push(Edge {
                source: z,
                target: x,
                weight: infl.get(x, z),
            });
        }
        if topology == Topology::Tree && skeleton.len() == max_adjacencies {
            break;
        }
    }
    Ok(net)
}
