//! Dependency networks of equity markets built from partial mutual information.
//!
//! The pipeline runs from daily closing prices to filtered networks:
//!
//! 1. [`ingest`] loads prices, takes log returns and maps them onto rank-balanced
//!    quantile states.
//! 2. [`infotheory`] estimates entropies (plug-in and Schürmann–Grassberger),
//!    mutual information, partial mutual information and (partial) correlations.
//! 3. [`similarity`] assembles the six dependency structures: correlation distance,
//!    MI distance, minimal partial correlation distance, minimal PMI distance and the
//!    two directed average-influence matrices, plus the Gamma significance test.
//! 4. [`netbuild`] filters those structures into spanning trees and planar graphs.
//! 5. [`netmetrics`] compares networks via Markov centrality, sector ratios and
//!    clustering.
//!
//! [`synth`] generates markets with planted structure and [`export`] writes
//! networks and matrices to disk.

pub mod error;
pub mod export;
pub mod infotheory;
pub mod ingest;
pub mod netbuild;
pub mod netmetrics;
pub mod similarity;
pub mod synth;

pub use error::{Error, Result};
pub use infotheory::{AlphabetConvention, ContingencyTable, EntropyEstimate, Estimator};
pub use ingest::{DiscreteSeries, PriceSeries, ReturnSeries, SectorMap};
pub use netbuild::{Edge, Network, Node, Topology};
pub use similarity::{InfluenceMatrix, Measure, PmiBlock, SimilarityMatrix};
