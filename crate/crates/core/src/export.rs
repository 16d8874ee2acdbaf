//! Deterministic network and matrix serialization.
//!
//! Nodes are written in network order, edges in record order, floats in Rust's
//! shortest round-trip form.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::netbuild::Network;
use crate::netmetrics::{markov_centrality, CentralityVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeList,
    GraphMl,
    Dot,
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 3] = [ExportFormat::EdgeList, ExportFormat::GraphMl, ExportFormat::Dot];

    pub fn tag(self) -> &'static str {
        match self {
            ExportFormat::EdgeList => "edgelist",
            ExportFormat::GraphMl => "graphml",
            ExportFormat::Dot => "dot",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::EdgeList => "edges.csv",
            ExportFormat::GraphMl => "graphml",
            ExportFormat::Dot => "dot",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "csv" => Ok(ExportFormat::EdgeList),
            "graphml" => Ok(ExportFormat::GraphMl),
            "dot" => Ok(ExportFormat::Dot),
            _ => Err(Error::UnknownTag {
                kind: "export format",
                value: s.to_string(),
            }),
        }
    }
}

/// Optional provenance stamped into GraphML and DOT output.
#[derive(Clone, Debug, Default)]
pub struct ExportOptions {
    pub config_digest: Option<String>,
}

/// Writes `network` in `format`. GraphML node attributes include Markov
/// centrality when the skeleton is connected.
pub fn export_graph<W: Write>(network: &Network, format: ExportFormat, options: &ExportOptions, out: W) -> Result<()> {
    let res = match format {
        ExportFormat::EdgeList => write_edge_list(network, out),
        ExportFormat::GraphMl => {
            let centrality = markov_centrality(network).ok();
            write_graphml(network, centrality.as_ref(), options.config_digest.as_deref(), out)
        }
        ExportFormat::Dot => write_dot(network, options.config_digest.as_deref(), out),
    };
    res.map_err(|e| Error::io(format.tag(), e))
}

pub fn write_edge_list<W: Write>(network: &Network, out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target", "weight", "directed"])?;
    for e in &network.edges {
        w.write_record([
            network.nodes[e.source].ticker.as_str(),
            network.nodes[e.target].ticker.as_str(),
            &e.weight.to_string(),
            if network.directed { "true" } else { "false" },
        ])?;
    }
    w.flush()
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn write_graphml<W: Write>(
    network: &Network,
    centrality: Option<&CentralityVector>,
    config_digest: Option<&str>,
    mut out: W,
) -> io::Result<()> {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(out, r#"  <key id="config" for="graph" attr.name="config_digest" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="topology" for="graph" attr.name="topology" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="sector" for="node" attr.name="sector" attr.type="string"/>"#)?;
    writeln!(out, r#"  <key id="centrality" for="node" attr.name="centrality" attr.type="double"/>"#)?;
    writeln!(out, r#"  <key id="weight" for="edge" attr.name="weight" attr.type="double"/>"#)?;
    let kind = if network.directed { "directed" } else { "undirected" };
    writeln!(out, r#"  <graph id="G" edgedefault="{kind}">"#)?;
    if let Some(d) = config_digest {
        writeln!(out, r#"    <data key="config">{}</data>"#, xml_escape(d))?;
    }
    writeln!(out, r#"    <data key="topology">{}</data>"#, network.topology)?;
    for (i, node) in network.nodes.iter().enumerate() {
        let id = xml_escape(&node.ticker);
        let sector = node.sector.as_deref();
        let c = centrality.map(|c| c.values[i]);
        if sector.is_none() && c.is_none() {
            writeln!(out, r#"    <node id="{id}"/>"#)?;
            continue;
        }
        writeln!(out, r#"    <node id="{id}">"#)?;
        if let Some(s) = sector {
            writeln!(out, r#"      <data key="sector">{}</data>"#, xml_escape(s))?;
        }
        if let Some(c) = c {
            writeln!(out, r#"      <data key="centrality">{c}</data>"#)?;
        }
        writeln!(out, "    </node>")?;
    }
    for e in &network.edges {
        writeln!(
            out,
            r#"    <edge source="{}" target="{}"><data key="weight">{}</data></edge>"#,
            xml_escape(&network.nodes[e.source].ticker),
            xml_escape(&network.nodes[e.target].ticker),
            e.weight
        )?;
    }
    writeln!(out, "  </graph>")?;
    writeln!(out, "</graphml>")?;
    out.flush()
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn write_dot<W: Write>(network: &Network, config_digest: Option<&str>, mut out: W) -> io::Result<()> {
    let (kind, arrow) = if network.directed { ("digraph", "->") } else { ("graph", "--") };
    if let Some(d) = config_digest {
        writeln!(out, "// config {d}")?;
    }
    writeln!(out, "{kind} {} {{", dot_quote(network.topology.tag()))?;
    for node in &network.nodes {
        match &node.sector {
            Some(s) => writeln!(out, "  {} [sector={}];", dot_quote(&node.ticker), dot_quote(s))?,
            None => writeln!(out, "  {};", dot_quote(&node.ticker))?,
        }
    }
    for e in &network.edges {
        writeln!(
            out,
            "  {} {arrow} {} [weight={}];",
            dot_quote(&network.nodes[e.source].ticker),
            dot_quote(&network.nodes[e.target].ticker),
            e.weight
        )?;
    }
    writeln!(out, "}}")?;
    out.flush()
}

/// Square matrix as CSV with a `ticker` header column.
pub fn write_matrix<W: Write>(tickers: &[String], values: &[f64], out: W) -> io::Result<()> {
    let n = tickers.len();
    assert_eq!(values.len(), n * n, "matrix shape");
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["ticker".to_string()];
    header.extend(tickers.iter().cloned());
    w.write_record(&header)?;
    for (i, t) in tickers.iter().enumerate() {
        let mut row = vec![t.clone()];
        row.extend(values[i * n..(i + 1) * n].iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()
}
