//! Organizational co-occurrence network.
//!
//! Nodes are canonical units; an edge's weight is the number of
//! publications naming both endpoints. Betweenness is computed on the full
//! network. Thresholds only shape what gets exported for display.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::normalize::{CanonicalUnit, UnitType};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("edge `{0}` -- `{1}` has zero weight")]
    ZeroWeight(String, String),
    #[error("edge `{0}` -- `{1}` refers to an unknown node")]
    UnknownNode(String, String),
    #[error("edge `{a}` -- `{b}` has weight {weight} above the publication count of an endpoint")]
    WeightAboveP { a: String, b: String, weight: u64 },
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("malformed graph file: {0}")]
    Format(String),
}

type Adjacency = Vec<Vec<(usize, u64)>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeAttrs {
    pub unit_type: UnitType,
    /// Publications naming the unit.
    pub publications: u64,
    pub betweenness: Option<f64>,
}

/// Weighted undirected co-occurrence graph, keyed by unit name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OrgNetwork {
    nodes: BTreeMap<String, NodeAttrs>,
    // keys ordered (smaller, larger)
    edges: BTreeMap<(String, String), u64>,
}

fn edge_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl OrgNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Assemble a network from explicit nodes `(unit, P)` and edges
    /// `(a, b, weight)`, checking every structural invariant.
    pub fn from_parts<N, E>(nodes: N, edges: E) -> Result<Self, NetworkError>
    where
        N: IntoIterator<Item = (CanonicalUnit, u64)>,
        E: IntoIterator<Item = (String, String, u64)>,
    {
        let mut net = OrgNetwork::new();
        for (unit, publications) in nodes {
            if net.nodes.contains_key(&unit.name) {
                return Err(NetworkError::Duplicate(format!("node `{}`", unit.name)));
            }
            net.nodes.insert(
                unit.name,
                NodeAttrs {
                    unit_type: unit.unit_type,
                    publications,
                    betweenness: None,
                },
            );
        }
        for (a, b, weight) in edges {
            if a == b {
                return Err(NetworkError::SelfLoop(a));
            }
            if weight == 0 {
                return Err(NetworkError::ZeroWeight(a, b));
            }
            let (pa, pb) = match (net.nodes.get(&a), net.nodes.get(&b)) {
                (Some(x), Some(y)) => (x.publications, y.publications),
                _ => return Err(NetworkError::UnknownNode(a, b)),
            };
            if weight > pa.min(pb) {
                return Err(NetworkError::WeightAboveP { a, b, weight });
            }
            if net.edges.insert(edge_key(&a, &b), weight).is_some() {
                return Err(NetworkError::Duplicate(format!("edge `{a}` -- `{b}`")));
            }
        }
        Ok(net)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (&str, &NodeAttrs)> {
        self.nodes.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn node(&self, name: &str) -> Option<&NodeAttrs> {
        self.nodes.get(name)
    }

    /// Edges as `(a, b, weight)` with `a < b`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.edges.iter().map(|((a, b), w)| (a.as_str(), b.as_str(), *w))
    }

    pub fn weight(&self, a: &str, b: &str) -> Option<u64> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    pub fn degree(&self, name: &str) -> usize {
        self.edges
            .keys()
            .filter(|(a, b)| a == name || b == name)
            .count()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Copy of the network with every node's betweenness filled in.
    pub fn with_betweenness(&self, metric: PathMetric) -> OrgNetwork {
        let scores = betweenness_with(self, metric);
        let mut net = self.clone();
        for (name, attrs) in net.nodes.iter_mut() {
            attrs.betweenness = scores.get(name).copied();
        }
        net
    }

    /// Node names in index order together with weighted adjacency lists.
    fn indexed(&self) -> (Vec<&str>, Adjacency) {
        let names: Vec<&str> = self.nodes.keys().map(String::as_str).collect();
        let index: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut adj = vec![Vec::new(); names.len()];
        for ((a, b), w) in &self.edges {
            let (i, j) = (index[a.as_str()], index[b.as_str()]);
            adj[i].push((j, *w));
            adj[j].push((i, *w));
        }
        (names, adj)
    }
}

/// Co-occurrence network over per-publication unit sets. Each publication
/// adds 1 to every unordered pair of distinct units it names.
pub fn build_network(unit_sets: &[BTreeSet<CanonicalUnit>]) -> OrgNetwork {
    let mut net = OrgNetwork::new();
    for set in unit_sets {
        // one entry per name even if a caller passes mixed types
        let names: BTreeMap<&str, UnitType> = set.iter().map(|u| (u.name.as_str(), u.unit_type)).collect();
        for (name, unit_type) in &names {
            net.nodes
                .entry(name.to_string())
                .or_insert(NodeAttrs {
                    unit_type: *unit_type,
                    publications: 0,
                    betweenness: None,
                })
                .publications += 1;
        }
        let names: Vec<&str> = names.into_keys().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                *net.edges.entry(edge_key(a, b)).or_insert(0) += 1;
            }
        }
    }
    net
}

/// Display cutoff for edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Threshold {
    pub min_weight: u64,
    /// Keep `weight > min_weight`; otherwise keep `weight >= min_weight`.
    pub strict: bool,
    /// Remove nodes left without edges.
    pub drop_isolated: bool,
}

impl Threshold {
    /// `weight > min_weight`, isolated nodes removed.
    pub fn strict(min_weight: u64) -> Self {
        Self {
            min_weight,
            strict: true,
            drop_isolated: true,
        }
    }

    pub fn keeps(&self, weight: u64) -> bool {
        if self.strict {
            weight > self.min_weight
        } else {
            weight >= self.min_weight
        }
    }
}

pub fn apply_threshold(net: &OrgNetwork, threshold: &Threshold) -> OrgNetwork {
    let edges: BTreeMap<(String, String), u64> = net
        .edges
        .iter()
        .filter(|(_, w)| threshold.keeps(**w))
        .map(|(k, w)| (k.clone(), *w))
        .collect();
    let nodes = if threshold.drop_isolated {
        let touched: BTreeSet<&str> = edges
            .keys()
            .flat_map(|(a, b)| [a.as_str(), b.as_str()])
            .collect();
        net.nodes
            .iter()
            .filter(|(n, _)| touched.contains(n.as_str()))
            .map(|(n, a)| (n.clone(), a.clone()))
            .collect()
    } else {
        net.nodes.clone()
    };
    OrgNetwork { nodes, edges }
}

/// Maximal connected node sets, largest first, ties by smallest member.
/// Members are sorted.
pub fn connected_components(net: &OrgNetwork) -> Vec<Vec<String>> {
    let (names, adj) = net.indexed();
    let mut seen = vec![false; names.len()];
    let mut components = Vec::new();
    for start in 0..names.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        let mut members: Vec<String> = members.into_iter().map(|i| names[i].to_string()).collect();
        members.sort();
        components.push(members);
    }
    components.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a[0].cmp(&b[0])));
    components
}

/// How path length is measured for betweenness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMetric {
    /// Every edge has length 1.
    #[default]
    Hops,
    /// Edge length `1 / weight`; exploratory only.
    InverseWeight,
}

impl FromStr for PathMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hops" => Ok(PathMetric::Hops),
            "inverse_weight" | "inverse-weight" => Ok(PathMetric::InverseWeight),
            _ => Err(format!("unknown path metric `{s}`")),
        }
    }
}

/// Unnormalized shortest-path betweenness on the unweighted skeleton.
pub fn betweenness(net: &OrgNetwork) -> BTreeMap<String, f64> {
    betweenness_with(net, PathMetric::Hops)
}

// Sources per parallel work item. Fixed so the summation order, and with it
// every bit of the result, does not depend on the thread count.
const SOURCE_CHUNK: usize = 32;

/// Brandes accumulation over all sources. For an undirected graph every
/// unordered pair is seen from both ends, hence the final halving.
pub fn betweenness_with(net: &OrgNetwork, metric: PathMetric) -> BTreeMap<String, f64> {
    let (names, adj) = net.indexed();
    let n = names.len();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            for &s in chunk {
                let dependency = match metric {
                    PathMetric::Hops => single_source_hops(&adj, s),
                    PathMetric::InverseWeight => single_source_weighted(&adj, s),
                };
                for (a, d) in acc.iter_mut().zip(dependency) {
                    *a += d;
                }
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; n];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    names
        .into_iter()
        .zip(total)
        .map(|(name, b)| (name.to_string(), b / 2.0))
        .collect()
}

/// Dependencies of source `s` on every other node, BFS version.
fn single_source_hops(adj: &[Vec<(usize, u64)>], s: usize) -> Vec<f64> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    sigma[s] = 1.0;
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, _) in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    accumulate(&order, &preds, &sigma, s)
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // min-heap on distance
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Dependencies of source `s`, Dijkstra version with edge length 1/weight.
fn single_source_weighted(adj: &[Vec<(usize, u64)>], s: usize) -> Vec<f64> {
    const TOL: f64 = 1e-12;
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    sigma[s] = 1.0;
    dist[s] = 0.0;
    let mut heap = BinaryHeap::from([HeapItem(0.0, s)]);
    while let Some(HeapItem(d, v)) = heap.pop() {
        if done[v] || d > dist[v] {
            continue;
        }
        done[v] = true;
        order.push(v);
        for &(w, weight) in &adj[v] {
            let candidate = dist[v] + 1.0 / weight as f64;
            let scale = TOL * candidate.max(1.0);
            if candidate < dist[w] - scale {
                dist[w] = candidate;
                sigma[w] = sigma[v];
                preds[w] = vec![v];
                heap.push(HeapItem(candidate, w));
            } else if (candidate - dist[w]).abs() <= scale && !done[w] {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    accumulate(&order, &preds, &sigma, s)
}

fn accumulate(order: &[usize], preds: &[Vec<usize>], sigma: &[f64], s: usize) -> Vec<f64> {
    let mut delta = vec![0.0f64; sigma.len()];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphFormat {
    Graphml,
    Dot,
    EdgeCsv,
    NodeCsv,
}

impl GraphFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::Graphml => "graphml",
            GraphFormat::Dot => "dot",
            GraphFormat::EdgeCsv | GraphFormat::NodeCsv => "csv",
        }
    }
}

/// Fill colour used for a unit type in GraphML and DOT exports.
pub fn type_color(unit_type: UnitType) -> &'static str {
    match unit_type {
        UnitType::Department => "#1f77b4",
        UnitType::Faculty => "#ff7f0e",
        UnitType::School => "#2ca02c",
        UnitType::ResearchCenter => "#d62728",
        UnitType::ResearchGroup => "#9467bd",
        UnitType::Unit => "#8c564b",
        UnitType::Laboratory => "#e377c2",
        UnitType::Hospital => "#17becf",
        UnitType::Other => "#7f7f7f",
    }
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Serialize the network in the given format.
pub fn render_graph(net: &OrgNetwork, format: GraphFormat) -> String {
    match format {
        GraphFormat::Graphml => render_graphml(net),
        GraphFormat::Dot => render_dot(net),
        GraphFormat::EdgeCsv => render_edge_csv(net),
        GraphFormat::NodeCsv => render_node_csv(net),
    }
}

pub fn export_graph(net: &OrgNetwork, format: GraphFormat, path: &Path) -> Result<(), NetworkError> {
    let write = || -> io::Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(render_graph(net, format).as_bytes())?;
        file.flush()
    };
    write().map_err(|source| NetworkError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn xml_escape(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

fn render_graphml(net: &OrgNetwork) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, target, ty) in [
        ("name", "node", "string"),
        ("type", "node", "string"),
        ("color", "node", "string"),
        ("P", "node", "int"),
        ("betweenness", "node", "double"),
        ("size", "node", "double"),
        ("weight", "edge", "int"),
    ] {
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"{target}\" attr.name=\"{id}\" attr.type=\"{ty}\"/>"
        );
    }
    out.push_str("  <graph id=\"orgnet\" edgedefault=\"undirected\">\n");
    let mut ids = BTreeMap::new();
    for (i, (name, attrs)) in net.nodes().enumerate() {
        ids.insert(name, i);
        let _ = writeln!(out, "    <node id=\"n{i}\">");
        let _ = writeln!(out, "      <data key=\"name\">{}</data>", xml_escape(name));
        let _ = writeln!(out, "      <data key=\"type\">{}</data>", attrs.unit_type);
        let _ = writeln!(out, "      <data key=\"color\">{}</data>", type_color(attrs.unit_type));
        let _ = writeln!(out, "      <data key=\"P\">{}</data>", attrs.publications);
        if let Some(b) = attrs.betweenness {
            let _ = writeln!(out, "      <data key=\"betweenness\">{}</data>", fmt6(b));
            let _ = writeln!(out, "      <data key=\"size\">{}</data>", fmt6(b));
        }
        out.push_str("    </node>\n");
    }
    for (i, (a, b, w)) in net.edges().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\">\n      <data key=\"weight\">{w}</data>\n    </edge>",
            ids[a], ids[b]
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn render_dot(net: &OrgNetwork) -> String {
    let max_b = net
        .nodes()
        .filter_map(|(_, a)| a.betweenness)
        .fold(0.0f64, f64::max);
    let mut out = String::from("graph orgnet {\n  node [shape=circle, style=filled, fixedsize=true];\n");
    for (name, attrs) in net.nodes() {
        let _ = write!(
            out,
            "  {} [type=\"{}\", fillcolor=\"{}\", P={}",
            dot_quote(name),
            attrs.unit_type,
            type_color(attrs.unit_type),
            attrs.publications
        );
        if let Some(b) = attrs.betweenness {
            let width = if max_b > 0.0 { 0.3 + 1.7 * b / max_b } else { 0.3 };
            let _ = write!(out, ", betweenness=\"{}\", width=\"{}\"", fmt6(b), fmt6(width));
        }
        out.push_str("];\n");
    }
    for (a, b, w) in net.edges() {
        let _ = writeln!(out, "  {} -- {} [weight={w}, penwidth={w}];", dot_quote(a), dot_quote(b));
    }
    out.push_str("}\n");
    out
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> String {
    // writing into a Vec cannot fail
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("UTF-8 CSV")
}

fn render_edge_csv(net: &OrgNetwork) -> String {
    let mut w = csv_writer();
    let _ = w.write_record(["source", "target", "weight"]);
    for (a, b, weight) in net.edges() {
        let _ = w.write_record([a, b, &weight.to_string()]);
    }
    finish_csv(w)
}

fn render_node_csv(net: &OrgNetwork) -> String {
    let mut w = csv_writer();
    let _ = w.write_record(["name", "type", "P", "betweenness"]);
    for (name, attrs) in net.nodes() {
        let b = attrs.betweenness.map(fmt6).unwrap_or_default();
        let _ = w.write_record([name, attrs.unit_type.as_str(), &attrs.publications.to_string(), &b]);
    }
    finish_csv(w)
}

fn format_err(e: impl std::fmt::Display) -> NetworkError {
    NetworkError::Format(e.to_string())
}

type ParsedNodes = Vec<(CanonicalUnit, u64, Option<f64>)>;

fn assemble(nodes: ParsedNodes, edges: Vec<(String, String, u64)>) -> Result<OrgNetwork, NetworkError> {
    let betweenness: BTreeMap<String, Option<f64>> =
        nodes.iter().map(|(u, _, b)| (u.name.clone(), *b)).collect();
    let mut net = OrgNetwork::from_parts(nodes.into_iter().map(|(u, p, _)| (u, p)), edges)?;
    for (name, attrs) in net.nodes.iter_mut() {
        attrs.betweenness = betweenness[name];
    }
    Ok(net)
}

/// Read back the node and edge tables written by the CSV exports.
pub fn read_csv_tables(node_csv: &str, edge_csv: &str) -> Result<OrgNetwork, NetworkError> {
    let mut nodes = Vec::new();
    for row in csv::Reader::from_reader(node_csv.as_bytes()).records() {
        let row = row.map_err(format_err)?;
        if row.len() != 4 {
            return Err(format_err("node row needs name,type,P,betweenness"));
        }
        let b = if row[3].is_empty() { None } else { Some(row[3].parse::<f64>().map_err(format_err)?) };
        nodes.push((
            CanonicalUnit {
                name: row[0].to_string(),
                unit_type: row[1].parse().map_err(format_err)?,
            },
            row[2].parse().map_err(format_err)?,
            b,
        ));
    }
    let mut edges = Vec::new();
    for row in csv::Reader::from_reader(edge_csv.as_bytes()).records() {
        let row = row.map_err(format_err)?;
        if row.len() != 3 {
            return Err(format_err("edge row needs source,target,weight"));
        }
        edges.push((row[0].to_string(), row[1].to_string(), row[2].parse().map_err(format_err)?));
    }
    assemble(nodes, edges)
}

fn attr(e: &BytesStart, key: &[u8]) -> Result<Option<String>, NetworkError> {
    for a in e.attributes() {
        let a = a.map_err(format_err)?;
        if a.key.as_ref() == key {
            return Ok(Some(a.unescape_value().map_err(format_err)?.into_owned()));
        }
    }
    Ok(None)
}

/// Read a GraphML file written by [`render_graphml`].
pub fn read_graphml(text: &str) -> Result<OrgNetwork, NetworkError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(true);

    // node id -> data key -> value
    let mut node_data: Vec<(String, BTreeMap<String, String>)> = Vec::new();
    let mut edge_data: Vec<(String, String, BTreeMap<String, String>)> = Vec::new();
    let mut key_names: BTreeMap<String, String> = BTreeMap::new();
    let mut current_key: Option<String> = None;
    let mut in_edge = false;

    loop {
        match reader.read_event().map_err(format_err)? {
            Event::Eof => break,
            Event::Start(e) | Event::Empty(e) => match e.name().as_ref() {
                b"key" => {
                    let id = attr(&e, b"id")?.ok_or_else(|| format_err("key without id"))?;
                    let name = attr(&e, b"attr.name")?.unwrap_or_else(|| id.clone());
                    key_names.insert(id, name);
                }
                b"node" => {
                    let id = attr(&e, b"id")?.ok_or_else(|| format_err("node without id"))?;
                    node_data.push((id, BTreeMap::new()));
                    in_edge = false;
                }
                b"edge" => {
                    let s = attr(&e, b"source")?.ok_or_else(|| format_err("edge without source"))?;
                    let t = attr(&e, b"target")?.ok_or_else(|| format_err("edge without target"))?;
                    edge_data.push((s, t, BTreeMap::new()));
                    in_edge = true;
                }
                b"data" => current_key = attr(&e, b"key")?,
                _ => {}
            },
            Event::Text(t) => {
                if let Some(key) = current_key.take() {
                    let value = t.unescape().map_err(format_err)?.into_owned();
                    let key = key_names.get(&key).cloned().unwrap_or(key);
                    let target = if in_edge {
                        edge_data.last_mut().map(|e| &mut e.2)
                    } else {
                        node_data.last_mut().map(|n| &mut n.1)
                    };
                    if let Some(map) = target {
                        map.insert(key, value);
                    }
                }
            }
            Event::End(e) if e.name().as_ref() == b"data" => current_key = None,
            _ => {}
        }
    }

    let mut names = BTreeMap::new();
    let mut nodes = Vec::new();
    for (id, data) in node_data {
        let name = data.get("name").cloned().unwrap_or_else(|| id.clone());
        let unit_type = match data.get("type") {
            Some(t) => t.parse().map_err(format_err)?,
            None => UnitType::Other,
        };
        let p = data.get("P").map(|p| p.parse::<u64>()).transpose().map_err(format_err)?.unwrap_or(0);
        let b = data.get("betweenness").map(|b| b.parse::<f64>()).transpose().map_err(format_err)?;
        names.insert(id, name.clone());
        nodes.push((CanonicalUnit { name, unit_type }, p, b));
    }
    let mut edges = Vec::new();
    for (s, t, data) in edge_data {
        let lookup = |id: &String| names.get(id).cloned().ok_or_else(|| format_err(format!("unknown node id `{id}`")));
        let w = data.get("weight").map(|w| w.parse::<u64>()).transpose().map_err(format_err)?.unwrap_or(1);
        edges.push((lookup(&s)?, lookup(&t)?, w));
    }
    assemble(nodes, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{dedupe_units, TypeRuleSet};
    use proptest::prelude::*;

    fn sets(records: &[&[&str]]) -> Vec<BTreeSet<CanonicalUnit>> {
        let rules = TypeRuleSet::default();
        records.iter().map(|r| dedupe_units(r, &rules)).collect()
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> OrgNetwork {
        let nodes = (0..n).map(|i| {
            (
                CanonicalUnit { name: format!("N{i}"), unit_type: UnitType::Other },
                100,
            )
        });
        let edges = edges.iter().map(|&(a, b)| (format!("N{a}"), format!("N{b}"), 1));
        OrgNetwork::from_parts(nodes, edges).unwrap()
    }

    #[test]
    fn build_counts_publications_and_pairs() {
        let net = build_network(&sets(&[&["A", "B"], &["A", "B"], &["A"]]));
        assert_eq!(net.weight("A", "B"), Some(2));
        assert_eq!(net.weight("B", "A"), Some(2));
        assert_eq!(net.node("A").unwrap().publications, 3);
        assert_eq!(net.node("B").unwrap().publications, 2);
    }

    #[test]
    fn singletons_give_no_edges_and_triples_a_triangle() {
        assert_eq!(build_network(&sets(&[&["A"], &["B"]])).edge_count(), 0);
        let tri = build_network(&sets(&[&["A", "B", "C"]]));
        assert_eq!(tri.edge_count(), 3);
        assert!(tri.edges().all(|(_, _, w)| w == 1));
    }

    #[test]
    fn strict_threshold() {
        let nodes = ["A", "B", "C", "D"].map(|n| (CanonicalUnit { name: n.into(), unit_type: UnitType::Other }, 10));
        let net = OrgNetwork::from_parts(
            nodes,
            [("A".into(), "B".into(), 5), ("C".into(), "D".into(), 6)],
        )
        .unwrap();
        let shown = apply_threshold(&net, &Threshold::strict(5));
        assert_eq!(shown.edges().collect::<Vec<_>>(), [("C", "D", 6)]);
        assert_eq!(shown.node_count(), 2);

        let unchanged = apply_threshold(&net, &Threshold { min_weight: 0, strict: true, drop_isolated: false });
        assert_eq!(unchanged, net);
        let inclusive = apply_threshold(&net, &Threshold { min_weight: 5, strict: false, drop_isolated: true });
        assert_eq!(inclusive.edge_count(), 2);
    }

    #[test]
    fn from_parts_rejects_broken_networks() {
        let nodes = || ["A", "B"].map(|n| (CanonicalUnit { name: n.into(), unit_type: UnitType::Other }, 2));
        assert!(matches!(
            OrgNetwork::from_parts(nodes(), [("A".into(), "A".into(), 1)]),
            Err(NetworkError::SelfLoop(_))
        ));
        assert!(matches!(
            OrgNetwork::from_parts(nodes(), [("A".into(), "B".into(), 3)]),
            Err(NetworkError::WeightAboveP { .. })
        ));
        assert!(matches!(
            OrgNetwork::from_parts(nodes(), [("A".into(), "C".into(), 1)]),
            Err(NetworkError::UnknownNode(..))
        ));
        assert!(matches!(
            OrgNetwork::from_parts(nodes(), [("A".into(), "B".into(), 1), ("B".into(), "A".into(), 1)]),
            Err(NetworkError::Duplicate(_))
        ));
    }

    #[test]
    fn components_are_ordered() {
        assert_eq!(connected_components(&graph(3, &[])).len(), 3);
        let comps = connected_components(&graph(4, &[(0, 1), (1, 2)]));
        assert_eq!(comps, vec![vec!["N0", "N1", "N2"], vec!["N3"]]);
        let comps = connected_components(&graph(7, &[(5, 6), (0, 1), (2, 3), (3, 4)]));
        let sizes: Vec<_> = comps.iter().map(Vec::len).collect();
        assert_eq!(sizes, [3, 2, 2]);
        assert_eq!(comps[1][0], "N0");
    }

    #[test]
    fn betweenness_closed_forms() {
        let path = betweenness(&graph(3, &[(0, 1), (1, 2)]));
        assert_eq!((path["N0"], path["N1"], path["N2"]), (0.0, 1.0, 0.0));

        let star = betweenness(&graph(4, &[(0, 1), (0, 2), (0, 3)]));
        assert_eq!(star["N0"], 3.0);
        assert_eq!(star["N1"], 0.0);

        let cycle = betweenness(&graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]));
        assert!(cycle.values().all(|&b| b == 0.5));

        let complete = betweenness(&graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]));
        assert!(complete.values().all(|&b| b == 0.0));
    }

    #[test]
    fn disconnected_pairs_contribute_nothing() {
        let b = betweenness(&graph(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]));
        assert_eq!(b["N1"], 1.0);
        assert_eq!(b["N4"], 1.0);
    }

    #[test]
    fn inverse_weight_prefers_strong_ties() {
        // A-B-C heavy, A-D-C light: the heavy route carries every A-C path
        let nodes = ["A", "B", "C", "D"].map(|n| (CanonicalUnit { name: n.into(), unit_type: UnitType::Other }, 10));
        let net = OrgNetwork::from_parts(
            nodes,
            [
                ("A".into(), "B".into(), 5),
                ("B".into(), "C".into(), 5),
                ("A".into(), "D".into(), 1),
                ("C".into(), "D".into(), 1),
            ],
        )
        .unwrap();
        let hops = betweenness(&net);
        assert_eq!(hops["B"], 0.5);
        let weighted = betweenness_with(&net, PathMetric::InverseWeight);
        assert!(weighted["B"] > hops["B"]);
        assert_eq!(weighted["D"], 0.0);
    }

    #[test]
    fn empty_network_exports() {
        let net = OrgNetwork::new();
        let gml = render_graph(&net, GraphFormat::Graphml);
        assert_eq!(read_graphml(&gml).unwrap().node_count(), 0);
        assert_eq!(render_graph(&net, GraphFormat::EdgeCsv), "source,target,weight\n");
        assert!(render_graph(&net, GraphFormat::Dot).starts_with("graph orgnet {"));
    }

    #[test]
    fn two_node_round_trip() {
        let net = build_network(&sets(&[&["DEPT OPT", "FAC SCI & \"X\" <Y>"], &["DEPT OPT"]]))
            .with_betweenness(PathMetric::Hops);
        let gml = render_graph(&net, GraphFormat::Graphml);
        assert_eq!(read_graphml(&gml).unwrap(), net);
        let back = read_csv_tables(
            &render_graph(&net, GraphFormat::NodeCsv),
            &render_graph(&net, GraphFormat::EdgeCsv),
        )
        .unwrap();
        assert_eq!(back, net);
    }

    #[test]
    fn edge_csv_rows_match_edges() {
        let net = build_network(&sets(&[&["A", "B", "C"], &["C", "D"], &["E"]]));
        let csv = render_graph(&net, GraphFormat::EdgeCsv);
        assert_eq!(csv.lines().count() - 1, net.edge_count());
        let dot = render_graph(&net.with_betweenness(PathMetric::Hops), GraphFormat::Dot);
        assert_eq!(dot.matches(" -- ").count(), 4);
        assert!(dot.contains("betweenness=\"2.000000\""));
    }

    #[test]
    fn export_to_unwritable_path_fails() {
        let err = export_graph(&OrgNetwork::new(), GraphFormat::Dot, Path::new("/nonexistent/dir/x.dot")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.dot"));
    }

    proptest! {
        #[test]
        fn weight_sum_and_bounds(records in prop::collection::vec(prop::collection::btree_set(0u8..8, 0..5), 0..20)) {
            let names: Vec<Vec<String>> = records.iter().map(|r| r.iter().map(|i| format!("U{i}")).collect()).collect();
            let rules = TypeRuleSet::default();
            let unit_sets: Vec<_> = names.iter().map(|r| dedupe_units(r, &rules)).collect();
            let net = build_network(&unit_sets);
            let expected: u64 = unit_sets.iter().map(|s| { let k = s.len() as u64; k * k.saturating_sub(1) / 2 }).sum();
            prop_assert_eq!(net.total_weight(), expected);
            for (a, b, w) in net.edges() {
                prop_assert!(a < b);
                prop_assert!(w <= net.node(a).unwrap().publications.min(net.node(b).unwrap().publications));
            }
            let mut last = (usize::MAX, usize::MAX);
            for m in 0..6 {
                let t = apply_threshold(&net, &Threshold::strict(m));
                let cur = (t.node_count(), t.edge_count());
                prop_assert!(cur.0 <= last.0 && cur.1 <= last.1);
                last = cur;
            }
        }

        #[test]
        fn tree_leaves_have_zero_betweenness(parents in prop::collection::vec(any::<prop::sample::Index>(), 1..12)) {
            let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
            let net = graph(parents.len() + 1, &edges);
            let b = betweenness(&net);
            for (name, score) in &b {
                if net.degree(name) == 1 {
                    prop_assert_eq!(*score, 0.0);
                }
            }
        }
    }
}
