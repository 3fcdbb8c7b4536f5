//! Build a unit co-occurrence network, compute betweenness, threshold it
//! for display, and print it as DOT. Pass a directory to also write
//! GraphML and CSV tables there.

use std::collections::BTreeSet;
use std::path::PathBuf;

use orgprofile::normalize::{CanonicalUnit, TypeRuleSet};
use orgprofile::orgnet::{
    apply_threshold, build_network, connected_components, export_graph, render_graph, GraphFormat, PathMetric,
    Threshold,
};

const PAPERS: &[&[&str]] = &[
    &["FAC SCI", "DEPT MATH ANAL"],
    &["FAC SCI", "DEPT MATH ANAL"],
    &["FAC SCI", "DEPT MATH ANAL", "DEPT APPL PHYS"],
    &["FAC SCI", "DEPT APPL PHYS"],
    &["DEPT APPL PHYS", "INST CARLOS I THEORET & COMPUTAT PHYS"],
    &["DEPT COMP SCI", "ETS INGN INFORMAT"],
    &["DEPT COMP SCI", "ETS INGN INFORMAT"],
    &["FAC MED", "DEPT BIOCHEM", "HOSP UNIV SAN CECILIO"],
    &["DEPT BIOCHEM"],
];

fn main() {
    let rules = TypeRuleSet::default();
    let unit_sets: Vec<BTreeSet<CanonicalUnit>> = PAPERS
        .iter()
        .map(|names| {
            names
                .iter()
                .map(|n| CanonicalUnit {
                    name: n.to_string(),
                    unit_type: rules.classify(n),
                })
                .collect()
        })
        .collect();

    let network = build_network(&unit_sets).with_betweenness(PathMetric::Hops);
    println!("{} units, {} links, total weight {}", network.node_count(), network.edge_count(), network.total_weight());
    for (i, component) in connected_components(&network).iter().enumerate() {
        println!("component {}: {}", i + 1, component.join("; "));
    }
    for (name, attrs) in network.nodes() {
        println!("{name:<40} P={} B={:.2}", attrs.publications, attrs.betweenness.unwrap_or(0.0));
    }

    let display = apply_threshold(&network, &Threshold::strict(1));
    println!("\n{}", render_graph(&display, GraphFormat::Dot));

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir).unwrap();
        for format in [GraphFormat::Graphml, GraphFormat::NodeCsv, GraphFormat::EdgeCsv] {
            let name = match format {
                GraphFormat::NodeCsv => "nodes.csv".to_string(),
                GraphFormat::EdgeCsv => "edges.csv".to_string(),
                _ => format!("network.{}", format.extension()),
            };
            export_graph(&network, format, &dir.join(&name)).unwrap();
            println!("wrote {}", dir.join(name).display());
        }
    }
}
