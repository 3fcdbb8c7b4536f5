//! Research profiles over subject categories and over an aggregated
//! discipline system, with Gini concentration and the indicator table.

use std::collections::BTreeSet;

use orgprofile::normalize::{CanonicalUnit, TypeRuleSet};
use orgprofile::orgnet::{build_network, PathMetric};
use orgprofile::profiles::{
    build_profiles, gini, indicator_table, render_indicator_markdown, ClassificationSystem, TableOptions,
};

const CATEGORIES: &str = "\
MATH\tMathematics
MATH APPL\tMathematics, Applied
STAT\tStatistics & Probability
PHYS\tPhysics, Multidisciplinary
OPTICS\tOptics
";

const MAPPING: &str = "\
sc_code,discipline
MATH,Mathematics
MATH APPL,Mathematics
STAT,Mathematics
PHYS,Physics
OPTICS,Physics
";

const PAPERS: &[(&[&str], &[&str])] = &[
    (&["DEPT MATH ANAL"], &["MATH"]),
    (&["DEPT MATH ANAL"], &["MATH", "MATH APPL"]),
    (&["DEPT MATH ANAL", "DEPT STAT"], &["STAT"]),
    (&["DEPT STAT"], &["STAT", "MATH APPL"]),
    (&["DEPT STAT", "DEPT OPT"], &["OPTICS", "STAT"]),
    (&["DEPT OPT"], &["OPTICS"]),
    (&["DEPT OPT", "DEPT APPL PHYS"], &["PHYS", "OPTICS"]),
    (&["DEPT APPL PHYS"], &["PHYS"]),
    (&["DEPT APPL PHYS"], &["MATH APPL"]),
];

fn main() {
    let sc = ClassificationSystem::parse_categories("SC", CATEGORIES).unwrap();
    let disc = ClassificationSystem::parse_aggregation("disc", &sc, MAPPING).unwrap();
    let rules = TypeRuleSet::default();

    let records: Vec<(BTreeSet<CanonicalUnit>, BTreeSet<String>)> = PAPERS
        .iter()
        .map(|(units, codes)| {
            let units = units
                .iter()
                .map(|n| CanonicalUnit {
                    name: n.to_string(),
                    unit_type: rules.classify(n),
                })
                .collect();
            (units, codes.iter().map(|c| c.to_string()).collect())
        })
        .collect();

    let pairs = || records.iter().map(|(u, c)| (u, c));
    let sc_profiles = build_profiles(pairs(), &sc);
    let disc_profiles = build_profiles(pairs(), &disc);

    for (name, profile) in &sc_profiles {
        let g = gini(profile).map_or("-".to_string(), |g| format!("{g:.3}"));
        println!("{name:<16} {:?}  G_sc={g}", profile.counts);
    }

    let unit_sets: Vec<_> = records.iter().map(|(u, _)| u.clone()).collect();
    let network = build_network(&unit_sets).with_betweenness(PathMetric::Hops);
    let options = TableOptions {
        min_publications: 0,
        unit_type: None,
    };
    let rows = indicator_table(&network, &sc_profiles, &disc_profiles, &options);
    println!("\n{}", render_indicator_markdown(&rows, &sc, &disc));

}
