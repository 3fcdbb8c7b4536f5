//! Canonicalize unit-name variants with an alias table, type them, and
//! tabulate the unit-type distribution. Ends with alias suggestions for
//! the variants the table does not cover yet.

use std::collections::{BTreeMap, BTreeSet};

use orgprofile::address::{normalize_name, parse_address};
use orgprofile::normalize::{
    canonicalize, dedupe_units, render_suggestions, suggest_aliases, type_distribution, AliasTable,
    CanonicalUnit, TypeRuleSet,
};

const ALIASES: &str = "\
# variant\tcanonical
DEPT MATH ANALYSIS\tDEPT MATH ANAL
DPTO ANALISIS MATEMATICO\tDEPT MATH ANAL
FAC CIENCIAS\tFAC SCI
";

const PAPERS: &[&[&str]] = &[
    &["Univ Granada, Fac Sci, Dept Math Anal, E-18071 Granada, Spain"],
    &[
        "Univ Granada, Dept Math Analysis, E-18071 Granada, Spain",
        "Univ Granada, Dpto Analisis Matematico, E-18071 Granada, Spain",
    ],
    &["Univ Granada, Fac Ciencias, Dept Appl Phys, E-18071 Granada, Spain"],
    &["Univ Granada, Dept Applied Phys, E-18071 Granada, Spain"],
    &["Univ Granada, Inst Biotechnol, Res Grp Mol Genet, E-18071 Granada, Spain"],
];

fn main() {
    let aliases = AliasTable::parse(ALIASES).expect("alias table is consistent");
    let rules = TypeRuleSet::default();

    let mut raw: BTreeMap<String, usize> = BTreeMap::new();
    let mut unit_sets: Vec<BTreeSet<CanonicalUnit>> = Vec::new();
    for addresses in PAPERS {
        let mut names = Vec::new();
        for address in *addresses {
            for token in parse_address(address).unwrap().unit_tokens {
                *raw.entry(normalize_name(&token)).or_default() += 1;
                names.push(canonicalize(&token, &aliases));
            }
        }
        let units = dedupe_units(&names, &rules);
        println!("{:?}", units.iter().map(|u| format!("{} [{}]", u.name, u.unit_type)).collect::<Vec<_>>());
        unit_sets.push(units);
    }

    println!("\ntype,publications,share_pct,units");
    for share in type_distribution(&unit_sets).iter().filter(|s| s.publications > 0) {
        println!("{},{},{:.1},{}", share.unit_type, share.publications, share.share_pct, share.units);
    }

    println!("\nsuggested aliases:");
    print!("{}", render_suggestions(&suggest_aliases(&raw, 3)));
}
