//! Unit-name canonicalization and typing.
//!
//! Alias tables are curated by hand (`variant<TAB>canonical`); the
//! [`suggest_aliases`] helper only proposes groups for review.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::address::normalize_name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitType {
    Department,
    Faculty,
    School,
    ResearchCenter,
    ResearchGroup,
    Unit,
    Laboratory,
    Hospital,
    Other,
}

impl UnitType {
    pub const ALL: [UnitType; 9] = [
        UnitType::Department,
        UnitType::Faculty,
        UnitType::School,
        UnitType::ResearchCenter,
        UnitType::ResearchGroup,
        UnitType::Unit,
        UnitType::Laboratory,
        UnitType::Hospital,
        UnitType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            UnitType::Department => "department",
            UnitType::Faculty => "faculty",
            UnitType::School => "school",
            UnitType::ResearchCenter => "research_center",
            UnitType::ResearchGroup => "research_group",
            UnitType::Unit => "unit",
            UnitType::Laboratory => "laboratory",
            UnitType::Hospital => "hospital",
            UnitType::Other => "other",
        }
    }
}

impl fmt::Display for UnitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UnitType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
        UnitType::ALL
            .into_iter()
            .find(|t| t.as_str() == key)
            .ok_or_else(|| format!("unknown unit type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalUnit {
    pub name: String,
    pub unit_type: UnitType,
}

/// A problem found while loading an alias or type-rule file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableIssue {
    pub line: usize,
    /// The earlier line the problem involves, if any.
    pub other_line: Option<usize>,
    pub message: String,
}

impl fmt::Display for TableIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.other_line {
            Some(other) => write!(f, "lines {other} and {}: {}", self.line, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{} problem(s) in {path}: {}", issues.len(), join_issues(issues))]
    Invalid { path: String, issues: Vec<TableIssue> },
}

fn join_issues(issues: &[TableIssue]) -> String {
    issues.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

fn read_table(path: &Path) -> Result<String, TableError> {
    fs::read_to_string(path).map_err(|e| TableError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Content lines of a `#`-commented TSV, with 1-based line numbers.
fn tsv_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// Variant name to canonical name. Never chained: a canonical name is
/// either absent from the keys or maps to itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasTable {
    entries: BTreeMap<String, String>,
}

impl AliasTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from `(variant, canonical)` pairs; the pair index (1-based)
    /// stands in for a line number in reported issues.
    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self, Vec<TableIssue>>
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        let numbered = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| (i + 1, a.as_ref().to_string(), b.as_ref().to_string()));
        Self::build(numbered, Vec::new())
    }

    /// Parse `variant<TAB>canonical` lines. Every problem is reported, each
    /// with its line number.
    pub fn parse(text: &str) -> Result<Self, Vec<TableIssue>> {
        let mut pairs = Vec::new();
        let mut issues = Vec::new();
        for (line, content) in tsv_lines(text) {
            let cols: Vec<&str> = content.split('\t').collect();
            if cols.len() != 2 {
                issues.push(TableIssue {
                    line,
                    other_line: None,
                    message: format!("expected `variant<TAB>canonical`, found {} column(s)", cols.len()),
                });
                continue;
            }
            pairs.push((line, cols[0].to_string(), cols[1].to_string()));
        }
        Self::build(pairs, issues)
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        Self::parse(&read_table(path)?).map_err(|issues| TableError::Invalid {
            path: path.display().to_string(),
            issues,
        })
    }

    fn build(
        pairs: impl IntoIterator<Item = (usize, String, String)>,
        mut issues: Vec<TableIssue>,
    ) -> Result<Self, Vec<TableIssue>> {
        let mut entries: BTreeMap<String, (String, usize)> = BTreeMap::new();
        for (line, variant, canonical) in pairs {
            let variant = normalize_name(&variant);
            let canonical = normalize_name(&canonical);
            if variant.is_empty() || canonical.is_empty() {
                issues.push(TableIssue {
                    line,
                    other_line: None,
                    message: "empty variant or canonical name".to_string(),
                });
                continue;
            }
            match entries.get(&variant) {
                Some((existing, _)) if *existing == canonical => {}
                Some((existing, first)) => issues.push(TableIssue {
                    line,
                    other_line: Some(*first),
                    message: format!(
                        "conflicting alias: `{variant}` maps to both `{existing}` and `{canonical}`"
                    ),
                }),
                None => {
                    entries.insert(variant, (canonical, line));
                }
            }
        }

        for (variant, (canonical, line)) in &entries {
            if let Some((next, next_line)) = entries.get(canonical) {
                if next != canonical {
                    let (first, second) = if next_line < line {
                        (*next_line, *line)
                    } else {
                        (*line, *next_line)
                    };
                    issues.push(TableIssue {
                        line: second,
                        other_line: Some(first),
                        message: format!(
                            "chained alias: `{variant}` -> `{canonical}` -> `{next}`"
                        ),
                    });
                }
            }
        }

        if issues.is_empty() {
            Ok(Self {
                entries: entries.into_iter().map(|(k, (v, _))| (k, v)).collect(),
            })
        } else {
            issues.sort_by_key(|i| (i.line, i.other_line));
            Err(issues)
        }
    }

    pub fn get(&self, variant: &str) -> Option<&str> {
        self.entries.get(variant).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// The chosen designation for a unit-name token.
pub fn canonicalize(token: &str, aliases: &AliasTable) -> String {
    let token = normalize_name(token);
    match aliases.get(&token) {
        Some(canonical) => canonical.to_string(),
        None => token,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRule {
    /// Whole words that must appear contiguously in the name.
    pub words: Vec<String>,
    /// Only match at the start of the name.
    pub anchored: bool,
    pub unit_type: UnitType,
}

impl TypeRule {
    /// `pattern` is one or more words; a leading `^` anchors it to the start
    /// of the name.
    pub fn new(pattern: &str, unit_type: UnitType) -> Self {
        let (anchored, pattern) = match pattern.trim().strip_prefix('^') {
            Some(rest) => (true, rest),
            None => (false, pattern),
        };
        Self {
            words: pattern.split_whitespace().map(str::to_uppercase).collect(),
            anchored,
            unit_type,
        }
    }

    pub fn matches(&self, name_words: &[&str]) -> bool {
        if self.words.is_empty() || self.words.len() > name_words.len() {
            return false;
        }
        let eq = |window: &[&str]| window.iter().zip(&self.words).all(|(a, b)| a == b);
        if self.anchored {
            eq(&name_words[..self.words.len()])
        } else {
            name_words.windows(self.words.len()).any(eq)
        }
    }
}

/// Ordered rules; the first match wins and unmatched names are `other`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRuleSet {
    rules: Vec<TypeRule>,
}

impl Default for TypeRuleSet {
    fn default() -> Self {
        use UnitType::*;
        let rules = [
            ("DEPT", Department),
            ("DPTO", Department),
            ("FAC", Faculty),
            ("SCH", School),
            ("ESCUELA", School),
            ("INST", ResearchCenter),
            ("CTR", ResearchCenter),
            ("CENTRO", ResearchCenter),
            ("GRP", ResearchGroup),
            ("GRUPO", ResearchGroup),
            ("RES GRP", ResearchGroup),
            ("UNIT", Unit),
            ("UNIDAD", Unit),
            ("LAB", Laboratory),
            ("HOSP", Hospital),
        ]
        .into_iter()
        .map(|(p, t)| TypeRule::new(p, t))
        .collect();
        Self { rules }
    }
}

impl TypeRuleSet {
    pub fn new(rules: Vec<TypeRule>) -> Self {
        Self { rules }
    }

    /// `pattern<TAB>type` lines, in priority order.
    pub fn parse(text: &str) -> Result<Self, Vec<TableIssue>> {
        let mut rules = Vec::new();
        let mut issues = Vec::new();
        for (line, content) in tsv_lines(text) {
            let cols: Vec<&str> = content.split('\t').collect();
            let issue = |message: String| TableIssue { line, other_line: None, message };
            if cols.len() != 2 || cols[0].trim().trim_start_matches('^').trim().is_empty() {
                issues.push(issue("expected `pattern<TAB>type`".to_string()));
                continue;
            }
            match cols[1].parse::<UnitType>() {
                Ok(t) => rules.push(TypeRule::new(cols[0], t)),
                Err(e) => issues.push(issue(e)),
            }
        }
        if issues.is_empty() {
            Ok(Self { rules })
        } else {
            Err(issues)
        }
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        Self::parse(&read_table(path)?).map_err(|issues| TableError::Invalid {
            path: path.display().to_string(),
            issues,
        })
    }

    pub fn rules(&self) -> &[TypeRule] {
        &self.rules
    }

    pub fn classify(&self, name: &str) -> UnitType {
        let upper = name.to_uppercase();
        let words: Vec<&str> = upper.split_whitespace().collect();
        self.rules
            .iter()
            .find(|r| r.matches(&words))
            .map_or(UnitType::Other, |r| r.unit_type)
    }
}

pub fn classify_type(name: &str, rules: &TypeRuleSet) -> UnitType {
    rules.classify(name)
}

/// Set of typed units for one publication; repeats across addresses or
/// merged language variants count once.
pub fn dedupe_units<S: AsRef<str>>(canonical_names: &[S], rules: &TypeRuleSet) -> BTreeSet<CanonicalUnit> {
    canonical_names
        .iter()
        .map(AsRef::as_ref)
        .filter(|n| !n.is_empty())
        .map(|name| CanonicalUnit {
            name: name.to_string(),
            unit_type: rules.classify(name),
        })
        .collect()
}

/// `count / total` as a percentage rounded half-up to one decimal, computed
/// in integers so that e.g. 5514/6337 gives exactly 87.0.
pub fn share_percent(count: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let (count, total) = (count as u128, total as u128);
    let tenths = (count * 2000 + total) / (2 * total);
    tenths as f64 / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeShare {
    pub unit_type: UnitType,
    /// Analyzed records naming at least one unit of this type.
    pub publications: usize,
    /// `publications` over all analyzed records, one decimal.
    pub share_pct: f64,
    /// Distinct unit names of this type.
    pub units: usize,
}

/// Per-type publication counts, shares and unit counts over the analyzed
/// records. Shares may add up to more than 100.
pub fn type_distribution(unit_sets: &[BTreeSet<CanonicalUnit>]) -> Vec<TypeShare> {
    let total = unit_sets.len();
    let mut publications: HashMap<UnitType, usize> = HashMap::new();
    let mut names: HashMap<UnitType, BTreeSet<&str>> = HashMap::new();
    for set in unit_sets {
        let types: BTreeSet<UnitType> = set.iter().map(|u| u.unit_type).collect();
        for t in types {
            *publications.entry(t).or_default() += 1;
        }
        for u in set {
            names.entry(u.unit_type).or_default().insert(&u.name);
        }
    }
    UnitType::ALL
        .into_iter()
        .map(|t| {
            let pubs = publications.get(&t).copied().unwrap_or(0);
            TypeShare {
                unit_type: t,
                publications: pubs,
                share_pct: share_percent(pubs, total),
                units: names.get(&t).map_or(0, BTreeSet::len),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AliasSuggestion {
    /// Most frequent member of the group.
    pub canonical: String,
    /// Every member with its occurrence count, most frequent first.
    pub variants: Vec<(String, usize)>,
}

fn squash(name: &str) -> String {
    name.replace('&', "AND")
        .chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_uppercase)
        .collect()
}

/// Group tokens whose alphanumeric skeletons are equal or within
/// `max_distance` edits of each other. Only groups with two or more members
/// are returned.
pub fn suggest_aliases(token_counts: &BTreeMap<String, usize>, max_distance: usize) -> Vec<AliasSuggestion> {
    let tokens: Vec<(&String, usize)> = token_counts.iter().map(|(t, c)| (t, *c)).collect();
    let keys: Vec<String> = tokens.iter().map(|(t, _)| squash(t)).collect();

    let mut parent: Vec<usize> = (0..tokens.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..tokens.len() {
        for j in (i + 1)..tokens.len() {
            let (a, b) = (&keys[i], &keys[j]);
            // short skeletons (acronyms) only group on exact equality
            let close = a == b
                || (a.len().min(b.len()) > 3 * max_distance.max(1)
                    && a.len().abs_diff(b.len()) <= max_distance
                    && strsim::levenshtein(a, b) <= max_distance);
            if close {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<(String, usize)>> = BTreeMap::new();
    for (i, (token, count)) in tokens.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(((*token).clone(), *count));
    }
    groups
        .into_values()
        .filter(|g| g.len() > 1)
        .map(|mut variants| {
            variants.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            AliasSuggestion {
                canonical: variants[0].0.clone(),
                variants,
            }
        })
        .collect()
}

/// Render suggestions as an alias file for review.
pub fn render_suggestions(suggestions: &[AliasSuggestion]) -> String {
    let mut out = String::from("# variant\tcanonical (review before use)\n");
    for s in suggestions {
        let total: usize = s.variants.iter().map(|v| v.1).sum();
        out.push_str(&format!("\n# {} ({} occurrences)\n", s.canonical, total));
        for (variant, count) in &s.variants {
            if *variant != s.canonical {
                out.push_str(&format!("# {count}\n{variant}\t{}\n", s.canonical));
            }
        }
    }
    out
}
