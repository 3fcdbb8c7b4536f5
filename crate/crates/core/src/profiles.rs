//! Research profiles: a unit's publications broken down over the categories
//! of a classification system, and how concentrated that breakdown is.
//!
//! Profiles use full counting (a publication adds one to every category of
//! its journal). Under an aggregated system a publication adds at most one
//! to each target category, however many of its base categories map there.
//!
//! Concentration is the Gini coefficient taken over the whole category
//! universe, zeros included:
//!
//! ```text
//! G = (N + 1) / (N - 1) - 2 / (N (N - 1) mu) * sum_i rank_i * x_i
//! ```
//!
//! with rank 1 for the largest count. A unit publishing in one category
//! only scores 1, an even spread over every category scores 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::normalize::{CanonicalUnit, UnitType};
use crate::orgnet::OrgNetwork;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassificationError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("classification `{0}` has no categories")]
    Empty(String),
    #[error("line {line}: duplicate category `{code}`")]
    DuplicateCategory { line: usize, code: String },
    #[error("line {line}: malformed mapping row, expected `sc_code,discipline`")]
    MalformedMapping { line: usize },
    #[error("line {line}: duplicate mapping `{code}` -> `{target}`")]
    DuplicateMapping { line: usize, code: String, target: String },
    #[error("line {line}: mapping source `{code}` is not a category of `{base}`")]
    UnknownSource { line: usize, code: String, base: String },
}

/// A category universe, optionally defined as an aggregation of a base
/// system's categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationSystem {
    name: String,
    categories: Vec<String>,
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Base category code to target category indices.
    mapping: Option<HashMap<String, Vec<usize>>>,
    unmapped: Vec<String>,
}

impl ClassificationSystem {
    /// A system whose categories are used as they appear on records.
    pub fn flat<I, S>(name: &str, categories: I) -> Result<Self, ClassificationError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let entries: Vec<(String, String)> = categories
            .into_iter()
            .map(|c| (c.as_ref().trim().to_string(), c.as_ref().trim().to_string()))
            .collect();
        Self::from_entries(name, entries.into_iter().enumerate().map(|(i, e)| (i + 1, e)))
    }

    fn from_entries(
        name: &str,
        entries: impl Iterator<Item = (usize, (String, String))>,
    ) -> Result<Self, ClassificationError> {
        let mut categories = Vec::new();
        let mut labels = Vec::new();
        let mut index = HashMap::new();
        for (line, (code, label)) in entries {
            if index.insert(code.clone(), categories.len()).is_some() {
                return Err(ClassificationError::DuplicateCategory { line, code });
            }
            categories.push(code);
            labels.push(label);
        }
        if categories.is_empty() {
            return Err(ClassificationError::Empty(name.to_string()));
        }
        Ok(Self {
            name: name.to_string(),
            categories,
            labels,
            index,
            mapping: None,
            unmapped: Vec::new(),
        })
    }

    /// One category per line: `code<TAB>label`, or just `code`. `#` lines
    /// are comments.
    pub fn parse_categories(name: &str, text: &str) -> Result<Self, ClassificationError> {
        let entries = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|(i, l)| {
                let (code, label) = l.split_once('\t').unwrap_or((l, l));
                (i + 1, (code.trim().to_string(), label.trim().to_string()))
            });
        Self::from_entries(name, entries)
    }

    pub fn load_categories(name: &str, path: &Path) -> Result<Self, ClassificationError> {
        Self::parse_categories(name, &read(path)?)
    }

    /// Aggregated system from `sc_code,discipline` rows (an optional header
    /// row is skipped). The target universe is the set of disciplines in
    /// order of first appearance. Many-to-many rows are allowed, exact
    /// duplicates are not.
    pub fn parse_aggregation(
        name: &str,
        base: &ClassificationSystem,
        mapping_csv: &str,
    ) -> Result<Self, ClassificationError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .comment(Some(b'#'))
            .from_reader(mapping_csv.as_bytes());
        let mut targets: Vec<String> = Vec::new();
        let mut target_index: HashMap<String, usize> = HashMap::new();
        let mut mapping: HashMap<String, Vec<usize>> = HashMap::new();
        let mut first = true;
        for row in reader.records() {
            let line = match &row {
                Ok(r) => r.position().map_or(0, |p| p.line() as usize),
                Err(e) => e.position().map_or(0, |p| p.line() as usize),
            };
            let row = row.map_err(|_| ClassificationError::MalformedMapping { line })?;
            if row.len() != 2 {
                return Err(ClassificationError::MalformedMapping { line });
            }
            let (code, target) = (row[0].trim(), row[1].trim());
            let is_header = first && code.eq_ignore_ascii_case("sc_code");
            first = false;
            if is_header {
                continue;
            }
            if code.is_empty() || target.is_empty() {
                return Err(ClassificationError::MalformedMapping { line });
            }
            if !base.index.contains_key(code) {
                return Err(ClassificationError::UnknownSource {
                    line,
                    code: code.to_string(),
                    base: base.name.clone(),
                });
            }
            let t = *target_index.entry(target.to_string()).or_insert_with(|| {
                targets.push(target.to_string());
                targets.len() - 1
            });
            let slot = mapping.entry(code.to_string()).or_default();
            if slot.contains(&t) {
                return Err(ClassificationError::DuplicateMapping {
                    line,
                    code: code.to_string(),
                    target: target.to_string(),
                });
            }
            slot.push(t);
        }
        let mut system = Self::from_entries(
            name,
            targets.iter().map(|t| (t.clone(), t.clone())).enumerate().map(|(i, e)| (i + 1, e)),
        )?;
        system.unmapped = base
            .categories
            .iter()
            .filter(|c| !mapping.contains_key(*c))
            .cloned()
            .collect();
        system.mapping = Some(mapping);
        Ok(system)
    }

    pub fn load_aggregation(
        name: &str,
        base: &ClassificationSystem,
        path: &Path,
    ) -> Result<Self, ClassificationError> {
        Self::parse_aggregation(name, base, &read(path)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    /// Size of the category universe.
    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn is_aggregation(&self) -> bool {
        self.mapping.is_some()
    }

    /// Base categories that map nowhere (aggregations only).
    pub fn unmapped(&self) -> &[String] {
        &self.unmapped
    }

    /// True when every mapped base category has exactly one target.
    pub fn is_functional(&self) -> bool {
        self.mapping
            .as_ref()
            .is_none_or(|m| m.values().all(|t| t.len() == 1))
    }

    /// Category indices a publication with these journal categories counts
    /// towards, deduplicated, plus the number of codes not recognised.
    pub fn resolve<'a, I>(&self, codes: I) -> (BTreeSet<usize>, usize)
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut hits = BTreeSet::new();
        let mut unknown = 0;
        for code in codes {
            match &self.mapping {
                Some(mapping) => match mapping.get(code) {
                    Some(targets) => hits.extend(targets.iter().copied()),
                    None => unknown += 1,
                },
                None => match self.index.get(code) {
                    Some(&i) => {
                        hits.insert(i);
                    }
                    None => unknown += 1,
                },
            }
        }
        (hits, unknown)
    }
}

fn read(path: &Path) -> Result<String, ClassificationError> {
    fs::read_to_string(path).map_err(|e| ClassificationError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Publication counts of one unit over a full category universe.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileVector {
    pub unit: CanonicalUnit,
    /// Dense, aligned with the system's categories.
    pub counts: Vec<u64>,
}

impl ProfileVector {
    pub fn zeros(unit: CanonicalUnit, system: &ClassificationSystem) -> Self {
        Self {
            unit,
            counts: vec![0; system.len()],
        }
    }

    /// Universe size N.
    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Mean count over the full universe.
    pub fn mu(&self) -> f64 {
        self.total() as f64 / self.n() as f64
    }

    /// Nonzero entries as `(category code, count)`.
    pub fn nonzero<'a>(&'a self, system: &'a ClassificationSystem) -> impl Iterator<Item = (&'a str, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (system.categories()[i].as_str(), *c))
    }
}

/// Profile of `unit` from the journal categories of the publications that
/// name it.
pub fn build_profile<'a, I>(unit: &CanonicalUnit, records: I, system: &ClassificationSystem) -> ProfileVector
where
    I: IntoIterator<Item = &'a BTreeSet<String>>,
{
    let mut profile = ProfileVector::zeros(unit.clone(), system);
    for categories in records {
        for i in system.resolve(categories).0 {
            profile.counts[i] += 1;
        }
    }
    profile
}

/// Profiles for every unit in one pass over `(units, journal categories)`
/// pairs, one pair per publication.
pub fn build_profiles<'a, I>(records: I, system: &ClassificationSystem) -> BTreeMap<String, ProfileVector>
where
    I: IntoIterator<Item = (&'a BTreeSet<CanonicalUnit>, &'a BTreeSet<String>)>,
{
    let mut profiles: BTreeMap<String, ProfileVector> = BTreeMap::new();
    for (units, categories) in records {
        let (hits, _) = system.resolve(categories);
        for unit in units {
            let profile = profiles
                .entry(unit.name.clone())
                .or_insert_with(|| ProfileVector::zeros(unit.clone(), system));
            for &i in &hits {
                profile.counts[i] += 1;
            }
        }
    }
    profiles
}

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq, Serialize)]
pub enum GiniError {
    /// All counts are zero: there is nothing to be concentrated.
    #[error("no output")]
    NoOutput,
    #[error("universe has fewer than two categories")]
    DegenerateUniverse,
}

/// Gini coefficient of a profile over its full universe.
pub fn gini(profile: &ProfileVector) -> Result<f64, GiniError> {
    gini_of_counts(&profile.counts)
}

/// Gini coefficient of integer counts over the full universe (zeros
/// included). Evaluated as `((N+1) T - 2 S) / ((N-1) T)` with `T` the total
/// and `S` the rank-weighted sum, which is exact up to the final division.
pub fn gini_of_counts(counts: &[u64]) -> Result<f64, GiniError> {
    let n = counts.len();
    if n < 2 {
        return Err(GiniError::DegenerateUniverse);
    }
    let total: u128 = counts.iter().map(|&c| c as u128).sum();
    if total == 0 {
        return Err(GiniError::NoOutput);
    }
    let mut sorted = counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let rank_weighted: u128 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (i as u128 + 1) * x as u128)
        .sum();
    let n = n as u128;
    // (N+1) T >= 2 S always holds since S <= T (N+1) / 2 for descending ranks
    let numerator = (n + 1) * total - 2 * rank_weighted;
    let denominator = (n - 1) * total;
    let g = numerator as f64 / denominator as f64;
    Ok(g.clamp(0.0, 1.0))
}

/// Number of categories with at least one publication.
pub fn field_count(profile: &ProfileVector) -> usize {
    profile.counts.iter().filter(|&&c| c > 0).count()
}

/// Marker for a Gini value in rendered tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GiniFlag {
    None,
    /// G < 0.5: output spread across fields.
    Bold,
    /// G > 0.8: output concentrated.
    Asterisk,
}

impl GiniFlag {
    pub fn of(g: Option<f64>) -> GiniFlag {
        match g {
            Some(g) if g < 0.5 => GiniFlag::Bold,
            Some(g) if g > 0.8 => GiniFlag::Asterisk,
            _ => GiniFlag::None,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            GiniFlag::None => "",
            GiniFlag::Bold => "bold",
            GiniFlag::Asterisk => "asterisk",
        }
    }
}

/// One row of the indicator table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitIndicators {
    pub name: String,
    pub unit_type: UnitType,
    /// Publications.
    pub p: u64,
    /// Betweenness on the full network.
    pub b: Option<f64>,
    /// Gini over the base (subject category) system; `None` without output.
    pub g_sc: Option<f64>,
    pub n_sc: usize,
    /// Gini over the aggregated (discipline) system.
    pub g_disc: Option<f64>,
    pub n_disc: usize,
}

impl UnitIndicators {
    pub fn flag_sc(&self) -> GiniFlag {
        GiniFlag::of(self.g_sc)
    }

    pub fn flag_disc(&self) -> GiniFlag {
        GiniFlag::of(self.g_disc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TableOptions {
    /// Rows need strictly more publications than this.
    pub min_publications: u64,
    /// Restrict rows to one unit type.
    pub unit_type: Option<UnitType>,
}

/// Indicator rows for every unit with `P > min_publications`, sorted by P
/// descending, then name.
pub fn indicator_table(
    net: &OrgNetwork,
    sc_profiles: &BTreeMap<String, ProfileVector>,
    disc_profiles: &BTreeMap<String, ProfileVector>,
    options: &TableOptions,
) -> Vec<UnitIndicators> {
    let mut rows: Vec<UnitIndicators> = net
        .nodes()
        .filter(|(_, a)| a.publications > options.min_publications)
        .filter(|(_, a)| options.unit_type.is_none_or(|t| t == a.unit_type))
        .map(|(name, attrs)| {
            let (g_sc, n_sc) = indicators_of(sc_profiles.get(name));
            let (g_disc, n_disc) = indicators_of(disc_profiles.get(name));
            UnitIndicators {
                name: name.to_string(),
                unit_type: attrs.unit_type,
                p: attrs.publications,
                b: attrs.betweenness,
                g_sc,
                n_sc,
                g_disc,
                n_disc,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.p.cmp(&a.p).then_with(|| a.name.cmp(&b.name)));
    rows
}

fn indicators_of(profile: Option<&ProfileVector>) -> (Option<f64>, usize) {
    match profile {
        Some(p) => (gini(p).ok(), field_count(p)),
        None => (None, 0),
    }
}

// Ties round away from zero (0.625 -> 0.63), unlike `{:.2}`.
fn fmt_opt(x: Option<f64>, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    x.map_or_else(|| "-".to_string(), |v| format!("{:.decimals$}", (v * scale).round() / scale))
}

pub fn render_indicator_csv(rows: &[UnitIndicators]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let _ = w.write_record([
        "unit", "type", "P", "B", "G_sc", "No_SC", "G_disc", "No_disc", "flag_sc", "flag_disc",
    ]);
    for r in rows {
        let _ = w.write_record([
            r.name.clone(),
            r.unit_type.to_string(),
            r.p.to_string(),
            fmt_opt(r.b, 2),
            fmt_opt(r.g_sc, 2),
            r.n_sc.to_string(),
            fmt_opt(r.g_disc, 2),
            r.n_disc.to_string(),
            r.flag_sc().as_str().to_string(),
            r.flag_disc().as_str().to_string(),
        ]);
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("UTF-8 CSV")
}

fn marked(g: Option<f64>) -> String {
    let text = fmt_opt(g, 2);
    match GiniFlag::of(g) {
        GiniFlag::Bold => format!("<b>{text}</b>"),
        GiniFlag::Asterisk => format!("{text}*"),
        GiniFlag::None => text,
    }
}

/// Aligned Markdown table. Column headers carry each universe size N.
pub fn render_indicator_markdown(
    rows: &[UnitIndicators],
    sc_system: &ClassificationSystem,
    disc_system: &ClassificationSystem,
) -> String {
    let header = vec![
        "Unit".to_string(),
        "P".to_string(),
        "B".to_string(),
        format!("G {} (N={})", sc_system.name(), sc_system.len()),
        format!("No {}", sc_system.name()),
        format!("G {} (N={})", disc_system.name(), disc_system.len()),
        format!("No {}", disc_system.name()),
    ];
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.p.to_string(),
                fmt_opt(r.b, 2),
                marked(r.g_sc),
                r.n_sc.to_string(),
                marked(r.g_disc),
                r.n_disc.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            body.iter()
                .map(|row| row[c].chars().count())
                .chain([header[c].chars().count(), 3])
                .max()
                .unwrap_or(3)
        })
        .collect();

    let mut out = String::new();
    let line = |cells: &[String], out: &mut String| {
        out.push('|');
        for (c, cell) in cells.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                let _ = write!(out, " {cell}{} |", " ".repeat(pad));
            } else {
                let _ = write!(out, " {}{cell} |", " ".repeat(pad));
            }
        }
        out.push('\n');
    };
    line(&header, &mut out);
    out.push('|');
    for (c, w) in widths.iter().enumerate() {
        if c == 0 {
            let _ = write!(out, " {} |", "-".repeat(*w));
        } else {
            let _ = write!(out, " {}: |", "-".repeat(w - 1));
        }
    }
    out.push('\n');
    for row in &body {
        line(row, &mut out);
    }
    out.push_str("\n`<b>`: G < 0.5, `*`: G > 0.8\n");
    out
}
