//! End-to-end run: ingest, parse, normalize, network, profiles, reports.
//!
//! Every stage is computed in memory before anything is written, so a
//! failing stage leaves no output behind. Output files are plain CSV,
//! Markdown, GraphML, DOT and JSON; the run report lists a SHA-256 digest
//! for each of them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::address::{normalize_name, parse_address};
use crate::corpus::{
    default_doc_types, filter_doc_types, load_corpus, select_institution_addresses, CorpusFormat,
    DocType, InstitutionMatcher,
};
use crate::normalize::{
    canonicalize, dedupe_units, suggest_aliases, type_distribution, AliasSuggestion, AliasTable,
    CanonicalUnit, TypeRuleSet, TypeShare, UnitType,
};
use crate::orgnet::{
    apply_threshold, build_network, connected_components, render_graph, GraphFormat, OrgNetwork,
    PathMetric, Threshold,
};
use crate::profiles::{
    build_profiles, indicator_table, render_indicator_csv, render_indicator_markdown,
    ClassificationSystem, ProfileVector, TableOptions, UnitIndicators,
};

/// Inclusive publication-year range, written `2006-2010` (or `2008`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearRange {
    pub start: i32,
    pub end: i32,
}

impl YearRange {
    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

impl FromStr for YearRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid year range `{s}` (expected e.g. 2006-2010)");
        let (a, b) = s.trim().split_once('-').unwrap_or((s.trim(), s.trim()));
        let start = a.trim().parse().map_err(|_| bad())?;
        let end = b.trim().parse().map_err(|_| bad())?;
        Ok(YearRange { start, end })
    }
}

impl TryFrom<String> for YearRange {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<YearRange> for String {
    fn from(r: YearRange) -> String {
        r.to_string()
    }
}

impl fmt::Display for YearRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

fn default_min_cooccurrence() -> u64 {
    5
}

fn default_min_publications() -> u64 {
    50
}

fn yes() -> bool {
    true
}

/// Everything a run depends on. Relative paths in a config file are
/// resolved against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    /// Defaults to the corpus file extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_format: Option<CorpusFormat>,
    /// Target institution name variants, one per line.
    pub institution: PathBuf,
    /// `variant<TAB>canonical` alias table.
    pub aliases: PathBuf,
    /// Optional `pattern<TAB>type` rules replacing the built-in ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type_rules: Option<PathBuf>,
    /// Subject-category universe.
    pub subject_categories: PathBuf,
    /// `sc_code,discipline` aggregation.
    pub discipline_mapping: PathBuf,
    #[serde(default = "default_doc_types")]
    pub doc_types: BTreeSet<DocType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub years: Option<YearRange>,
    /// Display cutoff for exported network edges.
    #[serde(default = "default_min_cooccurrence")]
    pub min_cooccurrence: u64,
    /// Keep edges with weight strictly above `min_cooccurrence`.
    #[serde(default = "yes")]
    pub strict_cooccurrence: bool,
    #[serde(default = "yes")]
    pub drop_isolated: bool,
    /// Indicator rows need strictly more publications than this.
    #[serde(default = "default_min_publications")]
    pub min_publications: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_unit_type: Option<UnitType>,
    #[serde(default)]
    pub path_metric: PathMetric,
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    /// Parse a TOML config; relative paths are joined onto `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, String> {
        let mut config: PipelineConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base_dir.join(&*p);
            }
        };
        resolve(&mut config.corpus);
        resolve(&mut config.institution);
        resolve(&mut config.aliases);
        if let Some(p) = config.type_rules.as_mut() {
            resolve(p);
        }
        resolve(&mut config.subject_categories);
        resolve(&mut config.discipline_mapping);
        resolve(&mut config.output_dir);
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml(&text, base).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn format(&self) -> CorpusFormat {
        self.corpus_format.unwrap_or_else(|| CorpusFormat::from_path(&self.corpus))
    }

    pub fn threshold(&self) -> Threshold {
        Threshold {
            min_weight: self.min_cooccurrence,
            strict: self.strict_cooccurrence,
            drop_isolated: self.drop_isolated,
        }
    }

    pub fn table_options(&self) -> TableOptions {
        TableOptions {
            min_publications: self.min_publications,
            unit_type: self.table_unit_type,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub min_cooccurrence: Option<u64>,
    pub min_publications: Option<u64>,
    pub doc_types: Option<BTreeSet<DocType>>,
    pub years: Option<YearRange>,
    pub output_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, config: &mut PipelineConfig) {
        if let Some(v) = self.min_cooccurrence {
            config.min_cooccurrence = v;
        }
        if let Some(v) = self.min_publications {
            config.min_publications = v;
        }
        if let Some(v) = &self.doc_types {
            config.doc_types = v.clone();
        }
        if let Some(v) = self.years {
            config.years = Some(v);
        }
        if let Some(v) = &self.output_dir {
            config.output_dir = v.clone();
        }
    }
}

/// A reason the configuration cannot run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub source: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.source, self.message)
    }
}

fn diag(source: impl fmt::Display, message: impl fmt::Display) -> Diagnostic {
    Diagnostic {
        source: source.to_string(),
        message: message.to_string(),
    }
}

/// Loaded lookup tables. Immutable for the rest of the run.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub matcher: InstitutionMatcher,
    pub aliases: AliasTable,
    pub rules: TypeRuleSet,
    pub subject_categories: ClassificationSystem,
    pub disciplines: ClassificationSystem,
}

impl Inputs {
    /// Load every side table, collecting all problems instead of stopping at
    /// the first.
    pub fn load(config: &PipelineConfig) -> Result<Inputs, Vec<Diagnostic>> {
        let mut problems = Vec::new();
        let exists = |p: &Path, problems: &mut Vec<Diagnostic>| {
            let ok = p.is_file();
            if !ok {
                problems.push(diag(p.display(), "file not found"));
            }
            ok
        };

        exists(&config.corpus, &mut problems);
        let matcher = exists(&config.institution, &mut problems)
            .then(|| InstitutionMatcher::load(&config.institution))
            .and_then(|r| r.map_err(|e| problems.push(diag(config.institution.display(), e))).ok());

        let aliases = if exists(&config.aliases, &mut problems) {
            match fs::read_to_string(&config.aliases) {
                Ok(text) => match AliasTable::parse(&text) {
                    Ok(t) => Some(t),
                    Err(issues) => {
                        problems.extend(issues.into_iter().map(|i| diag(config.aliases.display(), i)));
                        None
                    }
                },
                Err(e) => {
                    problems.push(diag(config.aliases.display(), e));
                    None
                }
            }
        } else {
            None
        };

        let rules = match &config.type_rules {
            None => Some(TypeRuleSet::default()),
            Some(path) if exists(path, &mut problems) => match fs::read_to_string(path) {
                Ok(text) => match TypeRuleSet::parse(&text) {
                    Ok(r) => Some(r),
                    Err(issues) => {
                        problems.extend(issues.into_iter().map(|i| diag(path.display(), i)));
                        None
                    }
                },
                Err(e) => {
                    problems.push(diag(path.display(), e));
                    None
                }
            },
            Some(_) => None,
        };

        let sc = exists(&config.subject_categories, &mut problems)
            .then(|| ClassificationSystem::load_categories("SC", &config.subject_categories))
            .and_then(|r| r.map_err(|e| problems.push(diag(config.subject_categories.display(), e))).ok());

        let disc = match &sc {
            Some(sc) if exists(&config.discipline_mapping, &mut problems) => {
                ClassificationSystem::load_aggregation("disc", sc, &config.discipline_mapping)
                    .map_err(|e| problems.push(diag(config.discipline_mapping.display(), e)))
                    .ok()
            }
            _ => None,
        };

        if let Some(years) = config.years {
            if years.start > years.end {
                problems.push(diag("years", format!("range {years} starts after it ends")));
            }
        }
        if config.doc_types.is_empty() {
            problems.push(diag("doc_types", "no document type selected"));
        }

        match (matcher, aliases, rules, sc, disc) {
            (Some(matcher), Some(aliases), Some(rules), Some(subject_categories), Some(disciplines))
                if problems.is_empty() =>
            {
                Ok(Inputs {
                    matcher,
                    aliases,
                    rules,
                    subject_categories,
                    disciplines,
                })
            }
            _ => Err(problems),
        }
    }
}

/// All problems that keep `config` from running; empty when runnable.
pub fn validate_config(config: &PipelineConfig) -> Vec<Diagnostic> {
    Inputs::load(config).err().unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Ingest,
    Parse,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Parse => "parse",
            Stage::Write => "write",
        })
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration:\n  {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n  "))]
    Invalid(Vec<Diagnostic>),
    #[error("stage `{stage}` failed: {message}")]
    Stage { stage: Stage, message: String },
}

impl PipelineError {
    fn stage(stage: Stage, message: impl fmt::Display) -> Self {
        PipelineError::Stage {
            stage,
            message: message.to_string(),
        }
    }
}

/// Where every loaded record ended up. The exclusion buckets and `analyzed`
/// add up to `total`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordCounts {
    pub total: usize,
    pub doc_type_filtered: usize,
    pub out_of_period: usize,
    pub no_target_address: usize,
    pub university_only: usize,
    pub analyzed: usize,
}

impl RecordCounts {
    pub fn is_conserved(&self) -> bool {
        self.total
            == self.analyzed
                + self.university_only
                + self.doc_type_filtered
                + self.out_of_period
                + self.no_target_address
    }
}

/// One analyzed publication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzedRecord {
    pub record_id: String,
    pub units: BTreeSet<CanonicalUnit>,
    pub subject_categories: BTreeSet<String>,
}

/// In-memory result of every stage.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub config: PipelineConfig,
    pub inputs: Inputs,
    pub counts: RecordCounts,
    pub records: Vec<AnalyzedRecord>,
    pub type_distribution: Vec<TypeShare>,
    /// Full network with betweenness.
    pub network: OrgNetwork,
    /// Thresholded network for display.
    pub display_network: OrgNetwork,
    pub components: Vec<Vec<String>>,
    pub sc_profiles: BTreeMap<String, ProfileVector>,
    pub disc_profiles: BTreeMap<String, ProfileVector>,
    pub indicators: Vec<UnitIndicators>,
    /// Raw unit tokens (before aliasing) with occurrence counts.
    pub raw_tokens: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

/// Run every stage in memory.
pub fn analyze(config: &PipelineConfig) -> Result<Analysis, PipelineError> {
    let inputs = Inputs::load(config).map_err(PipelineError::Invalid)?;
    let mut warnings = Vec::new();

    let loaded = load_corpus(&config.corpus, config.format()).map_err(|e| PipelineError::stage(Stage::Ingest, e))?;
    for d in &loaded.diagnostics {
        warnings.push(format!("{}: {d}", config.corpus.display()));
    }
    let mut counts = RecordCounts {
        total: loaded.records.len(),
        ..RecordCounts::default()
    };

    let typed = filter_doc_types(&loaded.records, &config.doc_types);
    counts.doc_type_filtered = counts.total - typed.len();

    let mut records = Vec::new();
    let mut raw_tokens: BTreeMap<String, usize> = BTreeMap::new();
    for record in typed {
        if !config.years.is_none_or(|r| r.contains(record.year)) {
            counts.out_of_period += 1;
            continue;
        }
        let selected = select_institution_addresses(&record, &inputs.matcher);
        if selected.is_empty() {
            counts.no_target_address += 1;
            continue;
        }
        let mut names = Vec::new();
        for address in selected {
            let parse = parse_address(address).map_err(|e| {
                PipelineError::stage(Stage::Parse, format!("record {}: {e}", record.record_id))
            })?;
            for token in parse.unit_tokens {
                *raw_tokens.entry(normalize_name(&token)).or_default() += 1;
                names.push(canonicalize(&token, &inputs.aliases));
            }
        }
        if names.is_empty() {
            counts.university_only += 1;
            continue;
        }
        records.push(AnalyzedRecord {
            record_id: record.record_id,
            units: dedupe_units(&names, &inputs.rules),
            subject_categories: record.subject_categories,
        });
    }
    counts.analyzed = records.len();
    debug_assert!(counts.is_conserved());

    if counts.analyzed == 0 {
        warnings.push("no record has an organizational unit below the institution; tables are empty".to_string());
    }
    let no_categories = records.iter().filter(|r| r.subject_categories.is_empty()).count();
    if no_categories > 0 {
        log::warn!("{no_categories} analyzed record(s) carry no subject category");
        warnings.push(format!(
            "{no_categories} analyzed record(s) have no subject category and add nothing to profiles"
        ));
    }
    let unknown: BTreeSet<&String> = records
        .iter()
        .flat_map(|r| &r.subject_categories)
        .filter(|c| inputs.subject_categories.resolve([*c]).1 > 0)
        .collect();
    if !unknown.is_empty() {
        warnings.push(format!(
            "{} subject category code(s) on records are not in the category list: {}",
            unknown.len(),
            unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
        ));
    }
    if !inputs.disciplines.unmapped().is_empty() {
        warnings.push(format!(
            "{} subject categor(y/ies) map to no discipline: {}",
            inputs.disciplines.unmapped().len(),
            inputs.disciplines.unmapped().join(", ")
        ));
    }

    let unit_sets: Vec<BTreeSet<CanonicalUnit>> = records.iter().map(|r| r.units.clone()).collect();
    let distribution = type_distribution(&unit_sets);
    let network = build_network(&unit_sets).with_betweenness(config.path_metric);
    let display_network = apply_threshold(&network, &config.threshold());
    let components = connected_components(&network);

    let pairs = || records.iter().map(|r| (&r.units, &r.subject_categories));
    let sc_profiles = build_profiles(pairs(), &inputs.subject_categories);
    let disc_profiles = build_profiles(pairs(), &inputs.disciplines);
    let indicators = indicator_table(&network, &sc_profiles, &disc_profiles, &config.table_options());

    Ok(Analysis {
        config: config.clone(),
        inputs,
        counts,
        records,
        type_distribution: distribution,
        network,
        display_network,
        components,
        sc_profiles,
        disc_profiles,
        indicators,
        raw_tokens,
        warnings,
    })
}

/// Which group of files to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputSet {
    /// Exclusion summary and unit-type distribution.
    Report,
    /// Node/edge tables, components, GraphML and DOT.
    Network,
    /// Profiles and indicator tables.
    Profiles,
    /// Everything plus `run_report.json`.
    All,
}

impl OutputSet {
    fn includes(self, other: OutputSet) -> bool {
        self == OutputSet::All || self == other
    }
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let _ = w.write_record(header);
    for row in rows {
        let _ = w.write_record(&row);
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("UTF-8 CSV")
}

fn profile_rows(profiles: &BTreeMap<String, ProfileVector>, system: &ClassificationSystem) -> String {
    csv_string(
        &["unit", "category", "publications"],
        profiles.values().flat_map(|p| {
            p.nonzero(system)
                .map(|(code, count)| vec![p.unit.name.clone(), code.to_string(), count.to_string()])
                .collect::<Vec<_>>()
        }),
    )
}

impl Analysis {
    /// Rendered output files, in name order.
    pub fn render(&self, set: OutputSet) -> BTreeMap<String, String> {
        let mut files = BTreeMap::new();
        files.insert("resolved_config.toml".to_string(), self.config.to_toml());
        if set.includes(OutputSet::Report) {
            let c = &self.counts;
            files.insert(
                "summary.csv".to_string(),
                csv_string(
                    &["bucket", "records"],
                    [
                        ("total", c.total),
                        ("doc_type_filtered", c.doc_type_filtered),
                        ("out_of_period", c.out_of_period),
                        ("no_target_address", c.no_target_address),
                        ("university_only", c.university_only),
                        ("analyzed", c.analyzed),
                    ]
                    .map(|(k, v)| vec![k.to_string(), v.to_string()]),
                ),
            );
            files.insert(
                "type_distribution.csv".to_string(),
                csv_string(
                    &["type", "publications", "share_pct", "units"],
                    self.type_distribution.iter().map(|t| {
                        vec![
                            t.unit_type.to_string(),
                            t.publications.to_string(),
                            format!("{:.1}", t.share_pct),
                            t.units.to_string(),
                        ]
                    }),
                ),
            );
        }
        if set.includes(OutputSet::Network) {
            files.insert("nodes.csv".to_string(), render_graph(&self.network, GraphFormat::NodeCsv));
            files.insert("edges.csv".to_string(), render_graph(&self.network, GraphFormat::EdgeCsv));
            files.insert("network.graphml".to_string(), render_graph(&self.display_network, GraphFormat::Graphml));
            files.insert("network.dot".to_string(), render_graph(&self.display_network, GraphFormat::Dot));
            files.insert(
                "components.csv".to_string(),
                csv_string(
                    &["component", "unit"],
                    self.components
                        .iter()
                        .enumerate()
                        .flat_map(|(i, c)| c.iter().map(move |u| vec![(i + 1).to_string(), u.clone()])),
                ),
            );
        }
        if set.includes(OutputSet::Profiles) {
            files.insert("indicators.csv".to_string(), render_indicator_csv(&self.indicators));
            let mut md = format!(
                "Units with P > {}{}; betweenness on the full network ({} units, {} edges).\n\n",
                self.config.min_publications,
                self.config
                    .table_unit_type
                    .map(|t| format!(", type {t}"))
                    .unwrap_or_default(),
                self.network.node_count(),
                self.network.edge_count(),
            );
            md.push_str(&render_indicator_markdown(
                &self.indicators,
                &self.inputs.subject_categories,
                &self.inputs.disciplines,
            ));
            files.insert("indicators.md".to_string(), md);
            files.insert(
                "profiles_sc.csv".to_string(),
                profile_rows(&self.sc_profiles, &self.inputs.subject_categories),
            );
            files.insert(
                "profiles_disc.csv".to_string(),
                profile_rows(&self.disc_profiles, &self.inputs.disciplines),
            );
        }
        files
    }

    pub fn alias_suggestions(&self, max_distance: usize) -> Vec<AliasSuggestion> {
        suggest_aliases(&self.raw_tokens, max_distance)
    }
}

/// Counts and digests of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: PipelineConfig,
    pub counts: RecordCounts,
    pub units: usize,
    pub edges: usize,
    pub total_edge_weight: u64,
    pub components: Vec<usize>,
    pub display_units: usize,
    pub display_edges: usize,
    pub subject_categories: usize,
    pub disciplines: usize,
    pub indicator_rows: usize,
    pub warnings: Vec<String>,
    /// File name to SHA-256 hex digest, for every other file written.
    pub files: BTreeMap<String, String>,
}

impl RunReport {
    fn new(analysis: &Analysis, files: &BTreeMap<String, String>) -> Self {
        RunReport {
            config: analysis.config.clone(),
            counts: analysis.counts,
            units: analysis.network.node_count(),
            edges: analysis.network.edge_count(),
            total_edge_weight: analysis.network.total_weight(),
            components: analysis.components.iter().map(Vec::len).collect(),
            display_units: analysis.display_network.node_count(),
            display_edges: analysis.display_network.edge_count(),
            subject_categories: analysis.inputs.subject_categories.len(),
            disciplines: analysis.inputs.disciplines.len(),
            indicator_rows: analysis.indicators.len(),
            warnings: analysis.warnings.clone(),
            files: files
                .iter()
                .map(|(name, content)| (name.clone(), hex::encode(Sha256::digest(content.as_bytes()))))
                .collect(),
        }
    }
}

/// Write `files` into `dir`. On failure every file written so far is
/// removed again.
pub fn write_outputs(dir: &Path, files: &BTreeMap<String, String>) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(dir)
        .map_err(|e| PipelineError::stage(Stage::Write, format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (name, content) in files {
        let path = dir.join(name);
        if let Err(e) = fs::write(&path, content) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(PipelineError::stage(Stage::Write, format!("{}: {e}", path.display())));
        }
        written.push(path);
    }
    Ok(written)
}

/// Render and write one output group; returns the analysis for reporting.
pub fn run_outputs(config: &PipelineConfig, set: OutputSet) -> Result<(Analysis, BTreeMap<String, String>), PipelineError> {
    let analysis = analyze(config)?;
    let files = analysis.render(set);
    write_outputs(&config.output_dir, &files)?;
    Ok((analysis, files))
}

/// Full pipeline: every output plus `run_report.json`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<RunReport, PipelineError> {
    let analysis = analyze(config)?;
    let mut files = analysis.render(OutputSet::All);
    let report = RunReport::new(&analysis, &files);
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| PipelineError::stage(Stage::Write, e))?;
    files.insert("run_report.json".to_string(), json + "\n");
    write_outputs(&config.output_dir, &files)?;
    Ok(report)
}
