//! Corpus ingestion: bibliographic records from JSONL or CSV, document-type
//! filtering and isolation of the target institution's addresses.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::address::normalize_address;

/// Intra-cell separator for list-valued CSV columns.
pub const CSV_LIST_SEPARATOR: char = '|';

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocType {
    Article,
    Review,
    Letter,
    ProceedingsPaper,
    Other,
}

impl DocType {
    pub const ALL: [DocType; 5] = [
        DocType::Article,
        DocType::Review,
        DocType::Letter,
        DocType::ProceedingsPaper,
        DocType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Review => "review",
            DocType::Letter => "letter",
            DocType::ProceedingsPaper => "proceedings_paper",
            DocType::Other => "other",
        }
    }

    /// Lenient label parsing: any label outside the four counted types
    /// becomes [`DocType::Other`] instead of failing.
    pub fn from_label(label: &str) -> DocType {
        let key: String = label
            .trim()
            .chars()
            .map(|c| match c {
                ' ' | '-' => '_',
                c => c.to_ascii_lowercase(),
            })
            .collect();
        match key.as_str() {
            "article" => DocType::Article,
            "review" => DocType::Review,
            "letter" => DocType::Letter,
            "proceedings_paper" => DocType::ProceedingsPaper,
            _ => DocType::Other,
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Strict parsing used for user-facing flags, where a typo should not
/// silently turn into `other`.
impl FromStr for DocType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed = DocType::from_label(s);
        if parsed == DocType::Other && !s.trim().eq_ignore_ascii_case("other") {
            return Err(format!("unknown document type `{s}`"));
        }
        Ok(parsed)
    }
}

/// Letters, articles, reviews and proceedings papers.
pub fn default_doc_types() -> BTreeSet<DocType> {
    [
        DocType::Article,
        DocType::Review,
        DocType::Letter,
        DocType::ProceedingsPaper,
    ]
    .into_iter()
    .collect()
}

/// One publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibRecord {
    pub record_id: String,
    pub doc_type: DocType,
    pub year: i32,
    pub addresses: Vec<String>,
    /// Journal-level subject categories.
    pub subject_categories: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Guess from the file extension; anything but `.csv` is JSONL.
    pub fn from_path(path: &Path) -> CorpusFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(format!("unknown corpus format `{other}` (expected jsonl or csv)")),
        }
    }
}

/// A skipped input line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineDiagnostic {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for LineDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Default, Clone)]
pub struct LoadedCorpus {
    pub records: Vec<BibRecord>,
    pub diagnostics: Vec<LineDiagnostic>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("duplicate record id `{id}` on line {line} (first seen on line {first_line})")]
    DuplicateId { id: String, first_line: u64, line: u64 },
    #[error("CSV header is missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("CSV header: {0}")]
    Header(String),
}

#[derive(Deserialize)]
struct JsonRecord {
    id: String,
    doc_type: String,
    year: i32,
    addresses: Vec<String>,
    subject_categories: Vec<String>,
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<LoadedCorpus, CorpusError> {
    let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_corpus(&text, format)
}

/// Parse corpus text. Malformed lines become diagnostics; duplicate ids are
/// fatal.
pub fn parse_corpus(text: &str, format: CorpusFormat) -> Result<LoadedCorpus, CorpusError> {
    let (records, diagnostics) = match format {
        CorpusFormat::Jsonl => parse_jsonl(text),
        CorpusFormat::Csv => parse_csv(text)?,
    };
    check_unique_ids(&records)?;
    Ok(LoadedCorpus {
        records: records.into_iter().map(|(_, r)| r).collect(),
        diagnostics,
    })
}

type Parsed = (Vec<(u64, BibRecord)>, Vec<LineDiagnostic>);

fn parse_jsonl(text: &str) -> Parsed {
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonRecord>(line) {
            Ok(raw) => match build_record(
                raw.id,
                &raw.doc_type,
                raw.year,
                raw.addresses,
                raw.subject_categories,
            ) {
                Ok(record) => records.push((line_no, record)),
                Err(message) => diagnostics.push(LineDiagnostic { line: line_no, message }),
            },
            Err(e) => diagnostics.push(LineDiagnostic {
                line: line_no,
                message: e.to_string(),
            }),
        }
    }
    (records, diagnostics)
}

fn parse_csv(text: &str) -> Result<Parsed, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Header(e.to_string()))?
        .clone();
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or(CorpusError::MissingColumn(name))
    };
    let id_col = column("id")?;
    let type_col = column("doc_type")?;
    let year_col = column("year")?;
    let addr_col = column("addresses")?;
    let sc_col = column("subject_categories")?;
    let width = headers.len();

    let mut records = Vec::new();
    let mut diagnostics = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                diagnostics.push(LineDiagnostic { line, message: e.to_string() });
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != width {
            diagnostics.push(LineDiagnostic {
                line,
                message: format!("expected {width} fields, found {}", row.len()),
            });
            continue;
        }
        let year = match row[year_col].trim().parse::<i32>() {
            Ok(y) => y,
            Err(_) => {
                diagnostics.push(LineDiagnostic {
                    line,
                    message: format!("invalid year `{}`", &row[year_col]),
                });
                continue;
            }
        };
        let addresses = split_list(&row[addr_col]);
        let categories = split_list(&row[sc_col]);
        match build_record(row[id_col].to_string(), &row[type_col], year, addresses, categories) {
            Ok(record) => records.push((line, record)),
            Err(message) => diagnostics.push(LineDiagnostic { line, message }),
        }
    }
    Ok((records, diagnostics))
}

fn split_list(cell: &str) -> Vec<String> {
    cell.split(CSV_LIST_SEPARATOR)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn build_record(
    id: String,
    doc_type: &str,
    year: i32,
    addresses: Vec<String>,
    subject_categories: Vec<String>,
) -> Result<BibRecord, String> {
    let record_id = id.trim().to_string();
    if record_id.is_empty() {
        return Err("empty record id".to_string());
    }
    Ok(BibRecord {
        record_id,
        doc_type: DocType::from_label(doc_type),
        year,
        addresses: addresses
            .into_iter()
            .filter(|a| !a.trim().is_empty())
            .collect(),
        subject_categories: subject_categories
            .into_iter()
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
    })
}

fn check_unique_ids(records: &[(u64, BibRecord)]) -> Result<(), CorpusError> {
    let mut seen: HashMap<&str, u64> = HashMap::with_capacity(records.len());
    for (line, record) in records {
        if let Some(&first_line) = seen.get(record.record_id.as_str()) {
            return Err(CorpusError::DuplicateId {
                id: record.record_id.clone(),
                first_line,
                line: *line,
            });
        }
        seen.insert(&record.record_id, *line);
    }
    Ok(())
}

/// Keep records whose document type is allowed, in input order.
pub fn filter_doc_types(records: &[BibRecord], allowed: &BTreeSet<DocType>) -> Vec<BibRecord> {
    records
        .iter()
        .filter(|r| allowed.contains(&r.doc_type))
        .cloned()
        .collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatcherError {
    #[error("institution variant list is empty")]
    Empty,
    #[error("institution variant `{0}` contains a comma")]
    Comma(String),
    #[error("cannot read institution variants from {path}: {message}")]
    Io { path: String, message: String },
}

/// Head-segment names identifying the target institution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstitutionMatcher {
    variant_names: BTreeSet<String>,
}

impl InstitutionMatcher {
    /// Variants are uppercased and whitespace-collapsed on the way in.
    pub fn new<I, S>(variants: I) -> Result<Self, MatcherError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut variant_names = BTreeSet::new();
        for v in variants {
            let v = v.as_ref();
            if v.contains(',') {
                return Err(MatcherError::Comma(v.to_string()));
            }
            let norm = normalize_address(v);
            if !norm.is_empty() {
                variant_names.insert(norm);
            }
        }
        if variant_names.is_empty() {
            return Err(MatcherError::Empty);
        }
        Ok(Self { variant_names })
    }

    /// One variant per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, MatcherError> {
        Self::new(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty()),
        )
    }

    pub fn load(path: &Path) -> Result<Self, MatcherError> {
        let text = fs::read_to_string(path).map_err(|e| MatcherError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn variant_names(&self) -> &BTreeSet<String> {
        &self.variant_names
    }

    pub fn matches_head(&self, address: &str) -> bool {
        let normalized = normalize_address(address);
        let head = normalized.split(", ").next().unwrap_or("");
        self.variant_names.contains(head)
    }
}

/// The record's addresses whose head segment names the target institution;
/// collaborating institutions' addresses are dropped.
pub fn select_institution_addresses<'a>(
    record: &'a BibRecord,
    matcher: &InstitutionMatcher,
) -> Vec<&'a str> {
    record
        .addresses
        .iter()
        .map(String::as_str)
        .filter(|a| matcher.matches_head(a))
        .collect()
}
