//! Affiliation address decomposition.
//!
//! An address such as
//!
//! ```text
//! UNIV GRANADA, FAC SCI, DEPT COMP SCI & ARTIFICIAL INTELLIGENCE, E-18071 GRANADA, SPAIN
//! ```
//!
//! is read positionally: the first comma-delimited segment is the head
//! institution, the last two are postcode+city and country, and everything
//! in between is an organizational-unit token. Tokens are kept flat; no
//! hierarchy among them is inferred.

use std::collections::HashSet;
use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

/// Separator used when re-joining segments.
pub const SEGMENT_SEPARATOR: &str = ", ";

static COUNTRY_LIST: &str = include_str!("countries.txt");

fn countries() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        COUNTRY_LIST
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Uppercase, collapse internal whitespace, trim.
pub fn normalize_name(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_uppercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical textual form of an address: semicolons become commas, trailing
/// address delimiters are dropped, every segment is normalized with
/// [`normalize_name`], empty segments vanish and segments are re-joined
/// with `", "`.
pub fn normalize_address(address: &str) -> String {
    let trimmed = address.trim().trim_end_matches(|c: char| c == '.' || c.is_whitespace());
    trimmed
        .replace(';', ",")
        .split(',')
        .map(normalize_name)
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join(SEGMENT_SEPARATOR)
}

/// Whether a segment looks like a postcode/city or a country: it contains a
/// digit, or it is a known country name.
pub fn is_location_segment(segment: &str) -> bool {
    segment.chars().any(|c| c.is_ascii_digit()) || countries().contains(normalize_name(segment).as_str())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AddressParse {
    /// Major organizational level, i.e. the institution.
    pub head: String,
    /// Candidate organizational units, in address order.
    pub unit_tokens: Vec<String>,
    /// Stripped location segments: at most postcode+city and country.
    pub tail: Vec<String>,
}

impl AddressParse {
    /// Papers whose addresses name nothing below the institution are left
    /// out of the structural analysis.
    pub fn is_university_only(&self) -> bool {
        self.unit_tokens.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        1 + self.unit_tokens.len() + self.tail.len()
    }

    /// Head, units and tail re-joined; equals the normalized source address.
    pub fn reconstruct(&self) -> String {
        std::iter::once(&self.head)
            .chain(&self.unit_tokens)
            .chain(&self.tail)
            .map(String::as_str)
            .collect::<Vec<_>>()
            .join(SEGMENT_SEPARATOR)
    }
}

impl fmt::Display for AddressParse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "head:  {}", self.head)?;
        if self.unit_tokens.is_empty() {
            writeln!(f, "units: (none, university-only)")?;
        }
        for (i, unit) in self.unit_tokens.iter().enumerate() {
            writeln!(f, "unit {}: {}", i + 1, unit)?;
        }
        write!(f, "tail:  [{}]", self.tail.join(" | "))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AddressError {
    #[error("address has no segments")]
    Empty,
}

/// Decompose one address.
///
/// With four or more segments the last two are the location tail. With
/// three, the last one is the country and the middle one is a unit unless
/// it looks like a location. With one or two segments there are no units.
pub fn parse_address(address: &str) -> Result<AddressParse, AddressError> {
    let normalized = normalize_address(address);
    if normalized.is_empty() {
        return Err(AddressError::Empty);
    }
    let mut segments: Vec<String> = normalized
        .split(SEGMENT_SEPARATOR)
        .map(str::to_string)
        .collect();
    let head = segments.remove(0);

    let tail_len = match segments.len() {
        0 => 0,
        1 => 1,
        2 if is_location_segment(&segments[0]) => 2,
        2 => 1,
        _ => 2,
    };
    let tail = segments.split_off(segments.len() - tail_len);
    Ok(AddressParse {
        head,
        unit_tokens: segments,
        tail,
    })
}

pub fn is_university_only(parse: &AddressParse) -> bool {
    parse.is_university_only()
}

/// Result of splitting a raw multi-address field.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AddressSplit {
    pub addresses: Vec<String>,
    /// Set when non-blank input produced no address.
    pub diagnostic: Option<String>,
}

/// Split a raw address field in which addresses are terminated by dots.
///
/// A `.` ends an address when it is followed by whitespace or the end of the
/// field and the text collected since the previous address already contains
/// a comma; other dots (abbreviations) are kept.
pub fn split_addresses(field: &str) -> AddressSplit {
    let mut addresses = Vec::new();
    let mut current = String::new();
    let mut chars = field.chars().peekable();
    while let Some(c) = chars.next() {
        let at_boundary = chars.peek().is_none_or(|n| n.is_whitespace());
        if c == '.' && at_boundary && current.contains(',') {
            push_address(&mut addresses, &current);
            current.clear();
        } else {
            current.push(c);
        }
    }
    push_address(&mut addresses, &current);

    let diagnostic = (addresses.is_empty() && !field.trim().is_empty())
        .then(|| format!("no address found in field `{}`", field.trim()));
    AddressSplit {
        addresses,
        diagnostic,
    }
}

fn push_address(out: &mut Vec<String>, chunk: &str) {
    let chunk = chunk
        .trim()
        .trim_end_matches(|c: char| c == '.' || c.is_whitespace());
    if chunk.chars().any(|c| c.is_alphanumeric()) {
        out.push(chunk.to_string());
    }
}
