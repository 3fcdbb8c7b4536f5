//! Research profiles of a university's organizational units, built top-down
//! from the affiliation addresses of its publications.
//!
//! The crate walks one pipeline:
//!
//! 1. [`corpus`]: load bibliographic records (JSONL or CSV), keep the
//!    counted document types and the target institution's addresses.
//! 2. [`address`]: split every address into head institution, unit tokens
//!    and location tail.
//! 3. [`normalize`]: map unit-name variants onto canonical names and type
//!    each unit (department, faculty, research center, ...).
//! 4. [`orgnet`]: weighted unit co-occurrence network, components,
//!    betweenness centrality, GraphML/DOT/CSV export.
//! 5. [`profiles`]: per-unit distribution over a classification system,
//!    Gini concentration, field counts and the indicator table.
//! 6. [`pipeline`]: configuration, validation and the end-to-end run.
//!
//! ```
//! use orgprofile::address::parse_address;
//!
//! let parse = parse_address(
//!     "Univ Granada, Fac Sci, Dept Math Anal, E-18071 Granada, Spain",
//! ).unwrap();
//! assert_eq!(parse.head, "UNIV GRANADA");
//! assert_eq!(parse.unit_tokens, ["FAC SCI", "DEPT MATH ANAL"]);
//! assert_eq!(parse.tail, ["E-18071 GRANADA", "SPAIN"]);
//! ```

pub mod address;
pub mod corpus;
pub mod normalize;
pub mod orgnet;
pub mod pipeline;
pub mod profiles;

pub use address::{parse_address, split_addresses, AddressParse};
pub use corpus::{BibRecord, DocType, InstitutionMatcher};
pub use normalize::{AliasTable, CanonicalUnit, TypeRuleSet, UnitType};
pub use orgnet::OrgNetwork;
pub use pipeline::{PipelineConfig, RunReport};
pub use profiles::{ClassificationSystem, ProfileVector, UnitIndicators};
