//! Label index over a reference graph, deterministic fuzzy lookup, and IRI
//! alignment by rewriting or `owl:sameAs`.

mod endpoint;
mod ground;
mod index;

use thiserror::Error;

pub use endpoint::{fetch_labels_from_endpoint, label_query};
pub use ground::{ground_directory, ground_graph, GroundOptions, GroundingMap, GroundingPair, Mode};
pub use index::{
    build_label_index, discover_label_predicates, lookup, lookup_with, Candidate, IndexEntry, LabelIndex,
    PredicateCoverage, DEFAULT_K, DEFAULT_TAU,
};

#[derive(Debug, Error)]
pub enum GroundError {
    #[error("unknown grounding mode '{0}' (expected sameas or rewrite)")]
    Mode(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("malformed SPARQL results: {0}")]
    MalformedResults(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid index file: {0}")]
    InvalidIndex(String),
    #[error(transparent)]
    Rdf(#[from] crate::rdf::RdfError),
}

impl GroundError {
    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        GroundError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

fn is_dash(c: char) -> bool {
    matches!(
        c,
        '\u{2010}'..='\u{2015}' | '\u{2212}' | '\u{FE58}' | '\u{FE63}' | '\u{FF0D}'
    )
}

fn is_edge_punct(c: char) -> bool {
    matches!(
        c,
        '.' | ',' | ';' | ':' | '!' | '?' | '"' | '\'' | '`' | '\u{2018}' | '\u{2019}' | '\u{201C}' | '\u{201D}'
    )
}

/// Grounder-grade normalization: unify dashes, casefold, collapse
/// whitespace, and strip surrounding punctuation.
pub fn normalize(s: &str) -> String {
    let unified: String = s.chars().map(|c| if is_dash(c) { '-' } else { c }).collect();
    let collapsed = unified.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    collapsed
        .trim_matches(|c: char| is_edge_punct(c) || c.is_whitespace())
        .to_string()
}
