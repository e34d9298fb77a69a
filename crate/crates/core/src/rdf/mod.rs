//! RDF terms, graphs, the Turtle subset, and deterministic IRI minting.

mod graph;
mod mint;
mod term;
mod turtle;
pub mod vocab;

use thiserror::Error;

pub use graph::{normalize_label, Graph};
pub use mint::{validate_doc_id, MintState};
pub use term::{lexical_matches, BlankNode, Iri, Literal, Term, Triple};
pub use turtle::{parse_turtle, serialize_turtle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown prefix '{0}'")]
    UnknownPrefix(String),
    #[error("invalid IRI '{0}'")]
    InvalidIri(String),
    #[error("invalid blank node label '{0}'")]
    InvalidBlankNode(String),
    #[error("lexical form '{lexical}' is not valid for datatype <{datatype}>")]
    InvalidLiteral { lexical: String, datatype: String },
    #[error("invalid language tag '{0}'")]
    InvalidLanguageTag(String),
    #[error("literal cannot be a subject: {0}")]
    LiteralSubject(String),
    #[error("invalid document id '{0}'")]
    InvalidDocId(String),
    #[error("invalid local name '{0}'")]
    InvalidLocalName(String),
}

/// Iri constant helper for the crate's own vocabulary tables.
pub(crate) fn iri(s: &'static str) -> Iri {
    Iri::from_static(s)
}
