use std::collections::BTreeMap;

use super::graph::Graph;
use super::term::{Iri, Term};
use super::RdfError;

/// Deterministic per-(document, class) counters for minting instance IRIs.
///
/// Minted IRIs have the form `<base><doc_id>/<class_local>_<n>` with `n`
/// starting at 1. Counters only ever move forward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintState {
    base: Iri,
    counters: BTreeMap<(String, String), u64>,
}

impl MintState {
    pub fn new(base: Iri) -> Self {
        MintState {
            base,
            counters: BTreeMap::new(),
        }
    }

    pub fn base(&self) -> &Iri {
        &self.base
    }

    pub fn mint(&mut self, doc_id: &str, class_local: &str) -> Result<Iri, RdfError> {
        validate_doc_id(doc_id)?;
        if class_local.is_empty() || !class_local.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-') {
            return Err(RdfError::InvalidLocalName(class_local.to_string()));
        }
        let key = (doc_id.to_string(), class_local.to_string());
        let counter = self.counters.entry(key).or_insert(1);
        let iri = Iri::new(format!("{}{}/{}_{}", self.base.as_str(), doc_id, class_local, counter))?;
        *counter += 1;
        Ok(iri)
    }

    /// Advances counters past every already-minted IRI found in `graph`, so a
    /// session resumed from a persisted store never re-issues an IRI.
    pub fn observe(&mut self, graph: &Graph) {
        for t in graph.iter() {
            for term in [t.subject(), t.object()] {
                if let Term::Iri(iri) = term {
                    self.observe_iri(iri);
                }
            }
        }
    }

    /// Advances the matching counter past `iri` if it has the minted shape.
    pub fn observe_iri(&mut self, iri: &Iri) {
        let Some(rest) = iri.as_str().strip_prefix(self.base.as_str()) else {
            return;
        };
        let Some((doc, tail)) = rest.split_once('/') else {
            return;
        };
        let Some((class, n)) = tail.rsplit_once('_') else {
            return;
        };
        let Ok(n) = n.parse::<u64>() else { return };
        let counter = self.counters.entry((doc.to_string(), class.to_string())).or_insert(1);
        if *counter <= n {
            *counter = n + 1;
        }
    }
}

/// Pipeline document ids use the dotted DOI form, e.g. `10.1039.C5DT04764A`.
pub fn validate_doc_id(doc_id: &str) -> Result<(), RdfError> {
    let bad = doc_id.is_empty()
        || doc_id.chars().any(|c| {
            c == '/'
                || c == '#'
                || c.is_whitespace()
                || c.is_control()
                || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
        });
    if bad {
        Err(RdfError::InvalidDocId(doc_id.to_string()))
    } else {
        Ok(())
    }
}
