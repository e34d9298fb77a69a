use std::collections::{BTreeMap, BTreeSet};

use super::term::{Iri, Literal, Term, Triple};
use super::vocab::{rdf, rdfs};
use super::RdfError;

/// A set of triples plus a prefix map used for (de)serialization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
    prefixes: BTreeMap<String, Iri>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Returns true if the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn remove(&mut self, triple: &Triple) -> bool {
        self.triples.remove(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    /// Binds `prefix` to `namespace`, replacing any previous binding.
    pub fn set_prefix(&mut self, prefix: impl Into<String>, namespace: Iri) {
        self.prefixes.insert(prefix.into(), namespace);
    }

    pub fn resolve_prefixed(&self, name: &str) -> Result<Iri, RdfError> {
        let (prefix, local) = name
            .split_once(':')
            .ok_or_else(|| RdfError::UnknownPrefix(name.to_string()))?;
        let ns = self
            .prefixes
            .get(prefix)
            .ok_or_else(|| RdfError::UnknownPrefix(prefix.to_string()))?;
        Iri::new(format!("{}{}", ns.as_str(), local))
    }

    /// Triples matching the given pattern; `None` is a wildcard.
    pub fn matching<'g, 'q>(
        &'g self,
        subject: Option<&'q Term>,
        predicate: Option<&'q Iri>,
        object: Option<&'q Term>,
    ) -> impl Iterator<Item = &'g Triple> + use<'g, 'q> {
        self.triples.iter().filter(move |t| {
            subject.is_none_or(|s| t.subject() == s)
                && predicate.is_none_or(|p| t.predicate() == p)
                && object.is_none_or(|o| t.object() == o)
        })
    }

    pub fn objects<'g, 'q>(
        &'g self,
        subject: &'q Term,
        predicate: &'q Iri,
    ) -> impl Iterator<Item = &'g Term> + use<'g, 'q> {
        self.matching(Some(subject), Some(predicate), None).map(Triple::object)
    }

    pub fn subjects<'g, 'q>(
        &'g self,
        predicate: &'q Iri,
        object: &'q Term,
    ) -> impl Iterator<Item = &'g Term> + use<'g, 'q> {
        self.matching(None, Some(predicate), Some(object)).map(Triple::subject)
    }

    /// The first object for (subject, predicate), if any.
    pub fn object(&self, subject: &Term, predicate: &Iri) -> Option<&Term> {
        self.objects(subject, predicate).next()
    }

    /// All `rdf:type` objects of `subject` that are IRIs.
    pub fn types_of(&self, subject: &Term) -> BTreeSet<Iri> {
        let ty = Iri::from_static(rdf::TYPE);
        self.objects(subject, &ty).filter_map(|o| o.as_iri().cloned()).collect()
    }

    /// Subjects carrying `rdf:type class`.
    pub fn instances_of(&self, class: &Iri) -> BTreeSet<Term> {
        let ty = Iri::from_static(rdf::TYPE);
        let class = Term::Iri(class.clone());
        self.subjects(&ty, &class).cloned().collect()
    }

    /// True if any triple mentions `term` as subject or object.
    pub fn mentions(&self, term: &Term) -> bool {
        self.triples.iter().any(|t| t.subject() == term || t.object() == term)
    }

    pub fn extend(&mut self, triples: impl IntoIterator<Item = Triple>) {
        self.triples.extend(triples);
    }

    /// Subjects `s` with `(s, rdf:type, class)` and an `rdfs:label` whose
    /// store-normalized form equals that of `label`. Sorted by IRI.
    pub fn find_by_type_and_label(&self, class: &Iri, label: &str) -> Vec<Iri> {
        let wanted = normalize_label(label);
        let label_pred = Iri::from_static(rdfs::LABEL);
        let mut found: Vec<Iri> = self
            .instances_of(class)
            .into_iter()
            .filter(|s| {
                self.objects(s, &label_pred)
                    .any(|o| o.as_literal().is_some_and(|l| normalize_label(l.lexical()) == wanted))
            })
            .filter_map(|s| s.as_iri().cloned())
            .collect();
        found.sort();
        found.dedup();
        found
    }

    /// Literal `rdfs:label` values of `subject`.
    pub fn labels_of(&self, subject: &Term) -> Vec<&Literal> {
        self.triples
            .iter()
            .filter(|t| t.subject() == subject && t.predicate().as_str() == rdfs::LABEL)
            .filter_map(|t| t.object().as_literal())
            .collect()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
            prefixes: BTreeMap::new(),
        }
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

/// Store-level label normalization: trim, collapse internal whitespace,
/// case-fold.
pub fn normalize_label(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}
