use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{normalize, GroundError};
use crate::rdf::vocab::{rdf, rdfs};
use crate::rdf::{Graph, Iri, Term};

pub const DEFAULT_TAU: f64 = 0.85;
pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexEntry {
    pub label_norm: String,
    pub target_iri: Iri,
    pub class: Iri,
    pub predicate: Iri,
    pub label_raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelIndex {
    pub entries: Vec<IndexEntry>,
    pub source_fingerprint: String,
}

impl LabelIndex {
    /// Sorts and deduplicates `entries` and fingerprints the result.
    pub fn from_entries(mut entries: Vec<IndexEntry>) -> Self {
        entries.sort();
        entries.dedup();
        let canonical = serde_json::to_string(&entries).expect("entries serialize");
        let source_fingerprint = hex::encode(Sha256::digest(canonical.as_bytes()));
        LabelIndex {
            entries,
            source_fingerprint,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("index serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<(), GroundError> {
        fs::write(path, self.to_json()).map_err(|e| GroundError::io(path, e))
    }

    /// Loads an index file, rejecting ones whose entries are out of order
    /// or whose fingerprint does not match.
    pub fn load(path: &Path) -> Result<Self, GroundError> {
        let text = fs::read_to_string(path).map_err(|e| GroundError::io(path, e))?;
        let index: LabelIndex = serde_json::from_str(&text).map_err(|e| GroundError::InvalidIndex(e.to_string()))?;
        let rebuilt = LabelIndex::from_entries(index.entries.clone());
        if rebuilt != index {
            return Err(GroundError::InvalidIndex(format!(
                "{} is not sorted or its fingerprint does not match",
                path.display()
            )));
        }
        Ok(index)
    }
}

/// Coverage of a label-like predicate over the instances of some classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredicateCoverage {
    pub predicate: Iri,
    pub instances_with: usize,
    pub instances_total: usize,
}

impl PredicateCoverage {
    pub fn fraction(&self) -> f64 {
        if self.instances_total == 0 {
            0.0
        } else {
            self.instances_with as f64 / self.instances_total as f64
        }
    }
}

fn typed_instances(graph: &Graph, classes: &BTreeSet<Iri>) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let mut out: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for t in graph.iter() {
        if t.predicate().as_str() != rdf::TYPE {
            continue;
        }
        if let (Term::Iri(s), Term::Iri(c)) = (t.subject(), t.object()) {
            if classes.contains(c) {
                out.entry(s.clone()).or_default().insert(c.clone());
            }
        }
    }
    out
}

/// Predicates with string-literal objects on instances of `classes`, ranked
/// by coverage (rdfs:label first when present, ties by IRI).
pub fn discover_label_predicates(reference: &Graph, classes: &BTreeSet<Iri>) -> Vec<PredicateCoverage> {
    let instances = typed_instances(reference, classes);
    let mut having: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for t in reference.iter() {
        let Term::Iri(s) = t.subject() else { continue };
        if !instances.contains_key(s) {
            continue;
        }
        if t.object().as_literal().is_some_and(|l| l.is_string_like()) {
            having.entry(t.predicate().clone()).or_default().insert(s.clone());
        }
    }
    let total = instances.len();
    let mut ranked: Vec<PredicateCoverage> = having
        .into_iter()
        .map(|(predicate, subjects)| PredicateCoverage {
            predicate,
            instances_with: subjects.len(),
            instances_total: total,
        })
        .collect();
    ranked.sort_by(|a, b| {
        let a_label = a.predicate.as_str() == rdfs::LABEL;
        let b_label = b.predicate.as_str() == rdfs::LABEL;
        b_label
            .cmp(&a_label)
            .then(b.instances_with.cmp(&a.instances_with))
            .then(a.predicate.cmp(&b.predicate))
    });
    ranked
}

/// One entry per (instance, predicate, string literal) with the instance
/// typed by one of `classes`.
pub fn build_label_index(reference: &Graph, classes: &BTreeSet<Iri>, predicates: &[Iri]) -> LabelIndex {
    let instances = typed_instances(reference, classes);
    let predicates: BTreeSet<&Iri> = predicates.iter().collect();
    let mut entries = Vec::new();
    for t in reference.iter() {
        let Term::Iri(s) = t.subject() else { continue };
        let Some(types) = instances.get(s) else { continue };
        if !predicates.contains(t.predicate()) {
            continue;
        }
        let Some(lit) = t.object().as_literal().filter(|l| l.is_string_like()) else {
            continue;
        };
        for class in types {
            entries.push(IndexEntry {
                label_norm: normalize(lit.lexical()),
                target_iri: s.clone(),
                class: class.clone(),
                predicate: t.predicate().clone(),
                label_raw: lit.lexical().to_string(),
            });
        }
    }
    LabelIndex::from_entries(entries)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub target_iri: Iri,
    pub score: f64,
    pub matched_label: String,
}

/// Normalized Levenshtein similarity of two already-normalized strings.
pub(crate) fn similarity(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let longest = a.chars().count().max(b.chars().count());
    1.0 - strsim::levenshtein(a, b) as f64 / longest as f64
}

pub fn lookup(index: &LabelIndex, surface: &str, k: usize) -> Vec<Candidate> {
    lookup_with(index, surface, k, DEFAULT_TAU)
}

/// Top-`k` targets scoring at least `tau`, ordered by descending score then
/// target IRI. Each target appears once, with its best-matching label.
pub fn lookup_with(index: &LabelIndex, surface: &str, k: usize, tau: f64) -> Vec<Candidate> {
    let wanted = normalize(surface);
    if wanted.is_empty() || k == 0 {
        return Vec::new();
    }
    let mut best: BTreeMap<&Iri, (f64, &str)> = BTreeMap::new();
    for e in &index.entries {
        let score = similarity(&wanted, &e.label_norm);
        if score < tau {
            continue;
        }
        match best.get(&e.target_iri) {
            Some((s, _)) if *s >= score => {}
            _ => {
                best.insert(&e.target_iri, (score, e.label_raw.as_str()));
            }
        }
    }
    let mut out: Vec<Candidate> = best
        .into_iter()
        .map(|(iri, (score, label))| Candidate {
            target_iri: iri.clone(),
            score,
            matched_label: label.to_string(),
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.target_iri.cmp(&b.target_iri))
    });
    out.truncate(k);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    const REF: &str = r#"@prefix ref: <http://ref.example/> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ref:benzene a ref:Species ; rdfs:label "benzene" ; ref:altName "benzol" .
ref:toluene a ref:Species ; rdfs:label "Toluene" .
ref:water a ref:Species ; rdfs:label "water" ; ref:mass 18 ; ref:seeAlso ref:benzene .
ref:lab a ref:Place ; rdfs:label "lab" .
"#;

    fn reference() -> Graph {
        parse_turtle(REF).unwrap()
    }

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn species() -> BTreeSet<Iri> {
        [iri("http://ref.example/Species")].into()
    }

    #[test]
    fn discovery_counts() {
        let ranked = discover_label_predicates(&reference(), &species());
        let got: Vec<(&str, usize, usize)> = ranked
            .iter()
            .map(|c| (c.predicate.as_str(), c.instances_with, c.instances_total))
            .collect();
        assert_eq!(got, vec![(rdfs::LABEL, 3, 3), ("http://ref.example/altName", 1, 3)]);
        assert!(discover_label_predicates(&reference(), &[iri("http://ref.example/None")].into()).is_empty());
    }

    #[test]
    fn index_build_and_reload() {
        let idx = build_label_index(&reference(), &species(), &[iri(rdfs::LABEL)]);
        assert_eq!(idx.len(), 3);
        assert!(build_label_index(&reference(), &species(), &[]).is_empty());
        let again = build_label_index(&reference(), &species(), &[iri(rdfs::LABEL)]);
        assert_eq!(idx.source_fingerprint, again.source_fingerprint);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("index.json");
        idx.save(&path).unwrap();
        let loaded = LabelIndex::load(&path).unwrap();
        assert_eq!(loaded, idx);
        assert_eq!(loaded.to_json(), fs::read_to_string(&path).unwrap());
    }

    #[test]
    fn lookup_examples() {
        let idx = build_label_index(
            &reference(),
            &species(),
            &[iri(rdfs::LABEL), iri("http://ref.example/altName")],
        );
        let exact = lookup(&idx, " TOLUENE ", 5);
        assert_eq!(exact[0].target_iri, iri("http://ref.example/toluene"));
        assert_eq!(exact[0].score, 1.0);
        let near = lookup(&idx, "benzen", 5);
        assert_eq!(near.len(), 1);
        assert!((near[0].score - (1.0 - 1.0 / 7.0)).abs() < 1e-12);
        assert!(lookup(&idx, "ethanol", 5).is_empty());
        // both benzene labels match; the target is reported once
        let both = lookup_with(&idx, "benzol", 5, 0.5);
        assert_eq!(
            both.iter()
                .filter(|c| c.target_iri.as_str().ends_with("benzene"))
                .count(),
            1
        );
        assert_eq!(both[0].score, 1.0);
    }
}
