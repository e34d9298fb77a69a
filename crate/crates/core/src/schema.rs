//! Extraction of the machine-readable contract from a T-Box graph.
//!
//! The contract covers named classes and their subclass hierarchy, object
//! and datatype properties with domain/range typing, cardinality
//! restrictions, enumerated vocabularies, and `rdfs:comment` guidance.
//! Comments are carried verbatim and never evaluated.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::rdf::vocab::{owl, rdf, rdfs, xsd};
use crate::rdf::{iri as pred, normalize_label, serialize_turtle, Graph, Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("schema error: {0}")]
    Invalid(String),
    #[error("unknown class {0}")]
    UnknownClass(Iri),
    #[error("unknown property {0}")]
    UnknownProperty(Iri),
}

fn invalid(detail: impl Into<String>) -> SchemaError {
    SchemaError::Invalid(detail.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassDef {
    pub iri: Iri,
    pub local: String,
    pub label: Option<String>,
    pub parents: BTreeSet<Iri>,
    pub comment: Option<String>,
    pub is_top_entity: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    Object,
    Datatype,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyDef {
    pub iri: Iri,
    pub local: String,
    pub kind: PropertyKind,
    /// Union semantics: an empty set means unrestricted.
    pub domain: BTreeSet<Iri>,
    /// Range classes for object properties, or the single XSD datatype.
    pub range: BTreeSet<Iri>,
    pub comment: Option<String>,
}

impl PropertyDef {
    /// The datatype of a datatype property.
    pub fn datatype(&self) -> Option<&Iri> {
        match self.kind {
            PropertyKind::Datatype => self.range.iter().next(),
            PropertyKind::Object => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardinalityRule {
    pub on_class: Iri,
    pub property: Iri,
    pub min: Option<u32>,
    pub max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabEntry {
    pub label: String,
    pub iri: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vocabulary {
    pub property: Iri,
    pub allowed: Vec<VocabEntry>,
}

impl Vocabulary {
    pub fn labels(&self) -> Vec<String> {
        self.allowed.iter().map(|e| e.label.clone()).collect()
    }

    /// Matches `value` against the labels using store-level normalization.
    pub fn resolve(&self, value: &str) -> Option<&VocabEntry> {
        let wanted = normalize_label(value);
        self.allowed.iter().find(|e| normalize_label(&e.label) == wanted)
    }

    pub fn contains_iri(&self, iri: &Iri) -> bool {
        self.allowed.iter().any(|e| &e.iri == iri)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaModel {
    pub classes: BTreeMap<Iri, ClassDef>,
    pub properties: BTreeMap<Iri, PropertyDef>,
    pub cardinalities: Vec<CardinalityRule>,
    pub vocabularies: BTreeMap<Iri, Vocabulary>,
    /// SHA-256 of the canonical serialization of the source T-Box.
    pub fingerprint: String,
    pub prefixes: BTreeMap<String, Iri>,
}

impl SchemaModel {
    pub fn class(&self, iri: &Iri) -> Result<&ClassDef, SchemaError> {
        self.classes
            .get(iri)
            .ok_or_else(|| SchemaError::UnknownClass(iri.clone()))
    }

    pub fn property(&self, iri: &Iri) -> Result<&PropertyDef, SchemaError> {
        self.properties
            .get(iri)
            .ok_or_else(|| SchemaError::UnknownProperty(iri.clone()))
    }

    pub fn top_entity(&self) -> Option<&ClassDef> {
        self.classes.values().find(|c| c.is_top_entity)
    }

    /// Reflexive-transitive ancestors of `class`.
    pub fn subclass_closure(&self, class: &Iri) -> Result<BTreeSet<Iri>, SchemaError> {
        self.class(class)?;
        let mut seen = BTreeSet::new();
        let mut stack = vec![class.clone()];
        while let Some(c) = stack.pop() {
            if !seen.insert(c.clone()) {
                continue;
            }
            if let Some(def) = self.classes.get(&c) {
                stack.extend(def.parents.iter().cloned());
            }
        }
        Ok(seen)
    }

    /// Union of the closures of every declared class in `types`; undeclared
    /// types are ignored.
    pub fn closure_of_types<'a>(&self, types: impl IntoIterator<Item = &'a Iri>) -> BTreeSet<Iri> {
        types
            .into_iter()
            .filter_map(|t| self.subclass_closure(t).ok())
            .flatten()
            .collect()
    }

    pub fn allowed_values(&self, property: &Iri) -> Result<Option<&Vocabulary>, SchemaError> {
        self.property(property)?;
        Ok(self.vocabularies.get(property))
    }

    /// Whether an instance with the given (closed) types satisfies the
    /// property's domain.
    pub fn domain_admits(&self, property: &PropertyDef, closed_types: &BTreeSet<Iri>) -> bool {
        property.domain.is_empty() || property.domain.iter().any(|d| closed_types.contains(d))
    }

    /// Cardinality rules applicable to an instance with the given closed types.
    pub fn rules_for<'a>(&'a self, closed_types: &'a BTreeSet<Iri>) -> impl Iterator<Item = &'a CardinalityRule> + 'a {
        self.cardinalities
            .iter()
            .filter(move |r| closed_types.contains(&r.on_class))
    }

    /// Properties whose domain admits `class` (via its closure), sorted by IRI.
    pub fn properties_for_class(&self, class: &Iri) -> Result<Vec<&PropertyDef>, SchemaError> {
        let closure = self.subclass_closure(class)?;
        Ok(self
            .properties
            .values()
            .filter(|p| self.domain_admits(p, &closure))
            .collect())
    }
}

fn term_iri(s: &'static str) -> Term {
    Term::Iri(pred(s))
}

struct Extractor<'g> {
    g: &'g Graph,
}

impl<'g> Extractor<'g> {
    fn literal_values(&self, subject: &Term, predicate: &'static str) -> Vec<String> {
        let p = pred(predicate);
        let mut values: Vec<String> = self
            .g
            .objects(subject, &p)
            .filter_map(|o| o.as_literal().map(|l| l.lexical().to_string()))
            .collect();
        values.sort();
        values
    }

    fn joined_literal(&self, subject: &Term, predicate: &'static str) -> Option<String> {
        let values = self.literal_values(subject, predicate);
        (!values.is_empty()).then(|| values.join(" "))
    }

    fn list_items(&self, head: &Term) -> Result<Vec<Term>, SchemaError> {
        let first = pred(rdf::FIRST);
        let rest = pred(rdf::REST);
        let nil = term_iri(rdf::NIL);
        let mut items = Vec::new();
        let mut node = head.clone();
        let mut visited = BTreeSet::new();
        while node != nil {
            if !visited.insert(node.clone()) {
                return Err(invalid(format!("cyclic RDF list at {node}")));
            }
            let item = self
                .g
                .object(&node, &first)
                .ok_or_else(|| invalid(format!("malformed RDF list at {node}: missing rdf:first")))?;
            items.push(item.clone());
            node = self
                .g
                .object(&node, &rest)
                .ok_or_else(|| invalid(format!("malformed RDF list at {node}: missing rdf:rest")))?
                .clone();
        }
        Ok(items)
    }

    fn vocab_entry(&self, item: &Term) -> Result<VocabEntry, SchemaError> {
        let iri = item
            .as_iri()
            .ok_or_else(|| invalid(format!("enumerated value {item} is not a named individual")))?;
        let label = self
            .literal_values(item, rdfs::LABEL)
            .into_iter()
            .next()
            .unwrap_or_else(|| iri.local_name().to_string());
        Ok(VocabEntry {
            label,
            iri: iri.clone(),
        })
    }

    /// Enumerated values for a range node: an `owl:oneOf` list, or the named
    /// individuals typed with the (named) range class.
    fn enumeration(&self, range: &Term) -> Result<Option<Vec<VocabEntry>>, SchemaError> {
        let one_of = pred(owl::ONE_OF);
        if let Some(list) = self.g.object(range, &one_of) {
            let entries = self
                .list_items(list)?
                .iter()
                .map(|item| self.vocab_entry(item))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Some(entries));
        }
        let Some(class) = range.as_iri() else {
            return Ok(None);
        };
        let members: Vec<Term> = self
            .g
            .instances_of(class)
            .into_iter()
            .filter(|m| m.as_iri().is_some())
            .collect();
        if members.is_empty() {
            return Ok(None);
        }
        members
            .iter()
            .map(|m| self.vocab_entry(m))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

fn is_true_literal(term: &Term) -> bool {
    term.as_literal().is_some_and(|l| matches!(l.lexical(), "true" | "1"))
}

fn parse_cardinality(term: &Term, class: &Iri) -> Result<u32, SchemaError> {
    term.as_literal()
        .and_then(|l| l.lexical().trim_start_matches('+').parse::<u32>().ok())
        .ok_or_else(|| invalid(format!("invalid cardinality {term} on {class}")))
}

/// Builds the [`SchemaModel`] for a T-Box.
pub fn extract_schema(tbox: &Graph) -> Result<SchemaModel, SchemaError> {
    let ex = Extractor { g: tbox };
    let ty = pred(rdf::TYPE);
    let sub_class_of = pred(rdfs::SUB_CLASS_OF);

    // classes
    let mut class_iris = BTreeSet::new();
    for class_type in [owl::CLASS, rdfs::CLASS] {
        for s in tbox.subjects(&ty, &term_iri(class_type)) {
            if let Some(iri) = s.as_iri() {
                if iri.as_str() != owl::THING {
                    class_iris.insert(iri.clone());
                }
            }
        }
    }
    if class_iris.is_empty() {
        return Err(invalid("T-Box declares no owl:Class or rdfs:Class"));
    }

    let mut classes = BTreeMap::new();
    let mut restriction_nodes: Vec<(Iri, Term)> = Vec::new();
    for iri in &class_iris {
        let node = Term::Iri(iri.clone());
        let mut parents = BTreeSet::new();
        for parent in tbox.objects(&node, &sub_class_of) {
            match parent {
                Term::Iri(p) if p.as_str() == owl::THING => {}
                Term::Iri(p) => {
                    if !class_iris.contains(p) {
                        return Err(invalid(format!("{iri} is a subclass of undeclared class {p}")));
                    }
                    parents.insert(p.clone());
                }
                Term::Blank(_) => restriction_nodes.push((iri.clone(), parent.clone())),
                Term::Literal(_) => return Err(invalid(format!("literal superclass on {iri}"))),
            }
        }
        let is_top_entity = tbox
            .matching(Some(&node), None, None)
            .any(|t| t.predicate().local_name() == "isTopEntity" && is_true_literal(t.object()));
        classes.insert(
            iri.clone(),
            ClassDef {
                iri: iri.clone(),
                local: iri.local_name().to_string(),
                label: ex.literal_values(&node, rdfs::LABEL).into_iter().next(),
                parents,
                comment: ex.joined_literal(&node, rdfs::COMMENT),
                is_top_entity,
            },
        );
    }

    let tops: Vec<&Iri> = classes.values().filter(|c| c.is_top_entity).map(|c| &c.iri).collect();
    if tops.len() > 1 {
        return Err(invalid(format!(
            "more than one class is marked as top entity: {}",
            tops.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    check_acyclic(&classes)?;

    // properties
    let domain_pred = pred(rdfs::DOMAIN);
    let range_pred = pred(rdfs::RANGE);
    let mut properties = BTreeMap::new();
    let mut vocabularies = BTreeMap::new();
    for (kind, kind_iri) in [
        (PropertyKind::Object, owl::OBJECT_PROPERTY),
        (PropertyKind::Datatype, owl::DATATYPE_PROPERTY),
    ] {
        for s in tbox.subjects(&ty, &term_iri(kind_iri)) {
            let Some(iri) = s.as_iri() else { continue };
            if properties.contains_key(iri) {
                return Err(invalid(format!(
                    "{iri} is declared as both object and datatype property"
                )));
            }
            let mut domain = BTreeSet::new();
            for d in tbox.objects(s, &domain_pred) {
                match d.as_iri() {
                    Some(d) if d.as_str() == owl::THING => {}
                    Some(d) if class_iris.contains(d) => {
                        domain.insert(d.clone());
                    }
                    _ => return Err(invalid(format!("domain {d} of {iri} is not a declared class"))),
                }
            }
            let ranges: Vec<&Term> = tbox.objects(s, &range_pred).collect();
            let mut range = BTreeSet::new();
            match kind {
                PropertyKind::Datatype => {
                    let dt = match ranges.as_slice() {
                        [] => pred(xsd::STRING),
                        [Term::Iri(r)] if r.as_str() == "http://www.w3.org/2000/01/rdf-schema#Literal" => {
                            pred(xsd::STRING)
                        }
                        [Term::Iri(r)] if r.as_str().starts_with(xsd::NS) => r.clone(),
                        [other] => {
                            return Err(invalid(format!(
                                "range {other} of datatype property {iri} is not an XSD datatype"
                            )))
                        }
                        _ => return Err(invalid(format!("datatype property {iri} has more than one range"))),
                    };
                    range.insert(dt);
                }
                PropertyKind::Object => {
                    let mut entries: Vec<VocabEntry> = Vec::new();
                    for r in &ranges {
                        if let Some(found) = ex.enumeration(r)? {
                            entries.extend(found);
                            if let Some(r) = r.as_iri().filter(|r| class_iris.contains(*r)) {
                                range.insert(r.clone());
                            }
                            continue;
                        }
                        match r.as_iri() {
                            Some(r) if r.as_str() == owl::THING => {}
                            Some(r) if class_iris.contains(r) => {
                                range.insert(r.clone());
                            }
                            _ => return Err(invalid(format!("range {r} of {iri} is not a declared class"))),
                        }
                    }
                    if !entries.is_empty() {
                        let mut seen = BTreeSet::new();
                        for e in &entries {
                            if !seen.insert(normalize_label(&e.label)) {
                                return Err(invalid(format!("duplicate vocabulary label '{}' for {iri}", e.label)));
                            }
                        }
                        vocabularies.insert(
                            iri.clone(),
                            Vocabulary {
                                property: iri.clone(),
                                allowed: entries,
                            },
                        );
                    }
                }
            }
            properties.insert(
                iri.clone(),
                PropertyDef {
                    iri: iri.clone(),
                    local: iri.local_name().to_string(),
                    kind,
                    domain,
                    range,
                    comment: ex.joined_literal(s, rdfs::COMMENT),
                },
            );
        }
    }

    // cardinality restrictions
    let on_property = pred(owl::ON_PROPERTY);
    let restriction = term_iri(owl::RESTRICTION);
    let mut cardinalities = Vec::new();
    for (class, node) in &restriction_nodes {
        let card = |p: &'static str| {
            tbox.object(node, &pred(p))
                .map(|t| parse_cardinality(t, class))
                .transpose()
        };
        let min = card(owl::MIN_CARDINALITY)?;
        let max = card(owl::MAX_CARDINALITY)?;
        let exact = card(owl::CARDINALITY)?;
        let is_restriction = tbox.types_of(node).contains(restriction.as_iri().unwrap());
        let prop = tbox.object(node, &on_property);
        let Some(prop) = prop else {
            if is_restriction || min.is_some() || max.is_some() || exact.is_some() {
                return Err(invalid(format!("restriction on {class} has no owl:onProperty")));
            }
            continue;
        };
        let prop = prop
            .as_iri()
            .filter(|p| properties.contains_key(*p))
            .ok_or_else(|| invalid(format!("restriction on {class} refers to undeclared property {prop}")))?;
        let (min, max) = match exact {
            Some(n) => (Some(n), Some(n)),
            None => (min, max),
        };
        if min.is_none() && max.is_none() {
            continue;
        }
        if let (Some(lo), Some(hi)) = (min, max) {
            if lo > hi {
                return Err(invalid(format!("restriction on {class} has min {lo} > max {hi}")));
            }
        }
        cardinalities.push(CardinalityRule {
            on_class: class.clone(),
            property: prop.clone(),
            min,
            max,
        });
    }
    cardinalities
        .sort_by(|a, b| (&a.on_class, &a.property, a.min, a.max).cmp(&(&b.on_class, &b.property, b.min, b.max)));
    cardinalities.dedup();

    let fingerprint = hex::encode(Sha256::digest(serialize_turtle(tbox).as_bytes()));
    Ok(SchemaModel {
        classes,
        properties,
        cardinalities,
        vocabularies,
        fingerprint,
        prefixes: tbox.prefixes().clone(),
    })
}

fn check_acyclic(classes: &BTreeMap<Iri, ClassDef>) -> Result<(), SchemaError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    fn visit(c: &Iri, classes: &BTreeMap<Iri, ClassDef>, marks: &mut BTreeMap<Iri, Mark>) -> Result<(), SchemaError> {
        match marks.get(c) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Active) => return Err(invalid(format!("cyclic subclass chain through {c}"))),
            None => {}
        }
        marks.insert(c.clone(), Mark::Active);
        if let Some(def) = classes.get(c) {
            for p in &def.parents {
                visit(p, classes, marks)?;
            }
        }
        marks.insert(c.clone(), Mark::Done);
        Ok(())
    }
    let mut marks = BTreeMap::new();
    for c in classes.keys() {
        visit(c, classes, &mut marks)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_turtle;

    pub(crate) const FIXTURE: &str = include_str!("../fixtures/synthesis_tbox.ttl");
    const EX: &str = "https://ontoforge.example/synthesis#";
    const OM: &str = "http://www.ontology-of-units-of-measure.org/resource/om-2/";

    fn ex(local: &str) -> Iri {
        Iri::new(format!("{EX}{local}")).unwrap()
    }

    fn fixture() -> SchemaModel {
        extract_schema(&parse_turtle(FIXTURE).unwrap()).unwrap()
    }

    const HEADER: &str = "@prefix ex: <http://ex.org/> .\n@prefix owl: <http://www.w3.org/2002/07/owl#> .\n@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n";

    fn schema_of(body: &str) -> Result<SchemaModel, SchemaError> {
        extract_schema(&parse_turtle(&format!("{HEADER}{body}")).unwrap())
    }

    #[test]
    fn fixture_counts() {
        let s = fixture();
        assert_eq!(s.classes.len(), 5);
        assert_eq!(s.properties.len(), 7);
        assert_eq!(s.cardinalities.len(), 2);
        assert_eq!(s.cardinalities.iter().filter(|r| r.min.is_some()).count(), 1);
        assert_eq!(s.vocabularies.len(), 1);
        assert_eq!(s.top_entity().unwrap().iri, ex("Synthesis"));
        let step = &s.properties[&ex("hasStepNumber")];
        assert_eq!(step.kind, PropertyKind::Datatype);
        assert_eq!(step.datatype().unwrap().as_str(), xsd::INTEGER);
        assert!(s.classes[&ex("Synthesis")]
            .comment
            .as_deref()
            .unwrap()
            .contains("cited from other work"));
    }

    #[test]
    fn fixture_cardinalities() {
        let s = fixture();
        assert_eq!(
            s.cardinalities,
            vec![
                CardinalityRule {
                    on_class: ex("Step"),
                    property: ex("hasStepNumber"),
                    min: None,
                    max: Some(1)
                },
                CardinalityRule {
                    on_class: ex("Synthesis"),
                    property: ex("hasStep"),
                    min: Some(1),
                    max: None
                },
            ]
        );
    }

    #[test]
    fn single_class_no_properties() {
        let s = schema_of("ex:Only a owl:Class .").unwrap();
        assert_eq!(s.classes.len(), 1);
        assert!(s.properties.is_empty());
        assert!(s.cardinalities.is_empty());
        assert!(s.vocabularies.is_empty());
        assert!(s.top_entity().is_none());
    }

    #[test]
    fn no_classes_is_an_error() {
        assert!(matches!(
            schema_of("ex:p a owl:ObjectProperty ."),
            Err(SchemaError::Invalid(_))
        ));
    }

    #[test]
    fn restriction_without_on_property() {
        let err =
            schema_of("ex:A a owl:Class ; rdfs:subClassOf [ a owl:Restriction ; owl:minCardinality 1 ] .").unwrap_err();
        assert!(err.to_string().contains("onProperty"), "{err}");
    }

    #[test]
    fn dangling_references() {
        assert!(schema_of("ex:A a owl:Class . ex:p a owl:ObjectProperty ; rdfs:domain ex:Nope .").is_err());
        assert!(schema_of("ex:A a owl:Class . ex:p a owl:ObjectProperty ; rdfs:range ex:Nope .").is_err());
        assert!(schema_of("ex:A a owl:Class ; rdfs:subClassOf ex:Nope .").is_err());
        assert!(schema_of(
            "ex:A a owl:Class ; rdfs:subClassOf [ a owl:Restriction ; owl:onProperty ex:p ; owl:maxCardinality 1 ] ."
        )
        .is_err());
    }

    #[test]
    fn cyclic_subclasses() {
        let err = schema_of("ex:A a owl:Class ; rdfs:subClassOf ex:B . ex:B a owl:Class ; rdfs:subClassOf ex:A .")
            .unwrap_err();
        assert!(err.to_string().contains("cyclic"));
    }

    #[test]
    fn exact_cardinality_expands() {
        let s = schema_of(
            "ex:A a owl:Class ; rdfs:subClassOf [ a owl:Restriction ; owl:onProperty ex:p ; owl:cardinality 2 ] .
             ex:p a owl:DatatypeProperty ; rdfs:domain ex:A ; rdfs:range xsd:string .",
        )
        .unwrap();
        assert_eq!(s.cardinalities[0].min, Some(2));
        assert_eq!(s.cardinalities[0].max, Some(2));
    }

    #[test]
    fn instance_enumerated_vocabulary() {
        let s = schema_of(
            "ex:Q a owl:Class . ex:Unit a owl:Class .
             ex:unit a owl:ObjectProperty ; rdfs:domain ex:Q ; rdfs:range ex:Unit .
             ex:m a ex:Unit ; rdfs:label \"metre\" . ex:cm a ex:Unit ; rdfs:label \"centimetre\" .",
        )
        .unwrap();
        let vocab = s
            .allowed_values(&Iri::new("http://ex.org/unit").unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(vocab.labels(), vec!["centimetre", "metre"]);
    }

    #[test]
    fn duplicate_vocab_labels_rejected() {
        let err = schema_of(
            "ex:Q a owl:Class . ex:Unit a owl:Class .
             ex:unit a owl:ObjectProperty ; rdfs:range ex:Unit .
             ex:m a ex:Unit ; rdfs:label \"Metre\" . ex:m2 a ex:Unit ; rdfs:label \" metre\" .",
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn multiple_top_entities_rejected() {
        let err = schema_of(
            "ex:A a owl:Class ; ex:isTopEntity true . ex:B a owl:Class ; ex:isTopEntity \"true\"^^xsd:boolean .",
        )
        .unwrap_err();
        assert!(err.to_string().contains("top entity"));
    }

    #[test]
    fn multiple_domains_are_a_union() {
        let s = schema_of(
            "ex:A a owl:Class . ex:B a owl:Class . ex:C a owl:Class .
             ex:p a owl:DatatypeProperty ; rdfs:domain ex:A , ex:B .",
        )
        .unwrap();
        let p = s.property(&Iri::new("http://ex.org/p").unwrap()).unwrap();
        let a = s.subclass_closure(&Iri::new("http://ex.org/A").unwrap()).unwrap();
        let c = s.subclass_closure(&Iri::new("http://ex.org/C").unwrap()).unwrap();
        assert!(s.domain_admits(p, &a));
        assert!(!s.domain_admits(p, &c));
        assert_eq!(p.datatype().unwrap().as_str(), xsd::STRING);
    }

    #[test]
    fn closure_examples() {
        let s = fixture();
        assert_eq!(s.subclass_closure(&ex("Synthesis")).unwrap(), [ex("Synthesis")].into());
        assert_eq!(
            s.subclass_closure(&ex("HeatChillStep")).unwrap(),
            [ex("HeatChillStep"), ex("Step")].into()
        );
        assert_eq!(
            s.subclass_closure(&ex("Nope")),
            Err(SchemaError::UnknownClass(ex("Nope")))
        );
    }

    #[test]
    fn closure_matches_reachability_oracle() {
        // breadth-first reachability over raw rdfs:subClassOf triples
        let g = parse_turtle(FIXTURE).unwrap();
        let s = extract_schema(&g).unwrap();
        let sub = Iri::new(rdfs::SUB_CLASS_OF).unwrap();
        for class in s.classes.keys() {
            let mut reach = BTreeSet::from([class.clone()]);
            let mut frontier = vec![class.clone()];
            while let Some(c) = frontier.pop() {
                for t in g.matching(Some(&Term::Iri(c)), Some(&sub), None) {
                    if let Term::Iri(p) = t.object() {
                        if reach.insert(p.clone()) {
                            frontier.push(p.clone());
                        }
                    }
                }
            }
            assert_eq!(s.subclass_closure(class).unwrap(), reach);
            assert!(reach.contains(class));
        }
    }

    #[test]
    fn allowed_values_examples() {
        let s = fixture();
        let vocab = s.allowed_values(&ex("hasUnit")).unwrap().unwrap();
        let pairs: Vec<(&str, &str)> = vocab
            .allowed
            .iter()
            .map(|e| (e.label.as_str(), e.iri.as_str()))
            .collect();
        assert_eq!(
            pairs,
            vec![
                ("degree Celsius", &format!("{OM}degreeCelsius")[..]),
                ("kelvin", &format!("{OM}kelvin")[..]),
            ]
        );
        assert_eq!(s.allowed_values(&ex("hasYield")).unwrap(), None);
        assert_eq!(
            s.allowed_values(&ex("nope")),
            Err(SchemaError::UnknownProperty(ex("nope")))
        );
        assert_eq!(vocab.resolve("  Degree   celsius").unwrap().label, "degree Celsius");
        assert!(vocab.resolve("C").is_none());
    }

    #[test]
    fn extraction_is_idempotent_through_serialization() {
        let g = parse_turtle(FIXTURE).unwrap();
        let again = parse_turtle(&serialize_turtle(&g)).unwrap();
        assert_eq!(extract_schema(&g).unwrap(), extract_schema(&again).unwrap());
    }
}
