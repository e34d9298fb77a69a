use std::collections::BTreeSet;

use super::report::{ErrorType, ViolationReport};
use crate::compiler::naming::humanize_property;
use crate::rdf::vocab::{owl, rdf, rdfs, xsd};
use crate::rdf::{lexical_matches, Graph, Iri, Literal, Term};
use crate::schema::{CardinalityRule, PropertyDef, PropertyKind, SchemaModel};

pub(crate) fn vocab_message(p: &PropertyDef, value: &str) -> String {
    format!(
        "{} value '{value}' is not permitted by the ontology.",
        humanize_property(&p.local)
    )
}

pub(crate) fn datatype_message(p: &PropertyDef, value: &str, datatype: &Iri) -> String {
    format!(
        "{} value '{value}' is not a valid xsd:{}.",
        humanize_property(&p.local),
        datatype.local_name()
    )
}

pub(crate) fn domain_message(schema: &SchemaModel, p: &PropertyDef, subject: &str) -> String {
    format!(
        "{} does not apply to {subject}; expected {}.",
        p.local,
        class_list(schema, &p.domain)
    )
}

pub(crate) fn range_message(schema: &SchemaModel, p: &PropertyDef, object: &str) -> String {
    format!(
        "{} expects {} but {object} is not one.",
        p.local,
        class_list(schema, &p.range)
    )
}

pub(crate) fn unknown_entity_message(iri: &str) -> String {
    format!("{iri} has not been created in the store.")
}

pub(crate) fn class_list(schema: &SchemaModel, classes: &BTreeSet<Iri>) -> String {
    let names: Vec<&str> = classes
        .iter()
        .map(|c| schema.classes.get(c).map_or(c.local_name(), |d| d.local.as_str()))
        .collect();
    match names.as_slice() {
        [] => "any class".to_string(),
        [one] => format!("a {one}"),
        many => format!("one of {}", many.join(", ")),
    }
}

/// Whether a literal is acceptable for a datatype property's range.
pub(crate) fn literal_fits(lit: &Literal, datatype: &Iri) -> bool {
    let dt = datatype.as_str();
    if dt == xsd::STRING {
        return lit.is_string_like();
    }
    lit.datatype() == datatype && lexical_matches(lit.lexical(), dt)
}

fn term_display(t: &Term) -> String {
    match t {
        Term::Iri(i) => i.as_str().to_string(),
        Term::Literal(l) => l.lexical().to_string(),
        Term::Blank(b) => format!("_:{}", b.label()),
    }
}

fn declared_types(graph: &Graph, schema: &SchemaModel, node: &Term) -> BTreeSet<Iri> {
    graph
        .types_of(node)
        .into_iter()
        .filter(|t| schema.classes.contains_key(t))
        .collect()
}

fn value_count(graph: &Graph, subject: &Term, property: &Iri) -> usize {
    graph.objects(subject, property).count()
}

pub(crate) fn min_report(subject: &Term, rule: &CardinalityRule, min: u32, count: usize) -> ViolationReport {
    ViolationReport::new(
        ErrorType::CardinalityViolation,
        Some(rule.property.as_str()),
        format!(
            "{} requires at least {min} {} value(s) but has {count}.",
            term_display(subject),
            rule.property.local_name()
        ),
    )
}

/// Outstanding minimum-cardinality violations, one per (instance, rule),
/// ordered by instance then property.
pub fn min_cardinality_reports(graph: &Graph, schema: &SchemaModel) -> Vec<ViolationReport> {
    let mut keyed = Vec::new();
    for subject in subjects(graph) {
        let closure = schema.closure_of_types(&declared_types(graph, schema, &subject));
        for rule in schema.rules_for(&closure) {
            let Some(min) = rule.min else { continue };
            let count = value_count(graph, &subject, &rule.property);
            if count < min as usize {
                keyed.push((
                    subject.canonical(),
                    rule.property.as_str().to_string(),
                    min_report(&subject, rule, min, count),
                ));
            }
        }
    }
    keyed.sort();
    keyed.dedup();
    keyed.into_iter().map(|(_, _, r)| r).collect()
}

fn subjects(graph: &Graph) -> BTreeSet<Term> {
    graph.iter().map(|t| t.subject().clone()).collect()
}

fn is_annotation(p: &Iri) -> bool {
    matches!(p.as_str(), rdf::TYPE | rdfs::LABEL | rdfs::COMMENT | owl::SAME_AS)
}

/// Exhaustive post-hoc check of an A-Box against the schema. Reports are
/// ordered by instance, then property.
pub fn validate_graph(graph: &Graph, schema: &SchemaModel) -> Vec<ViolationReport> {
    let mut keyed: Vec<(String, String, ViolationReport)> = Vec::new();
    for subject in subjects(graph) {
        let key = subject.canonical();
        let types = declared_types(graph, schema, &subject);
        let closure = schema.closure_of_types(&types);
        let shown = term_display(&subject);
        if types.is_empty() {
            keyed.push((
                key.clone(),
                String::new(),
                ViolationReport::new(
                    ErrorType::UnknownEntity,
                    None,
                    format!("{shown} is used but has no declared class."),
                ),
            ));
        }
        for t in graph.matching(Some(&subject), None, None) {
            let pred = t.predicate();
            if is_annotation(pred) {
                continue;
            }
            let pkey = pred.as_str().to_string();
            let field = Some(pred.as_str());
            let mut push = |r: ViolationReport| keyed.push((key.clone(), pkey.clone(), r));
            let Some(p) = schema.properties.get(pred) else {
                push(ViolationReport::new(
                    ErrorType::OntologyConstraintViolation,
                    field,
                    format!("{} is not a property of the schema.", pred.as_str()),
                ));
                continue;
            };
            if !types.is_empty() && !schema.domain_admits(p, &closure) {
                push(ViolationReport::new(
                    ErrorType::OntologyConstraintViolation,
                    field,
                    domain_message(schema, p, &shown),
                ));
            }
            let object = t.object();
            match p.kind {
                PropertyKind::Datatype => {
                    let dt = p.datatype().expect("datatype property has a range");
                    let fits = object.as_literal().is_some_and(|l| literal_fits(l, dt));
                    if !fits {
                        push(ViolationReport::new(
                            ErrorType::DatatypeViolation,
                            field,
                            datatype_message(p, &term_display(object), dt),
                        ));
                    }
                }
                PropertyKind::Object => {
                    if let Some(vocab) = schema.vocabularies.get(&p.iri) {
                        let ok = object.as_iri().is_some_and(|o| vocab.contains_iri(o));
                        if !ok {
                            push(
                                ViolationReport::new(
                                    ErrorType::OntologyConstraintViolation,
                                    field,
                                    vocab_message(p, &term_display(object)),
                                )
                                .with_allowed(vocab.labels()),
                            );
                        }
                        continue;
                    }
                    if object.is_literal() {
                        push(ViolationReport::new(
                            ErrorType::OntologyConstraintViolation,
                            field,
                            format!(
                                "{} expects an entity but got the literal '{}'.",
                                p.local,
                                term_display(object)
                            ),
                        ));
                        continue;
                    }
                    let otypes = declared_types(graph, schema, object);
                    if otypes.is_empty() {
                        push(ViolationReport::new(
                            ErrorType::UnknownEntity,
                            field,
                            unknown_entity_message(&term_display(object)),
                        ));
                        continue;
                    }
                    let oclosure = schema.closure_of_types(&otypes);
                    if !p.range.is_empty() && p.range.is_disjoint(&oclosure) {
                        push(ViolationReport::new(
                            ErrorType::OntologyConstraintViolation,
                            field,
                            range_message(schema, p, &term_display(object)),
                        ));
                    }
                }
            }
        }
        for rule in schema.rules_for(&closure) {
            let count = value_count(graph, &subject, &rule.property);
            if let Some(max) = rule.max {
                if count > max as usize {
                    keyed.push((
                        key.clone(),
                        rule.property.as_str().to_string(),
                        ViolationReport::new(
                            ErrorType::CardinalityViolation,
                            Some(rule.property.as_str()),
                            format!(
                                "{shown} may have at most {max} {} value(s) but has {count}.",
                                rule.property.local_name()
                            ),
                        )
                        .not_retryable(),
                    ));
                }
            }
            if let Some(min) = rule.min {
                if count < min as usize {
                    keyed.push((
                        key.clone(),
                        rule.property.as_str().to_string(),
                        min_report(&subject, rule, min, count),
                    ));
                }
            }
        }
    }
    keyed.sort();
    keyed.dedup();
    keyed.into_iter().map(|(_, _, r)| r).collect()
}
