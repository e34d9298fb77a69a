use std::collections::BTreeSet;

use serde_json::Value;

use super::index::{IndexEntry, LabelIndex};
use super::{normalize, GroundError};
use crate::rdf::vocab::{rdf, xsd};
use crate::rdf::Iri;

/// The label-collection SELECT for one (class, predicate) pair.
pub fn label_query(class: &Iri, predicate: &Iri) -> String {
    format!(
        "SELECT ?s ?label WHERE {{ ?s <{}> <{}> . ?s <{}> ?label . FILTER(isLiteral(?label)) }}",
        rdf::TYPE,
        class.as_str(),
        predicate.as_str()
    )
}

fn binding<'a>(row: &'a Value, var: &str) -> Result<&'a Value, GroundError> {
    row.get(var)
        .ok_or_else(|| GroundError::MalformedResults(format!("binding without ?{var}: {row}")))
}

fn binding_value<'a>(b: &'a Value, var: &str) -> Result<(&'a str, &'a str), GroundError> {
    let ty = b.get("type").and_then(Value::as_str);
    let value = b.get("value").and_then(Value::as_str);
    match (ty, value) {
        (Some(t), Some(v)) => Ok((t, v)),
        _ => Err(GroundError::MalformedResults(format!(
            "?{var} lacks type or value: {b}"
        ))),
    }
}

/// Parses SPARQL JSON results into index entries for (class, predicate).
/// Non-IRI subjects and non-string literals are skipped, matching the
/// file-based build.
pub(crate) fn entries_from_results(body: &str, class: &Iri, predicate: &Iri) -> Result<Vec<IndexEntry>, GroundError> {
    let doc: Value = serde_json::from_str(body).map_err(|e| GroundError::MalformedResults(e.to_string()))?;
    let rows = doc
        .pointer("/results/bindings")
        .and_then(Value::as_array)
        .ok_or_else(|| GroundError::MalformedResults("missing results.bindings".into()))?;
    let mut entries = Vec::new();
    for row in rows {
        let (s_type, s) = binding_value(binding(row, "s")?, "s")?;
        let label = binding(row, "label")?;
        let (l_type, l) = binding_value(label, "label")?;
        if s_type != "uri" || !matches!(l_type, "literal" | "typed-literal") {
            continue;
        }
        let string_like = label
            .get("datatype")
            .and_then(Value::as_str)
            .is_none_or(|dt| dt == xsd::STRING || dt == rdf::LANG_STRING);
        if !string_like {
            continue;
        }
        let target = Iri::new(s).map_err(|e| GroundError::MalformedResults(e.to_string()))?;
        entries.push(IndexEntry {
            label_norm: normalize(l),
            target_iri: target,
            class: class.clone(),
            predicate: predicate.clone(),
            label_raw: l.to_string(),
        });
    }
    Ok(entries)
}

/// Builds a [`LabelIndex`] from a SPARQL endpoint, one SELECT per
/// (class, predicate), sent as a form-encoded `query` parameter.
pub fn fetch_labels_from_endpoint(
    endpoint_url: &str,
    classes: &BTreeSet<Iri>,
    predicates: &[Iri],
) -> Result<LabelIndex, GroundError> {
    let mut entries = Vec::new();
    for class in classes {
        for predicate in predicates {
            let query = label_query(class, predicate);
            log::debug!("querying {endpoint_url}: {query}");
            let response = ureq::post(endpoint_url)
                .header("Accept", "application/sparql-results+json")
                .send_form([("query", query.as_str())]);
            let body = match response {
                Ok(mut r) => r
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| GroundError::Network(e.to_string()))?,
                Err(ureq::Error::StatusCode(code)) => {
                    return Err(GroundError::Network(format!("endpoint returned HTTP {code}")))
                }
                Err(e) => return Err(GroundError::Network(e.to_string())),
            };
            entries.extend(entries_from_results(&body, class, predicate)?);
        }
    }
    Ok(LabelIndex::from_entries(entries))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    #[test]
    fn parses_bindings() {
        let body = r#"{"head":{"vars":["s","label"]},"results":{"bindings":[
            {"s":{"type":"uri","value":"http://ref/a"},"label":{"type":"literal","value":"Alpha"}},
            {"s":{"type":"bnode","value":"b0"},"label":{"type":"literal","value":"skip"}},
            {"s":{"type":"uri","value":"http://ref/b"},"label":{"type":"literal","value":"5","datatype":"http://www.w3.org/2001/XMLSchema#integer"}},
            {"s":{"type":"uri","value":"http://ref/c"},"label":{"type":"literal","value":"Gamma","xml:lang":"en"}}
        ]}}"#;
        let entries = entries_from_results(body, &iri("http://ref/C"), &iri("http://ref/p")).unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].label_norm, "alpha");
    }

    #[test]
    fn missing_variable_is_malformed() {
        let body = r#"{"results":{"bindings":[{"s":{"type":"uri","value":"http://ref/a"}}]}}"#;
        assert!(matches!(
            entries_from_results(body, &iri("http://ref/C"), &iri("http://ref/p")),
            Err(GroundError::MalformedResults(_))
        ));
        assert!(matches!(
            entries_from_results("{}", &iri("http://ref/C"), &iri("http://ref/p")),
            Err(GroundError::MalformedResults(_))
        ));
    }

    #[test]
    fn query_shape() {
        let q = label_query(&iri("http://ref/C"), &iri("http://ref/p"));
        assert!(q.starts_with("SELECT ?s ?label WHERE"));
        assert!(q.contains("<http://ref/C>") && q.contains("<http://ref/p>"));
    }
}
