use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::index::{lookup_with, Candidate, LabelIndex, DEFAULT_TAU};
use super::GroundError;
use crate::rdf::vocab::{owl, rdf, rdfs};
use crate::rdf::{parse_turtle, serialize_turtle, Graph, Iri, Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Rewrite,
    #[serde(rename = "sameas")]
    SameAs,
}

impl FromStr for Mode {
    type Err = GroundError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rewrite" => Ok(Mode::Rewrite),
            "sameas" => Ok(Mode::SameAs),
            other => Err(GroundError::Mode(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingPair {
    pub local_iri: Iri,
    pub target_iri: Iri,
    pub score: f64,
    pub matched_label: String,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundingMap {
    pub pairs: Vec<GroundingPair>,
}

impl GroundingMap {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("map serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundOptions {
    pub tau: f64,
    /// Label predicates read from local instances besides `rdfs:label`.
    pub alt_label_predicates: Vec<Iri>,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            tau: DEFAULT_TAU,
            alt_label_predicates: Vec::new(),
        }
    }
}

/// Selects the best candidate per instance of `classes` and aligns it.
/// Instances without a candidate are left untouched and omitted from the map.
pub fn ground_graph(
    graph: &Graph,
    index: &LabelIndex,
    classes: &BTreeSet<Iri>,
    mode: Mode,
    options: &GroundOptions,
) -> (Graph, GroundingMap) {
    let ty = Iri::new(rdf::TYPE).expect("rdf:type");
    let mut label_preds = vec![Iri::new(rdfs::LABEL).expect("rdfs:label")];
    label_preds.extend(options.alt_label_predicates.iter().cloned());

    let mut instances: BTreeSet<Iri> = BTreeSet::new();
    for class in classes {
        for s in graph.subjects(&ty, &Term::Iri(class.clone())) {
            if let Term::Iri(i) = s {
                instances.insert(i.clone());
            }
        }
    }

    let mut pairs = Vec::new();
    for local in instances {
        let node = Term::Iri(local.clone());
        let mut best: Option<Candidate> = None;
        for p in &label_preds {
            for label in graph.objects(&node, p).filter_map(Term::as_literal) {
                for c in lookup_with(index, label.lexical(), usize::MAX, options.tau) {
                    if c.target_iri == local {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some(b) => c.score > b.score || (c.score == b.score && c.target_iri < b.target_iri),
                    };
                    if better {
                        best = Some(c);
                    }
                }
            }
        }
        if let Some(c) = best {
            pairs.push(GroundingPair {
                local_iri: local,
                target_iri: c.target_iri,
                score: c.score,
                matched_label: c.matched_label,
                mode,
            });
        }
    }

    let mut out = graph.clone();
    match mode {
        Mode::SameAs => {
            let same_as = Iri::new(owl::SAME_AS).expect("owl:sameAs");
            for p in &pairs {
                out.insert(
                    Triple::new(p.local_iri.clone(), same_as.clone(), p.target_iri.clone()).expect("IRI subject"),
                );
            }
        }
        Mode::Rewrite => {
            let subst: BTreeMap<Term, Term> = pairs
                .iter()
                .map(|p| (Term::Iri(p.local_iri.clone()), Term::Iri(p.target_iri.clone())))
                .collect();
            let swap = |t: &Term| subst.get(t).cloned().unwrap_or_else(|| t.clone());
            let mut rewritten: Graph = graph
                .iter()
                .map(|t| Triple::new(swap(t.subject()), t.predicate().clone(), swap(t.object())).expect("IRI subject"))
                .collect();
            for (prefix, ns) in graph.prefixes() {
                rewritten.set_prefix(prefix.clone(), ns.clone());
            }
            out = rewritten;
        }
    }
    (out, GroundingMap { pairs })
}

/// Grounds every `.ttl` file in `input` (sorted by name), writing the
/// grounded graph and a `<stem>.grounding.json` map into `output`.
pub fn ground_directory(
    input: &Path,
    output: &Path,
    index: &LabelIndex,
    classes: &BTreeSet<Iri>,
    mode: Mode,
    options: &GroundOptions,
) -> Result<Vec<(PathBuf, GroundingMap)>, GroundError> {
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .map_err(|e| GroundError::io(input, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ttl"))
        .collect();
    files.sort();
    fs::create_dir_all(output).map_err(|e| GroundError::io(output, e))?;
    let mut results = Vec::new();
    for file in files {
        let text = fs::read_to_string(&file).map_err(|e| GroundError::io(&file, e))?;
        let graph = parse_turtle(&text)?;
        let (grounded, map) = ground_graph(&graph, index, classes, mode, options);
        let name = file.file_name().expect("file has a name");
        let stem = file.file_stem().expect("file has a stem").to_string_lossy().to_string();
        let out_ttl = output.join(name);
        fs::write(&out_ttl, serialize_turtle(&grounded)).map_err(|e| GroundError::io(&out_ttl, e))?;
        let out_map = output.join(format!("{stem}.grounding.json"));
        fs::write(&out_map, map.to_json()).map_err(|e| GroundError::io(&out_map, e))?;
        results.push((out_ttl, map));
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounder::build_label_index;

    const REF: &str = r#"@prefix ref: <http://ref.example/> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ref:benzene a ref:Species ; rdfs:label "benzene" .
ref:toluene a ref:Species ; rdfs:label "toluene" .
"#;

    const LOCAL: &str = r#"@prefix ex: <http://local.example/> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:c1 a ex:Chem ; rdfs:label "Benzene" .
ex:c2 a ex:Chem ; rdfs:label "unobtainium" .
ex:step a ex:Step ; ex:uses ex:c1 , ex:c2 .
"#;

    fn setup() -> (Graph, LabelIndex, BTreeSet<Iri>) {
        let reference = parse_turtle(REF).unwrap();
        let index = build_label_index(
            &reference,
            &[Iri::new("http://ref.example/Species").unwrap()].into(),
            &[Iri::new(rdfs::LABEL).unwrap()],
        );
        let classes = [Iri::new("http://local.example/Chem").unwrap()].into();
        (parse_turtle(LOCAL).unwrap(), index, classes)
    }

    #[test]
    fn sameas_adds_one_triple_per_pair() {
        let (g, idx, classes) = setup();
        let (out, map) = ground_graph(&g, &idx, &classes, Mode::SameAs, &GroundOptions::default());
        assert_eq!(map.len(), 1);
        assert_eq!(map.pairs[0].target_iri.as_str(), "http://ref.example/benzene");
        assert_eq!(map.pairs[0].score, 1.0);
        assert_eq!(out.len(), g.len() + 1);
        assert!(g.iter().all(|t| out.contains(t)));
    }

    #[test]
    fn rewrite_removes_local_iri() {
        let (g, idx, classes) = setup();
        let (out, map) = ground_graph(&g, &idx, &classes, Mode::Rewrite, &GroundOptions::default());
        let local = Term::Iri(map.pairs[0].local_iri.clone());
        assert!(!out.mentions(&local));
        assert_eq!(out.len(), g.len());
        // the unmatched instance is untouched
        assert!(out.mentions(&Term::Iri(Iri::new("http://local.example/c2").unwrap())));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("sameas".parse::<Mode>().unwrap(), Mode::SameAs);
        assert!(matches!("merge".parse::<Mode>(), Err(GroundError::Mode(_))));
    }

    #[test]
    fn batch_over_directory() {
        let (g, idx, classes) = setup();
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in");
        fs::create_dir_all(&input).unwrap();
        fs::write(input.join("b.ttl"), serialize_turtle(&g)).unwrap();
        fs::write(input.join("a.ttl"), serialize_turtle(&g)).unwrap();
        fs::write(input.join("notes.txt"), "x").unwrap();
        let out = dir.path().join("out");
        let results = ground_directory(&input, &out, &idx, &classes, Mode::SameAs, &GroundOptions::default()).unwrap();
        assert_eq!(results.len(), 2);
        assert!(results[0].0.ends_with("a.ttl"));
        assert!(out.join("a.grounding.json").exists());
    }
}
