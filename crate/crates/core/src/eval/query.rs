use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use super::{EvalError, Record};
use crate::rdf::vocab::{owl, rdf, rdfs, xsd};
use crate::rdf::{Graph, Iri, Literal, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    String,
    Number,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalize {
    #[default]
    None,
    Casefold,
    Unitlabel,
}

/// One record field. The slot is filled from the query variable of the
/// same name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDef {
    pub name: String,
    pub kind: SlotKind,
    #[serde(default)]
    pub normalize: Normalize,
}

/// Conjunctive patterns plus left-joined optional groups; each group binds
/// only when all of its patterns match together. Terms are written as
/// `?var`, `<iri>`, `prefix:local`, `a`, or `"string literal"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionQuery {
    pub patterns: Vec<[String; 3]>,
    #[serde(default)]
    pub optionals: Vec<Vec<[String; 3]>>,
    pub group_by: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSchema {
    pub category: String,
    #[serde(default)]
    pub prefixes: BTreeMap<String, String>,
    pub slots: Vec<SlotDef>,
    /// Canonical labels for unit IRIs and aliases, used by `unitlabel` slots.
    #[serde(default)]
    pub unit_labels: BTreeMap<String, String>,
    pub query: ProjectionQuery,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PatternTerm {
    Var(String),
    Const(Term),
}

type Pattern = [PatternTerm; 3];
type Solution = BTreeMap<String, Term>;

impl RecordSchema {
    pub fn from_json(text: &str) -> Result<Self, EvalError> {
        let schema: RecordSchema = serde_json::from_str(text).map_err(|e| EvalError::Schema(e.to_string()))?;
        schema.compile()?;
        Ok(schema)
    }

    pub fn slot(&self, name: &str) -> Option<&SlotDef> {
        self.slots.iter().find(|s| s.name == name)
    }

    fn resolve(&self, token: &str) -> Result<PatternTerm, EvalError> {
        if let Some(var) = token.strip_prefix('?') {
            if var.is_empty() {
                return Err(EvalError::Query("empty variable name".into()));
            }
            return Ok(PatternTerm::Var(var.to_string()));
        }
        if token == "a" {
            return Ok(PatternTerm::Const(Term::Iri(Iri::new(rdf::TYPE).expect("rdf:type"))));
        }
        if let Some(inner) = token.strip_prefix('<').and_then(|t| t.strip_suffix('>')) {
            let iri = Iri::new(inner).map_err(|e| EvalError::Query(e.to_string()))?;
            return Ok(PatternTerm::Const(Term::Iri(iri)));
        }
        if let Some(inner) = token.strip_prefix('"').and_then(|t| t.strip_suffix('"')) {
            return Ok(PatternTerm::Const(Term::Literal(Literal::string(inner))));
        }
        let (prefix, local) = token
            .split_once(':')
            .ok_or_else(|| EvalError::Query(format!("cannot read term '{token}'")))?;
        let ns = match self.prefixes.get(prefix) {
            Some(ns) => ns.as_str(),
            None => match prefix {
                "rdf" => rdf::NS,
                "rdfs" => rdfs::NS,
                "owl" => owl::NS,
                "xsd" => xsd::NS,
                _ => return Err(EvalError::Query(format!("unknown prefix '{prefix}'"))),
            },
        };
        let iri = Iri::new(format!("{ns}{local}")).map_err(|e| EvalError::Query(e.to_string()))?;
        Ok(PatternTerm::Const(Term::Iri(iri)))
    }

    fn compile_list(&self, list: &[[String; 3]]) -> Result<Vec<Pattern>, EvalError> {
        list.iter()
            .map(|[s, p, o]| {
                let pattern = [self.resolve(s)?, self.resolve(p)?, self.resolve(o)?];
                if let PatternTerm::Const(Term::Literal(_)) = &pattern[0] {
                    return Err(EvalError::Query(format!("literal subject in pattern {s} {p} {o}")));
                }
                if let PatternTerm::Const(t) = &pattern[1] {
                    if t.as_iri().is_none() {
                        return Err(EvalError::Query(format!("predicate must be an IRI in {s} {p} {o}")));
                    }
                }
                Ok(pattern)
            })
            .collect()
    }

    fn compile(&self) -> Result<(Vec<Pattern>, Vec<Vec<Pattern>>), EvalError> {
        let mut names = BTreeSet::new();
        for slot in &self.slots {
            if slot.name.is_empty() || !names.insert(slot.name.as_str()) {
                return Err(EvalError::Schema(format!(
                    "slot name '{}' is empty or repeated",
                    slot.name
                )));
            }
        }
        let required = self.compile_list(&self.query.patterns)?;
        let optionals = self
            .query
            .optionals
            .iter()
            .map(|g| self.compile_list(g))
            .collect::<Result<Vec<_>, _>>()?;
        let vars = |ps: &[Pattern]| -> BTreeSet<String> {
            ps.iter()
                .flatten()
                .filter_map(|t| match t {
                    PatternTerm::Var(v) => Some(v.clone()),
                    PatternTerm::Const(_) => None,
                })
                .collect()
        };
        let bound = vars(&required);
        if !bound.contains(&self.query.group_by) {
            return Err(EvalError::Query(format!(
                "group_by ?{} is not bound by the required patterns",
                self.query.group_by
            )));
        }
        let optional_vars = vars(&optionals.concat());
        for slot in &self.slots {
            if !bound.contains(&slot.name) && !optional_vars.contains(&slot.name) {
                return Err(EvalError::Query(format!(
                    "slot ?{} is never bound by the query",
                    slot.name
                )));
            }
        }
        Ok((required, optionals))
    }
}

fn extend(graph: &Graph, pattern: &Pattern, sol: &Solution) -> Vec<Solution> {
    let fixed = |t: &PatternTerm| -> Option<Term> {
        match t {
            PatternTerm::Const(c) => Some(c.clone()),
            PatternTerm::Var(v) => sol.get(v).cloned(),
        }
    };
    let s = fixed(&pattern[0]);
    let p = match fixed(&pattern[1]) {
        Some(Term::Iri(i)) => Some(i),
        Some(_) => return Vec::new(),
        None => None,
    };
    let o = fixed(&pattern[2]);
    let mut out = Vec::new();
    'triples: for t in graph.matching(s.as_ref(), p.as_ref(), o.as_ref()) {
        let mut next = sol.clone();
        let values = [
            t.subject().clone(),
            Term::Iri(t.predicate().clone()),
            t.object().clone(),
        ];
        for (slot, value) in pattern.iter().zip(values) {
            if let PatternTerm::Var(v) = slot {
                match next.get(v) {
                    Some(existing) if *existing != value => continue 'triples,
                    Some(_) => {}
                    None => {
                        next.insert(v.clone(), value);
                    }
                }
            }
        }
        out.push(next);
    }
    out
}

fn join(graph: &Graph, patterns: &[Pattern], start: Solution) -> Vec<Solution> {
    let mut sols = vec![start];
    for pattern in patterns {
        sols = sols.iter().flat_map(|s| extend(graph, pattern, s)).collect();
        if sols.is_empty() {
            break;
        }
    }
    sols
}

fn solve(graph: &Graph, required: &[Pattern], optionals: &[Vec<Pattern>]) -> Vec<Solution> {
    let mut sols = join(graph, required, Solution::new());
    for group in optionals {
        sols = sols
            .into_iter()
            .flat_map(|s| {
                let ext = join(graph, group, s.clone());
                if ext.is_empty() {
                    vec![s]
                } else {
                    ext
                }
            })
            .collect();
    }
    sols
}

fn slot_value(term: &Term, kind: SlotKind) -> Value {
    let text = match term {
        Term::Iri(i) => return Value::String(i.as_str().to_string()),
        Term::Blank(b) => return Value::String(format!("_:{}", b.label())),
        Term::Literal(l) => l.lexical(),
    };
    let number = match kind {
        SlotKind::String => None,
        SlotKind::Integer => text.trim().parse::<i64>().ok().map(Number::from),
        SlotKind::Number => text
            .trim()
            .parse::<i64>()
            .ok()
            .map(Number::from)
            .or_else(|| text.trim().parse::<f64>().ok().and_then(Number::from_f64)),
    };
    number
        .map(Value::Number)
        .unwrap_or_else(|| Value::String(text.to_string()))
}

/// One record per distinct `group_by` binding, ordered by that binding.
/// When several solutions share a group, each slot takes the least bound
/// term so the projection is deterministic.
pub fn project_records(graph: &Graph, schema: &RecordSchema) -> Result<Vec<Record>, EvalError> {
    let (required, optionals) = schema.compile()?;
    let mut groups: BTreeMap<Term, BTreeMap<&str, Term>> = BTreeMap::new();
    for sol in solve(graph, &required, &optionals) {
        let key = sol.get(&schema.query.group_by).expect("group_by is required").clone();
        let slots = groups.entry(key).or_default();
        for slot in &schema.slots {
            if let Some(t) = sol.get(&slot.name) {
                match slots.get(slot.name.as_str()) {
                    Some(existing) if existing <= t => {}
                    _ => {
                        slots.insert(slot.name.as_str(), t.clone());
                    }
                }
            }
        }
    }
    Ok(groups
        .into_values()
        .map(|slots| {
            schema
                .slots
                .iter()
                .filter_map(|s| {
                    slots
                        .get(s.name.as_str())
                        .map(|t| (s.name.clone(), slot_value(t, s.kind)))
                })
                .collect()
        })
        .collect())
}
