use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use super::report::{CallOutcome, ErrorType, FinalizeOutcome, ResultStatus, ToolResult, ViolationReport};
use super::validate::{
    datatype_message, domain_message, min_cardinality_reports, range_message, unknown_entity_message, vocab_message,
};
use super::RuntimeError;
use crate::compiler::naming::snake_case;
use crate::compiler::{ToolDescriptor, ToolOp, ToolSet};
use crate::rdf::vocab::{rdf, rdfs, xsd};
use crate::rdf::{parse_turtle, serialize_turtle, validate_doc_id, Graph, Iri, Literal, MintState, Term, Triple};
use crate::schema::{PropertyDef, PropertyKind, SchemaModel};

/// Namespace under which instance IRIs are minted unless overridden.
pub const DEFAULT_BASE: &str = "https://ontoforge.example/kg/";

/// How call-time checks are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Enforcement {
    /// Every check runs; violations are returned to the caller.
    Feedback,
    /// Ablation: ontology checks are skipped and their would-be violations
    /// land in the graph. Values that cannot be stored under their datatype
    /// are still rejected, without guidance.
    NoFeedback,
    /// Applies everything that is storable; datatype failures are stored as
    /// plain strings. Used to force-apply rejected calls.
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    pub tool: String,
    pub args: Value,
    pub outcome: Value,
}

pub const FINALIZE_TOOL: &str = "finalize";

/// Canonical hash of a call's arguments (sorted-key compact JSON).
pub fn args_hash(args: &Value) -> String {
    let canonical = serde_json::to_string(args).expect("JSON value serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Per-document execution state: the A-Box, IRI counters, and the log of
/// successful calls.
#[derive(Debug, Clone)]
pub struct Session {
    graph: Graph,
    schema: SchemaModel,
    toolset: ToolSet,
    mint: MintState,
    doc_id: String,
    call_log: Vec<(String, String)>,
    enforcement: Enforcement,
    workdir: Option<PathBuf>,
    seq: u64,
    run_log: Vec<LogEntry>,
}

type Checked<T> = Result<T, ViolationReport>;

fn reject<T>(error_type: ErrorType, field: &str, message: impl Into<String>) -> Checked<T> {
    Err(ViolationReport::new(error_type, Some(field), message))
}

fn lexical_of(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

impl Session {
    pub fn new(
        schema: SchemaModel,
        toolset: ToolSet,
        doc_id: &str,
        enforcement: Enforcement,
    ) -> Result<Self, RuntimeError> {
        validate_doc_id(doc_id)?;
        let mut graph = Graph::new();
        for (prefix, ns) in &schema.prefixes {
            graph.set_prefix(prefix.clone(), ns.clone());
        }
        Ok(Session {
            graph,
            schema,
            toolset,
            mint: MintState::new(Iri::new(DEFAULT_BASE)?),
            doc_id: doc_id.to_string(),
            call_log: Vec::new(),
            enforcement,
            workdir: None,
            seq: 0,
            run_log: Vec::new(),
        })
    }

    /// Uses `base` for minted IRIs. Call before any creation.
    pub fn with_base(mut self, base: Iri) -> Self {
        self.mint = MintState::new(base);
        self.mint.observe(&self.graph);
        self
    }

    /// Persists to `<workdir>/<doc_id>.ttl` and `<workdir>/<doc_id>.log.jsonl`,
    /// resuming from them if they already exist.
    pub fn with_workdir(mut self, workdir: &Path) -> Result<Self, RuntimeError> {
        fs::create_dir_all(workdir).map_err(|e| RuntimeError::io(workdir, e))?;
        self.workdir = Some(workdir.to_path_buf());
        let store = self.store_path().expect("workdir set");
        if store.exists() {
            let text = fs::read_to_string(&store).map_err(|e| RuntimeError::io(&store, e))?;
            let loaded = parse_turtle(&text)?;
            for t in loaded.iter() {
                self.graph.insert(t.clone());
            }
            self.mint.observe(&self.graph);
        }
        let log = self.log_path().expect("workdir set");
        if log.exists() {
            let text = fs::read_to_string(&log).map_err(|e| RuntimeError::io(&log, e))?;
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let entry: LogEntry = serde_json::from_str(line).map_err(|e| RuntimeError::Io {
                    path: log.display().to_string(),
                    message: e.to_string(),
                })?;
                self.seq = self.seq.max(entry.seq);
                if entry.tool != FINALIZE_TOOL && entry.outcome.get("ok") == Some(&Value::Bool(true)) {
                    self.call_log.push((entry.tool.clone(), args_hash(&entry.args)));
                }
                self.run_log.push(entry);
            }
        }
        Ok(self)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn schema(&self) -> &SchemaModel {
        &self.schema
    }

    pub fn toolset(&self) -> &ToolSet {
        &self.toolset
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn enforcement(&self) -> Enforcement {
        self.enforcement
    }

    pub fn set_enforcement(&mut self, enforcement: Enforcement) {
        self.enforcement = enforcement;
    }

    pub fn call_log(&self) -> &[(String, String)] {
        &self.call_log
    }

    pub fn run_log(&self) -> &[LogEntry] {
        &self.run_log
    }

    pub fn store_path(&self) -> Option<PathBuf> {
        self.workdir.as_ref().map(|d| d.join(format!("{}.ttl", self.doc_id)))
    }

    pub fn log_path(&self) -> Option<PathBuf> {
        self.workdir
            .as_ref()
            .map(|d| d.join(format!("{}.log.jsonl", self.doc_id)))
    }

    /// An in-memory copy that writes nothing to disk.
    pub fn detached(&self) -> Session {
        let mut copy = self.clone();
        copy.workdir = None;
        copy
    }

    /// Runs a tool call. Violations are returned as [`CallOutcome::Violation`];
    /// errors are reserved for unknown tools, malformed argument containers,
    /// and persistence failures.
    pub fn invoke(&mut self, tool: &str, args: &Value) -> Result<CallOutcome, RuntimeError> {
        let descriptor = self
            .toolset
            .get(tool)
            .cloned()
            .ok_or_else(|| RuntimeError::UnknownTool(tool.to_string()))?;
        let map = args.as_object().ok_or(RuntimeError::ArgumentsNotObject)?;
        let hash = args_hash(args);

        let outcome = if self.call_log.iter().any(|(t, h)| t == tool && *h == hash) {
            Err(ViolationReport::new(
                ErrorType::DuplicateCall,
                None,
                format!("{tool} was already called successfully with identical arguments."),
            ))
        } else {
            self.dispatch(&descriptor, map)
        };

        let outcome = match outcome {
            Ok((result, triples)) => {
                if result.status == ResultStatus::Created {
                    if let Some(iri) = result.instance_iri.as_deref().and_then(|i| Iri::new(i).ok()) {
                        self.mint.observe_iri(&iri);
                    }
                }
                for t in triples {
                    self.graph.insert(t);
                }
                self.call_log.push((tool.to_string(), hash));
                self.persist_store()?;
                CallOutcome::Ok(result)
            }
            Err(v) => CallOutcome::Violation(v),
        };
        self.append_log(
            tool,
            args.clone(),
            serde_json::to_value(&outcome).expect("outcome serializes"),
        )?;
        Ok(outcome)
    }

    /// Checks every minimum-cardinality rule over the current graph.
    pub fn finalize(&mut self) -> Result<FinalizeOutcome, RuntimeError> {
        let outstanding = min_cardinality_reports(&self.graph, &self.schema);
        let outcome = if outstanding.is_empty() {
            self.persist_store()?;
            FinalizeOutcome::Done(ToolResult::new(ResultStatus::Done, None))
        } else {
            FinalizeOutcome::outstanding(outstanding)
        };
        self.append_log(
            FINALIZE_TOOL,
            Value::Object(Map::new()),
            serde_json::to_value(&outcome).expect("outcome serializes"),
        )?;
        Ok(outcome)
    }

    /// Creates (or reuses) an instance of `class` directly, bypassing tool
    /// argument parsing. Attributes are keyed by property IRI.
    pub fn create_instance(
        &mut self,
        class: &Iri,
        label: &str,
        attrs: &[(Iri, String)],
    ) -> Result<CallOutcome, RuntimeError> {
        let tool = self
            .toolset
            .tools
            .iter()
            .find(|t| t.op == ToolOp::Create && &t.binding == class)
            .ok_or_else(|| RuntimeError::UnknownTool(format!("create tool for {class}")))?
            .name
            .clone();
        let mut args = Map::new();
        args.insert("doc_id".into(), Value::String(self.doc_id.clone()));
        args.insert("label".into(), Value::String(label.to_string()));
        for (p, v) in attrs {
            args.insert(snake_case(p.local_name()), Value::String(v.clone()));
        }
        self.invoke(&tool, &Value::Object(args))
    }

    pub fn link(&mut self, subject: &Iri, property: &Iri, object: &Iri) -> Result<CallOutcome, RuntimeError> {
        let tool = self.property_tool(property, ToolOp::Link)?;
        let args = serde_json::json!({"subject_iri": subject.as_str(), "object_iri": object.as_str()});
        self.invoke(&tool, &args)
    }

    pub fn set_attribute(&mut self, subject: &Iri, property: &Iri, value: &str) -> Result<CallOutcome, RuntimeError> {
        let tool = self.property_tool(property, ToolOp::Set)?;
        let args = serde_json::json!({"subject_iri": subject.as_str(), "value": value});
        self.invoke(&tool, &args)
    }

    fn property_tool(&self, property: &Iri, op: ToolOp) -> Result<String, RuntimeError> {
        self.toolset
            .tools
            .iter()
            .find(|t| t.op == op && &t.binding == property)
            .map(|t| t.name.clone())
            .ok_or_else(|| RuntimeError::UnknownTool(format!("{op:?} tool for {property}")))
    }

    fn persist_store(&self) -> Result<(), RuntimeError> {
        let Some(path) = self.store_path() else { return Ok(()) };
        let tmp = path.with_extension("ttl.tmp");
        fs::write(&tmp, serialize_turtle(&self.graph)).map_err(|e| RuntimeError::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| RuntimeError::io(&path, e))
    }

    fn append_log(&mut self, tool: &str, args: Value, outcome: Value) -> Result<(), RuntimeError> {
        self.seq += 1;
        let entry = LogEntry {
            seq: self.seq,
            tool: tool.to_string(),
            args,
            outcome,
        };
        if let Some(path) = self.log_path() {
            let mut line = serde_json::to_string(&entry).expect("log entry serializes");
            line.push('\n');
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .and_then(|mut f| f.write_all(line.as_bytes()))
                .map_err(|e| RuntimeError::io(&path, e))?;
        }
        self.run_log.push(entry);
        Ok(())
    }

    // ---- checks -------------------------------------------------------

    /// Applies the enforcement mode to a would-be violation: `Err` rejects
    /// the call, `Ok` lets it proceed.
    fn gate(&self, v: ViolationReport) -> Checked<()> {
        match self.enforcement {
            Enforcement::Feedback => Err(v),
            Enforcement::NoFeedback if v.error_type == ErrorType::DatatypeViolation => {
                let mut silent = v.not_retryable();
                silent.allowed_values = None;
                Err(silent)
            }
            _ => Ok(()),
        }
    }

    fn string_arg(map: &Map<String, Value>, name: &str) -> Checked<Option<String>> {
        match map.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => reject(
                ErrorType::DatatypeViolation,
                name,
                format!("Argument '{name}' must be a string."),
            ),
        }
    }

    fn iri_arg(map: &Map<String, Value>, name: &str) -> Checked<Iri> {
        let s = Self::string_arg(map, name)?.unwrap_or_default();
        Iri::new(s.clone()).or_else(|_| {
            reject(
                ErrorType::DatatypeViolation,
                name,
                format!("Argument '{name}' value '{s}' is not a valid IRI."),
            )
        })
    }

    fn value_lexical(map: &Map<String, Value>, name: &str) -> Checked<Option<String>> {
        match map.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => match lexical_of(v) {
                Some(s) => Ok(Some(s)),
                None => reject(
                    ErrorType::DatatypeViolation,
                    name,
                    format!("Argument '{name}' must be a string, number or boolean."),
                ),
            },
        }
    }

    /// Literal for a datatype property value.
    fn literal_for(&self, p: &PropertyDef, field: &str, lexical: &str) -> Checked<Literal> {
        let dt = p.datatype().expect("datatype property has a range");
        if dt.as_str() == xsd::STRING {
            return Ok(Literal::string(lexical));
        }
        match Literal::typed(lexical, dt.clone()) {
            Ok(l) => Ok(l),
            Err(_) => {
                self.gate(ViolationReport::new(
                    ErrorType::DatatypeViolation,
                    Some(field),
                    datatype_message(p, lexical, dt),
                ))?;
                Ok(Literal::string(lexical))
            }
        }
    }

    /// Object term for a property value: a vocabulary individual, or a
    /// typed literal for datatype properties.
    fn value_term(&self, p: &PropertyDef, field: &str, lexical: &str) -> Checked<Term> {
        if let Some(vocab) = self.schema.vocabularies.get(&p.iri) {
            return match vocab.resolve(lexical) {
                Some(entry) => Ok(Term::Iri(entry.iri.clone())),
                None => {
                    self.gate(
                        ViolationReport::new(
                            ErrorType::OntologyConstraintViolation,
                            Some(field),
                            vocab_message(p, lexical),
                        )
                        .with_allowed(vocab.labels()),
                    )?;
                    Ok(Term::Literal(Literal::string(lexical)))
                }
            };
        }
        match p.kind {
            PropertyKind::Datatype => Ok(Term::Literal(self.literal_for(p, field, lexical)?)),
            PropertyKind::Object => match Iri::new(lexical) {
                Ok(i) => Ok(Term::Iri(i)),
                Err(_) => reject(
                    ErrorType::DatatypeViolation,
                    field,
                    format!("Value '{lexical}' is not a valid IRI."),
                ),
            },
        }
    }

    /// Checks that `subject` exists and lies in the property's domain.
    fn check_subject(&self, p: &PropertyDef, subject: &Iri, field: &str) -> Checked<()> {
        let term = Term::Iri(subject.clone());
        let types = self.graph.types_of(&term);
        let closure = self.schema.closure_of_types(&types);
        if closure.is_empty() {
            return self.gate(ViolationReport::new(
                ErrorType::UnknownEntity,
                Some(field),
                unknown_entity_message(subject.as_str()),
            ));
        }
        if !self.schema.domain_admits(p, &closure) {
            return self.gate(ViolationReport::new(
                ErrorType::OntologyConstraintViolation,
                Some(field),
                domain_message(&self.schema, p, subject.as_str()),
            ));
        }
        Ok(())
    }

    /// Max-cardinality check for adding one more value.
    fn check_max(&self, subject: &Term, p: &PropertyDef, field: &str) -> Checked<()> {
        let closure = self.schema.closure_of_types(&self.graph.types_of(subject));
        let count = self.graph.objects(subject, &p.iri).count();
        for rule in self.schema.rules_for(&closure).filter(|r| r.property == p.iri) {
            if let Some(max) = rule.max {
                if count + 1 > max as usize {
                    self.gate(
                        ViolationReport::new(
                            ErrorType::CardinalityViolation,
                            Some(field),
                            format!(
                                "{} already has {count} {} value(s); at most {max} allowed.",
                                subject_display(subject),
                                p.local
                            ),
                        )
                        .not_retryable(),
                    )?;
                }
            }
        }
        Ok(())
    }

    fn check_arguments(tool: &ToolDescriptor, map: &Map<String, Value>) -> Checked<()> {
        for a in &tool.arguments {
            if a.required && matches!(map.get(&a.name), None | Some(Value::Null)) {
                return reject(
                    ErrorType::OntologyConstraintViolation,
                    &a.name,
                    format!("Missing required argument '{}'.", a.name),
                );
            }
        }
        Ok(())
    }

    fn dispatch(&self, tool: &ToolDescriptor, map: &Map<String, Value>) -> Checked<(ToolResult, Vec<Triple>)> {
        Self::check_arguments(tool, map)?;
        // unknown argument names; on creation tools a name matching a
        // datatype property is treated as an attribute outside the domain
        let mut extras: Vec<&PropertyDef> = Vec::new();
        for name in map.keys() {
            if tool.argument(name).is_some() {
                continue;
            }
            let as_property = self
                .schema
                .properties
                .values()
                .find(|p| p.kind == PropertyKind::Datatype && snake_case(&p.local) == *name);
            match as_property {
                Some(p) if tool.op == ToolOp::Create => extras.push(p),
                _ => {
                    return reject(
                        ErrorType::OntologyConstraintViolation,
                        name,
                        format!("Argument '{name}' is not defined for tool {}.", tool.name),
                    )
                }
            }
        }
        match tool.op {
            ToolOp::Create => self.op_create(tool, map, &extras),
            ToolOp::CheckExisting => self.op_check_existing(tool, map),
            ToolOp::Link => self.op_link(tool, map),
            ToolOp::Set => self.op_set(tool, map),
            ToolOp::CreateQuantity => self.op_quantity(tool, map),
        }
    }

    fn op_create(
        &self,
        tool: &ToolDescriptor,
        map: &Map<String, Value>,
        extras: &[&PropertyDef],
    ) -> Checked<(ToolResult, Vec<Triple>)> {
        let class = &tool.binding;
        let class_local = self.schema.classes[class].local.clone();
        let doc_id = Self::string_arg(map, "doc_id")?.unwrap_or_default();
        if validate_doc_id(&doc_id).is_err() {
            return reject(
                ErrorType::DatatypeViolation,
                "doc_id",
                format!("Document id '{doc_id}' is not usable in an IRI."),
            );
        }
        let label = Self::string_arg(map, "label")?.unwrap_or_default();

        // parse attribute values first so malformed JSON is always reported
        let mut attrs: Vec<(&str, &PropertyDef, String)> = Vec::new();
        for a in &tool.arguments {
            let Some(p) = a.property.as_ref().and_then(|p| self.schema.properties.get(p)) else {
                continue;
            };
            if let Some(lex) = Self::value_lexical(map, &a.name)? {
                attrs.push((a.name.as_str(), p, lex));
            }
        }
        let mut extra_names: Vec<(String, &PropertyDef)> = extras.iter().map(|p| (snake_case(&p.local), *p)).collect();
        extra_names.sort_by(|a, b| a.0.cmp(&b.0));
        let mut extra_values = Vec::new();
        for (name, p) in &extra_names {
            if let Some(lex) = Self::value_lexical(map, name)? {
                extra_values.push((name.as_str(), *p, lex));
            }
        }

        if let Some(existing) = self.graph.find_by_type_and_label(class, &label).into_iter().next() {
            return Ok((
                ToolResult::new(ResultStatus::Reused, Some(existing.as_str().to_string())),
                vec![],
            ));
        }

        let closure = self.schema.subclass_closure(class).expect("bound class is declared");
        let mut objects: Vec<(&PropertyDef, Term)> = Vec::new();
        for (name, p, lex) in extra_values.iter().chain(attrs.iter()) {
            if !self.schema.domain_admits(p, &closure) {
                self.gate(ViolationReport::new(
                    ErrorType::OntologyConstraintViolation,
                    Some(name),
                    domain_message(&self.schema, p, &class_local),
                ))?;
            }
            objects.push((p, self.value_term(p, name, lex)?));
        }
        for rule in self.schema.rules_for(&closure) {
            if let Some(max) = rule.max {
                let n = objects.iter().filter(|(p, _)| p.iri == rule.property).count();
                if n > max as usize {
                    let field = attrs
                        .iter()
                        .chain(extra_values.iter())
                        .find(|(_, p, _)| p.iri == rule.property)
                        .map(|(n, _, _)| *n)
                        .unwrap_or("label");
                    self.gate(
                        ViolationReport::new(
                            ErrorType::CardinalityViolation,
                            Some(field),
                            format!(
                                "{class_local} allows at most {max} {} value(s).",
                                rule.property.local_name()
                            ),
                        )
                        .not_retryable(),
                    )?;
                }
            }
        }

        let mut mint = self.mint.clone();
        let iri = mint
            .mint(&doc_id, &class_local)
            .or_else(|e| reject(ErrorType::DatatypeViolation, "doc_id", e.to_string()))?;
        let subject = Term::Iri(iri.clone());
        let mut triples = vec![
            Triple::new(subject.clone(), Iri::new(rdf::TYPE).unwrap(), Term::Iri(class.clone())).unwrap(),
            Triple::new(
                subject.clone(),
                Iri::new(rdfs::LABEL).unwrap(),
                Term::Literal(Literal::string(label)),
            )
            .unwrap(),
        ];
        for (p, o) in objects {
            triples.push(Triple::new(subject.clone(), p.iri.clone(), o).unwrap());
        }
        Ok((
            ToolResult::new(ResultStatus::Created, Some(iri.as_str().to_string())),
            triples,
        ))
    }

    fn op_check_existing(&self, tool: &ToolDescriptor, map: &Map<String, Value>) -> Checked<(ToolResult, Vec<Triple>)> {
        let label = Self::string_arg(map, "label")?.unwrap_or_default();
        let found = self
            .graph
            .find_by_type_and_label(&tool.binding, &label)
            .into_iter()
            .next();
        let result = match found {
            Some(iri) => ToolResult::new(ResultStatus::Reused, Some(iri.as_str().to_string())),
            None => ToolResult::new(ResultStatus::NotFound, None),
        };
        Ok((result, vec![]))
    }

    fn op_link(&self, tool: &ToolDescriptor, map: &Map<String, Value>) -> Checked<(ToolResult, Vec<Triple>)> {
        let p = &self.schema.properties[&tool.binding];
        let subject = Self::iri_arg(map, "subject_iri")?;
        let object = Self::iri_arg(map, "object_iri")?;
        self.check_subject(p, &subject, "subject_iri")?;

        let object_term = Term::Iri(object.clone());
        let otypes = self.schema.closure_of_types(&self.graph.types_of(&object_term));
        if otypes.is_empty() {
            self.gate(ViolationReport::new(
                ErrorType::UnknownEntity,
                Some("object_iri"),
                unknown_entity_message(object.as_str()),
            ))?;
        } else if !p.range.is_empty() && p.range.is_disjoint(&otypes) {
            self.gate(ViolationReport::new(
                ErrorType::OntologyConstraintViolation,
                Some("object_iri"),
                range_message(&self.schema, p, object.as_str()),
            ))?;
        }
        self.attach(p, subject, object_term, "object_iri")
    }

    fn op_set(&self, tool: &ToolDescriptor, map: &Map<String, Value>) -> Checked<(ToolResult, Vec<Triple>)> {
        let p = &self.schema.properties[&tool.binding];
        let subject = Self::iri_arg(map, "subject_iri")?;
        let lexical = Self::value_lexical(map, "value")?.unwrap_or_default();
        self.check_subject(p, &subject, "subject_iri")?;
        let value = self.value_term(p, "value", &lexical)?;
        self.attach(p, subject, value, "value")
    }

    fn attach(&self, p: &PropertyDef, subject: Iri, object: Term, field: &str) -> Checked<(ToolResult, Vec<Triple>)> {
        let subject_term = Term::Iri(subject.clone());
        let triple = Triple::new(subject_term.clone(), p.iri.clone(), object).expect("IRI subject");
        if self.graph.contains(&triple) {
            return reject(
                ErrorType::AlreadyAttached,
                field,
                format!("{} already has this {} value.", subject.as_str(), p.local),
            );
        }
        self.check_max(&subject_term, p, field)?;
        Ok((
            ToolResult::new(ResultStatus::Attached, Some(subject.as_str().to_string())),
            vec![triple],
        ))
    }

    fn op_quantity(&self, tool: &ToolDescriptor, map: &Map<String, Value>) -> Checked<(ToolResult, Vec<Triple>)> {
        let class = &tool.binding;
        let class_local = self.schema.classes[class].local.clone();
        let context = Self::string_arg(map, "context")?;
        let value = Self::value_lexical(map, "value")?.unwrap_or_default();
        let unit = Self::string_arg(map, "unit")?.unwrap_or_default();
        let prop = |name: &str| {
            tool.argument(name)
                .and_then(|a| a.property.as_ref())
                .map(|p| &self.schema.properties[p])
                .expect("quantity tool binds value and unit")
        };
        let value_term = self.value_term(prop("value"), "value", &value)?;
        let unit_term = self.value_term(prop("unit"), "unit", &unit)?;

        let label = context.unwrap_or_else(|| format!("{value} {unit}"));
        let mut mint = self.mint.clone();
        let iri = mint
            .mint(&self.doc_id, &class_local)
            .or_else(|e| reject(ErrorType::DatatypeViolation, "context", e.to_string()))?;
        let s = Term::Iri(iri.clone());
        let triples = vec![
            Triple::new(s.clone(), Iri::new(rdf::TYPE).unwrap(), Term::Iri(class.clone())).unwrap(),
            Triple::new(
                s.clone(),
                Iri::new(rdfs::LABEL).unwrap(),
                Term::Literal(Literal::string(label)),
            )
            .unwrap(),
            Triple::new(s.clone(), prop("value").iri.clone(), value_term).unwrap(),
            Triple::new(s, prop("unit").iri.clone(), unit_term).unwrap(),
        ];
        Ok((
            ToolResult::new(ResultStatus::Created, Some(iri.as_str().to_string())),
            triples,
        ))
    }
}

fn subject_display(t: &Term) -> String {
    match t {
        Term::Iri(i) => i.as_str().to_string(),
        other => other.canonical(),
    }
}
