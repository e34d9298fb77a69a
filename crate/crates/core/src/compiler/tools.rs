use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::naming::snake_case;
use crate::rdf::vocab::xsd;
use crate::rdf::Iri;
use crate::schema::{PropertyDef, PropertyKind, SchemaModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("tool name '{name}' is produced by both {first} and {second}")]
    NameCollision { name: String, first: Iri, second: Iri },
    #[error("tool '{tool}' has two arguments named '{argument}'")]
    ArgumentCollision { tool: String, argument: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "labels")]
pub enum ValueKind {
    String,
    Number,
    Integer,
    Boolean,
    Iri,
    Enum(Vec<String>),
}

impl ValueKind {
    pub fn for_datatype(datatype: &str) -> ValueKind {
        match datatype {
            xsd::DOUBLE | xsd::FLOAT | xsd::DECIMAL => ValueKind::Number,
            xsd::BOOLEAN => ValueKind::Boolean,
            xsd::ANY_URI => ValueKind::Iri,
            dt if xsd::INTEGER_TYPES.contains(&dt) => ValueKind::Integer,
            _ => ValueKind::String,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ValueKind::Number | ValueKind::Integer)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArgumentSpec {
    pub name: String,
    pub kind: ValueKind,
    pub required: bool,
    pub doc: String,
    /// Property written by this argument, for attribute-style arguments.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub property: Option<Iri>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolGroup {
    EntityCreation,
    Completion,
    Linking,
    Query,
}

impl ToolGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            ToolGroup::EntityCreation => "entity_creation",
            ToolGroup::Completion => "completion",
            ToolGroup::Linking => "linking",
            ToolGroup::Query => "query",
        }
    }
}

/// The semantic operation a tool dispatches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolOp {
    Create,
    CheckExisting,
    Link,
    Set,
    CreateQuantity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolDescriptor {
    pub name: String,
    pub group: ToolGroup,
    pub op: ToolOp,
    pub arguments: Vec<ArgumentSpec>,
    pub doc: String,
    /// The class (create/check/quantity tools) or property (link/set tools).
    pub binding: Iri,
}

impl ToolDescriptor {
    pub fn argument(&self, name: &str) -> Option<&ArgumentSpec> {
        self.arguments.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ToolSet {
    pub tools: Vec<ToolDescriptor>,
    pub schema_fingerprint: String,
}

impl ToolSet {
    pub fn get(&self, name: &str) -> Option<&ToolDescriptor> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tools.iter().map(|t| t.name.as_str())
    }

    pub fn in_group(&self, group: ToolGroup) -> impl Iterator<Item = &ToolDescriptor> {
        self.tools.iter().filter(move |t| t.group == group)
    }
}

fn arg(name: &str, kind: ValueKind, required: bool, doc: impl Into<String>) -> ArgumentSpec {
    ArgumentSpec {
        name: name.to_string(),
        kind,
        required,
        doc: doc.into(),
        property: None,
    }
}

fn with_comment(mut doc: String, comment: Option<&str>) -> String {
    if let Some(c) = comment {
        doc.push('\n');
        doc.push_str(c);
    }
    doc
}

fn describe_classes(schema: &SchemaModel, classes: &BTreeSet<Iri>) -> String {
    if classes.is_empty() {
        return "any class".to_string();
    }
    classes
        .iter()
        .map(|c| schema.classes.get(c).map_or(c.local_name(), |d| d.local.as_str()))
        .collect::<Vec<_>>()
        .join(" or ")
}

/// Value kind of the `value` argument for a property: the vocabulary labels
/// when one exists, otherwise the mapped datatype.
fn value_kind(schema: &SchemaModel, p: &PropertyDef) -> ValueKind {
    if let Some(vocab) = schema.vocabularies.get(&p.iri) {
        return ValueKind::Enum(vocab.labels());
    }
    match p.datatype() {
        Some(dt) => ValueKind::for_datatype(dt.as_str()),
        None => ValueKind::Iri,
    }
}

fn range_doc(schema: &SchemaModel, p: &PropertyDef) -> String {
    if let Some(vocab) = schema.vocabularies.get(&p.iri) {
        return format!("one of: {}", vocab.labels().join(", "));
    }
    match p.datatype() {
        Some(dt) => format!("xsd:{}", dt.local_name()),
        None => describe_classes(schema, &p.range),
    }
}

/// Properties whose declared domain names a class in the closure of `class`
/// (unrestricted properties are excluded).
fn explicit_properties<'s>(schema: &'s SchemaModel, class: &Iri) -> Vec<&'s PropertyDef> {
    let closure = schema.subclass_closure(class).unwrap_or_default();
    schema
        .properties
        .values()
        .filter(|p| p.domain.iter().any(|d| closure.contains(d)))
        .collect()
}

/// Compiles the typed tool surface for a schema.
pub fn compile_tools(schema: &SchemaModel) -> Result<ToolSet, CompileError> {
    let mut tools = Vec::new();

    for class in schema.classes.values() {
        let snake = snake_case(&class.local);
        let comment = class.comment.as_deref();

        let mut create_args = vec![
            arg("doc_id", ValueKind::String, true, "Identifier of the source document."),
            arg(
                "label",
                ValueKind::String,
                true,
                format!("Name of the {} as written in the document.", class.local),
            ),
        ];
        for p in schema.properties_for_class(&class.iri).unwrap_or_default() {
            if p.kind != PropertyKind::Datatype {
                continue;
            }
            let mut a = arg(
                &snake_case(&p.local),
                value_kind(schema, p),
                false,
                with_comment(
                    format!("Optional {} ({}).", p.local, range_doc(schema, p)),
                    p.comment.as_deref(),
                ),
            );
            a.property = Some(p.iri.clone());
            create_args.push(a);
        }
        tools.push(ToolDescriptor {
            name: format!("create_{snake}"),
            group: ToolGroup::EntityCreation,
            op: ToolOp::Create,
            arguments: create_args,
            doc: with_comment(
                format!(
                    "Create an instance of {} <{}>. If an instance of this class with the same label exists it is reused.",
                    class.local,
                    class.iri.as_str()
                ),
                comment,
            ),
            binding: class.iri.clone(),
        });

        tools.push(ToolDescriptor {
            name: format!("check_existing_{snake}"),
            group: ToolGroup::EntityCreation,
            op: ToolOp::CheckExisting,
            arguments: vec![arg("label", ValueKind::String, true, "Label to look up.")],
            doc: format!(
                "Look up an existing {} instance by label and return its IRI. Use it before passing an IRI to another tool.",
                class.local
            ),
            binding: class.iri.clone(),
        });

        let props = explicit_properties(schema, &class.iri);
        let numeric = props
            .iter()
            .find(|p| p.kind == PropertyKind::Datatype && value_kind(schema, p).is_numeric());
        let unit = props.iter().find(|p| schema.vocabularies.contains_key(&p.iri));
        if let (Some(numeric), Some(unit)) = (numeric, unit) {
            let mut value = arg(
                "value",
                value_kind(schema, numeric),
                true,
                with_comment(
                    format!("Numerical value ({}).", numeric.local),
                    numeric.comment.as_deref(),
                ),
            );
            value.property = Some(numeric.iri.clone());
            let mut unit_arg = arg(
                "unit",
                value_kind(schema, unit),
                true,
                with_comment(format!("Unit ({}).", range_doc(schema, unit)), unit.comment.as_deref()),
            );
            unit_arg.property = Some(unit.iri.clone());
            tools.push(ToolDescriptor {
                name: format!("create_{snake}_quantity"),
                group: ToolGroup::EntityCreation,
                op: ToolOp::CreateQuantity,
                arguments: vec![
                    arg(
                        "context",
                        ValueKind::String,
                        false,
                        "Short description of what the quantity belongs to; used as the label.",
                    ),
                    value,
                    unit_arg,
                ],
                doc: with_comment(
                    format!(
                        "Create a new {} quantity from a numerical value and a unit. Always creates a fresh instance.",
                        class.local
                    ),
                    comment,
                ),
                binding: class.iri.clone(),
            });
        }
    }

    for p in schema.properties.values() {
        let snake = snake_case(&p.local);
        let domain = describe_classes(schema, &p.domain);
        let is_link = p.kind == PropertyKind::Object && !schema.vocabularies.contains_key(&p.iri);
        let tool = if is_link {
            ToolDescriptor {
                name: format!("link_{snake}"),
                group: ToolGroup::Linking,
                op: ToolOp::Link,
                arguments: vec![
                    arg(
                        "subject_iri",
                        ValueKind::Iri,
                        true,
                        format!("IRI of an existing {domain} instance."),
                    ),
                    arg(
                        "object_iri",
                        ValueKind::Iri,
                        true,
                        format!("IRI of an existing {} instance.", range_doc(schema, p)),
                    ),
                ],
                doc: with_comment(
                    format!("Link a {domain} to a {} via {}.", range_doc(schema, p), p.local),
                    p.comment.as_deref(),
                ),
                binding: p.iri.clone(),
            }
        } else {
            ToolDescriptor {
                name: format!("set_{snake}"),
                group: ToolGroup::Completion,
                op: ToolOp::Set,
                arguments: vec![
                    arg(
                        "subject_iri",
                        ValueKind::Iri,
                        true,
                        format!("IRI of an existing {domain} instance."),
                    ),
                    arg(
                        "value",
                        value_kind(schema, p),
                        true,
                        format!("Value ({}).", range_doc(schema, p)),
                    ),
                ],
                doc: with_comment(format!("Set {} on a {domain}.", p.local), p.comment.as_deref()),
                binding: p.iri.clone(),
            }
        };
        tools.push(tool);
    }

    let mut seen: BTreeMap<String, Iri> = BTreeMap::new();
    for t in &tools {
        if let Some(first) = seen.insert(t.name.clone(), t.binding.clone()) {
            return Err(CompileError::NameCollision {
                name: t.name.clone(),
                first,
                second: t.binding.clone(),
            });
        }
        let mut names = BTreeSet::new();
        for a in &t.arguments {
            if !names.insert(a.name.as_str()) {
                return Err(CompileError::ArgumentCollision {
                    tool: t.name.clone(),
                    argument: a.name.clone(),
                });
            }
        }
    }
    tools.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(ToolSet {
        tools,
        schema_fingerprint: schema.fingerprint.clone(),
    })
}
