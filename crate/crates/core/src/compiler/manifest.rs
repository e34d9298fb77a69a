use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::tools::{ToolDescriptor, ToolGroup, ToolSet, ValueKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestTool {
    pub name: String,
    pub group: ToolGroup,
    pub doc: String,
    pub input_schema: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_fingerprint: String,
    pub tools: Vec<ManifestTool>,
}

impl Manifest {
    /// Pretty JSON with a trailing newline. Object keys are emitted sorted.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&serde_json::to_value(self).expect("manifest is plain JSON"))
            .expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn tool(&self, name: &str) -> Option<&ManifestTool> {
        self.tools.iter().find(|t| t.name == name)
    }
}

pub fn kind_schema(kind: &ValueKind) -> Value {
    match kind {
        ValueKind::String => json!({"type": "string"}),
        ValueKind::Number => json!({"type": "number"}),
        ValueKind::Integer => json!({"type": "integer"}),
        ValueKind::Boolean => json!({"type": "boolean"}),
        ValueKind::Iri => json!({"type": "string", "format": "iri"}),
        ValueKind::Enum(labels) => json!({"type": "string", "enum": labels}),
    }
}

/// JSON-Schema-shaped description of a tool's arguments.
pub fn input_schema(tool: &ToolDescriptor) -> Value {
    let mut properties = Map::new();
    let mut required = Vec::new();
    for a in &tool.arguments {
        let mut schema = kind_schema(&a.kind);
        schema["description"] = Value::String(a.doc.clone());
        properties.insert(a.name.clone(), schema);
        if a.required {
            required.push(Value::String(a.name.clone()));
        }
    }
    json!({"type": "object", "properties": properties, "required": required})
}

pub fn emit_manifest(toolset: &ToolSet) -> Manifest {
    Manifest {
        schema_fingerprint: toolset.schema_fingerprint.clone(),
        tools: toolset
            .tools
            .iter()
            .map(|t| ManifestTool {
                name: t.name.clone(),
                group: t.group,
                doc: t.doc.clone(),
                input_schema: input_schema(t),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::compile_tools;
    use crate::test_support::fixture_schema;

    #[test]
    fn quantity_entry_carries_unit_enum() {
        let m = emit_manifest(&compile_tools(&fixture_schema()).unwrap());
        let q = m.tool("create_temperature_quantity").unwrap();
        assert_eq!(
            q.input_schema["properties"]["unit"]["enum"],
            json!(["degree Celsius", "kelvin"])
        );
        assert_eq!(q.input_schema["properties"]["value"]["type"], "number");
        assert_eq!(q.input_schema["required"], json!(["value", "unit"]));
        let link = m.tool("link_has_step").unwrap();
        assert_eq!(link.input_schema["properties"]["object_iri"]["format"], "iri");
    }

    #[test]
    fn empty_toolset() {
        let ts = ToolSet {
            tools: vec![],
            schema_fingerprint: "abc".into(),
        };
        let v: Value = serde_json::from_str(&emit_manifest(&ts).to_json()).unwrap();
        assert_eq!(v, json!({"schema_fingerprint": "abc", "tools": []}));
    }

    #[test]
    fn emission_is_byte_identical() {
        let a = emit_manifest(&compile_tools(&fixture_schema()).unwrap()).to_json();
        let b = emit_manifest(&compile_tools(&fixture_schema()).unwrap()).to_json();
        assert_eq!(a, b);
        let parsed: Manifest = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed.to_json(), a);
    }
}
