use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tools::{ToolGroup, ToolOp, ToolSet};
use crate::schema::{PropertyKind, SchemaModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("schema has no class marked as top entity")]
    NoTopEntity,
    #[error("required tool '{0}' is not in the tool set")]
    MissingTool(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Iteration {
    pub id: u32,
    pub goal: String,
    pub extraction_instruction: String,
    pub kg_instruction: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub sub_iterations: Vec<serde_json::Value>,
    pub tool_groups: Vec<ToolGroup>,
    pub required_tools: Vec<String>,
    /// Exact tool names callable in this iteration.
    pub allowed_tools: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub iterations: Vec<Iteration>,
}

impl Plan {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plan serializes");
        s.push('\n');
        s
    }

    pub fn iteration(&self, id: u32) -> Option<&Iteration> {
        self.iterations.iter().find(|i| i.id == id)
    }
}

fn roles(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn tools_in(toolset: &ToolSet, groups: &[ToolGroup]) -> Vec<String> {
    toolset
        .tools
        .iter()
        .filter(|t| groups.contains(&t.group))
        .map(|t| t.name.clone())
        .collect()
}

/// Builds the fixed three-iteration plan: top-level entities, then related
/// entities and attributes, then links and finalization.
pub fn generate_plan(schema: &SchemaModel, toolset: &ToolSet) -> Result<Plan, PlanError> {
    let top = schema.top_entity().ok_or(PlanError::NoTopEntity)?;
    let top_name = top.label.clone().unwrap_or_else(|| top.local.clone());

    let top_tools: Vec<String> = toolset
        .tools
        .iter()
        .filter(|t| t.binding == top.iri && matches!(t.op, ToolOp::Create | ToolOp::CheckExisting))
        .map(|t| t.name.clone())
        .collect();
    let create_top = toolset
        .tools
        .iter()
        .find(|t| t.binding == top.iri && t.op == ToolOp::Create)
        .map(|t| t.name.clone())
        .ok_or_else(|| PlanError::MissingTool(format!("create tool for {}", top.local)))?;

    let mut first_extraction = format!("Identify every {top_name} described in the document.");
    if let Some(c) = &top.comment {
        first_extraction.push(' ');
        first_extraction.push_str(c);
    }

    let mut related = Vec::new();
    for c in schema.classes.values().filter(|c| c.iri != top.iri) {
        let name = c.label.as_deref().unwrap_or(&c.local);
        match &c.comment {
            Some(comment) => related.push(format!("{name}: {comment}")),
            None => related.push(format!("{name}.")),
        }
    }
    let mut link_notes = Vec::new();
    for p in schema.properties.values().filter(|p| p.kind == PropertyKind::Object) {
        if let Some(comment) = &p.comment {
            link_notes.push(format!("{}: {comment}", p.local));
        }
    }

    // links named by a min-cardinality rule must be made before finalize
    let mut final_required: Vec<String> = Vec::new();
    for rule in schema.cardinalities.iter().filter(|r| r.min.is_some_and(|m| m > 0)) {
        if let Some(t) = toolset
            .tools
            .iter()
            .find(|t| t.binding == rule.property && matches!(t.op, ToolOp::Link | ToolOp::Set))
        {
            if !final_required.contains(&t.name) {
                final_required.push(t.name.clone());
            }
        }
    }

    let iterations = vec![
        Iteration {
            id: 1,
            goal: format!("Create the top-level {top_name} entities only."),
            extraction_instruction: first_extraction,
            kg_instruction: format!(
                "Call {} for each entity before creating it, then {} once per distinct entity. Do not create related entities yet.",
                top_tools.iter().find(|n| n.starts_with("check_existing_")).cloned().unwrap_or_default(),
                create_top
            ),
            inputs: roles(&["paper_text", "store"]),
            outputs: roles(&["store", "run_log"]),
            sub_iterations: vec![],
            tool_groups: vec![ToolGroup::EntityCreation],
            required_tools: vec![create_top],
            allowed_tools: top_tools,
        },
        Iteration {
            id: 2,
            goal: "Create related entities and fill in their attributes.".to_string(),
            extraction_instruction: related.join("\n"),
            kg_instruction: "Create each related entity with its creation tool and set attributes with the completion tools. Pass only IRIs returned by earlier creation or lookup calls.".to_string(),
            inputs: roles(&["paper_text", "store"]),
            outputs: roles(&["store", "run_log"]),
            sub_iterations: vec![],
            tool_groups: vec![ToolGroup::EntityCreation, ToolGroup::Completion],
            required_tools: vec![],
            allowed_tools: tools_in(toolset, &[ToolGroup::EntityCreation, ToolGroup::Completion]),
        },
        Iteration {
            id: 3,
            goal: "Link entities, complete remaining attributes, and finalize.".to_string(),
            extraction_instruction: link_notes.join("\n"),
            kg_instruction: "Attach entities with the linking tools and fill remaining attributes. Finish by calling finalize; the run ends when it reports run_status done.".to_string(),
            inputs: roles(&["paper_text", "store"]),
            outputs: roles(&["store", "run_log"]),
            sub_iterations: vec![],
            tool_groups: vec![ToolGroup::Linking, ToolGroup::Completion],
            required_tools: final_required,
            allowed_tools: tools_in(toolset, &[ToolGroup::Linking, ToolGroup::Completion]),
        },
    ];

    for it in &iterations {
        for name in &it.required_tools {
            if toolset.get(name).is_none() {
                return Err(PlanError::MissingTool(name.clone()));
            }
        }
    }
    Ok(Plan { iterations })
}
