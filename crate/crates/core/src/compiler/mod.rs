//! Compilation of a [`SchemaModel`](crate::schema::SchemaModel) into typed
//! tools, a manifest, and a static iteration plan.

mod manifest;
pub mod naming;
mod plan;
mod tools;

pub use manifest::{emit_manifest, input_schema, kind_schema, Manifest, ManifestTool};
pub use plan::{generate_plan, Iteration, Plan, PlanError};
pub use tools::{compile_tools, ArgumentSpec, CompileError, ToolDescriptor, ToolGroup, ToolOp, ToolSet, ValueKind};
