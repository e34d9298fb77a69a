//! Tool execution against the A-Box with call-time constraint checks.

mod report;
mod session;
mod validate;

use std::path::Path;

use thiserror::Error;

use crate::rdf::RdfError;

pub use report::{CallOutcome, ErrorType, FinalizeOutcome, ResultStatus, ToolResult, ViolationReport, ViolationStatus};
pub use session::{args_hash, Enforcement, LogEntry, Session, DEFAULT_BASE, FINALIZE_TOOL};
pub use validate::{min_cardinality_reports, validate_graph};

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error("unknown tool '{0}'")]
    UnknownTool(String),
    #[error("tool arguments must be a JSON object")]
    ArgumentsNotObject,
    #[error(transparent)]
    Rdf(#[from] RdfError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl RuntimeError {
    pub(crate) fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        RuntimeError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
