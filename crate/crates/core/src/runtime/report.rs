use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ErrorType {
    OntologyConstraintViolation,
    DatatypeViolation,
    CardinalityViolation,
    UnknownEntity,
    DuplicateCall,
    AlreadyAttached,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationStatus {
    Rejected,
    AlreadyAttached,
    DuplicateCall,
}

/// Structured feedback for a rejected call or a graph-level finding.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ViolationReport {
    pub ok: bool,
    pub error_type: ErrorType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_values: Option<Vec<String>>,
    pub retryable: bool,
    pub status: ViolationStatus,
}

impl ViolationReport {
    pub fn new(error_type: ErrorType, field: Option<&str>, message: impl Into<String>) -> Self {
        let (retryable, status) = match error_type {
            ErrorType::DuplicateCall => (false, ViolationStatus::DuplicateCall),
            ErrorType::AlreadyAttached => (false, ViolationStatus::AlreadyAttached),
            _ => (true, ViolationStatus::Rejected),
        };
        ViolationReport {
            ok: false,
            error_type,
            field: field.map(str::to_string),
            message: message.into(),
            allowed_values: None,
            retryable,
            status,
        }
    }

    pub fn with_allowed(mut self, allowed: Vec<String>) -> Self {
        self.allowed_values = Some(allowed);
        self
    }

    pub fn not_retryable(mut self) -> Self {
        self.retryable = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultStatus {
    Created,
    Reused,
    Attached,
    Done,
    /// A lookup that matched nothing.
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolResult {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_iri: Option<String>,
    pub validated: bool,
    pub status: ResultStatus,
}

impl ToolResult {
    pub fn new(status: ResultStatus, instance_iri: Option<String>) -> Self {
        ToolResult {
            ok: true,
            instance_iri,
            validated: true,
            status,
        }
    }
}

/// Result of one tool call as seen by the caller.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CallOutcome {
    Ok(ToolResult),
    Violation(ViolationReport),
}

impl CallOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, CallOutcome::Ok(_))
    }

    pub fn violation(&self) -> Option<&ViolationReport> {
        match self {
            CallOutcome::Violation(v) => Some(v),
            CallOutcome::Ok(_) => None,
        }
    }

    pub fn result(&self) -> Option<&ToolResult> {
        match self {
            CallOutcome::Ok(r) => Some(r),
            CallOutcome::Violation(_) => None,
        }
    }
}

/// Result of finalization: done, or every outstanding violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FinalizeOutcome {
    Done(ToolResult),
    Outstanding {
        ok: bool,
        run_status: String,
        violations: Vec<ViolationReport>,
    },
}

impl FinalizeOutcome {
    pub fn outstanding(violations: Vec<ViolationReport>) -> Self {
        FinalizeOutcome::Outstanding {
            ok: false,
            run_status: "incomplete".to_string(),
            violations,
        }
    }

    pub fn is_done(&self) -> bool {
        matches!(self, FinalizeOutcome::Done(_))
    }

    pub fn violations(&self) -> &[ViolationReport] {
        match self {
            FinalizeOutcome::Done(_) => &[],
            FinalizeOutcome::Outstanding { violations, .. } => violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn violation_json_shape() {
        let v = ViolationReport::new(
            ErrorType::OntologyConstraintViolation,
            Some("unit"),
            "Unit value 'C' is not permitted by the ontology.",
        )
        .with_allowed(vec!["degree Celsius".into(), "kelvin".into()]);
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"ok":false,"error_type":"OntologyConstraintViolation","field":"unit","message":"Unit value 'C' is not permitted by the ontology.","allowed_values":["degree Celsius","kelvin"],"retryable":true,"status":"rejected"}"#
        );
    }

    #[test]
    fn outcomes_round_trip() {
        let ok = CallOutcome::Ok(ToolResult::new(ResultStatus::Created, Some("http://x/a".into())));
        let bad = CallOutcome::Violation(ViolationReport::new(ErrorType::DuplicateCall, None, "dup"));
        for o in [ok, bad] {
            let s = serde_json::to_string(&o).unwrap();
            assert_eq!(serde_json::from_str::<CallOutcome>(&s).unwrap(), o);
        }
        let fin = FinalizeOutcome::outstanding(vec![]);
        assert_eq!(
            serde_json::to_value(&fin).unwrap(),
            json!({"ok": false, "run_status": "incomplete", "violations": []})
        );
    }

    #[test]
    fn status_follows_error_type() {
        let dup = ViolationReport::new(ErrorType::DuplicateCall, None, "x");
        assert!(!dup.retryable);
        assert_eq!(dup.status, ViolationStatus::DuplicateCall);
        let att = ViolationReport::new(ErrorType::AlreadyAttached, None, "x");
        assert_eq!(att.status, ViolationStatus::AlreadyAttached);
        assert!(ViolationReport::new(ErrorType::UnknownEntity, None, "x").retryable);
    }
}
