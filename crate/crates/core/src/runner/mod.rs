//! Scripted agent: replays tool-call traces against an endpoint under a
//! plan's tool-group policy, repairing rejected calls from an alias table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::compiler::{Manifest, Plan};
use crate::mcp::{Client, ClientError, Endpoint};
use crate::runtime::{CallOutcome, ViolationReport};

/// Attempts per trace step, the first call included.
pub const MAX_ATTEMPTS: usize = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("trace error: {0}")]
    Trace(String),
    #[error("invalid repair table: {0}")]
    Repairs(String),
    #[error("endpoint down: {0}")]
    EndpointDown(#[from] ClientError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration_id: u32,
    pub tool: String,
    #[serde(default)]
    pub args: Map<String, Value>,
    /// Name under which a successful call's instance IRI is bound. Later
    /// string arguments of the exact form `${name}` are replaced by it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bind: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Checks iteration ids against the plan and that every tool is
    /// callable in at least one iteration.
    pub fn validate(&self, plan: &Plan) -> Result<(), RunError> {
        let mut last = 0;
        for (i, step) in self.steps.iter().enumerate() {
            if step.iteration_id < last {
                return Err(RunError::Trace(format!("step {i}: iteration ids must not decrease")));
            }
            last = step.iteration_id;
            if plan.iteration(step.iteration_id).is_none() {
                return Err(RunError::Trace(format!(
                    "step {i}: plan has no iteration {}",
                    step.iteration_id
                )));
            }
            if !plan.iterations.iter().any(|it| it.allowed_tools.contains(&step.tool)) {
                return Err(RunError::Trace(format!(
                    "step {i}: tool '{}' is not allowed in any iteration",
                    step.tool
                )));
            }
        }
        Ok(())
    }
}

/// Per-field alias maps used to amend rejected arguments.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RepairTable {
    pub fields: BTreeMap<String, BTreeMap<String, String>>,
}

impl RepairTable {
    /// Every field must be an argument of some tool, and every alias target
    /// must be admissible for at least one tool taking that field. A field
    /// such as `value` can be numeric on one tool and an enum on another.
    pub fn validate(&self, manifest: &Manifest) -> Result<(), RunError> {
        for (field, aliases) in &self.fields {
            let schemas: Vec<&Value> = manifest
                .tools
                .iter()
                .filter_map(|t| t.input_schema.pointer(&format!("/properties/{field}")))
                .collect();
            if schemas.is_empty() {
                return Err(RunError::Repairs(format!("no tool takes an argument '{field}'")));
            }
            for target in aliases.values() {
                let admissible = schemas.iter().any(|s| match s.get("enum").and_then(Value::as_array) {
                    Some(labels) => labels.iter().any(|l| l.as_str() == Some(target)),
                    None => true,
                });
                if !admissible {
                    return Err(RunError::Repairs(format!(
                        "alias target '{target}' for '{field}' is not admissible for any tool"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn lexical(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

/// Replaces the reported field with its alias when the alias is admissible;
/// `None` when no single-field repair applies.
pub fn apply_repair(
    report: &ViolationReport,
    args: &Map<String, Value>,
    repair: &RepairTable,
) -> Option<Map<String, Value>> {
    if !report.retryable {
        return None;
    }
    let field = report.field.as_deref()?;
    let current = lexical(args.get(field)?)?;
    let target = repair.fields.get(field)?.get(&current)?;
    if let Some(allowed) = &report.allowed_values {
        if !allowed.contains(target) {
            return None;
        }
    }
    let mut amended = args.clone();
    amended.insert(field.to_string(), Value::String(target.clone()));
    Some(amended)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalStatus {
    Done,
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IterationReport {
    pub id: u32,
    pub calls_total: usize,
    pub calls_ok: usize,
    pub violations: usize,
    pub repairs_succeeded: usize,
    pub policy_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub iteration_id: u32,
    pub tool: String,
    pub skipped: bool,
    pub attempts: Vec<CallOutcome>,
}

impl StepRecord {
    pub fn ok(&self) -> bool {
        self.attempts.last().is_some_and(CallOutcome::is_ok)
    }
}

/// Outcome counts for one run. Steps that reach the endpoint satisfy
/// `first_try_ok + repairs_succeeded + violations_unrepaired == calls_total`,
/// and `calls_ok == first_try_ok + repairs_succeeded`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub calls_total: usize,
    pub calls_ok: usize,
    pub first_try_ok: usize,
    pub requests_total: usize,
    pub violations: usize,
    pub violations_unrepaired: usize,
    pub repairs_attempted: usize,
    pub repairs_succeeded: usize,
    pub policy_violations: usize,
    pub final_status: FinalStatus,
    pub outstanding: Vec<ViolationReport>,
    pub iterations: Vec<IterationReport>,
    pub steps: Vec<StepRecord>,
}

fn substitute(v: &Value, bindings: &BTreeMap<String, String>) -> Value {
    match v {
        Value::String(s) => {
            let bound = s
                .strip_prefix("${")
                .and_then(|rest| rest.strip_suffix('}'))
                .and_then(|name| bindings.get(name));
            match bound {
                Some(iri) => Value::String(iri.clone()),
                None => v.clone(),
            }
        }
        Value::Array(items) => Value::Array(items.iter().map(|i| substitute(i, bindings)).collect()),
        Value::Object(m) => Value::Object(m.iter().map(|(k, i)| (k.clone(), substitute(i, bindings))).collect()),
        other => other.clone(),
    }
}

/// Replays `trace` through `client`, then finalizes.
pub fn run_plan<E: Endpoint>(
    plan: &Plan,
    trace: &Trace,
    repair: &RepairTable,
    client: &mut Client<E>,
) -> Result<RunReport, RunError> {
    trace.validate(plan)?;
    let mut per_iteration: BTreeMap<u32, IterationReport> = plan
        .iterations
        .iter()
        .map(|it| {
            (
                it.id,
                IterationReport {
                    id: it.id,
                    ..Default::default()
                },
            )
        })
        .collect();
    let mut bindings: BTreeMap<String, String> = BTreeMap::new();
    let mut report = RunReport {
        calls_total: 0,
        calls_ok: 0,
        first_try_ok: 0,
        requests_total: 0,
        violations: 0,
        violations_unrepaired: 0,
        repairs_attempted: 0,
        repairs_succeeded: 0,
        policy_violations: 0,
        final_status: FinalStatus::Incomplete,
        outstanding: Vec::new(),
        iterations: Vec::new(),
        steps: Vec::new(),
    };

    for (index, step) in trace.steps.iter().enumerate() {
        let iteration = plan.iteration(step.iteration_id).expect("validated");
        let stats = per_iteration.get_mut(&step.iteration_id).expect("validated");
        let mut record = StepRecord {
            index,
            iteration_id: step.iteration_id,
            tool: step.tool.clone(),
            skipped: false,
            attempts: Vec::new(),
        };
        if !iteration.allowed_tools.contains(&step.tool) {
            log::info!(
                "step {index}: {} is outside iteration {}; skipped",
                step.tool,
                iteration.id
            );
            record.skipped = true;
            report.policy_violations += 1;
            stats.policy_violations += 1;
            report.steps.push(record);
            continue;
        }

        report.calls_total += 1;
        stats.calls_total += 1;
        let mut args = match substitute(&Value::Object(step.args.clone()), &bindings) {
            Value::Object(m) => m,
            _ => unreachable!("substitution preserves objects"),
        };
        loop {
            let outcome = client.call_tool(&step.tool, &Value::Object(args.clone()))?;
            report.requests_total += 1;
            let first = record.attempts.is_empty();
            record.attempts.push(outcome.clone());
            match outcome {
                CallOutcome::Ok(result) => {
                    report.calls_ok += 1;
                    stats.calls_ok += 1;
                    if first {
                        report.first_try_ok += 1;
                    } else {
                        report.repairs_succeeded += 1;
                        stats.repairs_succeeded += 1;
                    }
                    if let (Some(name), Some(iri)) = (&step.bind, result.instance_iri) {
                        bindings.insert(name.clone(), iri);
                    }
                    break;
                }
                CallOutcome::Violation(v) => {
                    report.violations += 1;
                    stats.violations += 1;
                    let amended = if record.attempts.len() < MAX_ATTEMPTS {
                        apply_repair(&v, &args, repair)
                    } else {
                        None
                    };
                    match amended {
                        Some(next) => {
                            log::info!("step {index}: repairing {:?} in {}", v.field, step.tool);
                            report.repairs_attempted += 1;
                            args = next;
                        }
                        None => {
                            report.violations_unrepaired += 1;
                            break;
                        }
                    }
                }
            }
        }
        report.steps.push(record);
    }

    let finalized = client.finalize()?;
    report.final_status = if finalized.is_done() {
        FinalStatus::Done
    } else {
        FinalStatus::Incomplete
    };
    report.outstanding = finalized.violations().to_vec();
    report.iterations = per_iteration.into_values().collect();
    Ok(report)
}
