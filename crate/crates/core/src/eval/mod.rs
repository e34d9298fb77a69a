//! Record projection, optimal alignment and slot-level scoring.

mod anatomy;
mod assign;
mod query;
mod score;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub use anatomy::{
    concentration_curve, error_anatomy, CurvePoint, ErrorAnatomy, FieldErrors, PaperErrors, ParetoPoint,
};
pub use assign::{assignment_total, max_weight_assignment};
pub use query::{project_records, Normalize, ProjectionQuery, RecordSchema, SlotDef, SlotKind};
pub use score::{aggregate, align_records, match_records, normalize_slot, score, Alignment, Counts, Metrics};

/// Slot name to value. Absent slots are empty.
pub type Record = serde_json::Map<String, Value>;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid record schema: {0}")]
    Schema(String),
    #[error("query error: {0}")]
    Query(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: not a JSON array of records: {message}")]
    Records { path: PathBuf, message: String },
}

impl EvalError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        EvalError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

pub fn load_records(path: &Path) -> Result<Vec<Record>, EvalError> {
    let text = fs::read_to_string(path).map_err(|e| EvalError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| EvalError::Records {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn records_to_json(records: &[Record]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("records serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperRow {
    pub doi: String,
    pub counts: Counts,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub category: String,
    pub papers: Vec<PaperRow>,
    pub overall: PaperRow,
    pub anatomy: ErrorAnatomy,
}

impl Evaluation {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("evaluation serializes");
        s.push('\n');
        s
    }

    /// One row per paper plus an `Overall` row; scores to three decimals.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["DOI", "TP", "FP", "FN", "Precision", "Recall", "F1"])
            .expect("write to memory");
        for row in self.papers.iter().chain(std::iter::once(&self.overall)) {
            w.write_record([
                row.doi.clone(),
                row.counts.tp.to_string(),
                row.counts.fp.to_string(),
                row.counts.fn_.to_string(),
                format!("{:.3}", row.metrics.precision),
                format!("{:.3}", row.metrics.recall),
                format!("{:.3}", row.metrics.f1),
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is UTF-8")
    }
}

fn json_stems(dir: &Path) -> Result<BTreeSet<String>, EvalError> {
    let mut out = BTreeSet::new();
    for entry in fs::read_dir(dir).map_err(|e| EvalError::io(dir, e))? {
        let path = entry.map_err(|e| EvalError::io(dir, e))?.path();
        if path.extension().is_some_and(|x| x == "json") {
            if let Some(stem) = path.file_stem() {
                out.insert(stem.to_string_lossy().to_string());
            }
        }
    }
    Ok(out)
}

/// Scores `<doi>.json` record files in `pred_dir` against `gold_dir`. A
/// paper missing on one side is scored against an empty record list.
pub fn evaluate_dirs(pred_dir: &Path, gold_dir: &Path, schema: &RecordSchema) -> Result<Evaluation, EvalError> {
    let papers: BTreeSet<String> = json_stems(gold_dir)?.union(&json_stems(pred_dir)?).cloned().collect();
    let read = |dir: &Path, doi: &str| -> Result<Vec<Record>, EvalError> {
        let path = dir.join(format!("{doi}.json"));
        if path.exists() {
            load_records(&path)
        } else {
            Ok(Vec::new())
        }
    };
    let mut aligned = Vec::new();
    for doi in papers {
        let a = align_records(&read(pred_dir, &doi)?, &read(gold_dir, &doi)?, schema);
        aligned.push((doi, a));
    }
    Ok(summarize(&schema.category, &aligned))
}

pub fn summarize(category: &str, aligned: &[(String, Alignment)]) -> Evaluation {
    let papers: Vec<PaperRow> = aligned
        .iter()
        .map(|(doi, a)| PaperRow {
            doi: doi.clone(),
            counts: a.counts,
            metrics: score(a.counts),
        })
        .collect();
    let total: Counts = papers.iter().map(|p| p.counts).sum();
    Evaluation {
        category: category.to_string(),
        overall: PaperRow {
            doi: "Overall".into(),
            counts: total,
            metrics: score(total),
        },
        anatomy: error_anatomy(aligned),
        papers,
    }
}

/// Micro and macro scores over categories, keyed by category name.
pub fn category_summary(per_category: &BTreeMap<String, Counts>) -> Value {
    let (micro, macro_) = aggregate(per_category);
    serde_json::json!({
        "categories": per_category
            .iter()
            .map(|(k, c)| (k.clone(), serde_json::json!({"counts": c, "metrics": score(*c)})))
            .collect::<serde_json::Map<_, _>>(),
        "micro": micro,
        "macro": macro_,
    })
}
