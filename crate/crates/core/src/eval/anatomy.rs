use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::score::{score, Alignment, Counts};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldErrors {
    pub slot: String,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl FieldErrors {
    pub fn total(&self) -> u64 {
        self.fp + self.fn_
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaperErrors {
    pub paper: String,
    pub errors: u64,
    pub share: f64,
}

/// A point of a concentration curve: the top `x` fraction of items carries
/// the `y` fraction of all errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub top_n: usize,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorAnatomy {
    pub fields: Vec<FieldErrors>,
    pub papers: Vec<PaperErrors>,
    pub field_curve: Vec<CurvePoint>,
    pub paper_curve: Vec<CurvePoint>,
    pub baseline_f1: f64,
    pub pareto: Vec<ParetoPoint>,
}

/// Cumulative error share over items sorted by descending error count,
/// starting at the origin. With no errors at all the curve is the diagonal.
pub fn concentration_curve(errors_desc: &[u64]) -> Vec<CurvePoint> {
    let n = errors_desc.len();
    let total: u64 = errors_desc.iter().sum();
    let mut out = vec![CurvePoint { x: 0.0, y: 0.0 }];
    let mut cum = 0;
    for (k, e) in errors_desc.iter().enumerate() {
        cum += e;
        let x = (k + 1) as f64 / n as f64;
        let y = if total == 0 { x } else { cum as f64 / total as f64 };
        out.push(CurvePoint { x, y });
    }
    out
}

/// Ranks slots and papers by error volume. The Pareto projection recomputes
/// F1 as if the top-N slots were extracted perfectly: their false negatives
/// become true positives and their false positives disappear.
pub fn error_anatomy(per_paper: &[(String, Alignment)]) -> ErrorAnatomy {
    let mut by_slot: BTreeMap<&str, Counts> = BTreeMap::new();
    for (_, a) in per_paper {
        for (slot, c) in &a.per_slot {
            *by_slot.entry(slot).or_default() += *c;
        }
    }
    let mut fields: Vec<FieldErrors> = by_slot
        .iter()
        .map(|(slot, c)| FieldErrors {
            slot: slot.to_string(),
            fp: c.fp,
            fn_: c.fn_,
        })
        .collect();
    fields.sort_by(|a, b| b.total().cmp(&a.total()).then_with(|| a.slot.cmp(&b.slot)));

    let total_errors: u64 = per_paper.iter().map(|(_, a)| a.counts.errors()).sum();
    let mut papers: Vec<PaperErrors> = per_paper
        .iter()
        .map(|(paper, a)| PaperErrors {
            paper: paper.clone(),
            errors: a.counts.errors(),
            share: if total_errors == 0 {
                0.0
            } else {
                a.counts.errors() as f64 / total_errors as f64
            },
        })
        .collect();
    papers.sort_by(|a, b| b.errors.cmp(&a.errors).then_with(|| a.paper.cmp(&b.paper)));

    let total: Counts = by_slot.values().copied().sum();
    let mut pareto = Vec::new();
    let mut fixed = total;
    for (i, f) in fields.iter().enumerate() {
        fixed.tp += f.fn_;
        fixed.fn_ -= f.fn_;
        fixed.fp -= f.fp;
        pareto.push(ParetoPoint {
            top_n: i + 1,
            f1: score(fixed).f1,
        });
    }

    ErrorAnatomy {
        field_curve: concentration_curve(&fields.iter().map(FieldErrors::total).collect::<Vec<_>>()),
        paper_curve: concentration_curve(&papers.iter().map(|p| p.errors).collect::<Vec<_>>()),
        baseline_f1: score(total).f1,
        fields,
        papers,
        pareto,
    }
}
