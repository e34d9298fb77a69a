use std::collections::BTreeMap;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::assign::max_weight_assignment;
use super::query::{Normalize, RecordSchema, SlotKind};
use super::Record;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl Counts {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        Counts { tp, fp, fn_ }
    }

    pub fn errors(&self) -> u64 {
        self.fp + self.fn_
    }
}

impl Add for Counts {
    type Output = Counts;

    fn add(self, o: Counts) -> Counts {
        Counts::new(self.tp + o.tp, self.fp + o.fp, self.fn_ + o.fn_)
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        *self = *self + o;
    }
}

impl std::iter::Sum for Counts {
    fn sum<I: Iterator<Item = Counts>>(iter: I) -> Counts {
        iter.fold(Counts::default(), Add::add)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision is 1 with no predictions, recall is 1 with no gold items, and
/// F1 is 0 when both are 0.
pub fn score(c: Counts) -> Metrics {
    let ratio = |num: u64, den: u64| if den == 0 { 1.0 } else { num as f64 / den as f64 };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Metrics { precision, recall, f1 }
}

/// Micro scores the summed counts; macro averages each category's
/// precision, recall and F1 separately.
pub fn aggregate(per_category: &BTreeMap<String, Counts>) -> (Metrics, Metrics) {
    let micro = score(per_category.values().copied().sum());
    let n = per_category.len();
    if n == 0 {
        return (micro, score(Counts::default()));
    }
    let each: Vec<Metrics> = per_category.values().map(|c| score(*c)).collect();
    let mean = |f: fn(&Metrics) -> f64| each.iter().map(f).sum::<f64>() / n as f64;
    let macro_ = Metrics {
        precision: mean(|m| m.precision),
        recall: mean(|m| m.recall),
        f1: mean(|m| m.f1),
    };
    (micro, macro_)
}

fn canonical_number(v: f64, kind: SlotKind) -> String {
    if kind == SlotKind::Integer && v.fract() == 0.0 && v.abs() < 9.0e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Comparable form of a slot value, `None` when empty.
pub fn normalize_slot(value: Option<&Value>, schema: &RecordSchema, slot: &str) -> Option<String> {
    let def = schema.slot(slot)?;
    let raw = match value? {
        Value::Null => return None,
        Value::String(s) => s.trim().to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if def.kind != SlotKind::String => canonical_number(f, def.kind),
            _ => n.to_string(),
        },
        Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    };
    if raw.is_empty() {
        return None;
    }
    let raw = match def.kind {
        SlotKind::Number | SlotKind::Integer => match raw.parse::<f64>() {
            Ok(f) if f.is_finite() => canonical_number(f, def.kind),
            _ => raw,
        },
        SlotKind::String => raw,
    };
    Some(match def.normalize {
        Normalize::None => raw,
        Normalize::Casefold => raw.to_lowercase(),
        Normalize::Unitlabel => schema.unit_labels.get(&raw).cloned().unwrap_or(raw).to_lowercase(),
    })
}

fn normalized(records: &[Record], schema: &RecordSchema) -> Vec<Vec<Option<String>>> {
    records
        .iter()
        .map(|r| {
            schema
                .slots
                .iter()
                .map(|s| normalize_slot(r.get(&s.name), schema, &s.name))
                .collect()
        })
        .collect()
}

/// Optimal record alignment with per-slot counts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Alignment {
    /// (predicted index, gold index) pairs.
    pub pairs: Vec<(usize, usize)>,
    pub counts: Counts,
    pub per_slot: BTreeMap<String, Counts>,
}

pub fn align_records(predicted: &[Record], gold: &[Record], schema: &RecordSchema) -> Alignment {
    let pred = normalized(predicted, schema);
    let gold_n = normalized(gold, schema);
    let weights: Vec<Vec<i64>> = pred
        .iter()
        .map(|p| {
            gold_n
                .iter()
                .map(|g| p.iter().zip(g).filter(|(a, b)| a.is_some() && a == b).count() as i64)
                .collect()
        })
        .collect();
    let assignment = max_weight_assignment(&weights);

    let mut per_slot: BTreeMap<String, Counts> = schema
        .slots
        .iter()
        .map(|s| (s.name.clone(), Counts::default()))
        .collect();
    let mut pairs = Vec::new();
    let mut gold_used = vec![false; gold_n.len()];
    for (i, p) in pred.iter().enumerate() {
        let g = assignment.get(i).copied().flatten();
        if let Some(j) = g {
            pairs.push((i, j));
            gold_used[j] = true;
        }
        for (k, slot) in schema.slots.iter().enumerate() {
            let c = per_slot.get_mut(&slot.name).expect("slot initialized");
            let gv = g.and_then(|j| gold_n[j][k].as_ref());
            match (&p[k], gv) {
                (Some(a), Some(b)) if a == b => c.tp += 1,
                (Some(_), Some(_)) => {
                    c.fp += 1;
                    c.fn_ += 1;
                }
                (Some(_), None) => c.fp += 1,
                (None, Some(_)) => c.fn_ += 1,
                (None, None) => {}
            }
        }
    }
    for (j, g) in gold_n.iter().enumerate() {
        if gold_used[j] {
            continue;
        }
        for (k, slot) in schema.slots.iter().enumerate() {
            if g[k].is_some() {
                per_slot.get_mut(&slot.name).expect("slot initialized").fn_ += 1;
            }
        }
    }
    let counts = per_slot.values().copied().sum();
    Alignment {
        pairs,
        counts,
        per_slot,
    }
}

pub fn match_records(predicted: &[Record], gold: &[Record], schema: &RecordSchema) -> Counts {
    align_records(predicted, gold, schema).counts
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use serde_json::json;

    use super::*;

    fn schema() -> RecordSchema {
        RecordSchema::from_json(include_str!("../../fixtures/steps.schema.json")).unwrap()
    }

    fn rec(v: serde_json::Value) -> Record {
        serde_json::from_value(v).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 5e-4
    }

    #[test]
    fn zero_denominators() {
        let m = score(Counts::new(0, 0, 0));
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        let m = score(Counts::new(0, 3, 2));
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        let m = score(Counts::new(393, 0, 282));
        assert_eq!(m.precision, 1.0);
    }

    #[test]
    fn category_rows() {
        let m = score(Counts::new(128, 40, 36));
        assert!(close(m.precision, 0.762) && close(m.recall, 0.780) && close(m.f1, 0.771));
        let m = score(Counts::new(5415, 999, 1290));
        assert!(close(m.precision, 0.844) && close(m.recall, 0.808) && close(m.f1, 0.826));
    }

    #[test]
    fn macro_averages_f1_directly() {
        let cats: BTreeMap<String, Counts> = [
            ("a".to_string(), Counts::new(1, 0, 0)),
            ("b".to_string(), Counts::new(1, 3, 0)),
        ]
        .into();
        let (micro, macro_) = aggregate(&cats);
        assert_eq!(micro, score(Counts::new(2, 3, 0)));
        let f1_b = 2.0 * 0.25 / 1.25;
        assert!((macro_.f1 - (1.0 + f1_b) / 2.0).abs() < 1e-12);
        assert!((macro_.precision - 0.625).abs() < 1e-12);
    }

    #[test]
    fn normalization() {
        let s = schema();
        assert_eq!(
            normalize_slot(Some(&json!("  Heat ")), &s, "label").as_deref(),
            Some("heat")
        );
        assert_eq!(normalize_slot(Some(&json!("")), &s, "label"), None);
        assert_eq!(normalize_slot(Some(&json!(null)), &s, "label"), None);
        assert_eq!(
            normalize_slot(Some(&json!(3.0)), &s, "step_number").as_deref(),
            Some("3")
        );
        assert_eq!(
            normalize_slot(Some(&json!("3")), &s, "step_number").as_deref(),
            Some("3")
        );
        assert_eq!(
            normalize_slot(Some(&json!("120.0")), &s, "temperature_value").as_deref(),
            Some("120")
        );
        assert_eq!(
            normalize_slot(
                Some(&json!(
                    "http://www.ontology-of-units-of-measure.org/resource/om-2/degreeCelsius"
                )),
                &s,
                "temperature_unit"
            )
            .as_deref(),
            Some("degree celsius")
        );
        assert_eq!(
            normalize_slot(Some(&json!("Degree Celsius")), &s, "temperature_unit").as_deref(),
            Some("degree celsius")
        );
        assert_eq!(
            normalize_slot(Some(&json!("C")), &s, "temperature_unit").as_deref(),
            Some("c")
        );
    }

    #[test]
    fn identical_sets_in_any_order() {
        let s = schema();
        let a = rec(json!({"label": "heat", "step_number": 1, "temperature_value": 120, "temperature_unit": "kelvin"}));
        let b = rec(json!({"label": "filter", "step_number": 2}));
        let c = match_records(&[a.clone(), b.clone()], &[b, a], &s);
        assert_eq!(c, Counts::new(6, 0, 0));
    }

    #[test]
    fn one_swapped_value() {
        // Both assignments checked by hand: the straight one matches 3 slots,
        // the crossed one matches none.
        let s = schema();
        let g1 = rec(json!({"label": "heat", "step_number": 1}));
        let g2 = rec(json!({"label": "filter", "step_number": 2}));
        let p1 = rec(json!({"label": "heat", "step_number": 1}));
        let p2 = rec(json!({"label": "filter", "step_number": 5}));
        let a = align_records(&[p2, p1], &[g1, g2], &s);
        assert_eq!(a.counts, Counts::new(3, 1, 1));
        assert_eq!(a.pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(a.per_slot["step_number"], Counts::new(1, 1, 1));
    }

    #[test]
    fn unmatched_records() {
        let s = schema();
        let g = rec(json!({"label": "heat", "step_number": 1}));
        assert_eq!(match_records(&[], std::slice::from_ref(&g), &s), Counts::new(0, 0, 2));
        assert_eq!(match_records(std::slice::from_ref(&g), &[], &s), Counts::new(0, 2, 0));
        let extra = rec(json!({"label": "stir"}));
        assert_eq!(match_records(&[g.clone(), extra], &[g], &s), Counts::new(2, 1, 0));
    }

    fn record_strategy() -> impl Strategy<Value = Record> {
        let label = prop::option::of(prop::sample::select(vec!["heat", "Heat ", "filter", "dry"]));
        let num = prop::option::of(1i64..4);
        let unit = prop::option::of(prop::sample::select(vec!["kelvin", "degree Celsius", "C"]));
        (label, num, unit).prop_map(|(l, n, u)| {
            let mut r = Record::new();
            if let Some(l) = l {
                r.insert("label".into(), json!(l));
            }
            if let Some(n) = n {
                r.insert("step_number".into(), json!(n));
            }
            if let Some(u) = u {
                r.insert("temperature_unit".into(), json!(u));
            }
            r
        })
    }

    fn nonempty(records: &[Record], s: &RecordSchema) -> u64 {
        records
            .iter()
            .map(|r| {
                s.slots
                    .iter()
                    .filter(|d| normalize_slot(r.get(&d.name), s, &d.name).is_some())
                    .count() as u64
            })
            .sum()
    }

    proptest! {
        #[test]
        fn order_insensitive_and_conserving(
            pred in prop::collection::vec(record_strategy(), 0..6),
            gold in prop::collection::vec(record_strategy(), 0..6),
            seed in any::<u64>(),
        ) {
            let s = schema();
            let base = match_records(&pred, &gold, &s);
            let mut p2 = pred.clone();
            let mut g2 = gold.clone();
            let n = p2.len().max(1);
            p2.rotate_left((seed as usize) % n);
            g2.reverse();
            prop_assert_eq!(match_records(&p2, &g2, &s), base);
            prop_assert_eq!(base.tp + base.fn_, nonempty(&gold, &s));
            prop_assert_eq!(base.tp + base.fp, nonempty(&pred, &s));
        }

        #[test]
        fn counts_are_additive(
            pa in prop::collection::vec(record_strategy(), 0..4),
            ga in prop::collection::vec(record_strategy(), 0..4),
            pb in prop::collection::vec(record_strategy(), 0..4),
            gb in prop::collection::vec(record_strategy(), 0..4),
        ) {
            // Paper B's values are disjoint from paper A's, so no record of one
            // can match a record of the other.
            let s = schema();
            let shift = |rs: &[Record]| -> Vec<Record> {
                rs.iter()
                    .map(|r| {
                        r.iter()
                            .map(|(k, v)| {
                                let v = match v {
                                    Value::String(x) => json!(format!("b-{x}")),
                                    Value::Number(n) => json!(n.as_i64().unwrap() + 100),
                                    other => other.clone(),
                                };
                                (k.clone(), v)
                            })
                            .collect()
                    })
                    .collect()
            };
            let (pb, gb) = (shift(&pb), shift(&gb));
            let separate = match_records(&pa, &ga, &s) + match_records(&pb, &gb, &s);
            let joint = match_records(&[pa, pb].concat(), &[ga, gb].concat(), &s);
            prop_assert_eq!(separate, joint);
        }

        #[test]
        fn f1_is_harmonic_mean(tp in 0u64..500, fp in 0u64..500, fn_ in 0u64..500) {
            let m = score(Counts::new(tp, fp, fn_));
            prop_assert!((0.0..=1.0).contains(&m.precision) && (0.0..=1.0).contains(&m.recall) && (0.0..=1.0).contains(&m.f1));
            if m.precision > 0.0 && m.recall > 0.0 {
                let h = 2.0 / (1.0 / m.precision + 1.0 / m.recall);
                prop_assert!((m.f1 - h).abs() < 1e-12);
            }
        }
    }
}
