use serde_json::{json, Map, Value};

use mmetric::{ClassificationReport, Scalar};

use crate::args::Format;

/// Orbit label lists longer than this are cut to their head and tail.
const ORBIT_EDGE: usize = 8;

pub struct Report {
    pub json: Value,
    pub text: String,
    pub verified: bool,
}

impl Report {
    pub fn new(json: Value, text: impl Into<String>, verified: bool) -> Self {
        Self {
            json,
            text: text.into(),
            verified,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).expect("reports serialise"),
            Format::Text => self.text.trim_end().to_string(),
        }
    }
}

/// Numbers as JSON numbers, exact scalars as strings.
pub fn num<S: Scalar>(v: S) -> Value {
    if S::default_tolerance() == S::zero() {
        Value::String(v.to_string())
    } else {
        json!(v.to_f64_lossy())
    }
}

pub fn classification<S: Scalar>(r: &ClassificationReport<S>) -> Value {
    let mut axioms = Map::new();
    for (axiom, result) in &r.axiom_results {
        let v = match result.witness() {
            None => json!({ "result": "pass" }),
            Some(w) => {
                let values: Map<String, Value> = w.values.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
                let violations = match result {
                    mmetric::AxiomResult::Fail { violations, .. } => *violations,
                    mmetric::AxiomResult::Pass => 0,
                };
                json!({
                    "result": "fail",
                    "witness": { "points": w.points, "values": values },
                    "violations": violations,
                })
            }
        };
        axioms.insert(axiom.name().to_string(), v);
    }
    json!({ "class": r.class.as_str(), "axioms": axioms })
}

pub fn classification_text<S: Scalar>(r: &ClassificationReport<S>) -> String {
    let mut out = format!("class: {}\n", r.class);
    for (axiom, result) in &r.axiom_results {
        match result.witness() {
            None => out.push_str(&format!("  {:<20} pass\n", axiom.name())),
            Some(w) => out.push_str(&format!("  {:<20} FAIL  {w}\n", axiom.name())),
        }
    }
    out
}

/// Shortens `labels` arrays inside orbit reports and records their length.
pub fn trim_orbit(v: &mut Value) {
    match v {
        Value::Object(map) => {
            if let Some(Value::Array(labels)) = map.get("labels").cloned() {
                let len = labels.len();
                if len > 2 * ORBIT_EDGE {
                    map.insert("labels_head".into(), Value::Array(labels[..ORBIT_EDGE].to_vec()));
                    map.insert("labels_tail".into(), Value::Array(labels[len - ORBIT_EDGE..].to_vec()));
                    map.remove("labels");
                }
                map.insert("length".into(), json!(len));
            }
            for (_, child) in map.iter_mut() {
                trim_orbit(child);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(trim_orbit),
        _ => {}
    }
}
