use std::fmt::Write;

use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Outcome of one command. `data` keys are sorted, so output is
/// deterministic apart from `timing_ms`.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    /// `None` for commands that only compute.
    pub verdict: Option<bool>,
    pub data: Map<String, Value>,
    pub timing_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let mut top = Map::new();
        top.insert("command".into(), self.command.clone().into());
        top.insert("verdict".into(), self.verdict.map_or(Value::Null, Value::Bool));
        top.insert("data".into(), Value::Object(self.data.clone()));
        top.insert("timing_ms".into(), Value::from((self.timing_ms * 1e3).round() / 1e3));
        Value::Object(top)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let verdict = self.verdict.map_or("none".to_string(), |v| v.to_string());
        let _ = writeln!(out, "verdict: {verdict}");
        for (key, value) in &self.data {
            text_entry(&mut out, key, value, "");
        }
        let _ = writeln!(out, "timing_ms: {:.3}", self.timing_ms);
        out
    }
}

fn text_entry(out: &mut String, key: &str, value: &Value, indent: &str) {
    match value {
        Value::Array(items) if key == "sigma" => {
            for (k, v) in items.iter().enumerate() {
                let _ = writeln!(out, "{indent}sigma_{} = {}", k + 1, scalar(v));
            }
        }
        Value::Array(items) if key == "nilpotency" => {
            for item in items {
                let _ = writeln!(out, "{indent}nilpotency {} = {}", scalar(&item["direction"]), scalar(&item["degree"]));
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                let _ = writeln!(out, "{indent}{key}: none");
            }
            for (k, v) in items.iter().enumerate() {
                let _ = writeln!(out, "{indent}{key}[{}] = {}", k + 1, scalar(v));
            }
        }
        Value::Object(map) => {
            let _ = writeln!(out, "{indent}{key}:");
            if map.is_empty() {
                let _ = writeln!(out, "{indent}  (all zero)");
            }
            let deeper = format!("{indent}  ");
            for (k, v) in map {
                if v.is_object() || v.is_array() {
                    text_entry(out, k, v, &deeper);
                } else {
                    let _ = writeln!(out, "{deeper}{k} = {}", scalar(v));
                }
            }
        }
        other => {
            let _ = writeln!(out, "{indent}{key}: {}", scalar(other));
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

pub fn emit_report(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Text => report.to_text().into_bytes(),
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&report.to_json()).expect("JSON values serialize");
            out.push(b'\n');
            out
        }
    }
}
