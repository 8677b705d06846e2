use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;

/// Everything one run prints. Only `timing` may differ between runs with the
/// same flags.
#[derive(Debug, Serialize)]
pub struct Envelope {
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    pub timing: Timing,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub version: &'static str,
    pub command: String,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

pub fn write_report<W: Write, T: Serialize>(out: &mut W, report: &T, format: Format) -> std::io::Result<()> {
    let value = serde_json::to_value(report).map_err(std::io::Error::other)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &value).map_err(std::io::Error::other)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut flat = Vec::new();
            flatten("", &value, &mut flat);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(flat.iter().map(|(k, _)| k.as_str()))?;
            w.write_record(flat.iter().map(|(_, v)| v.as_str()))?;
            w.flush()
        }
    }
}

/// Dotted-path projection of a JSON tree; arrays are indexed by position.
pub fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => flatten_map(map, &key, out),
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn flatten_map(map: &Map<String, Value>, key: &dyn Fn(&str) -> String, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        flatten(&key(k), v, out);
    }
}
