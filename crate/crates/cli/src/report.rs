use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub version: &'static str,
    pub elapsed_ms: u64,
}

/// `{num, den, value}` with the integers as decimal strings.
pub fn rational(num: impl ToString, den: impl ToString, value: f64) -> Value {
    json!({ "num": num.to_string(), "den": den.to_string(), "value": value })
}

/// Leaves of a JSON value as `(path, value)`, paths joined with `.`.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, x)| flatten(&join(k), x, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, out)),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn emit(report: &Report, format: Format) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &serde_json::to_value(report)?, &mut rows);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["path", "value"])?;
            for (k, v) in rows {
                w.write_record([k, v])?;
            }
            w.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_paths() {
        let mut rows = Vec::new();
        flatten("", &json!({"a": {"b": [1, "x"]}, "c": null, "d": true}), &mut rows);
        assert_eq!(
            rows,
            vec![
                ("a.b.0".into(), "1".into()),
                ("a.b.1".into(), "x".into()),
                ("c".into(), "".into()),
                ("d".into(), "true".into()),
            ]
        );
    }
}
