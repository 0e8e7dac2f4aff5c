//! Report rendering.
//!
//! Every command builds a serde structure; its JSON form is canonical. Keys
//! follow struct field order and big integers are written as plain JSON
//! numbers. CSV and text are derived from the JSON value: a report with a
//! `rows` array becomes one CSV record per row, any other report a single
//! record of its scalar fields.

use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// A big integer as an exact JSON number.
pub fn big(n: &BigUint) -> Number {
    n.to_string().parse().expect("decimal integer is a JSON number")
}

pub fn to_value<T: Serialize>(report: &T) -> Value {
    serde_json::to_value(report).expect("reports serialize")
}

pub fn render<T: Serialize>(report: &T, format: Format) -> String {
    let value = to_value(report);
    match format {
        Format::Json => {
            let mut s = serde_json::to_string(&value).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(&value),
        Format::Text => to_text(&value),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => serde_json::to_string(v).expect("value serializes"),
        other => other.to_string(),
    }
}

/// Scalar fields of `obj`, with nested objects flattened to `a.b` keys.
fn flatten(obj: &Map<String, Value>, prefix: &str, out: &mut Vec<(String, String)>) {
    for (k, v) in obj {
        let name = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Object(inner) => flatten(inner, &name, out),
            _ if k == "rows" && prefix.is_empty() => {}
            _ => out.push((name, cell(v))),
        }
    }
}

fn rows(value: &Value) -> Option<Vec<Vec<(String, String)>>> {
    let rows = value.get("rows")?.as_array()?;
    Some(
        rows.iter()
            .map(|r| {
                let mut out = Vec::new();
                if let Value::Object(obj) = r {
                    flatten(obj, "", &mut out);
                }
                out
            })
            .collect(),
    )
}

fn header_fields(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if let Value::Object(obj) = value {
        flatten(obj, "", &mut out);
    }
    out
}

pub fn to_csv(value: &Value) -> String {
    let records = rows(value).unwrap_or_else(|| vec![header_fields(value)]);
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = records.first() {
        w.write_record(first.iter().map(|(k, _)| k)).expect("in-memory write");
    }
    for r in &records {
        w.write_record(r.iter().map(|(_, v)| v)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn to_text(value: &Value) -> String {
    let mut out = String::new();
    let fields = header_fields(value);
    let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in &fields {
        let _ = writeln!(out, "{}", format!("{k:<width$}  {v}").trim_end());
    }
    if let Some(records) = rows(value) {
        if let Some(first) = records.first() {
            let names: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
            let mut widths: Vec<usize> = names.iter().map(|n| n.len()).collect();
            for r in &records {
                for (i, (_, v)) in r.iter().enumerate() {
                    widths[i] = widths[i].max(v.len());
                }
            }
            out.push('\n');
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(out, "{}", line(names.clone()));
            for r in &records {
                let _ = writeln!(out, "{}", line(r.iter().map(|(_, v)| v.as_str()).collect()));
            }
        }
    }
    out
}
