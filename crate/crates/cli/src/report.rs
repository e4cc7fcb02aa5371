//! Versioned report documents and their JSON / text renderings.

use serde::Serialize;
use serde_json::{json, Map, Value};
use weylres_core::numfmt::round_sig12;
use weylres_core::C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub results: Vec<Value>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config,
            results: Vec::new(),
            warnings: Vec::new(),
            verdict: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        round_numbers(&mut v);
        let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        if let Value::Object(cfg) = &self.config {
            for (k, v) in cfg {
                out.push_str(&format!("  {k}: {}\n", scalar_text(v)));
            }
        }
        // Consecutive rows with the same fields share a table.
        let mut start = 0;
        for i in 1..=self.results.len() {
            if i == self.results.len() || keys(&self.results[i]) != keys(&self.results[start]) {
                out.push('\n');
                out.push_str(&table(&self.results[start..i]));
                start = i;
            }
        }
        if !self.results.is_empty() {
            out.push('\n');
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        if let Some(v) = &self.verdict {
            out.push_str(&format!("verdict: {v}\n"));
        }
        out
    }
}

/// `{"re": .., "im": ..}`.
pub fn complex(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Rounds every float to 12 significant digits, in place. Non-finite
/// values become strings, since JSON has no representation for them.
pub fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap();
                *v = json!(round_sig12(x));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// serde_json turns non-finite floats into `null`; keep them readable.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => weylres_core::numfmt::fmt_sig12(x),
            _ => n.to_string(),
        },
        Value::Object(m) if m.len() == 2 && m.contains_key("re") && m.contains_key("im") => {
            let re = m["re"].as_f64().unwrap_or(f64::NAN);
            let im = m["im"].as_f64().unwrap_or(f64::NAN);
            let sign = if im < 0.0 { '-' } else { '+' };
            format!(
                "{}{}{}i",
                weylres_core::numfmt::fmt_sig12(re),
                sign,
                weylres_core::numfmt::fmt_sig12(im.abs())
            )
        }
        other => {
            let mut c = other.clone();
            round_numbers(&mut c);
            c.to_string()
        }
    }
}

fn keys(v: &Value) -> Vec<&String> {
    v.as_object().map(|m| m.keys().collect()).unwrap_or_default()
}

fn table(rows: &[Value]) -> String {
    let mut columns: Vec<String> = Vec::new();
    for row in rows {
        if let Value::Object(m) = row {
            for k in m.keys() {
                if !columns.contains(k) {
                    columns.push(k.clone());
                }
            }
        }
    }
    if columns.is_empty() {
        return String::new();
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let empty = Map::new();
            let m = row.as_object().unwrap_or(&empty);
            columns
                .iter()
                .map(|c| m.get(c).map(scalar_text).unwrap_or_default())
                .collect()
        })
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap())
        .collect();
    let line = |vals: &[String]| -> String {
        let parts: Vec<String> = vals
            .iter()
            .zip(&widths)
            .map(|(v, w)| format!("{v:<w$}"))
            .collect();
        format!("{}\n", parts.join("  ").trim_end())
    };
    let mut out = line(&columns);
    for r in &cells {
        out.push_str(&line(r));
    }
    out
}
