//! Formatting shared by the subcommands.
//!
//! Machine formats (CSV, JSON) carry 15 significant digits, tables 6. The
//! wall time is kept out of the data: a `footer` object in JSON, a trailing
//! `# wall_time_s` comment line otherwise.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

/// A finished command result before the footer is attached.
pub struct Rendered {
    pub body: String,
    /// `Some` for JSON, whose footer goes inside the document.
    pub json: Option<Value>,
}

/// 15 significant digits in scientific notation.
pub fn machine(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.14e}")
    } else {
        x.to_string()
    }
}

/// 6 significant digits, fixed where that stays short.
pub fn human(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

/// Rounds every float in `v` to 15 significant digits so that the JSON
/// writer (shortest round-trip) never prints more.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r: f64 = machine(x).parse().unwrap_or(x);
                if let Some(m) = serde_json::Number::from_f64(r) {
                    *n = m;
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

/// `{"kind", "command", "data"}`; the footer is added by [`finish`].
pub fn envelope(kind: &str, command: &str, data: impl Serialize) -> Value {
    let mut data = serde_json::to_value(data).unwrap_or(Value::Null);
    round_json(&mut data);
    serde_json::json!({ "kind": kind, "command": command, "data": data })
}

pub fn json(kind: &str, command: &str, data: impl Serialize) -> Rendered {
    Rendered { body: String::new(), json: Some(envelope(kind, command, data)) }
}

pub fn text(body: String) -> Rendered {
    Rendered { body, json: None }
}

/// Appends the footer with the wall time in seconds.
pub fn finish(r: Rendered, wall: f64) -> String {
    match r.json {
        Some(mut v) => {
            v["footer"] = serde_json::json!({ "wall_time_s": (wall * 1e6).round() / 1e6 });
            let mut s = serde_json::to_string_pretty(&v).unwrap_or_default();
            s.push('\n');
            s
        }
        None => format!("{}# wall_time_s: {wall:.6}\n", r.body),
    }
}

/// Comma-separated rows under a header.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

/// Left-aligned text columns, right-aligned numbers.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let numeric = |c: &str| c.parse::<f64>().is_ok();
    let line = |cells: Vec<&str>| -> String {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| {
                let pad = " ".repeat(w - c.chars().count());
                if numeric(c) {
                    format!("{pad}{c}")
                } else {
                    format!("{c}{pad}")
                }
            })
            .collect();
        let mut s = parts.join("  ").trim_end().to_string();
        s.push('\n');
        s
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}
