//! Text and structured renderings of one run record.
//!
//! The text form is the structured record flattened to `path: value`
//! lines, so both carry the same data. A finite `O`-module (an object with
//! `torsion_exponents`, `free_rank` and `text`) prints as its `text`.

use serde_json::Value;

fn module_text(v: &Value) -> Option<&str> {
    let o = v.as_object()?;
    if o.len() == 3 && o.contains_key("torsion_exponents") && o.contains_key("free_rank") {
        o.get("text")?.as_str()
    } else {
        None
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    if let Some(t) = module_text(v) {
        out.push((prefix.to_string(), t.to_string()));
        return;
    }
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten_into(&join(prefix, k), x, out);
            }
        }
        Value::Object(_) => out.push((prefix.to_string(), "{}".into())),
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten_into(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(_) => out.push((prefix.to_string(), "[]".into())),
        Value::Null => out.push((prefix.to_string(), "none".into())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
    }
}

/// `(path, value)` pairs in record order.
pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten_into("", v, &mut out);
    out
}

pub fn text(record: &Value) -> String {
    let mut s = String::new();
    for (k, v) in flatten(record) {
        s.push_str(&k);
        s.push_str(": ");
        s.push_str(&v);
        s.push('\n');
    }
    s
}

pub fn structured(record: &Value) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("records are plain JSON");
    s.push('\n');
    s
}
