use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

/// 17 significant digits in exponent form.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with keys sorted and every float written by [`float`], so
/// equal reports are byte-identical. Non-finite floats become null.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(x) => {
            if let Some(i) = x.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = x.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                match x.as_f64() {
                    Some(f) if f.is_finite() => out.push_str(&float(f)),
                    _ => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // numeric arrays stay on one line
            if items.iter().all(|i| !i.is_array() && !i.is_object()) {
                out.push('[');
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, i, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, i) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, i, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, i)) in map.iter().enumerate() {
                pad(out, depth + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, i, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// Writes the report to `path`, or to stdout.
pub fn emit(v: &Value, path: Option<&Path>) -> Result<()> {
    let text = to_json(v);
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            Ok(so.flush()?)
        }
    }
}

/// Node coordinates x1..xn followed by the named columns, one row per node
/// where the first column is finite. A blank line ends each grid row that
/// has data, the block format gnuplot's `splot` expects.
pub fn write_field(
    path: &Path,
    coords: &[Vec<f64>],
    dims: &[usize],
    columns: &[(&str, &[f64])],
) -> Result<()> {
    let n = coords.first().map_or(0, Vec::len);
    let mut s = String::new();
    let header: Vec<String> = (1..=n)
        .map(|i| format!("x{i}"))
        .chain(columns.iter().map(|c| c.0.to_string()))
        .collect();
    s.push_str(&header.join(","));
    s.push('\n');
    let row_len = dims.first().copied().unwrap_or(1).max(1);
    let mut row_has_data = false;
    for (idx, x) in coords.iter().enumerate() {
        if n > 1 && idx % row_len == 0 && row_has_data {
            s.push('\n');
            row_has_data = false;
        }
        if !columns.first().is_some_and(|c| c.1[idx].is_finite()) {
            continue;
        }
        row_has_data = true;
        let cells: Vec<String> = x
            .iter()
            .chain(columns.iter().map(|c| &c.1[idx]))
            .map(|v| float(*v))
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}
