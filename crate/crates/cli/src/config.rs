use std::ffi::OsString;

use anyhow::{bail, Context, Result};
use serde_json::Value;

/// Splices a `--config` file into argv. Config keys become flags placed
/// right after the subcommand, so flags typed on the command line override
/// them. A "command" key supplies the subcommand when argv has none.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    if let Some(prog) = it.next() {
        rest.push(prog);
    }
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().context("--config needs a file")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading {}", path.to_string_lossy()))?;
    let value: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.to_string_lossy()))?;
    let Value::Object(map) = value else {
        bail!("config must be a JSON object")
    };

    let has_command = rest
        .get(1)
        .is_some_and(|a| !a.to_string_lossy().starts_with('-'));
    let mut out = vec![rest[0].clone()];
    let mut tail = rest[1..].to_vec();
    if has_command {
        out.push(tail.remove(0));
    } else {
        match map.get("command") {
            Some(Value::String(c)) => out.push(c.into()),
            Some(_) => bail!("config key \"command\" must be a string"),
            None => bail!("no subcommand given on the command line or in the config"),
        }
    }
    for (key, v) in &map {
        if key == "command" {
            continue;
        }
        let flag = format!("--{key}");
        match v {
            Value::Bool(true) => out.push(flag.into()),
            Value::Bool(false) | Value::Null => {}
            // --key=value keeps values such as "-x^2" from reading as flags
            Value::String(s) => out.push(format!("{flag}={s}").into()),
            Value::Number(x) => out.push(format!("{flag}={x}").into()),
            _ => bail!("config key {key:?} must be a string, number or boolean"),
        }
    }
    out.extend(tail);
    Ok(out)
}
