//! Flat `key = value` configuration files.
//!
//! Keys are flag names without the leading dashes (`out-dir` and `out_dir`
//! are both accepted). Boolean flags take `true` or `false`. Values from the
//! file are inserted before the command-line flags, so the command line wins.

use std::fs;
use std::path::Path;

use serde::Serialize;
use trawlkit::{Error, Result};

/// Flags that take a value and may precede the subcommand.
const GLOBAL_VALUE_FLAGS: [&str; 4] = ["--seed", "--threads", "--out-dir", "--config"];
const GLOBAL_KEYS: [&str; 4] = ["seed", "threads", "out-dir", "plot"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(Error::Config(format!("config line {}: invalid key '{}'", i + 1, k.trim())));
        }
        let v = v.trim();
        let v = v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v);
        out.push((key, v.to_string()));
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

/// Index just after the subcommand tokens (`simulate`, `fit gmm`, …).
fn command_end(argv: &[String]) -> usize {
    let mut i = 1;
    let mut words = 0;
    while i < argv.len() {
        let a = &argv[i];
        if a.starts_with('-') {
            if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
                i += 1;
            }
        } else {
            words += 1;
            let nested = words == 1 && a == "fit";
            if !nested {
                return i + 1;
            }
        }
        i += 1;
    }
    argv.len()
}

/// Expands `--config FILE` into explicit flags placed before the user's own.
pub fn expand(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::Config(format!("cannot read config {path}: {e}")))?;
    // global flags go first, the rest right after the subcommand
    let (mut global, mut local) = (Vec::new(), Vec::new());
    for (k, v) in parse(&text)? {
        let target = if GLOBAL_KEYS.contains(&k.as_str()) { &mut global } else { &mut local };
        match v.as_str() {
            "true" => target.push(format!("--{k}")),
            "false" => {}
            _ => {
                target.push(format!("--{k}"));
                target.push(v);
            }
        }
    }
    let at = command_end(&argv);
    let mut out = vec![argv[0].clone()];
    out.extend(global);
    out.extend_from_slice(&argv[1..at]);
    out.extend(local);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

fn push_fields(lines: &mut Vec<String>, value: serde_json::Value) {
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            let key = k.replace('_', "-");
            match v {
                serde_json::Value::Null => {}
                serde_json::Value::String(s) => lines.push(format!("{key} = {s}")),
                other => lines.push(format!("{key} = {other}")),
            }
        }
    }
}

/// Writes the fully resolved configuration of a run in the same format the
/// `--config` flag reads.
pub fn write_resolved<G: Serialize, A: Serialize>(dir: &Path, command: &str, global: &G, args: &A) -> Result<()> {
    let mut lines = vec![format!("# trawlkit {command}")];
    let to_value = |x: serde_json::Result<serde_json::Value>| x.map_err(|e| Error::Io(e.to_string()));
    push_fields(&mut lines, to_value(serde_json::to_value(global))?);
    push_fields(&mut lines, to_value(serde_json::to_value(args))?);
    lines.push(String::new());
    fs::write(dir.join("run_config.txt"), lines.join("\n"))?;
    Ok(())
}
