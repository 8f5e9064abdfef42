//! `--config FILE` support: a JSON object whose keys are long flag names.
//! Each key not already given on the command line is appended as a flag, so
//! explicit flags always win.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use serde_json::Value;

use crate::error::CliError;

fn config_path(args: &[OsString]) -> Result<Option<PathBuf>, CliError> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let Some(s) = a.to_str() else { continue };
        if s == "--config" {
            return match it.next() {
                Some(p) => Ok(Some(PathBuf::from(p))),
                None => Err(CliError::Input("--config requires a path".into())),
            };
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Ok(Some(PathBuf::from(p)));
        }
    }
    Ok(None)
}

fn has_flag(args: &[OsString], name: &str) -> bool {
    let long = format!("--{name}");
    let with_value = format!("--{name}=");
    args.iter().filter_map(|a| a.to_str()).any(|a| a == long || a.starts_with(&with_value))
}

fn scalar(key: &str, v: &Value) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::Input(format!("config key {key:?}: expected a string or number"))),
    }
}

/// Returns `args` with flags from the config file appended.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args)? else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(CliError::Input(format!("{}: expected a JSON object", path.display())));
    };
    let mut out = args.clone();
    for (key, v) in &map {
        if key == "config" || has_flag(&args, key) {
            continue;
        }
        match v {
            Value::Bool(true) => out.push(format!("--{key}").into()),
            Value::Bool(false) | Value::Null => {}
            Value::Array(items) => {
                for item in items {
                    out.push(format!("--{key}").into());
                    out.push(scalar(key, item)?.into());
                }
            }
            other => {
                out.push(format!("--{key}").into());
                out.push(scalar(key, other)?.into());
            }
        }
    }
    Ok(out)
}
