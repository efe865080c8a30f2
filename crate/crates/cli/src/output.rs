//! Writing artifacts with 15 significant digits, and the summary line.

use std::fs;
use std::path::Path;

use serde_json::{Number, Value};
use thermoflow::numeric::fmt15;

use crate::config::ExperimentConfig;
use crate::experiments::{FileBody, RunOutput};
use crate::InputError;

/// Rounds every float in a JSON document to 15 significant digits.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let rounded: f64 = format!("{x:.14e}").parse().unwrap_or(x);
            Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

pub fn write_all(dir: &Path, files: &[(String, FileBody)]) -> Result<(), InputError> {
    fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
    for (name, body) in files {
        let text = match body {
            FileBody::Csv(s) => s.clone(),
            FileBody::Json(v) => {
                let mut s = serde_json::to_string_pretty(&round_json(v.clone())).expect("json serializes");
                s.push('\n');
                s
            }
        };
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

/// Fixed notation for ordinary magnitudes, scientific for tiny ones.
pub fn human(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.6e}")
    } else {
        fmt15(x)
    }
}

pub fn summary_line(name: &str, config: &ExperimentConfig, result: &RunOutput) -> String {
    let mut line = format!("{name}: {} = {}", result.label, human(result.value));
    if let Some(note) = &result.note {
        line.push_str(&format!("; {note}"));
    }
    if let (Some(e), Some(t)) = (config.expected, config.tolerance) {
        line.push_str(&format!(" (expected {} ± {t:e})", human(e)));
    }
    line.push_str(match result.pass {
        Some(true) => " PASS",
        Some(false) => " FAIL",
        None => "",
    });
    line
}
