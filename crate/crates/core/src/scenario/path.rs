//! Dotted-path overrides on a scenario config.
//!
//! A path is a `.`-separated list of table keys and 0-based array indices;
//! `*` selects every element of an array, e.g. `atoms.*.profile.g`.

use toml::Value;

use super::config::ScenarioConfig;
use crate::error::{Error, Result};

/// Reads the right-hand side of `path=value` as a TOML value, falling back
/// to a bare string.
pub fn parse_value(text: &str) -> Value {
    let text = text.trim();
    match toml::from_str::<toml::Table>(&format!("v = {text}")) {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(text.to_string()),
    }
}

/// Applies one `path=value` assignment.
pub fn apply_override(cfg: &ScenarioConfig, assignment: &str) -> Result<ScenarioConfig> {
    let (path, value) = assignment
        .split_once('=')
        .ok_or_else(|| Error::validation("--set", format!("expected path=value, got `{assignment}`")))?;
    set_path(cfg, path.trim(), parse_value(value), false)
}

/// Sets `path` to `value`. With `must_exist` the path must already name a
/// scalar; otherwise a missing final key is created in an existing table.
pub fn set_path(cfg: &ScenarioConfig, path: &str, value: Value, must_exist: bool) -> Result<ScenarioConfig> {
    let mut root = Value::try_from(cfg).map_err(|e| Error::validation(path, e.to_string()))?;
    let segments: Vec<&str> = path.split('.').collect();
    if path.is_empty() || segments.iter().any(|s| s.is_empty()) {
        return Err(Error::validation(path, "empty path segment"));
    }
    let hits = assign(&mut root, &segments, &value, must_exist, path)?;
    if hits == 0 {
        return Err(Error::validation(path, "path matches nothing"));
    }
    root.try_into::<ScenarioConfig>()
        .map_err(|e| Error::validation(path, e.message().trim().to_string()))
}

fn assign(node: &mut Value, segs: &[&str], value: &Value, must_exist: bool, full: &str) -> Result<usize> {
    let (head, rest) = segs.split_first().expect("non-empty path");
    let missing = || Error::validation(full, format!("no field `{head}`"));
    match node {
        Value::Array(items) => {
            let picked: Vec<&mut Value> = if *head == "*" {
                items.iter_mut().collect()
            } else {
                let i: usize = head
                    .parse()
                    .map_err(|_| Error::validation(full, format!("`{head}` is not an array index")))?;
                let len = items.len();
                vec![items
                    .get_mut(i)
                    .ok_or_else(|| Error::validation(full, format!("index {i} out of range (len {len})")))?]
            };
            if rest.is_empty() {
                let n = picked.len();
                for slot in picked {
                    replace_scalar(slot, value, must_exist, full)?;
                }
                return Ok(n);
            }
            let mut n = 0;
            for item in picked {
                n += assign(item, rest, value, must_exist, full)?;
            }
            Ok(n)
        }
        Value::Table(table) => {
            if rest.is_empty() {
                match table.get_mut(*head) {
                    Some(slot) => replace_scalar(slot, value, must_exist, full)?,
                    None if must_exist => return Err(missing()),
                    None => {
                        table.insert(head.to_string(), value.clone());
                    }
                }
                return Ok(1);
            }
            let child = table.get_mut(*head).ok_or_else(missing)?;
            assign(child, rest, value, must_exist, full)
        }
        _ => Err(Error::validation(full, format!("cannot descend into scalar at `{head}`"))),
    }
}

fn replace_scalar(slot: &mut Value, value: &Value, must_exist: bool, full: &str) -> Result<()> {
    if must_exist && matches!(slot, Value::Table(_) | Value::Array(_)) {
        return Err(Error::validation(full, "path names a table or array, not a scalar"));
    }
    // keep numeric fields numeric when an integer is given for a float
    *slot = match (&*slot, value) {
        (Value::Float(_), Value::Integer(i)) => Value::Float(*i as f64),
        _ => value.clone(),
    };
    Ok(())
}
