//! Reading and validating JSON inputs.

use std::path::Path;

use heyde_core::{validate_spec, GroupSpec, RawComponent};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::Failure;

#[derive(Deserialize)]
struct RawSpec {
    components: Vec<RawComponent>,
}

/// Surfaces group-validation errors with their own kind instead of a
/// generic deserialization failure.
fn prevalidate(v: &Value) -> Result<(), Failure> {
    let check = |s: &Value| -> Result<(), Failure> {
        if let Ok(raw) = serde_json::from_value::<RawSpec>(s.clone()) {
            validate_spec(&raw.components)?;
        }
        Ok(())
    };
    match v {
        Value::Object(map) => {
            if let Some(s) = map.get("spec") {
                check(s)?;
            }
            if let Some(Value::Array(specs)) = map.get("specs") {
                specs.iter().try_for_each(check)?;
            }
            if map.contains_key("components") {
                check(v)?;
            }
        }
        Value::Array(items) => items.iter().try_for_each(check)?,
        _ => {}
    }
    Ok(())
}

pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Failure> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Failure::invalid("malformed_json", format!("{what}: {e}")))?;
    prevalidate(&v)?;
    serde_json::from_value(v).map_err(|e| Failure::invalid("invalid_input", format!("{what}: {e}")))
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid("io", format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

/// `--spec` accepts one group or a list of groups.
pub fn specs(text: &str) -> Result<Vec<GroupSpec>, Failure> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Failure::invalid("malformed_json", format!("--spec: {e}")))?;
    if v.is_array() {
        parse(text, "--spec")
    } else {
        Ok(vec![parse(text, "--spec")?])
    }
}
