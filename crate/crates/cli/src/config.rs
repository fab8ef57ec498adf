//! `--config` files: a flat JSON object keyed by long flag names. Flags given
//! on the command line override the file.

use std::collections::HashSet;
use std::path::Path;

use clap::CommandFactory;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Cli;
use crate::CliError;

/// Reads and key-checks the config for `subcommand`; empty when absent.
pub fn load(path: Option<&Path>, subcommand: &str) -> Result<Map<String, Value>, CliError> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let Value::Object(map) = value else {
        return Err(CliError::Usage(format!("config {} must be a JSON object", path.display())));
    };

    let command = Cli::command();
    let known: HashSet<&str> = command
        .find_subcommand(subcommand)
        .map(|c| c.get_arguments().filter_map(|a| a.get_long()).collect())
        .unwrap_or_default();
    if let Some(bad) = map.keys().find(|k| !known.contains(k.as_str()) || *k == "config") {
        return Err(CliError::Usage(format!(
            "config key {bad:?} is not a `{subcommand}` flag"
        )));
    }
    Ok(map)
}

/// Overlays the flags that were given onto the file values.
pub fn merge<T: Serialize + DeserializeOwned>(cli: T, file: &Map<String, Value>) -> Result<T, CliError> {
    let Value::Object(given) = serde_json::to_value(&cli).map_err(|e| CliError::Usage(e.to_string()))? else {
        unreachable!("flag structs serialize to objects");
    };
    let mut merged = file.clone();
    for (k, v) in given {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Usage(format!("config: {e}")))
}
