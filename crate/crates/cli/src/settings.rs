//! Resolves a run configuration from a preset, an optional TOML file and
//! `--set key=value` overrides, in that order of increasing precedence.

use std::fmt;
use std::path::{Path, PathBuf};

use ratchet_core::config::RunConfig;
use ratchet_core::presets;
use toml::{Table, Value};

/// A problem with the user's configuration (exit status 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// Where a run's configuration came from; echoed into the run record.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct Sources {
    pub preset: Option<String>,
    pub config_file: Option<PathBuf>,
    pub overrides: Vec<String>,
}

#[derive(Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub sources: Sources,
}

const MODEL_KEYS: [&str; 6] = ["drive", "dissipation", "sink", "e1", "e2", "j"];

/// Maps shorthand keys onto the configuration schema.
pub fn canonical_key(key: &str) -> Vec<String> {
    let mut parts: Vec<String> = key.split('.').map(str::to_string).collect();
    if parts
        .first()
        .is_some_and(|p| MODEL_KEYS.contains(&p.as_str()))
    {
        parts.insert(0, "model".into());
    }
    if parts.len() == 3 && parts[1] == "drive" && parts[2] == "amplitude" {
        parts[2] = "a2".into();
    }
    parts
}

fn parse_value(raw: &str) -> Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn set_path(root: &mut Table, path: &[String], value: Value) -> anyhow::Result<()> {
    let (last, parents) = path
        .split_last()
        .ok_or_else(|| config_error("empty --set key"))?;
    let mut table = root;
    for (depth, part) in parents.iter().enumerate() {
        let entry = table
            .entry(part.clone())
            .or_insert_with(|| Value::Table(Table::new()));
        table = entry.as_table_mut().ok_or_else(|| {
            config_error(format!(
                "--set: `{}` is not a table",
                path[..=depth].join(".")
            ))
        })?;
    }
    table.insert(last.clone(), value);
    Ok(())
}

/// Recursively overlays `top` onto `base`; tables merge, everything else replaces.
pub fn merge(base: &mut Table, top: Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn to_table(config: &RunConfig) -> Table {
    match Value::try_from(config).expect("run configs serialize to TOML") {
        Value::Table(t) => t,
        _ => unreachable!("a struct serializes to a table"),
    }
}

fn read_file(path: &Path) -> anyhow::Result<Table> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<Table>()
        .map_err(|e| config_error(format!("{}: {e}", path.display())))
}

pub fn resolve(
    preset: Option<&str>,
    file: Option<&Path>,
    sets: &[String],
) -> anyhow::Result<Resolved> {
    let base = match preset {
        Some(name) => presets::preset(name).map_err(|e| config_error(e.to_string()))?,
        None => presets::preset("fig-trajectory").expect("reference preset exists"),
    };
    let mut table = to_table(&base.config);
    if let Some(path) = file {
        merge(&mut table, read_file(path)?);
    }
    for s in sets {
        let (key, raw) = s
            .split_once('=')
            .ok_or_else(|| config_error(format!("--set expects key=value, got `{s}`")))?;
        set_path(
            &mut table,
            &canonical_key(key.trim()),
            parse_value(raw.trim()),
        )?;
    }
    let config: RunConfig = serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        config_error(format!("invalid configuration at `{path}`: {}", e.inner()))
    })?;
    config.validate().map_err(|e| config_error(e.to_string()))?;
    Ok(Resolved {
        config,
        sources: Sources {
            preset: preset.map(str::to_string),
            config_file: file.map(Path::to_path_buf),
            overrides: sets.to_vec(),
        },
    })
}

/// TOML text that resolves back to exactly `config`.
pub fn echo(config: &RunConfig) -> String {
    toml::to_string_pretty(config).expect("run configs serialize to TOML")
}
