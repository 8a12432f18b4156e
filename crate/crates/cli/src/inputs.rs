//! Box, channel, scenario and game sources: `builtin:NAME` or a JSON file path.

use std::fs;
use std::path::{Path, PathBuf};

use nsot_core::builtins::{builtin_box, builtin_channel, builtin_game, builtin_scenario};
use nsot_core::channel::Channel;
use nsot_core::lp::GameSpec;
use nsot_core::ns_box::AnyBox;
use nsot_core::prob::JointPmf;
use nsot_core::protocols::{file::ScenarioFile, ProtocolScenario};
use serde::de::DeserializeOwned;

use crate::error::CliError;

fn read_json<T: DeserializeOwned>(field: &str, path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        field: field.to_string(),
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::invalid(field, format!("{}: {e}", path.display())))
}

pub fn load_box(field: &str, src: &str) -> Result<AnyBox, CliError> {
    match src.strip_prefix("builtin:") {
        Some(name) => Ok(builtin_box(name)?),
        None => read_json(field, Path::new(src)),
    }
}

pub fn load_channel(field: &str, src: &str) -> Result<Channel, CliError> {
    match src.strip_prefix("builtin:") {
        Some(name) => Ok(builtin_channel(name)?),
        None => read_json(field, Path::new(src)),
    }
}

pub fn load_game(field: &str, src: &str) -> Result<GameSpec, CliError> {
    match src.strip_prefix("builtin:") {
        Some(name) => Ok(builtin_game(name)?),
        None => read_json(field, Path::new(src)),
    }
}

pub fn load_joint(field: &str, src: &str) -> Result<JointPmf, CliError> {
    read_json(field, Path::new(src))
}

/// A name inside a scenario file is a builtin when one exists, else a path
/// relative to the scenario file.
fn nested(base: &Path, name: &str) -> Option<PathBuf> {
    let name = name.strip_prefix("builtin:").unwrap_or(name);
    let p = base.join(name);
    p.is_file().then_some(p)
}

fn to_core(e: CliError) -> nsot_core::Error {
    match e {
        CliError::Core(e) => e,
        other => nsot_core::Error::Validation(other.to_string()),
    }
}

pub fn load_scenario(field: &str, src: &str) -> Result<ProtocolScenario, CliError> {
    if let Some(name) = src.strip_prefix("builtin:") {
        return Ok(builtin_scenario(name)?);
    }
    let path = Path::new(src);
    let file: ScenarioFile = read_json(field, path)?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string();
    let scenario = file.into_scenario(
        &name,
        |n| match builtin_box(n) {
            Ok(b) => Ok(b),
            Err(e) => match nested(&base, n) {
                Some(p) => read_json("box", &p).map_err(to_core),
                None => Err(e),
            },
        },
        |n| match builtin_channel(n) {
            Ok(c) => Ok(c),
            Err(e) => match nested(&base, n) {
                Some(p) => read_json("channel", &p).map_err(to_core),
                None => Err(e),
            },
        },
    )?;
    Ok(scenario)
}

/// Parse `"(i1,i2)|(i1',i2')"`.
pub fn parse_pair(raw: &str) -> Result<((usize, usize), (usize, usize)), CliError> {
    let bad = || CliError::invalid("--pair", format!("expected \"(i1,i2)|(i1',i2')\", got {raw:?}"));
    let tuple = |s: &str| -> Option<(usize, usize)> {
        let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
        let (a, b) = inner.split_once(',')?;
        Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
    };
    let (a, b) = raw.split_once('|').ok_or_else(bad)?;
    Ok((tuple(a).ok_or_else(bad)?, tuple(b).ok_or_else(bad)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs() {
        assert_eq!(parse_pair("(0,0)|(1,1)").unwrap(), ((0, 0), (1, 1)));
        assert_eq!(parse_pair(" (1, 0) | (0,1) ").unwrap(), ((1, 0), (0, 1)));
        assert!(parse_pair("(0,0)").is_err());
        assert!(parse_pair("(0,x)|(1,1)").is_err());
    }

    #[test]
    fn missing_file_names_the_field() {
        let e = load_box("--box", "/nonexistent/box.json").unwrap_err();
        assert!(e.to_string().starts_with("--box: cannot read"));
        assert_eq!(e.exit_code(), 2);
    }
}
