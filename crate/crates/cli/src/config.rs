//! Flat `key = value` run files merged into the command line.
//!
//! Keys are the long flag names of the subcommand (`_` and `-` are
//! interchangeable); flags given on the command line win. An optional
//! `command` key selects the subcommand when none is given.

use std::collections::BTreeMap;
use std::path::Path;

use clap::CommandFactory;

use crate::error::CliError;
use crate::Cli;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub command: Option<String>,
    pub entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value, got {raw:?}", no + 1)))?;
            let key = k.trim().replace('_', "-");
            let value = v.trim().to_string();
            if key.is_empty() {
                return Err(CliError::Validation(format!("config line {}: empty key", no + 1)));
            }
            if key == "command" {
                cfg.command = Some(value);
            } else if cfg.entries.insert(key.clone(), value).is_some() {
                return Err(CliError::Validation(format!("config key {key:?} given twice")));
            }
        }
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
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

fn given_on_command_line(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let with_value = format!("--{key}=");
    args.iter().any(|a| *a == flag || a.starts_with(&with_value))
}

/// Expand `--config` into explicit flags; returns the argument vector unchanged
/// when no config is given.
pub fn merge(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let cfg = RunConfig::read(Path::new(&path))?;
    let root = Cli::command();
    let names: Vec<String> = root.get_subcommands().map(|c| c.get_name().to_string()).collect();
    let given = args.iter().skip(1).find(|a| names.contains(a)).cloned();
    let mut args = args;
    let sub = match (&given, &cfg.command) {
        (Some(g), Some(c)) if g != c => {
            return Err(CliError::Validation(format!("config selects {c:?} but the command line runs {g:?}")));
        }
        (Some(g), _) => g.clone(),
        (None, Some(c)) => {
            if !names.contains(c) {
                return Err(CliError::Validation(format!("unknown command {c:?} in config")));
            }
            args.insert(1, c.clone());
            c.clone()
        }
        (None, None) => return Err(CliError::Validation("no command given on the command line or in the config".into())),
    };
    let cmd = root.find_subcommand(&sub).expect("listed subcommand");
    let mut extra = vec![];
    for (key, value) in &cfg.entries {
        let arg = cmd
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()))
            .filter(|_| key != "config")
            .ok_or_else(|| CliError::Validation(format!("unknown config key {key:?} for {sub}")))?;
        if given_on_command_line(&args, key) {
            continue;
        }
        if arg.get_action().takes_values() {
            extra.push(format!("--{key}={value}"));
        } else {
            match value.as_str() {
                "true" => extra.push(format!("--{key}")),
                "false" => {}
                _ => return Err(CliError::Validation(format!("config key {key:?} expects true or false"))),
            }
        }
    }
    let pos = args.iter().position(|a| *a == sub).expect("subcommand present") + 1;
    args.splice(pos..pos, extra);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_files() {
        let cfg = RunConfig::parse("# run\ncommand = eigen\na = 0.5\n\nms=256,512 # meshes\n").unwrap();
        assert_eq!(cfg.command.as_deref(), Some("eigen"));
        assert_eq!(cfg.entries["a"], "0.5");
        assert_eq!(cfg.entries["ms"], "256,512");
        assert!(RunConfig::parse("a 0.5").is_err());
        assert!(RunConfig::parse("a=1\na=2").is_err());
        assert_eq!(RunConfig::parse("output_dir = x").unwrap().entries["output-dir"], "x");
    }
}
