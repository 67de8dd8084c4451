//! `key=value` configuration files.
//!
//! Entries are spliced into the argument list right after the subcommand as
//! `--key=value`, except for keys also given on the command line, which
//! take precedence.

use std::ffi::OsString;
use std::fs;

use clap::CommandFactory;

use crate::Cli;

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value, got {line:?}", i + 1))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        entries.push((key.to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Returns `args` with the configuration file's entries (if `--config` is
/// present) inserted after the subcommand name.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let Some(sub_pos) = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 1)
    else {
        return Ok(args);
    };
    let sub_name = args[sub_pos].to_string_lossy().into_owned();
    let cmd = Cli::command();
    let Some(sub) = cmd.find_subcommand(&sub_name) else {
        // Let clap report the unknown subcommand.
        return Ok(args);
    };
    let known: Vec<&str> = sub.get_arguments().filter_map(|a| a.get_long()).collect();

    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let given = |key: &str| {
        args[sub_pos + 1..].iter().any(|a| {
            let a = a.to_string_lossy();
            a.strip_prefix("--")
                .is_some_and(|rest| rest == key || rest.starts_with(&format!("{key}=")))
        })
    };
    let mut spliced: Vec<OsString> = args[..=sub_pos].to_vec();
    for (key, value) in parse(&text)? {
        if key == "config" || !known.contains(&key.as_str()) {
            return Err(format!(
                "config key {key:?} is not an option of `{sub_name}`"
            ));
        }
        if !given(&key) {
            spliced.push(format!("--{key}={value}").into());
        }
    }
    spliced.extend_from_slice(&args[sub_pos + 1..]);
    Ok(spliced)
}
