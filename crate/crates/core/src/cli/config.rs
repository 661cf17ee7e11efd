//! `key = value` configuration files.
//!
//! Top-level keys apply to every subcommand; keys after a `[name]` line
//! apply only to subcommand `name`. Values are passed to the parser as
//! `--key value` after the command-line flags, so the file wins.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    /// `(section, key, value)` in file order; section `None` is global.
    pub entries: Vec<(Option<String>, String, String)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut section = None;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = Some(name.trim().to_string());
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("config line {}: expected key = value", i + 1)))?;
            let key = k.trim().trim_start_matches("--").replace('_', "-");
            if key.is_empty() {
                return Err(Error::InvalidArgument(format!("config line {}: empty key", i + 1)));
            }
            let value = v.trim().trim_matches('"').to_string();
            entries.push((section.clone(), key, value));
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Extra arguments for `subcommand`. `true` becomes a bare switch and
    /// `false` is dropped.
    pub fn args_for(&self, subcommand: &str) -> Vec<String> {
        self.args_filtered(subcommand, |_| true)
    }

    /// Like [`ConfigFile::args_for`], but keys outside any section are kept
    /// only when `accepts` them, so shared keys need not apply everywhere.
    pub fn args_filtered(&self, subcommand: &str, accepts: impl Fn(&str) -> bool) -> Vec<String> {
        let mut out = Vec::new();
        for (section, key, value) in &self.entries {
            match section.as_deref() {
                Some(s) if s != subcommand => continue,
                None if !accepts(key) => continue,
                _ => {}
            }
            match value.as_str() {
                "true" => out.push(format!("--{key}")),
                "false" => {}
                _ => {
                    out.push(format!("--{key}"));
                    out.push(value.clone());
                }
            }
        }
        out
    }
}
