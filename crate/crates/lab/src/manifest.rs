//! Flat, ordered `key=value` manifest files.

use crate::error::{LabError, Result};
use std::path::Path;

/// Ordered key/value records describing one run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a record. Newlines in `value` are replaced by spaces so the
    /// file stays line oriented.
    ///
    /// # Panics
    /// If `key` is empty or contains `=` or whitespace.
    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        assert!(!key.is_empty() && !key.contains(|c: char| c == '=' || c.is_whitespace()), "bad manifest key {key:?}");
        let value = value.into().replace(['\n', '\r'], " ");
        self.entries.push((key, value));
    }

    /// First value recorded under `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Parses `render` output. Blank lines and lines starting with `#` are
    /// skipped; `path` is only used in error messages.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut m = Self::new();
        for (k, v, _) in pairs(text, path)? {
            m.entries.push((k.to_string(), v.to_string()));
        }
        Ok(m)
    }
}

/// `(key, value, line)` triples of a `key=value` text.
pub(crate) fn pairs<'a>(text: &'a str, path: &Path) -> Result<Vec<(&'a str, &'a str, usize)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| LabError::Config {
            path: path.into(),
            line: i + 1,
            reason: format!("expected key=value, got `{line}`"),
        })?;
        out.push((k.trim(), v.trim(), i + 1));
    }
    Ok(out)
}
