//! Typed per-scenario key registries.
//!
//! Every scenario declares its parameters and tolerances up front; overrides
//! naming anything else are rejected, and values are checked against the
//! declared [`Kind`].

use crate::error::{LabError, Result};

/// How a declared value may be overridden.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Any finite float.
    Real,
    /// A non-negative integer.
    Count,
    /// `0` or `1`.
    Flag,
}

/// One declared key with its default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: f64,
    pub kind: Kind,
    pub doc: &'static str,
}

impl ParamSpec {
    pub const fn real(key: &'static str, default: f64, doc: &'static str) -> Self {
        Self { key, default, kind: Kind::Real, doc }
    }

    pub const fn count(key: &'static str, default: u32, doc: &'static str) -> Self {
        Self { key, default: default as f64, kind: Kind::Count, doc }
    }

    pub const fn flag(key: &'static str, default: bool, doc: &'static str) -> Self {
        Self { key, default: if default { 1.0 } else { 0.0 }, kind: Kind::Flag, doc }
    }

    /// Parses `raw` according to this key's kind.
    pub fn parse(&self, raw: &str) -> Result<f64> {
        let bad = |reason| LabError::BadValue { key: self.key.into(), value: raw.into(), reason };
        let v: f64 = raw.trim().parse().map_err(|_| bad("not a number"))?;
        if !v.is_finite() {
            return Err(bad("must be finite"));
        }
        match self.kind {
            Kind::Real => Ok(v),
            Kind::Count if v >= 0.0 && v.fract() == 0.0 && v <= 9_007_199_254_740_992.0 => Ok(v),
            Kind::Count => Err(bad("must be a non-negative integer")),
            Kind::Flag if v == 0.0 || v == 1.0 => Ok(v),
            Kind::Flag => Err(bad("must be 0 or 1")),
        }
    }

    /// Text form used in manifests; parses back to the same value.
    pub fn format(&self, v: f64) -> String {
        match self.kind {
            Kind::Real => format!("{v:e}"),
            Kind::Count | Kind::Flag => format!("{}", v as u64),
        }
    }
}

/// Resolved values for one registry, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct Values {
    specs: &'static [ParamSpec],
    values: Vec<f64>,
}

impl Values {
    pub fn defaults(specs: &'static [ParamSpec]) -> Self {
        Self { specs, values: specs.iter().map(|s| s.default).collect() }
    }

    /// Defaults with `overrides` applied in order, so later entries win.
    /// `what` names the registry in error messages.
    pub fn resolve(
        specs: &'static [ParamSpec],
        overrides: &[(String, String)],
        scenario: &str,
        what: &'static str,
    ) -> Result<Self> {
        let mut out = Self::defaults(specs);
        for (key, raw) in overrides {
            let idx = specs.iter().position(|s| s.key == key).ok_or_else(|| LabError::UnknownKey {
                scenario: scenario.into(),
                what,
                key: key.clone(),
            })?;
            out.values[idx] = specs[idx].parse(raw)?;
        }
        Ok(out)
    }

    /// Value of a declared key.
    ///
    /// # Panics
    /// If `key` is not declared; scenarios only ask for their own keys.
    pub fn get(&self, key: &str) -> f64 {
        let idx = self.specs.iter().position(|s| s.key == key).unwrap_or_else(|| panic!("undeclared key `{key}`"));
        self.values[idx]
    }

    /// A [`Kind::Count`] value as `usize`.
    pub fn count(&self, key: &str) -> usize {
        self.get(key) as usize
    }

    /// A [`Kind::Flag`] value.
    pub fn flag(&self, key: &str) -> bool {
        self.get(key) != 0.0
    }

    /// `(spec, value)` pairs in declaration order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static ParamSpec, f64)> + '_ {
        self.specs.iter().zip(self.values.iter().copied())
    }
}
