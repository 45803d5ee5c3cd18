//! Named, reproducible scenarios.
//!
//! A scenario maps resolved parameters and a master seed to CSV tables,
//! pass/fail checks and a few report records. Scenarios never touch the
//! file system; [`crate::runner`] does the writing.

use crate::error::{LabError, Result};
use crate::params::{ParamSpec, Values};
use crate::table::Table;

mod grw;
mod pointer;
mod toy;
mod unraveling;

/// Everything a scenario body may read.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub params: Values,
    pub tol: Values,
    pub seed: u64,
}

/// Shortest exact form for round limits, seven digits otherwise.
pub(crate) fn short(x: f64) -> String {
    let exact = format!("{x:e}");
    if exact.len() <= 9 {
        exact
    } else {
        format!("{x:.6e}")
    }
}

/// Outcome of one assertion.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name, passed, detail: detail.into() }
    }

    /// `value <= limit`; NaN fails.
    pub fn at_most(name: &'static str, what: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value <= limit, format!("{what} = {value:.6e} (limit {})", short(limit)))
    }

    /// `value >= limit`; NaN fails.
    pub fn at_least(name: &'static str, what: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value >= limit, format!("{what} = {value:.6e} (minimum {})", short(limit)))
    }

    /// `lo <= value <= hi`; NaN fails.
    pub fn within(name: &'static str, what: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(
            name,
            lo <= value && value <= hi,
            format!("{what} = {value:.6e} (allowed [{}, {}])", short(lo), short(hi)),
        )
    }
}

/// Tables, checks and report records of one scenario run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub report: Vec<(String, String)>,
}

impl Outcome {
    pub(crate) fn report(&mut self, key: &str, value: impl std::fmt::Display) {
        self.report.push((key.into(), value.to_string()));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// A registered scenario.
#[derive(Debug)]
pub struct Scenario {
    pub id: &'static str,
    pub description: &'static str,
    pub params: &'static [ParamSpec],
    pub tolerances: &'static [ParamSpec],
    /// File names of the tables, in output order.
    pub outputs: &'static [&'static str],
    pub(crate) body: fn(&Inputs) -> Result<Outcome>,
}

impl Scenario {
    /// Runs the scenario body; tables are checked against [`Scenario::outputs`].
    pub fn execute(&self, inputs: &Inputs) -> Result<Outcome> {
        let out = (self.body)(inputs)?;
        let names: Vec<&str> = out.tables.iter().map(Table::name).collect();
        assert_eq!(names, self.outputs, "scenario {} produced undeclared tables", self.id);
        Ok(out)
    }
}

static REGISTRY: [Scenario; 8] = [
    toy::FIG2,
    toy::FIG34,
    toy::FIG5,
    grw::ENERGY,
    grw::TWO_PACKET,
    pointer::POINTER,
    toy::SOLVER_AGREEMENT,
    unraveling::UNRAVELING,
];

/// All scenarios, sorted by id.
pub fn registry() -> &'static [Scenario] {
    &REGISTRY
}

pub fn find(id: &str) -> Result<&'static Scenario> {
    REGISTRY.iter().find(|s| s.id == id).ok_or_else(|| LabError::UnknownScenario(id.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_sorted_and_unique() {
        let ids: Vec<&str> = registry().iter().map(|s| s.id).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]), "{ids:?}");
    }

    #[test]
    fn keys_unique_within_each_registry() {
        for s in registry() {
            for specs in [s.params, s.tolerances] {
                let mut keys: Vec<&str> = specs.iter().map(|p| p.key).collect();
                keys.sort_unstable();
                let n = keys.len();
                keys.dedup();
                assert_eq!(keys.len(), n, "{}", s.id);
            }
            assert!(!s.outputs.is_empty());
        }
    }

    #[test]
    fn defaults_parse_back() {
        for s in registry() {
            for p in s.params.iter().chain(s.tolerances) {
                assert_eq!(p.parse(&p.format(p.default)).unwrap(), p.default, "{}.{}", s.id, p.key);
            }
        }
    }

    #[test]
    fn check_helpers_fail_on_nan() {
        assert!(!Check::at_most("x", "v", f64::NAN, 1.0).passed);
        assert!(!Check::within("x", "v", f64::NAN, 0.0, 1.0).passed);
        assert!(Check::within("x", "v", 0.5, 0.0, 1.0).passed);
    }
}
