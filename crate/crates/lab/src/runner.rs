//! Runs a scenario into an output directory and writes its manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use collapse_core::rng::RNG_NAME;

use crate::error::{LabError, Result};
use crate::manifest::{pairs, Manifest};
use crate::params::Values;
use crate::scenarios::{self, Check, Inputs};

/// Master seed when none is given.
pub const DEFAULT_SEED: u64 = 1;

/// Version string recorded in every manifest.
pub const CODE_VERSION: &str = concat!("collapse-lab ", env!("CARGO_PKG_VERSION"));

/// Manifest keys that describe a past run rather than configure a new one.
const RESULT_KEYS: &[&str] = &["description", "code_version", "rng", "status", "runtime_s"];
const RESULT_PREFIXES: &[&str] = &["assert.", "output.", "report."];

/// What to run and where.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRequest {
    pub scenario: String,
    pub seed: u64,
    /// Parameter overrides, applied in order.
    pub params: Vec<(String, String)>,
    /// Tolerance overrides, applied in order.
    pub tolerances: Vec<(String, String)>,
    pub out_dir: PathBuf,
}

impl RunRequest {
    pub fn new(scenario: impl Into<String>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            scenario: scenario.into(),
            seed: DEFAULT_SEED,
            params: Vec::new(),
            tolerances: Vec::new(),
            out_dir: out_dir.into(),
        }
    }

    /// Applies `key=value` lines: `seed`, `param.K` (or bare `K`) and
    /// `tol.K`. A `scenario` line must name this request's scenario. Result
    /// records of a manifest are ignored, so a manifest is a valid config.
    pub fn apply_config(&mut self, text: &str, path: &Path) -> Result<()> {
        let fail = |line, reason: String| LabError::Config { path: path.into(), line, reason };
        for (key, value, line) in pairs(text, path)? {
            if key == "scenario" {
                if value != self.scenario {
                    return Err(fail(line, format!("config is for `{value}`, not `{}`", self.scenario)));
                }
            } else if key == "seed" {
                self.seed = value.parse().map_err(|_| fail(line, format!("bad seed `{value}`")))?;
            } else if let Some(k) = key.strip_prefix("tol.") {
                self.tolerances.push((k.into(), value.into()));
            } else if let Some(k) = key.strip_prefix("param.") {
                self.params.push((k.into(), value.into()));
            } else if RESULT_KEYS.contains(&key) || RESULT_PREFIXES.iter().any(|p| key.starts_with(p)) {
                continue;
            } else if key.contains('.') {
                return Err(fail(line, format!("unknown key `{key}`")));
            } else {
                self.params.push((key.into(), value.into()));
            }
        }
        Ok(())
    }

    /// Request that repeats the run recorded in the manifest at `path`,
    /// writing into `out_dir`.
    pub fn from_manifest(path: &Path, out_dir: impl Into<PathBuf>) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        let m = Manifest::parse(&text, path)?;
        let id = m.get("scenario").ok_or_else(|| LabError::Config {
            path: path.into(),
            line: 0,
            reason: "no scenario record".into(),
        })?;
        let mut req = Self::new(id, out_dir);
        req.apply_config(&text, path)?;
        Ok(req)
    }
}

/// Result of [`run_scenario`].
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: &'static str,
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
    pub outputs: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub runtime_s: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Resolves overrides, runs the scenario, writes its CSV files and
/// `<id>.manifest` into `out_dir` (created if needed).
///
/// Failed assertions are not errors; inspect [`RunReport::passed`].
pub fn run_scenario(req: &RunRequest) -> Result<RunReport> {
    let sc = scenarios::find(&req.scenario)?;
    let inputs = Inputs {
        params: Values::resolve(sc.params, &req.params, sc.id, "parameter")?,
        tol: Values::resolve(sc.tolerances, &req.tolerances, sc.id, "tolerance")?,
        seed: req.seed,
    };
    fs::create_dir_all(&req.out_dir).map_err(|e| LabError::io(&req.out_dir, e))?;

    let start = Instant::now();
    let outcome = sc.execute(&inputs)?;
    let mut outputs = Vec::new();
    for t in &outcome.tables {
        let path = req.out_dir.join(t.name());
        fs::write(&path, t.as_str()).map_err(|e| LabError::io(&path, e))?;
        outputs.push(path);
    }
    let runtime_s = start.elapsed().as_secs_f64();

    let mut m = Manifest::new();
    m.push("scenario", sc.id);
    m.push("description", sc.description);
    m.push("code_version", CODE_VERSION);
    m.push("seed", req.seed.to_string());
    m.push("rng", RNG_NAME);
    for (spec, v) in inputs.params.iter() {
        m.push(format!("param.{}", spec.key), spec.format(v));
    }
    for (spec, v) in inputs.tol.iter() {
        m.push(format!("tol.{}", spec.key), spec.format(v));
    }
    for c in &outcome.checks {
        m.push(format!("assert.{}", c.name), format!("{}: {}", if c.passed { "pass" } else { "fail" }, c.detail));
    }
    for (k, v) in &outcome.report {
        m.push(format!("report.{k}"), v.clone());
    }
    for (i, t) in outcome.tables.iter().enumerate() {
        m.push(format!("output.{i}"), t.name());
    }
    m.push("status", if outcome.passed() { "pass" } else { "fail" });
    m.push("runtime_s", format!("{runtime_s:.3}"));

    let manifest_path = req.out_dir.join(format!("{}.manifest", sc.id));
    fs::write(&manifest_path, m.render()).map_err(|e| LabError::io(&manifest_path, e))?;
    Ok(RunReport { scenario: sc.id, manifest: m, manifest_path, outputs, checks: outcome.checks, runtime_s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let mut r = RunRequest::new("fig34", "out");
        let text = "# comment\nscenario=fig34\nseed=7\nlambda=50\nparam.t_max=10\ntol.duration_min=1\nstatus=pass\nassert.x=fail: y\n";
        r.apply_config(text, Path::new("c")).unwrap();
        assert_eq!(r.seed, 7);
        assert_eq!(r.params, vec![("lambda".into(), "50".into()), ("t_max".into(), "10".into())]);
        assert_eq!(r.tolerances, vec![("duration_min".into(), "1".into())]);
    }

    #[test]
    fn config_errors() {
        let mut r = RunRequest::new("fig34", "out");
        assert!(r.apply_config("scenario=fig2\n", Path::new("c")).is_err());
        assert!(r.apply_config("seed=-1\n", Path::new("c")).is_err());
        assert!(r.apply_config("weird.key=1\n", Path::new("c")).is_err());
        assert!(r.apply_config("no equals sign\n", Path::new("c")).is_err());
    }

    #[test]
    fn unknown_scenario_and_key() {
        let dir = std::env::temp_dir();
        assert!(matches!(run_scenario(&RunRequest::new("nope", &dir)), Err(LabError::UnknownScenario(_))));
        let mut r = RunRequest::new("fig34", &dir);
        r.params.push(("omega".into(), "1".into()));
        assert!(matches!(run_scenario(&r), Err(LabError::UnknownKey { .. })));
    }
}
