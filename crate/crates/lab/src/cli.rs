//! Command-line front end.
//!
//! Exit statuses: `0` when every assertion passed, `2` when a scenario ran
//! but an assertion failed, `1` for usage, configuration and I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{LabError, Result};
use crate::runner::{run_scenario, RunRequest};
use crate::scenarios::{self, Scenario};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "collapse-lab", version, about = "Run reproducible spontaneous-localization scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List scenario ids.
    List,
    /// Show a scenario's parameters, tolerances and outputs.
    Describe { id: String },
    /// Run a scenario and write its CSV files and manifest.
    Run(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub id: String,
    /// Master seed [default: 1, or the config's seed].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    pub out: PathBuf,
    /// Parameter override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_pair)]
    pub set: Vec<(String, String)>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE", value_parser = parse_pair)]
    pub tol: Vec<(String, String)>,
    /// File of key=value lines (a previous manifest works); flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<(String, String), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().into(), v.trim().into())),
        _ => Err(LabError::BadPair(s.into()).to_string()),
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return status;
        }
    };
    match dispatch(cli.command, out) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn io_err(e: std::io::Error) -> LabError {
    LabError::io("<stdout>", e)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::List => {
            for s in scenarios::registry() {
                writeln!(out, "{:<18} {}", s.id, s.description).map_err(io_err)?;
            }
            Ok(EXIT_PASS)
        }
        Command::Describe { id } => {
            describe(scenarios::find(&id)?, out).map_err(io_err)?;
            Ok(EXIT_PASS)
        }
        Command::Run(args) => run(args, out),
    }
}

fn describe(s: &Scenario, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{}: {}", s.id, s.description)?;
    for (title, specs) in [("parameters (--set)", s.params), ("tolerances (--tol)", s.tolerances)] {
        writeln!(out, "{title}:")?;
        for p in specs {
            writeln!(out, "  {:<22} {:<10} {}", p.key, p.format(p.default), p.doc)?;
        }
    }
    writeln!(out, "outputs: {}", s.outputs.join(", "))
}

fn run(args: RunArgs, out: &mut dyn Write) -> Result<i32> {
    let mut req = RunRequest::new(args.id, args.out);
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        req.apply_config(&text, path)?;
    }
    if let Some(seed) = args.seed {
        req.seed = seed;
    }
    req.params.extend(args.set);
    req.tolerances.extend(args.tol);
    let report = run_scenario(&req)?;
    let passed = report.passed();
    writeln!(out, "scenario {}: {}", report.scenario, if passed { "PASS" } else { "FAIL" }).map_err(io_err)?;
    for c in &report.checks {
        writeln!(out, "  [{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail).map_err(io_err)?;
    }
    for p in &report.outputs {
        writeln!(out, "output: {}", p.display()).map_err(io_err)?;
    }
    writeln!(out, "manifest: {}", report.manifest_path.display()).map_err(io_err)?;
    Ok(if passed { EXIT_PASS } else { EXIT_ASSERTION })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let mut argv = vec!["collapse-lab"];
        argv.extend_from_slice(args);
        let code = main_with(argv, &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn parses_run_flags() {
        let cli = Cli::try_parse_from([
            "collapse-lab",
            "run",
            "fig34",
            "--seed",
            "7",
            "--out",
            "results/",
            "--set",
            "lambda=50",
            "--set",
            "t_max=10",
            "--tol",
            "duration_min=1",
        ])
        .unwrap();
        let Command::Run(a) = cli.command else { panic!("expected run") };
        assert_eq!((a.id.as_str(), a.seed, a.out.to_str().unwrap()), ("fig34", Some(7), "results/"));
        assert_eq!(a.set, vec![("lambda".into(), "50".into()), ("t_max".into(), "10".into())]);
        assert_eq!(a.tol, vec![("duration_min".into(), "1".into())]);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["frobnicate"]).0, EXIT_ERROR);
        assert_eq!(call(&["run", "fig2", "--bogus"]).0, EXIT_ERROR);
        assert_eq!(call(&["run", "fig2", "--set", "novalue"]).0, EXIT_ERROR);
        let (code, _, err) = call(&["describe", "nope"]);
        assert_eq!(code, EXIT_ERROR);
        assert!(err.contains("unknown scenario `nope`"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_PASS);
        assert!(out.contains("Usage"));
    }

    #[test]
    fn list_is_sorted() {
        let (code, out, _) = call(&["list"]);
        assert_eq!(code, EXIT_PASS);
        let ids: Vec<&str> = out.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
        assert_eq!(ids.len(), scenarios::registry().len());
    }
}
