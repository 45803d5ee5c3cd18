//! Experiment layer on top of `collapse-core`: scenario registry, CSV and
//! manifest files, parallel ensembles and the command-line front end.

pub mod cli;
pub mod ensemble;
mod error;
pub mod manifest;
pub mod params;
pub mod runner;
pub mod scenarios;
pub mod table;

pub use error::{LabError, Result};
pub use runner::{run_scenario, RunReport, RunRequest};
