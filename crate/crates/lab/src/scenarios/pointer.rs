//! Order-of-magnitude estimates for a macroscopic pointer.

use collapse_core::estimates::{
    localization_interval, pointer_estimates, regime_report_with, PhysicalParams, ADLER_FACTOR, SECONDS_PER_YEAR,
};

use super::{Check, Inputs, Outcome, Scenario};
use crate::error::Result;
use crate::params::ParamSpec;
use crate::table::{fmt_real, Cell, Table};

pub(super) const POINTER: Scenario = Scenario {
    id: "pointer_estimates",
    description: "Localization intervals, spreading times and hit counts for a 1 g pointer, with the Adler rescaling",
    params: &[
        ParamSpec::real("lambda", 1e-16, "per-nucleon hit rate, 1/s"),
        ParamSpec::real("alpha", 1e10, "localization parameter, 1/cm^2"),
        ParamSpec::real("mass", 1.0, "pointer mass, g"),
        ParamSpec::real("sigma0", 1e-5, "initial spread, cm"),
        ParamSpec::real("sigma_target", 1e-1, "appreciable spread, cm"),
        ParamSpec::real("n_displaced", 1e23, "constituents whose position differs between branches"),
        ParamSpec::real("perceptual_timescale", 1e-2, "s"),
    ],
    tolerances: &[
        ParamSpec::real("interval_rel", 1e-9, "relative error of the 1e-7 s interval"),
        ParamSpec::real("count_rel", 0.05, "relative error of the 2e25 and 1.1e29 hit counts"),
        ParamSpec::real("adler_rel", 1e-12, "relative error of the Adler amplification"),
    ],
    outputs: &["pointer_estimates.csv"],
    body: pointer,
};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn pointer(inp: &Inputs) -> Result<Outcome> {
    let (v, tol) = (&inp.params, &inp.tol);
    let p = PhysicalParams::new(
        v.get("lambda"),
        v.get("alpha"),
        v.get("mass"),
        v.get("sigma0"),
        v.get("sigma_target"),
        None,
    )?;
    let n_displaced = v.get("n_displaced");
    let interval = localization_interval(n_displaced, p.lambda_micro)?;
    let single = localization_interval(1.0, p.lambda_micro)?;
    let est = pointer_estimates(&p)?;
    let report = regime_report_with(&p, n_displaced, v.get("perceptual_timescale"))?;

    let mut table = Table::new("pointer_estimates.csv", &["quantity", "value"]);
    let reals = [
        ("n_nucleons", p.n_nucleons),
        ("localization_interval_s", interval),
        ("single_nucleon_interval_s", single),
        ("single_nucleon_interval_years", single / SECONDS_PER_YEAR),
        ("doubling_time_s", est.doubling_time),
        ("target_time_s", est.target_time),
        ("hits_doubling", est.hits_doubling),
        ("hits_target", est.hits_target),
        ("adler_hits_doubling", est.adler_hits_doubling),
        ("adler_hits_target", est.adler_hits_target),
    ];
    for (k, x) in reals {
        table.push(&[Cell::Text(k), Cell::Text(&fmt_real(x))]);
    }
    let records = report.records();
    for (k, x) in &records {
        table.push(&[Cell::Text(k), Cell::Text(x)]);
    }

    let mut out = Outcome::default();
    out.checks.push(Check::at_most(
        "localization_interval",
        &format!("relative error of {interval:.6e} s vs 1e-7 s"),
        rel(interval, 1e-7),
        tol.get("interval_rel"),
    ));
    out.checks.push(Check::at_most(
        "hits_doubling",
        &format!("relative error of {:.6e} vs 2e25", est.hits_doubling),
        rel(est.hits_doubling, 2e25),
        tol.get("count_rel"),
    ));
    out.checks.push(Check::at_most(
        "hits_target",
        &format!("relative error of {:.6e} vs 1.1e29", est.hits_target),
        rel(est.hits_target, 1.1e29),
        tol.get("count_rel"),
    ));
    // the quoted range is read at decade resolution
    let decades = (est.hits_doubling.log10().floor(), est.hits_target.log10().floor());
    out.checks.push(Check::new(
        "quoted_range",
        (25.0..=29.0).contains(&decades.0) && (25.0..=29.0).contains(&decades.1),
        format!("decades {} and {} within 25..=29", decades.0, decades.1),
    ));
    out.checks.push(Check::at_most(
        "adler_factor",
        "relative error of the amplification",
        rel(est.adler_hits_doubling / est.hits_doubling, ADLER_FACTOR)
            .max(rel(est.adler_hits_target / est.hits_target, ADLER_FACTOR)),
        tol.get("adler_rel"),
    ));
    out.report.extend(records);
    out.tables.push(table);
    Ok(out)
}
