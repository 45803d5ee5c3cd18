//! Jump unraveling of the toy semigroup.

use collapse_core::semigroup::{pure_to_density, ClosedForm, PureState2, ToyParams};
use collapse_core::trajectories::ensemble_mean;
use collapse_core::Complex64;

use super::{Check, Inputs, Outcome, Scenario};
use crate::ensemble::{bitwise_equal, parallel_ensemble};
use crate::error::{LabError, Result};
use crate::params::ParamSpec;
use crate::table::Table;

pub(super) const UNRAVELING: Scenario = Scenario {
    id: "unraveling",
    description: "Ensemble of seeded jump trajectories against the closed-form rho1; parallel and sequential runs must agree bitwise",
    params: &[
        ParamSpec::real("epsilon", 1e-2, "omega / lambda"),
        ParamSpec::real("lambda", 100.0, "reduction rate, 1/s"),
        ParamSpec::real("weight_plus", 0.48, "initial |c+|^2"),
        ParamSpec::real("t_max", 5.0, "last sample, s"),
        ParamSpec::count("points", 101, "equally spaced samples including t = 0"),
        ParamSpec::count("trajectories", 10_000, "ensemble size"),
    ],
    tolerances: &[
        ParamSpec::real("z_max", 3.0, "bound on |mean - closed form| / stderr"),
        ParamSpec::real("exact_floor", 1e-12, "deviations below this count as zero"),
    ],
    outputs: &["unraveling.csv"],
    body: unraveling,
};

fn unraveling(inp: &Inputs) -> Result<Outcome> {
    let v = &inp.params;
    let p = ToyParams::from_epsilon(v.get("epsilon"), v.get("lambda"))?;
    let psi = PureState2::split(v.get("weight_plus"), Complex64::new(0.0, 1.0))?;
    let points = v.count("points");
    if points < 2 {
        return Err(LabError::BadValue {
            key: "points".into(),
            value: points.to_string(),
            reason: "need at least two points",
        });
    }
    let t_max = v.get("t_max");
    let grid: Vec<f64> = (0..points).map(|i| t_max * i as f64 / (points - 1) as f64).collect();
    let n = v.count("trajectories");

    let par = parallel_ensemble(&psi, &p, t_max, &grid, n, inp.seed)?;
    let seq = ensemble_mean(&psi, &p, t_max, &grid, n, inp.seed)?;

    let cf = ClosedForm::new(&p)?;
    let rho0 = pure_to_density(&psi)?;
    let floor = inp.tol.get("exact_floor");
    let mut table = Table::new("unraveling.csv", &["t", "mean_rho1", "stderr_rho1", "closed_rho1"]);
    let mut worst = (0.0_f64, 0.0_f64);
    for ((&t, &m), &e) in par.times.iter().zip(&par.mean_rho1).zip(&par.stderr_rho1) {
        let exact = cf.at(&rho0, t)?.rho1();
        let d = (m - exact).abs();
        let z = if d <= floor { 0.0 } else { d / e };
        if z > worst.0 || z.is_nan() {
            worst = (z, t);
        }
        table.push_reals(&[t, m, e, exact]);
    }
    let mut out = Outcome::default();
    out.checks.push(Check::at_most(
        "ensemble_matches_semigroup",
        &format!("max z-score (at t = {:e})", worst.1),
        worst.0,
        inp.tol.get("z_max"),
    ));
    out.checks.push(Check::new(
        "parallel_bitwise_sequential",
        bitwise_equal(&par, &seq),
        format!("{n} trajectories, master seed {}", inp.seed),
    ));
    out.report("mean_jumps", format!("{:e}", par.mean_jumps));
    out.report("expected_jumps", format!("{:e}", p.lambda_rate() * t_max));
    out.tables.push(table);
    Ok(out)
}
