//! Two-level toy model: reduction, plateau, relaxation and no-signalling.

use collapse_core::semigroup::{
    detect_plateau, evolve_numeric, pure_to_density, ClosedForm, DensityMatrix2, PureState2, TimeSeries, ToyParams,
};
use collapse_core::Complex64;

use super::{Check, Inputs, Outcome, Scenario};
use crate::error::{LabError, Result};
use crate::params::{ParamSpec, Values};
use crate::table::{density_table, Table};

const PLATEAU_DELTA: f64 = 0.0025;
const PLATEAU_SETTLE: f64 = 0.1;

fn toy_params(v: &Values) -> Result<ToyParams> {
    Ok(ToyParams::from_epsilon(v.get("epsilon"), v.get("lambda"))?)
}

/// `√w|+⟩ + s·i√(1−w)|−⟩` for `s = ±1`.
fn initial(v: &Values, sign: f64) -> Result<DensityMatrix2> {
    let psi = PureState2::split(v.get("weight_plus"), Complex64::new(0.0, sign))?;
    Ok(pure_to_density(&psi)?)
}

fn too_few(key: &str, n: usize) -> LabError {
    LabError::BadValue { key: key.into(), value: n.to_string(), reason: "need at least two points" }
}

/// `t = 0` followed by `points` log-spaced samples on `[t_min, t_max]`.
fn log_grid(t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(too_few("points", points));
    }
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(LabError::BadValue {
            key: "t_max".into(),
            value: t_max.to_string(),
            reason: "need 0 < t_min < t_max",
        });
    }
    let (a, b) = (t_min.log10(), t_max.log10());
    let last = points - 1;
    let mut grid = Vec::with_capacity(points + 1);
    grid.push(0.0);
    grid.extend((0..points).map(|i| match i {
        0 => t_min,
        i if i == last => t_max,
        i => 10f64.powf(a + (b - a) * i as f64 / last as f64),
    }));
    Ok(grid)
}

/// `points` equally spaced samples on `[0, t_max]`, endpoints exact.
fn linear_grid(t_max: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(too_few("points", points));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| t_max * i as f64 / last).collect())
}

fn solve(rho0: &DensityMatrix2, p: &ToyParams, grid: &[f64], numeric: bool) -> Result<TimeSeries> {
    Ok(if numeric { evolve_numeric(rho0, p, grid)? } else { ClosedForm::new(p)?.series(rho0, grid)? })
}

fn max_over(series: &TimeSeries, lo: f64, hi: f64, f: impl Fn(&DensityMatrix2) -> f64) -> f64 {
    series.iter().filter(|(t, _)| (lo..=hi).contains(t)).map(|(_, r)| f(r)).fold(f64::NEG_INFINITY, f64::max)
}

fn report_plateau(out: &mut Outcome, series: &TimeSeries) {
    match detect_plateau(series, PLATEAU_SETTLE, PLATEAU_DELTA) {
        Ok(pl) => {
            out.report("plateau_value", format!("{:e}", pl.value));
            out.report("plateau_end_s", format!("{:e}", pl.end));
        }
        Err(e) => out.report("plateau", format!("not detected ({e})")),
    }
}

const SOLVER_DOC: &str = "0 = closed form, 1 = adaptive stiff integrator";

pub(super) const FIG2: Scenario = Scenario {
    id: "fig2",
    description: "Macroscopic regime (epsilon = 1e-6): fast reduction, long plateau at the quantum weight, slow relaxation to 1/2",
    params: &[
        ParamSpec::real("epsilon", 1e-6, "omega / lambda"),
        ParamSpec::real("lambda", 100.0, "reduction rate, 1/s"),
        ParamSpec::real("weight_plus", 0.48, "initial |c+|^2"),
        ParamSpec::real("t_min", 1e-4, "first nonzero sample, s"),
        ParamSpec::real("t_max", 1e12, "last sample, s"),
        ParamSpec::count("points", 1000, "log-spaced samples after t = 0"),
        ParamSpec::flag("numeric", false, SOLVER_DOC),
    ],
    tolerances: &[
        ParamSpec::real("rho3_max", 0.01, "bound on |rho3| for t >= 0.05 s"),
        ParamSpec::real("plateau_halfwidth", 1e-3, "allowed |rho1 - weight_plus| on [0.1, 1e6] s"),
        ParamSpec::real("asymptote_halfwidth", 1e-4, "allowed |rho1(t_max) - 1/2|"),
    ],
    outputs: &["fig2.csv"],
    body: fig2,
};

fn fig2(inp: &Inputs) -> Result<Outcome> {
    let v = &inp.params;
    let grid = log_grid(v.get("t_min"), v.get("t_max"), v.count("points"))?;
    let series = solve(&initial(v, 1.0)?, &toy_params(v)?, &grid, v.flag("numeric"))?;
    let mut out = Outcome::default();
    let w = v.get("weight_plus");
    out.checks.push(Check::at_most(
        "reduction",
        "max |rho3| for t >= 0.05",
        max_over(&series, 0.05, f64::INFINITY, |r| r.rho3().norm_sqr().sqrt()),
        inp.tol.get("rho3_max"),
    ));
    out.checks.push(Check::at_most(
        "plateau",
        "max |rho1 - weight_plus| on [0.1, 1e6]",
        max_over(&series, 0.1, 1e6, |r| (r.rho1() - w).abs()),
        inp.tol.get("plateau_halfwidth"),
    ));
    let (t_end, last) = series.iter().last().expect("grid is non-empty");
    out.checks.push(Check::at_most(
        "asymptote",
        &format!("|rho1({t_end:e}) - 0.5|"),
        (last.rho1() - 0.5).abs(),
        inp.tol.get("asymptote_halfwidth"),
    ));
    report_plateau(&mut out, &series);
    out.tables.push(density_table("fig2.csv", &series));
    Ok(out)
}

pub(super) const FIG34: Scenario = Scenario {
    id: "fig34",
    description:
        "Competitive regime (epsilon = 1e-2): rho1 settles near 0.490 instead of 0.48, plateau of several seconds",
    params: &[
        ParamSpec::real("epsilon", 1e-2, "omega / lambda"),
        ParamSpec::real("lambda", 100.0, "reduction rate, 1/s"),
        ParamSpec::real("weight_plus", 0.48, "initial |c+|^2"),
        ParamSpec::real("t_max", 60.0, "last sample, s"),
        ParamSpec::count("points", 6001, "equally spaced samples including t = 0"),
        ParamSpec::real("delta", PLATEAU_DELTA, "plateau band half-width"),
        ParamSpec::real("t_settle", PLATEAU_SETTLE, "plateau reference time, s"),
        ParamSpec::flag("numeric", false, SOLVER_DOC),
    ],
    tolerances: &[
        ParamSpec::real("rho1_floor", 0.490, "lower bound on rho1 over [0.2, 10] s"),
        ParamSpec::real("plateau_value_min", 0.4895, "plateau value lower bound"),
        ParamSpec::real("plateau_value_max", 0.4915, "plateau value upper bound"),
        ParamSpec::real("duration_min", 5.0, "plateau duration lower bound, s"),
        ParamSpec::real("duration_max", 9.0, "plateau duration upper bound, s"),
    ],
    outputs: &["fig34.csv"],
    body: fig34,
};

fn fig34(inp: &Inputs) -> Result<Outcome> {
    let (v, tol) = (&inp.params, &inp.tol);
    let grid = linear_grid(v.get("t_max"), v.count("points"))?;
    let series = solve(&initial(v, 1.0)?, &toy_params(v)?, &grid, v.flag("numeric"))?;
    let mut out = Outcome::default();
    let low = -max_over(&series, 0.2, 10.0, |r| -r.rho1());
    out.checks.push(Check::at_least("above_quantum_weight", "min rho1 on [0.2, 10]", low, tol.get("rho1_floor")));
    let pl = detect_plateau(&series, v.get("t_settle"), v.get("delta"));
    let (value, duration) = match &pl {
        Ok(p) => (p.value, p.duration()),
        Err(_) => (f64::NAN, f64::NAN),
    };
    out.checks.push(Check::within(
        "plateau_value",
        "rho1(t_settle)",
        value,
        tol.get("plateau_value_min"),
        tol.get("plateau_value_max"),
    ));
    out.checks.push(Check::within(
        "plateau_duration",
        "plateau duration [s]",
        duration,
        tol.get("duration_min"),
        tol.get("duration_max"),
    ));
    match pl {
        Ok(p) => out.report("plateau_end_s", format!("{:e}", p.end)),
        Err(e) => out.report("plateau", format!("not detected ({e})")),
    }
    out.report("shift_from_quantum_weight", format!("{:e}", value - v.get("weight_plus")));
    out.tables.push(density_table("fig34.csv", &series));
    Ok(out)
}

pub(super) const FIG5: Scenario = Scenario {
    id: "fig5",
    description: "No-signalling: the two remote basis choices leave the same local statistical operator",
    params: &[
        ParamSpec::real("epsilon", 1e-2, "omega / lambda"),
        ParamSpec::real("lambda", 100.0, "reduction rate, 1/s"),
        ParamSpec::real("weight_plus", 0.48, "initial |c+|^2"),
        ParamSpec::real("t_max", 60.0, "last sample, s"),
        ParamSpec::count("points", 6001, "equally spaced samples including t = 0"),
        ParamSpec::flag("numeric", false, SOLVER_DOC),
    ],
    tolerances: &[
        ParamSpec::real("identity", 1e-9, "max |rho1_mix - (rho1 + rho1_tilde)/2|"),
        ParamSpec::real("signalling", 1e-9, "max entrywise difference between the two remote choices"),
    ],
    outputs: &["fig5_rho.csv", "fig5_rho_tilde.csv", "fig5_mixture.csv"],
    body: fig5,
};

fn fig5(inp: &Inputs) -> Result<Outcome> {
    let v = &inp.params;
    let p = toy_params(v)?;
    let w = v.get("weight_plus");
    let grid = linear_grid(v.get("t_max"), v.count("points"))?;
    let numeric = v.flag("numeric");
    let rho = solve(&initial(v, 1.0)?, &p, &grid, numeric)?;
    let tilde = solve(&initial(v, -1.0)?, &p, &grid, numeric)?;
    let mixture = solve(&DensityMatrix2::diagonal(w)?, &p, &grid, numeric)?;
    let plus = solve(&DensityMatrix2::diagonal(1.0)?, &p, &grid, numeric)?;
    let minus = solve(&DensityMatrix2::diagonal(0.0)?, &p, &grid, numeric)?;

    let mut identity: f64 = 0.0;
    let mut signalling: f64 = 0.0;
    for i in 0..grid.len() {
        let (a, b, m) = (&rho.values()[i], &tilde.values()[i], &mixture.values()[i]);
        identity = identity.max((m.rho1() - 0.5 * (a.rho1() + b.rho1())).abs());
        // equal-weight {rho, rho~} versus the w / (1 - w) mixture of reduced branches
        let branches = DensityMatrix2::mix(0.5, a, b)?;
        let reduced = DensityMatrix2::mix(w, &plus.values()[i], &minus.values()[i])?;
        signalling = signalling.max(branches.max_abs_diff(&reduced));
    }
    let mut out = Outcome::default();
    out.checks.push(Check::at_most("mixture_average", "max |rho1_mix - mean|", identity, inp.tol.get("identity")));
    out.checks.push(Check::at_most(
        "no_signalling",
        "max remote-choice difference",
        signalling,
        inp.tol.get("signalling"),
    ));
    let cf = ClosedForm::new(&p)?;
    out.report("rho1_at_1s", format!("{:e}", cf.at(&initial(v, 1.0)?, 1.0)?.rho1()));
    out.report("rho1_tilde_at_1s", format!("{:e}", cf.at(&initial(v, -1.0)?, 1.0)?.rho1()));
    out.tables.push(density_table("fig5_rho.csv", &rho));
    out.tables.push(density_table("fig5_rho_tilde.csv", &tilde));
    out.tables.push(density_table("fig5_mixture.csv", &mixture));
    Ok(out)
}

pub(super) const SOLVER_AGREEMENT: Scenario = Scenario {
    id: "solver_agreement",
    description: "Closed-form semigroup against the adaptive stiff integrator in three regimes",
    params: &[
        ParamSpec::real("lambda", 100.0, "reduction rate, 1/s"),
        ParamSpec::real("weight_plus", 0.48, "initial |c+|^2"),
        ParamSpec::count("points", 999, "log-spaced samples after t = 0 per regime"),
        ParamSpec::real("t_min", 1e-4, "first nonzero sample, s"),
        ParamSpec::real("epsilon_1", 1e-6, "first regime"),
        ParamSpec::real("t_max_1", 1e12, "horizon of the first regime, s"),
        ParamSpec::real("epsilon_2", 1e-2, "second regime"),
        ParamSpec::real("t_max_2", 1e3, "horizon of the second regime, s"),
        ParamSpec::real("epsilon_3", 0.2, "third regime"),
        ParamSpec::real("t_max_3", 10.0, "horizon of the third regime, s"),
    ],
    tolerances: &[ParamSpec::real("max_abs_diff", 1e-9, "bound on |rho1 closed - rho1 numeric|")],
    outputs: &["solver_agreement.csv"],
    body: solver_agreement,
};

fn solver_agreement(inp: &Inputs) -> Result<Outcome> {
    let v = &inp.params;
    let rho0 = initial(v, 1.0)?;
    let mut table = Table::new("solver_agreement.csv", &["epsilon", "t", "rho1_closed", "rho1_numeric"]);
    let mut out = Outcome::default();
    const NAMES: [&str; 3] = ["regime_1", "regime_2", "regime_3"];
    for (k, name) in NAMES.iter().enumerate() {
        let eps = v.get(&format!("epsilon_{}", k + 1));
        let p = ToyParams::from_epsilon(eps, v.get("lambda"))?;
        let grid = log_grid(v.get("t_min"), v.get(&format!("t_max_{}", k + 1)), v.count("points"))?;
        let closed = solve(&rho0, &p, &grid, false)?;
        let numeric = solve(&rho0, &p, &grid, true)?;
        let mut worst: f64 = 0.0;
        for ((t, a), b) in closed.iter().zip(numeric.values()) {
            worst = worst.max((a.rho1() - b.rho1()).abs());
            table.push_reals(&[eps, t, a.rho1(), b.rho1()]);
        }
        out.checks.push(Check::at_most(
            name,
            &format!("epsilon {eps:e}: max |delta rho1| over {} points", grid.len()),
            worst,
            inp.tol.get("max_abs_diff"),
        ));
    }
    out.tables.push(table);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = log_grid(1e-4, 1e12, 1000).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!((g[0], g[1], g[1000]), (0.0, 1e-4, 1e12));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        let l = linear_grid(60.0, 6001).unwrap();
        assert_eq!((l[20], l[100], l[6000]), (0.2, 1.0, 60.0));
        assert!(log_grid(1.0, 1.0, 10).is_err());
        assert!(linear_grid(1.0, 1).is_err());
    }
}
