//! Spontaneous localization on a 1-D grid, in units with ħ = 1.

use collapse_core::grw::{gaussian_packet, run_grw_with, Grid, GridWavefunction, GrwParams, Propagator};
use collapse_core::rng::split_seed;
use rayon::prelude::*;

use super::{Check, Inputs, Outcome, Scenario};
use crate::error::Result;
use crate::params::{ParamSpec, Values};
use crate::table::{Cell, Table};

fn grid(v: &Values) -> Result<Grid> {
    Ok(Grid::centered(0.0, v.get("dx"), v.count("points"))?)
}

/// A single particle whose hits arrive at `rate`.
fn grw_params(v: &Values) -> Result<GrwParams> {
    Ok(GrwParams::new(v.get("rate"), v.get("alpha"), v.get("mass"), 1.0)?)
}

pub(super) const TWO_PACKET: Scenario = Scenario {
    id: "grw_twopacket",
    description: "Two far-apart packets with weights 0.48 / 0.52: hits select one packet with Born frequency",
    params: &[
        ParamSpec::real("alpha", 1.0, "localization parameter, 1/length^2"),
        ParamSpec::real("separation", 20.0, "distance between the packet centres"),
        ParamSpec::real("sigma", 0.5, "packet width"),
        ParamSpec::real("weight_a", 0.48, "weight of the packet at negative x"),
        ParamSpec::real("mass", 1.0, "particle mass"),
        ParamSpec::real("rate", 20.0, "hit rate"),
        ParamSpec::real("horizon", 1.0, "duration of each run"),
        ParamSpec::real("dx", 0.0625, "grid spacing"),
        ParamSpec::count("points", 1024, "grid points, power of two"),
        ParamSpec::count("runs", 2000, "independent seeded runs"),
    ],
    tolerances: &[
        ParamSpec::real("frequency_halfwidth", 0.034, "allowed |frequency of A - weight_a|"),
        ParamSpec::real("suppression_factor", 10.0, "multiple of exp(-alpha d^2 / 4) allowed after the first hit"),
        ParamSpec::real("min_alpha_d2", 100.0, "required alpha * separation^2"),
        ParamSpec::real("collapsed", 1e-6, "weight below which a packet counts as removed"),
    ],
    outputs: &["grw_twopacket.csv"],
    body: two_packet,
};

struct PacketRun {
    seed: u64,
    hits: usize,
    weight_a: f64,
    first_hit: Option<(f64, f64)>,
}

fn two_packet(inp: &Inputs) -> Result<Outcome> {
    let (v, tol) = (&inp.params, &inp.tol);
    let (alpha, d, w) = (v.get("alpha"), v.get("separation"), v.get("weight_a"));
    let (a, b) = (w.sqrt(), (1.0 - w).sqrt());
    let sigma = v.get("sigma");
    let psi0 = GridWavefunction::from_fn(grid(v)?, v.get("mass"), |x| {
        gaussian_packet(x, -0.5 * d, sigma, 0.0) * a + gaussian_packet(x, 0.5 * d, sigma, 0.0) * b
    })?;
    let gp = grw_params(v)?;
    let horizon = v.get("horizon");
    let runs: Vec<PacketRun> = (0..v.count("runs") as u64)
        .into_par_iter()
        .map(|i| {
            let seed = split_seed(inp.seed, i);
            let mut first_hit = None;
            let run = run_grw_with(&psi0, &gp, horizon, seed, |ev, _, post| {
                if first_hit.is_none() {
                    // weight left on the half opposite the hit
                    let other = if ev.x_bar >= 0.0 {
                        post.weight_between(f64::NEG_INFINITY, 0.0)
                    } else {
                        post.weight_between(0.0, f64::INFINITY)
                    };
                    first_hit = Some((ev.x_bar, other));
                }
            })?;
            Ok(PacketRun {
                seed,
                hits: run.hits.len(),
                weight_a: run.state.weight_between(f64::NEG_INFINITY, 0.0),
                first_hit,
            })
        })
        .collect::<Result<_>>()?;

    let cut = tol.get("collapsed");
    let mut table =
        Table::new("grw_twopacket.csv", &["run", "seed", "hits", "weight_a", "first_hit_x", "first_hit_other_weight"]);
    let (mut n_a, mut undecided) = (0usize, 0usize);
    let mut worst_other: f64 = 0.0;
    for (i, r) in runs.iter().enumerate() {
        if r.weight_a >= 1.0 - cut {
            n_a += 1;
        } else if r.weight_a > cut {
            undecided += 1;
        }
        let (x, other) = r.first_hit.unwrap_or((f64::NAN, f64::NAN));
        if r.first_hit.is_some() {
            worst_other = worst_other.max(other);
        }
        table.push(&[
            Cell::UInt(i as u64),
            Cell::UInt(r.seed),
            Cell::UInt(r.hits as u64),
            Cell::Real(r.weight_a),
            Cell::Real(x),
            Cell::Real(other),
        ]);
    }
    let freq = n_a as f64 / runs.len() as f64;
    let bound = (-alpha * d * d / 4.0).exp() * tol.get("suppression_factor");

    let mut out = Outcome::default();
    out.checks.push(Check::at_least("well_separated", "alpha d^2", alpha * d * d, tol.get("min_alpha_d2")));
    out.checks.push(Check::new(
        "all_runs_collapsed",
        undecided == 0,
        format!("{undecided} of {} runs keep both packets", runs.len()),
    ));
    let half = tol.get("frequency_halfwidth");
    out.checks.push(Check::within("born_frequency", "frequency of A", freq, w - half, w + half));
    out.checks.push(Check::at_most("first_hit_suppression", "max weight opposite the first hit", worst_other, bound));
    out.report("runs_selecting_a", n_a);
    out.report("mean_hits", format!("{:e}", runs.iter().map(|r| r.hits as f64).sum::<f64>() / runs.len() as f64));
    out.tables.push(table);
    Ok(out)
}

pub(super) const ENERGY: Scenario = Scenario {
    id: "grw_energy",
    description: "Kinetic energy grows by alpha / (4 m) per hit on average",
    params: &[
        ParamSpec::real("alpha", 1.0, "localization parameter, 1/length^2"),
        ParamSpec::real("mass", 1.0, "particle mass"),
        ParamSpec::real("sigma0", 3.0, "initial packet width"),
        ParamSpec::real("rate", 40.0, "hit rate"),
        ParamSpec::real("horizon", 1.0, "duration of each run"),
        ParamSpec::real("dx", 0.03125, "grid spacing"),
        ParamSpec::count("points", 2048, "grid points, power of two"),
        ParamSpec::count("runs", 400, "independent seeded runs"),
        ParamSpec::count("fit_hits", 25, "hit indices entering the linear fit"),
    ],
    tolerances: &[
        ParamSpec::real("gain_rel", 0.1, "relative error of the mean gain per hit"),
        ParamSpec::real("slope_rel", 0.1, "relative error of the fitted slope"),
        ParamSpec::real("r2_min", 0.99, "coefficient of determination of the fit"),
        ParamSpec::real("min_hits", 1000.0, "minimum number of hits in the mean"),
    ],
    outputs: &["grw_energy.csv"],
    body: energy,
};

/// Least squares `y = a + b x`; returns `(a, b, R²)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope, sxy * sxy / (sxx * syy))
}

fn energy(inp: &Inputs) -> Result<Outcome> {
    let (v, tol) = (&inp.params, &inp.tol);
    let (alpha, mass, sigma) = (v.get("alpha"), v.get("mass"), v.get("sigma0"));
    let g = grid(v)?;
    let psi0 = GridWavefunction::from_fn(g, mass, |x| gaussian_packet(x, 0.0, sigma, 0.0))?;
    let e0 = Propagator::new(g, mass).kinetic_energy(&psi0);
    let gp = grw_params(v)?;
    let horizon = v.get("horizon");
    let runs: Vec<Vec<(f64, f64)>> = (0..v.count("runs") as u64)
        .into_par_iter()
        .map(|i| {
            let run = run_grw_with(&psi0, &gp, horizon, split_seed(inp.seed, i), |_, _, _| {})?;
            Ok(run.hits.iter().map(|h| (h.energy_before, h.energy_after)).collect())
        })
        .collect::<Result<_>>()?;

    let oracle = alpha / (4.0 * mass);
    let gains: Vec<f64> = runs.iter().flatten().map(|(b, a)| a - b).collect();
    let mean_gain = gains.iter().sum::<f64>() / gains.len() as f64;

    // mean energy after k hits, over runs with at least `fit_hits` hits
    let k_max = v.count("fit_hits");
    let long: Vec<&Vec<(f64, f64)>> = runs.iter().filter(|r| r.len() >= k_max).collect();
    let mut table = Table::new("grw_energy.csv", &["hits", "mean_energy", "stderr_energy", "oracle_energy"]);
    let (mut ks, mut means) = (Vec::new(), Vec::new());
    for k in 0..=k_max {
        let e: Vec<f64> = long.iter().map(|r| if k == 0 { e0 } else { r[k - 1].1 }).collect();
        let n = e.len() as f64;
        let m = e.iter().sum::<f64>() / n;
        let var = e.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0);
        table.push_reals(&[k as f64, m, (var / n).sqrt(), e0 + oracle * k as f64]);
        ks.push(k as f64);
        means.push(m);
    }
    let (_, slope, r2) =
        if long.len() >= 2 && k_max >= 1 { linear_fit(&ks, &means) } else { (f64::NAN, f64::NAN, f64::NAN) };

    let mut out = Outcome::default();
    out.checks.push(Check::at_least("enough_hits", "hits", gains.len() as f64, tol.get("min_hits")));
    out.checks.push(Check::at_most(
        "mean_gain",
        &format!("relative error of {mean_gain:.6e} vs {oracle:e}"),
        ((mean_gain - oracle) / oracle).abs(),
        tol.get("gain_rel"),
    ));
    out.checks.push(Check::at_most(
        "fit_slope",
        &format!("relative error of slope {slope:.6e}"),
        ((slope - oracle) / oracle).abs(),
        tol.get("slope_rel"),
    ));
    out.checks.push(Check::at_least("linearity", "R^2", r2, tol.get("r2_min")));
    out.report("oracle_gain", format!("{oracle:e}"));
    out.report("runs_in_fit", long.len());
    out.tables.push(table);
    Ok(out)
}
