//! Parallel trajectory ensembles with sequential-identical results.

use collapse_core::rng::split_seed;
use collapse_core::semigroup::{PureState2, ToyParams};
use collapse_core::trajectories::{run_trajectory, EnsembleAccumulator, EnsembleSummary};
use rayon::prelude::*;

/// Trajectories held in memory at once.
const BATCH: usize = 1024;

/// Same result as [`collapse_core::trajectories::ensemble_mean`], bit for
/// bit: trajectories run on the rayon pool, then enter the accumulator in
/// index order.
pub fn parallel_ensemble(
    psi0: &PureState2,
    p: &ToyParams,
    horizon: f64,
    grid: &[f64],
    n_traj: usize,
    master_seed: u64,
) -> collapse_core::Result<EnsembleSummary> {
    let mut acc = EnsembleAccumulator::new(grid);
    for start in (0..n_traj).step_by(BATCH) {
        let end = (start + BATCH).min(n_traj);
        let batch: Vec<(Vec<f64>, usize)> = (start..end)
            .into_par_iter()
            .map(|i| {
                let rec = run_trajectory(psi0, p, horizon, grid, split_seed(master_seed, i as u64))?;
                Ok((rec.samples.rho1(), rec.jump_times.len()))
            })
            .collect::<collapse_core::Result<_>>()?;
        for (rho1, jumps) in &batch {
            acc.push(rho1, *jumps);
        }
    }
    acc.finish()
}

/// `true` when both summaries agree bit for bit.
pub fn bitwise_equal(a: &EnsembleSummary, b: &EnsembleSummary) -> bool {
    let same = |x: &[f64], y: &[f64]| x.len() == y.len() && x.iter().zip(y).all(|(u, v)| u.to_bits() == v.to_bits());
    a.n_traj == b.n_traj
        && a.mean_jumps.to_bits() == b.mean_jumps.to_bits()
        && same(&a.times, &b.times)
        && same(&a.mean_rho1, &b.mean_rho1)
        && same(&a.stderr_rho1, &b.stderr_rho1)
}
