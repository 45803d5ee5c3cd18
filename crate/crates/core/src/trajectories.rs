//! Pure-state unraveling of the toy model.
//!
//! Between reductions the state rotates under `e^{−iωtσ_x}`; reductions
//! arrive as a Poisson process of rate `λ` and project onto `|±⟩` with Born
//! probabilities `|c±|²`. Averaging `|ψ⟩⟨ψ|` over trajectories reproduces the
//! semigroup solution of [`crate::semigroup`].

use alloc::vec::Vec;
use num_complex::Complex64;
use rand::Rng;

use crate::rng::{self, ChaCha8Rng};
use crate::semigroup::{self, validate_grid, DensityMatrix2, PureState2, TimeSeries, ToyParams};
use crate::{Error, Result};

/// `e^{−iωdtσ_x}ψ = cos(ωdt)ψ − i sin(ωdt)σ_xψ`.
pub fn unitary_step(psi: &PureState2, omega: f64, dt: f64) -> PureState2 {
    let theta = omega * dt;
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let mis = Complex64::new(0.0, -s);
    PureState2::from_parts_unchecked(psi.c_plus() * c + psi.c_minus() * mis, psi.c_plus() * mis + psi.c_minus() * c)
}

/// Projects onto `|+⟩` when `u < |c₊|²`, otherwise onto `|−⟩`. Returns the
/// post-jump state and the `σ_z` outcome.
pub fn sample_jump(psi: &PureState2, u: f64) -> (PureState2, i8) {
    if u < psi.prob_plus() {
        (PureState2::plus(), 1)
    } else {
        (PureState2::minus(), -1)
    }
}

/// One realization of the jump process.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Seed the trajectory was generated from.
    pub seed: u64,
    /// Reduction times in `(0, horizon]`, strictly increasing.
    pub jump_times: Vec<f64>,
    /// `σ_z` outcome of each reduction.
    pub jump_outcomes: Vec<i8>,
    /// `|ψ⟩⟨ψ|` on the requested grid.
    pub samples: TimeSeries,
}

/// Simulates one trajectory from `seed` and samples it on `grid`. Jumps are
/// drawn up to `horizon`, which must be at least the last grid time.
pub fn run_trajectory(
    psi0: &PureState2,
    p: &ToyParams,
    horizon: f64,
    grid: &[f64],
    seed: u64,
) -> Result<TrajectoryRecord> {
    validate_grid(grid)?;
    if grid.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::invalid("time grid", "must be non-negative"));
    }
    if grid.last().is_some_and(|&t| t > horizon) {
        return Err(Error::invalid("horizon", "must cover the sampling grid"));
    }
    let mut rng = rng::stream_rng(seed, 0);
    let mut walker = Walker::new(*psi0, p, &mut rng);
    let mut values = Vec::with_capacity(grid.len());
    for &t in grid {
        walker.advance_to(t);
        values.push(semigroup::density_of(&walker.psi));
    }
    walker.advance_to(horizon);
    Ok(TrajectoryRecord {
        seed,
        jump_times: walker.jump_times,
        jump_outcomes: walker.jump_outcomes,
        samples: TimeSeries::new(grid.to_vec(), values)?,
    })
}

struct Walker<'r> {
    psi: PureState2,
    t: f64,
    next_jump: f64,
    omega: f64,
    lambda: f64,
    rng: &'r mut ChaCha8Rng,
    jump_times: Vec<f64>,
    jump_outcomes: Vec<i8>,
}

impl<'r> Walker<'r> {
    fn new(psi: PureState2, p: &ToyParams, rng: &'r mut ChaCha8Rng) -> Self {
        let lambda = p.lambda_rate();
        let next_jump = rng::exponential(rng, lambda);
        Self {
            psi,
            t: 0.0,
            next_jump,
            omega: p.omega(),
            lambda,
            rng,
            jump_times: Vec::new(),
            jump_outcomes: Vec::new(),
        }
    }

    fn advance_to(&mut self, target: f64) {
        while self.next_jump <= target {
            self.psi = unitary_step(&self.psi, self.omega, self.next_jump - self.t);
            self.t = self.next_jump;
            let u: f64 = self.rng.random();
            let (psi, outcome) = sample_jump(&self.psi, u);
            self.psi = psi;
            self.jump_times.push(self.t);
            self.jump_outcomes.push(outcome);
            self.next_jump = self.t + rng::exponential(self.rng, self.lambda);
        }
        if target > self.t {
            self.psi = unitary_step(&self.psi, self.omega, target - self.t);
            self.t = target;
        }
    }
}

/// Per-time ensemble statistics of `ρ₁`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    /// Sample times.
    pub times: Vec<f64>,
    /// Number of trajectories.
    pub n_traj: usize,
    /// Mean of `ρ₁` across trajectories.
    pub mean_rho1: Vec<f64>,
    /// Standard error of that mean (`s/√n`, with `n − 1` in `s`).
    pub stderr_rho1: Vec<f64>,
    /// Mean number of jumps per trajectory over the horizon.
    pub mean_jumps: f64,
}

/// Welford accumulator over per-trajectory `ρ₁` vectors.
///
/// Pushing in trajectory-index order makes the result independent of how
/// the trajectories were computed.
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator {
    times: Vec<f64>,
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    jumps: u64,
}

impl EnsembleAccumulator {
    /// Empty accumulator for samples on `times`.
    pub fn new(times: &[f64]) -> Self {
        Self {
            times: times.to_vec(),
            n: 0,
            mean: alloc::vec![0.0; times.len()],
            m2: alloc::vec![0.0; times.len()],
            jumps: 0,
        }
    }

    /// Adds one trajectory.
    pub fn push(&mut self, rho1: &[f64], n_jumps: usize) {
        assert_eq!(rho1.len(), self.mean.len(), "sample count mismatch");
        self.n += 1;
        self.jumps += n_jumps as u64;
        let n = self.n as f64;
        for ((m, m2), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(rho1) {
            let d = x - *m;
            *m += d / n;
            *m2 += d * (x - *m);
        }
    }

    /// Adds a full record.
    pub fn push_record(&mut self, rec: &TrajectoryRecord) {
        let rho1: Vec<f64> = rec.samples.values().iter().map(DensityMatrix2::rho1).collect();
        self.push(&rho1, rec.jump_times.len());
    }

    /// Fails unless at least two trajectories were pushed.
    pub fn finish(self) -> Result<EnsembleSummary> {
        if self.n < 2 {
            return Err(Error::invalid("n_traj", "need at least two trajectories"));
        }
        let n = self.n as f64;
        let stderr = self.m2.iter().map(|&m2| libm::sqrt((m2 / (n - 1.0)).max(0.0) / n)).collect();
        Ok(EnsembleSummary {
            times: self.times,
            n_traj: self.n,
            mean_rho1: self.mean,
            stderr_rho1: stderr,
            mean_jumps: self.jumps as f64 / n,
        })
    }
}

/// Runs `n_traj` trajectories with seeds [`rng::split_seed`]`(master_seed, i)`
/// and averages them in index order.
pub fn ensemble_mean(
    psi0: &PureState2,
    p: &ToyParams,
    horizon: f64,
    grid: &[f64],
    n_traj: usize,
    master_seed: u64,
) -> Result<EnsembleSummary> {
    if n_traj < 2 {
        return Err(Error::invalid("n_traj", "need at least two trajectories"));
    }
    let mut acc = EnsembleAccumulator::new(grid);
    for i in 0..n_traj {
        let rec = run_trajectory(psi0, p, horizon, grid, rng::split_seed(master_seed, i as u64))?;
        acc.push_record(&rec);
    }
    acc.finish()
}
