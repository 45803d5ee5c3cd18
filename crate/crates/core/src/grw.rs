//! GRW spontaneous localization of a one-dimensional wavefunction.
//!
//! A hit centred at `x̄` multiplies the wavefunction by
//! `L(x̄) = (α/π)^{1/4} exp[−α(x − x̄)²/2]` and renormalizes; `x̄` is drawn
//! from `p(x̄) = ‖L(x̄)ψ‖²`. Hits arrive as a Poisson process of rate
//! `N·λ`, since for a rigid body of `N` constituents any constituent hit
//! localizes the centre of mass. Between hits the particle propagates freely.
//!
//! Units are natural: `ħ = 1`, mass in nucleon masses, lengths in
//! `10⁻⁵ cm` (so the reference `α = 10¹⁰ cm⁻²` becomes `α = 1`). See
//! [`crate::estimates::NaturalUnits`] for the conversion to CGS.
//!
//! The 3-D operator is reduced to one dimension: the exponent uses
//! `(x − x̄)²` and the prefactor becomes `(α/π)^{1/4}`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::fft::{self, Fft};
use crate::rng;
use crate::{Error, Result};

/// Upper bound on the number of hits [`schedule_hits`] will generate.
pub const MAX_SCHEDULED_HITS: f64 = 1e9;

/// Tolerance on `Σ|ψ|²dx = 1` for a valid [`GridWavefunction`].
pub const GRID_NORM_TOLERANCE: f64 = 1e-8;

/// Allowed boundary amplitude relative to the peak amplitude.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

/// Allowed fraction of the norm in the outer eighth of the momentum range.
pub const NYQUIST_TOLERANCE: f64 = 1e-6;

/// Smallest `‖Lψ‖²` accepted before renormalizing.
pub const MIN_HIT_NORM: f64 = 1e-300;

/// Model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrwParams {
    /// Per-constituent mean hit frequency.
    pub lambda_micro: f64,
    /// Localization accuracy parameter (inverse length squared).
    pub alpha: f64,
    /// Particle (or centre-of-mass) mass.
    pub mass: f64,
    /// Number of constituents `N`; held as `f64` because `N ≈ 10²³` does
    /// not fit in 64 bits.
    pub n_constituents: f64,
}

impl GrwParams {
    /// Validates positivity and `N ≥ 1`.
    pub fn new(lambda_micro: f64, alpha: f64, mass: f64, n_constituents: f64) -> Result<Self> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(lambda_micro) {
            return Err(Error::invalid("lambda_micro", "must be finite and > 0"));
        }
        if !positive(alpha) {
            return Err(Error::invalid("alpha", "must be finite and > 0"));
        }
        if !positive(mass) {
            return Err(Error::invalid("mass", "must be finite and > 0"));
        }
        if !(n_constituents.is_finite() && n_constituents >= 1.0) {
            return Err(Error::invalid("n_constituents", "must be >= 1"));
        }
        Ok(Self { lambda_micro, alpha, mass, n_constituents })
    }

    /// `N·λ`, the centre-of-mass hit rate.
    pub fn effective_rate(&self) -> f64 {
        self.n_constituents * self.lambda_micro
    }
}

/// Uniform grid `x_i = x_min + i·dx`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// First grid point.
    pub x_min: f64,
    /// Spacing.
    pub dx: f64,
    /// Number of points; a power of two.
    pub n: usize,
}

impl Grid {
    /// Validates `dx > 0` and `n` a power of two.
    pub fn new(x_min: f64, dx: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && dx.is_finite() && dx > 0.0) {
            return Err(Error::invalid("grid", "x_min must be finite and dx > 0"));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid("grid", "point count must be a power of two >= 2"));
        }
        Ok(Self { x_min, dx, n })
    }

    /// `n` points spanning `[center − n·dx/2, center + n·dx/2)`.
    pub fn centered(center: f64, dx: f64, n: usize) -> Result<Self> {
        Self::new(center - 0.5 * n as f64 * dx, dx, n)
    }

    /// Position of point `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    /// All positions.
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Largest resolved wavenumber `π/dx`.
    pub fn k_max(&self) -> f64 {
        core::f64::consts::PI / self.dx
    }
}

/// Amplitudes on a uniform grid together with the particle mass.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    mass: f64,
}

/// Normalized Gaussian amplitude with `|ψ|²` of standard deviation `sigma`
/// and mean wavenumber `k0`.
pub fn gaussian_packet(x: f64, center: f64, sigma: f64, k0: f64) -> Complex64 {
    let norm = libm::pow(2.0 * core::f64::consts::PI * sigma * sigma, -0.25);
    let d = x - center;
    let env = norm * libm::exp(-d * d / (4.0 * sigma * sigma));
    Complex64::new(env * libm::cos(k0 * d), env * libm::sin(k0 * d))
}

impl GridWavefunction {
    /// Validates normalization and that the state does not touch the grid
    /// edges.
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>, mass: f64) -> Result<Self> {
        if amplitudes.len() != grid.n {
            return Err(Error::invalid("amplitudes", "length must equal the grid size"));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid("mass", "must be finite and > 0"));
        }
        let psi = Self { grid, amplitudes, mass };
        let norm = psi.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > GRID_NORM_TOLERANCE {
            return Err(Error::invalid("GridWavefunction", "not normalized"));
        }
        psi.check_boundary()?;
        Ok(psi)
    }

    /// Samples `f` on the grid and normalizes the result.
    pub fn from_fn(grid: Grid, mass: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let mut amps: Vec<Complex64> = (0..grid.n).map(|i| f(grid.x(i))).collect();
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>() * grid.dx;
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("GridWavefunction", "function has zero norm on the grid"));
        }
        let s = 1.0 / libm::sqrt(norm);
        amps.iter_mut().for_each(|a| *a *= s);
        Self::new(grid, amps, mass)
    }

    /// Grid metadata.
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Raw amplitudes.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Particle mass.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `Σ|ψ|²dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>() * self.grid.dx
    }

    /// `|ψ(x_i)|²`.
    pub fn probability_density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    /// `Σ|ψ|²dx` over grid points with `lo ≤ x < hi`.
    pub fn weight_between(&self, lo: f64, hi: f64) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let x = self.grid.x(*i);
                x >= lo && x < hi
            })
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            * self.grid.dx
    }

    /// `⟨x⟩`.
    pub fn mean_position(&self) -> f64 {
        self.moment(|x| x)
    }

    /// `⟨x²⟩ − ⟨x⟩²`.
    pub fn position_variance(&self) -> f64 {
        let m = self.mean_position();
        self.moment(|x| (x - m) * (x - m))
    }

    fn moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        let num: f64 = self.amplitudes.iter().enumerate().map(|(i, a)| f(self.grid.x(i)) * a.norm_sqr()).sum();
        num * self.grid.dx / self.norm_sqr()
    }

    /// Largest amplitude in the outer `n/64` points (at least one) on either
    /// side, relative to the peak amplitude.
    pub fn boundary_ratio(&self) -> f64 {
        let band = (self.grid.n / 64).max(1);
        let peak = self.amplitudes.iter().map(Complex64::norm_sqr).fold(0.0, f64::max);
        let n = self.grid.n;
        let edge = self.amplitudes[..band]
            .iter()
            .chain(&self.amplitudes[n - band..])
            .map(Complex64::norm_sqr)
            .fold(0.0, f64::max);
        libm::sqrt(edge / peak)
    }

    fn check_boundary(&self) -> Result<()> {
        let ratio = self.boundary_ratio();
        if ratio.is_nan() || ratio > BOUNDARY_TOLERANCE {
            return Err(Error::Boundary { ratio });
        }
        Ok(())
    }

    /// Expectation of the kinetic energy `p²/2m`, evaluated spectrally.
    pub fn kinetic_energy(&self) -> f64 {
        Propagator::new(self.grid, self.mass).kinetic_energy(self)
    }

    /// `⟨p⟩`, evaluated spectrally.
    pub fn mean_momentum(&self) -> f64 {
        Propagator::new(self.grid, self.mass).mean_momentum(self)
    }
}

/// Free-particle propagation and momentum-space observables for one grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: Grid,
    mass: f64,
    fft: Fft,
    k: Vec<f64>,
}

impl Propagator {
    /// Plans the transforms for `grid`.
    pub fn new(grid: Grid, mass: f64) -> Self {
        // Grid::new guarantees a power-of-two length
        let fft = Fft::new(grid.n).expect("grid length is a power of two");
        Self { grid, mass, fft, k: fft::wavenumbers(grid.n, grid.dx) }
    }

    fn spectrum(&self, psi: &GridWavefunction) -> Vec<Complex64> {
        let mut phi = psi.amplitudes.clone();
        self.fft.forward(&mut phi);
        phi
    }

    /// `⟨p²⟩/2m`.
    pub fn kinetic_energy(&self, psi: &GridWavefunction) -> f64 {
        let phi = self.spectrum(psi);
        let (num, den) = phi.iter().zip(&self.k).fold((0.0, 0.0), |(n, d), (a, &k)| {
            let w = a.norm_sqr();
            (n + k * k * w, d + w)
        });
        num / den / (2.0 * self.mass)
    }

    /// `⟨p⟩`.
    pub fn mean_momentum(&self, psi: &GridWavefunction) -> f64 {
        let phi = self.spectrum(psi);
        let (num, den) = phi.iter().zip(&self.k).fold((0.0, 0.0), |(n, d), (a, &k)| {
            let w = a.norm_sqr();
            (n + k * w, d + w)
        });
        num / den
    }

    fn nyquist_weight(&self, phi: &[Complex64]) -> f64 {
        let cut = 0.875 * self.grid.k_max();
        let (hi, total) = phi.iter().zip(&self.k).fold((0.0, 0.0), |(h, t), (a, &k)| {
            let w = a.norm_sqr();
            (if k.abs() > cut { h + w } else { h }, t + w)
        });
        hi / total
    }

    /// `ψ → F⁻¹ e^{−ik²dt/2m} F ψ`. Fails if the momentum content reaches
    /// the Nyquist band or the result reaches the grid edges.
    pub fn drift(&self, psi: &GridWavefunction, dt: f64) -> Result<GridWavefunction> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::invalid("dt", "must be finite and >= 0"));
        }
        if psi.grid != self.grid || psi.mass != self.mass {
            return Err(Error::invalid("GridWavefunction", "grid or mass differs from the propagator"));
        }
        let mut phi = self.spectrum(psi);
        let weight = self.nyquist_weight(&phi);
        if weight.is_nan() || weight > NYQUIST_TOLERANCE {
            return Err(Error::Nyquist { weight });
        }
        if dt == 0.0 {
            return Ok(psi.clone());
        }
        let c = dt / (2.0 * self.mass);
        for (a, &k) in phi.iter_mut().zip(&self.k) {
            let th = -k * k * c;
            *a *= Complex64::new(libm::cos(th), libm::sin(th));
        }
        self.fft.inverse(&mut phi);
        let out = GridWavefunction { grid: self.grid, amplitudes: phi, mass: self.mass };
        out.check_boundary()?;
        Ok(out)
    }
}

/// Free evolution over `dt` (natural units, `ħ = 1`).
pub fn free_drift(psi: &GridWavefunction, dt: f64) -> Result<GridWavefunction> {
    Propagator::new(psi.grid, psi.mass).drift(psi, dt)
}

/// `L(x̄)ψ/‖L(x̄)ψ‖`.
pub fn apply_localization(psi: &GridWavefunction, x_bar: f64, alpha: f64) -> Result<GridWavefunction> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid("alpha", "must be finite and > 0"));
    }
    if !x_bar.is_finite() {
        return Err(Error::invalid("x_bar", "must be finite"));
    }
    let pref = libm::pow(alpha / core::f64::consts::PI, 0.25);
    let g = &psi.grid;
    let mut amps: Vec<Complex64> = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let d = g.x(i) - x_bar;
            a * (pref * libm::exp(-0.5 * alpha * d * d))
        })
        .collect();
    let norm_sq = amps.iter().map(Complex64::norm_sqr).sum::<f64>() * g.dx;
    if !(norm_sq.is_finite() && norm_sq > MIN_HIT_NORM) {
        return Err(Error::Annihilated { norm_sq });
    }
    let s = 1.0 / libm::sqrt(norm_sq);
    amps.iter_mut().for_each(|a| *a *= s);
    Ok(GridWavefunction { grid: psi.grid, amplitudes: amps, mass: psi.mass })
}

/// Hit-centre sampling for one grid and `α`, with the Gaussian kernel's
/// spectrum cached for repeated use.
#[derive(Debug, Clone)]
pub struct HitSampler {
    grid: Grid,
    alpha: f64,
    fft: Fft,
    kernel_hat: Vec<Complex64>,
}

impl HitSampler {
    /// Precomputes `F[√(α/π) e^{−αs²}]` on the doubled grid.
    pub fn new(grid: Grid, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid("alpha", "must be finite and > 0"));
        }
        let m = 2 * grid.n;
        let fft = Fft::new(m)?;
        let pref = libm::sqrt(alpha / core::f64::consts::PI);
        let k = |s: f64| pref * libm::exp(-alpha * s * s);
        // circular layout of offsets −(n−1)..(n−1); slot n is never reached
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..grid.n {
            let v = k(j as f64 * grid.dx);
            kernel[j] = Complex64::new(v, 0.0);
            if j > 0 {
                kernel[m - j] = Complex64::new(v, 0.0);
            }
        }
        fft.forward(&mut kernel);
        Ok(Self { grid, alpha, fft, kernel_hat: kernel })
    }

    /// Localization parameter.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `p(x̄_j) = Σᵢ √(α/π) e^{−α(x̄_j − xᵢ)²} |ψᵢ|² dx` at every grid point.
    pub fn density(&self, psi: &GridWavefunction) -> Result<Vec<f64>> {
        if psi.grid != self.grid {
            return Err(Error::invalid("GridWavefunction", "grid differs from the sampler"));
        }
        let n = self.grid.n;
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for (b, a) in buf.iter_mut().zip(&psi.amplitudes) {
            *b = Complex64::new(a.norm_sqr(), 0.0);
        }
        self.fft.forward(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.fft.inverse(&mut buf);
        Ok(buf[..n].iter().map(|c| (c.re * self.grid.dx).max(0.0)).collect())
    }

    /// Inverse-CDF draw from [`HitSampler::density`]; each grid point owns
    /// the cell `[x_j − dx/2, x_j + dx/2)` with uniform density.
    pub fn sample(&self, psi: &GridWavefunction, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::invalid("u", "must lie in [0, 1]"));
        }
        let p = self.density(psi)?;
        Ok(inverse_cdf(&self.grid, &p, u))
    }
}

fn inverse_cdf(grid: &Grid, p: &[f64], u: f64) -> f64 {
    let dx = grid.dx;
    let mut cdf = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &v in p {
        acc += v * dx;
        cdf.push(acc);
    }
    let target = u * acc;
    let j = cdf.partition_point(|&c| c <= target).min(p.len() - 1);
    let below = if j == 0 { 0.0 } else { cdf[j - 1] };
    let cell = p[j] * dx;
    let frac = if cell > 0.0 { ((target - below) / cell).clamp(0.0, 1.0) } else { 0.5 };
    grid.x(j) - 0.5 * dx + frac * dx
}

/// `p(x̄) = ‖L(x̄)ψ‖²` on the grid points.
pub fn hit_density(psi: &GridWavefunction, alpha: f64) -> Result<Vec<f64>> {
    HitSampler::new(psi.grid, alpha)?.density(psi)
}

/// Inverse-CDF hit centre for the uniform draw `u`.
pub fn sample_hit(psi: &GridWavefunction, alpha: f64, u: f64) -> Result<f64> {
    HitSampler::new(psi.grid, alpha)?.sample(psi, u)
}

/// Poisson hit times of rate `N·λ` in `(0, horizon]`, from ChaCha stream 0
/// of `seed`.
pub fn schedule_hits(p: &GrwParams, horizon: f64, seed: u64) -> Result<Vec<f64>> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid("horizon", "must be finite and > 0"));
    }
    let rate = p.effective_rate();
    if rate * horizon > MAX_SCHEDULED_HITS {
        return Err(Error::invalid("horizon", "expected hit count exceeds MAX_SCHEDULED_HITS"));
    }
    let mut rng = rng::stream_rng(seed, 0);
    let mut times = Vec::new();
    let mut t = rng::exponential(&mut rng, rate);
    while t <= horizon {
        times.push(t);
        t += rng::exponential(&mut rng, rate);
    }
    Ok(times)
}

/// `m(x) = mass·|ψ(x)|²` on the grid points.
pub fn mass_density(psi: &GridWavefunction) -> Vec<f64> {
    psi.amplitudes.iter().map(|a| psi.mass * a.norm_sqr()).collect()
}

/// One localization event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitEvent {
    /// Hit time.
    pub time: f64,
    /// Hit centre.
    pub x_bar: f64,
    /// Kinetic energy just before the hit.
    pub energy_before: f64,
    /// Kinetic energy just after the hit.
    pub energy_after: f64,
}

/// Result of [`run_grw`].
#[derive(Debug, Clone, PartialEq)]
pub struct GrwRun {
    /// State at the horizon.
    pub state: GridWavefunction,
    /// Hits in time order.
    pub hits: Vec<HitEvent>,
}

/// Free drift interleaved with hits at [`schedule_hits`] times; hit centres
/// use ChaCha stream 1 of `seed`.
pub fn run_grw(psi0: &GridWavefunction, p: &GrwParams, horizon: f64, seed: u64) -> Result<GrwRun> {
    run_grw_with(psi0, p, horizon, seed, |_, _, _| {})
}

/// [`run_grw`] with a callback receiving each hit and the states just
/// before and after it.
pub fn run_grw_with<F>(
    psi0: &GridWavefunction,
    p: &GrwParams,
    horizon: f64,
    seed: u64,
    mut observer: F,
) -> Result<GrwRun>
where
    F: FnMut(&HitEvent, &GridWavefunction, &GridWavefunction),
{
    if p.mass != psi0.mass {
        return Err(Error::invalid("mass", "GrwParams and wavefunction disagree"));
    }
    let times = schedule_hits(p, horizon, seed)?;
    let mut rng = rng::stream_rng(seed, 1);
    let prop = Propagator::new(psi0.grid, psi0.mass);
    let sampler = HitSampler::new(psi0.grid, p.alpha)?;
    let mut psi = psi0.clone();
    let mut t = 0.0;
    let mut hits = Vec::with_capacity(times.len());
    for th in times {
        psi = prop.drift(&psi, th - t)?;
        t = th;
        let energy_before = prop.kinetic_energy(&psi);
        let x_bar = sampler.sample(&psi, rng::open_unit(&mut rng))?;
        let post = apply_localization(&psi, x_bar, p.alpha)?;
        let ev = HitEvent { time: th, x_bar, energy_before, energy_after: prop.kinetic_energy(&post) };
        observer(&ev, &psi, &post);
        hits.push(ev);
        psi = post;
    }
    psi = prop.drift(&psi, horizon - t)?;
    Ok(GrwRun { state: psi, hits })
}
