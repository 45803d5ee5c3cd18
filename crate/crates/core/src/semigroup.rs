//! Two-level semigroup: `H = ħωσ_x` competing with projective reductions onto
//! the `σ_z` eigenstates at mean rate `λ`.
//!
//! The statistical operator is stored as
//!
//! ```text
//!     ρ = | ρ₁     ρ₃    |
//!         | ρ₃*  1 − ρ₁  |
//! ```
//!
//! so trace preservation holds by construction. The generator
//!
//! ```text
//!     dρ/dt = −i/ħ [H, ρ] + λ (P₊ρP₊ + P₋ρP₋) − λρ
//! ```
//!
//! reduces component-wise to
//!
//! ```text
//!     dρ₁/dt = −2ω Im ρ₃
//!     dρ₃/dt = −iω (1 − 2ρ₁) − λρ₃
//! ```
//!
//! The commutator gives `[σ_x, ρ] = [[ρ₃* − ρ₃, 1 − 2ρ₁], [2ρ₁ − 1, ρ₃ − ρ₃*]]`,
//! and `P₊ρP₊ + P₋ρP₋ − ρ` removes the off-diagonal entries, leaving `−λρ₃`.
//! `ħ` cancels everywhere, so all quantities are in seconds and `s⁻¹`.
//!
//! In the shifted variables `x = ρ₁ − ½`, `y = Im ρ₃`, `z = Re ρ₃` the system
//! splits into `ż = −λz` and the damped rotation
//!
//! ```text
//!     ẋ = −2ωy,   ẏ = 2ωx − λy
//! ```
//!
//! with eigenvalues `s = (−λ ± √(λ² − 16ω²)) / 2`. The slow eigenvalue
//! `s₁ ≈ −4ω²/λ` sets the lifetime of the post-reduction plateau.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Result};

/// Mean collapse frequency used for the toy model, in `s⁻¹`.
pub const DEFAULT_LAMBDA: f64 = 100.0;

/// Normalization tolerance for [`PureState2`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Positivity slack for [`DensityMatrix2`].
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Parameters `{ω, λ}` of the toy model. `ε = ω/λ` is derived on access.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToyParams {
    omega: f64,
    lambda_rate: f64,
}

impl ToyParams {
    /// Builds parameters from the rotation frequency `ω` (rad/s) and the
    /// collapse rate `λ` (1/s).
    pub fn new(omega: f64, lambda_rate: f64) -> Result<Self> {
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::invalid("omega", "must be finite and >= 0"));
        }
        if !(lambda_rate.is_finite() && lambda_rate > 0.0) {
            return Err(Error::invalid("lambda_rate", "must be finite and > 0"));
        }
        Ok(Self { omega, lambda_rate })
    }

    /// Builds parameters from `ε = ω/λ` and `λ`.
    pub fn from_epsilon(epsilon: f64, lambda_rate: f64) -> Result<Self> {
        Self::new(epsilon * lambda_rate, lambda_rate)
    }

    /// Angular frequency of `H = ħωσ_x`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Mean collapse frequency.
    pub fn lambda_rate(&self) -> f64 {
        self.lambda_rate
    }

    /// `ω / λ`.
    pub fn epsilon(&self) -> f64 {
        self.omega / self.lambda_rate
    }
}

/// Normalized state `c₊|+⟩ + c₋|−⟩` in the `σ_z` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState2 {
    c_plus: Complex64,
    c_minus: Complex64,
}

impl PureState2 {
    /// Validates `|c₊|² + |c₋|² = 1` within [`NORM_TOLERANCE`].
    pub fn new(c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        let norm_sq = c_plus.norm_sqr() + c_minus.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid("PureState2", "amplitudes are not normalized"));
        }
        Ok(Self { c_plus, c_minus })
    }

    /// `√w |+⟩ + phase·√(1−w) |−⟩`; `phase` must have unit modulus.
    ///
    /// The reference initial condition is `split(0.48, i)`.
    pub fn split(weight_plus: f64, phase: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight_plus) {
            return Err(Error::invalid("weight_plus", "must lie in [0, 1]"));
        }
        if (phase.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid("phase", "must have unit modulus"));
        }
        let a = libm::sqrt(weight_plus);
        let b = libm::sqrt(1.0 - weight_plus);
        Self::new(Complex64::new(a, 0.0), phase * b)
    }

    /// `|+⟩`, the `σ_z = +1` eigenstate.
    pub const fn plus() -> Self {
        Self { c_plus: Complex64::new(1.0, 0.0), c_minus: Complex64::new(0.0, 0.0) }
    }

    /// `|−⟩`, the `σ_z = −1` eigenstate.
    pub const fn minus() -> Self {
        Self { c_plus: Complex64::new(0.0, 0.0), c_minus: Complex64::new(1.0, 0.0) }
    }

    pub(crate) const fn from_parts_unchecked(c_plus: Complex64, c_minus: Complex64) -> Self {
        Self { c_plus, c_minus }
    }

    /// Amplitude on `|+⟩`.
    pub fn c_plus(&self) -> Complex64 {
        self.c_plus
    }

    /// Amplitude on `|−⟩`.
    pub fn c_minus(&self) -> Complex64 {
        self.c_minus
    }

    /// `|c₊|² + |c₋|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    /// Probability of `σ_z = +1`.
    pub fn prob_plus(&self) -> f64 {
        self.c_plus.norm_sqr()
    }
}

/// Trace-one Hermitian 2×2 statistical operator, parametrized by `(ρ₁, ρ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    rho1: f64,
    rho3: Complex64,
}

impl DensityMatrix2 {
    /// Validates `0 ≤ ρ₁ ≤ 1` and `|ρ₃|² ≤ ρ₁(1 − ρ₁)` up to
    /// [`POSITIVITY_TOLERANCE`].
    pub fn new(rho1: f64, rho3: Complex64) -> Result<Self> {
        let rho = Self { rho1, rho3 };
        if !rho1.is_finite() || !rho3.re.is_finite() || !rho3.im.is_finite() {
            return Err(Error::invalid("DensityMatrix2", "entries must be finite"));
        }
        if !rho.is_valid(POSITIVITY_TOLERANCE) {
            return Err(Error::invalid("DensityMatrix2", "matrix is not positive semidefinite"));
        }
        Ok(rho)
    }

    pub(crate) const fn from_parts_unchecked(rho1: f64, rho3: Complex64) -> Self {
        Self { rho1, rho3 }
    }

    /// `I/2`.
    pub const fn maximally_mixed() -> Self {
        Self { rho1: 0.5, rho3: Complex64::new(0.0, 0.0) }
    }

    /// Diagonal mixture `w|+⟩⟨+| + (1−w)|−⟩⟨−|`.
    pub fn diagonal(weight_plus: f64) -> Result<Self> {
        Self::new(weight_plus, Complex64::new(0.0, 0.0))
    }

    /// Convex combination `w·a + (1−w)·b`.
    pub fn mix(w: f64, a: &Self, b: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::invalid("mixture weight", "must lie in [0, 1]"));
        }
        Self::new(w * a.rho1 + (1.0 - w) * b.rho1, a.rho3 * w + b.rho3 * (1.0 - w))
    }

    /// Upper-left entry: probability of `σ_z = +1`.
    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    /// Upper-right entry (coherence).
    pub fn rho3(&self) -> Complex64 {
        self.rho3
    }

    /// Always 1; kept for symmetry with the matrix form.
    pub fn trace(&self) -> f64 {
        self.rho1 + (1.0 - self.rho1)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        let r2 = 1.0 - self.rho1;
        self.rho1 * self.rho1 + r2 * r2 + 2.0 * self.rho3.norm_sqr()
    }

    /// Full matrix in row-major order.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        [[Complex64::new(self.rho1, 0.0), self.rho3], [self.rho3.conj(), Complex64::new(1.0 - self.rho1, 0.0)]]
    }

    /// Checks the positivity invariants with slack `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.rho1 >= -tol && self.rho1 <= 1.0 + tol && self.rho3.norm_sqr() <= self.rho1 * (1.0 - self.rho1) + tol
    }

    /// Largest absolute entry difference with `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d1 = (self.rho1 - other.rho1).abs();
        let d3 = (self.rho3 - other.rho3).norm_sqr();
        d1.max(libm::sqrt(d3))
    }
}

/// The reduction projectors `P₊ = diag(1, 0)` and `P₋ = diag(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projector {
    /// Onto `σ_z = +1`.
    Plus,
    /// Onto `σ_z = −1`.
    Minus,
}

impl Projector {
    /// Matrix of the projector in the `σ_z` basis.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Projector::Plus => [[one, zero], [zero, zero]],
            Projector::Minus => [[zero, zero], [zero, one]],
        }
    }

    /// Eigenvalue of `σ_z` selected by this projector.
    pub fn outcome(self) -> i8 {
        match self {
            Projector::Plus => 1,
            Projector::Minus => -1,
        }
    }
}

/// Samples of `ρ(t)` on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<DensityMatrix2>,
}

impl TimeSeries {
    /// Fails unless the lengths match and `times` is strictly increasing.
    pub fn new(times: Vec<f64>, values: Vec<DensityMatrix2>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::invalid("TimeSeries", "times and values differ in length"));
        }
        validate_grid(&times)?;
        Ok(Self { times, values })
    }

    /// Sample times in seconds.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Sampled states.
    pub fn values(&self) -> &[DensityMatrix2] {
        &self.values
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// True when there are no samples.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `(t, ρ)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix2)> + '_ {
        self.times.iter().copied().zip(self.values.iter())
    }

    /// `ρ₁` at every sample.
    pub fn rho1(&self) -> Vec<f64> {
        self.values.iter().map(DensityMatrix2::rho1).collect()
    }
}

pub(crate) fn validate_grid(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("time grid", "contains non-finite values"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("time grid", "must be strictly increasing"));
    }
    Ok(())
}

/// `ρ = |ψ⟩⟨ψ|`.
pub fn pure_to_density(psi: &PureState2) -> Result<DensityMatrix2> {
    if (psi.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::invalid("PureState2", "amplitudes are not normalized"));
    }
    Ok(density_of(psi))
}

pub(crate) fn density_of(psi: &PureState2) -> DensityMatrix2 {
    DensityMatrix2::from_parts_unchecked(psi.c_plus.norm_sqr(), psi.c_plus * psi.c_minus.conj())
}

/// Time derivative of `(ρ₁, ρ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityIncrement {
    /// `dρ₁/dt`.
    pub d_rho1: f64,
    /// `dρ₃/dt`.
    pub d_rho3: Complex64,
}

/// Right-hand side of the semigroup equation in component form (see the
/// module docs for the reduction).
pub fn lindblad_rhs(rho: &DensityMatrix2, p: &ToyParams) -> DensityIncrement {
    let w = p.omega;
    let l = p.lambda_rate;
    DensityIncrement {
        d_rho1: -2.0 * w * rho.rho3.im,
        d_rho3: Complex64::new(0.0, -w * (1.0 - 2.0 * rho.rho1)) - rho.rho3 * l,
    }
}

/// `ρ = I/2`, the stationary state for every `λ > 0`.
pub fn steady_state(_p: &ToyParams) -> DensityMatrix2 {
    DensityMatrix2::maximally_mixed()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Spectrum {
    /// Real eigenvalues `s₁ > s₂`.
    Real { s1: f64, s2: f64 },
    /// Complex pair `μ ± iη`.
    Complex { mu: f64, eta: f64 },
}

/// Exact propagator of the `(x, y)` block, precomputed for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    omega: f64,
    lambda: f64,
    spectrum: Spectrum,
}

/// Coefficients of `x(t) = slow·e^{s₁t} + fast·e^{s₂t}` for `x = ρ₁ − ½`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDecomposition {
    /// Amplitude of the slow mode.
    pub slow_amplitude: f64,
    /// Amplitude of the fast mode.
    pub fast_amplitude: f64,
    /// `s₁` (closest to zero).
    pub slow_rate: f64,
    /// `s₂`.
    pub fast_rate: f64,
}

impl ClosedForm {
    /// Fails with [`Error::CriticalDamping`] when `λ = 4ω`.
    pub fn new(p: &ToyParams) -> Result<Self> {
        let w = p.omega;
        let l = p.lambda_rate;
        let disc = (l - 4.0 * w) * (l + 4.0 * w);
        let spectrum = if disc > 0.0 {
            let s2 = -0.5 * (l + libm::sqrt(disc));
            // s₁s₂ = 4ω²; avoids the cancellation in (−λ + √disc)/2
            let s1 = 4.0 * w * w / s2;
            Spectrum::Real { s1, s2 }
        } else if disc < 0.0 {
            Spectrum::Complex { mu: -0.5 * l, eta: 0.5 * libm::sqrt(-disc) }
        } else {
            return Err(Error::CriticalDamping);
        };
        Ok(Self { omega: w, lambda: l, spectrum })
    }

    /// Eigenvalues `(s₁, s₂)` when real.
    pub fn real_rates(&self) -> Option<(f64, f64)> {
        match self.spectrum {
            Spectrum::Real { s1, s2 } => Some((s1, s2)),
            Spectrum::Complex { .. } => None,
        }
    }

    /// Slow/fast split of `ρ₁ − ½`; `None` in the underdamped regime.
    pub fn modes(&self, rho0: &DensityMatrix2) -> Option<ModeDecomposition> {
        let (s1, s2) = self.real_rates()?;
        let x0 = rho0.rho1 - 0.5;
        let dx0 = -2.0 * self.omega * rho0.rho3.im;
        let slow = (dx0 - s2 * x0) / (s1 - s2);
        Some(ModeDecomposition { slow_amplitude: slow, fast_amplitude: x0 - slow, slow_rate: s1, fast_rate: s2 })
    }

    /// `(φ₀, φ₁)` with `e^{Mt} = φ₀ I + φ₁ M`.
    fn phi(&self, t: f64) -> (f64, f64) {
        if t == 0.0 {
            return (1.0, 0.0);
        }
        match self.spectrum {
            Spectrum::Real { s1, s2 } => {
                let e1 = libm::exp(s1 * t);
                let dt = (s1 - s2) * t;
                // (e^{s₁t} − e^{s₂t})/(s₁ − s₂), stable for small gaps and large t
                let phi1 = e1 * t * (-libm::expm1(-dt) / dt);
                (e1 - s1 * phi1, phi1)
            }
            Spectrum::Complex { mu, eta } => {
                let em = libm::exp(mu * t);
                let (s, c) = (libm::sin(eta * t), libm::cos(eta * t));
                let phi1 = em * s / eta;
                (em * c - mu * phi1, phi1)
            }
        }
    }

    /// `ρ(t)` starting from `rho0`.
    pub fn at(&self, rho0: &DensityMatrix2, t: f64) -> Result<DensityMatrix2> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::invalid("t", "must be finite and >= 0"));
        }
        Ok(self.at_unchecked(rho0, t))
    }

    fn at_unchecked(&self, rho0: &DensityMatrix2, t: f64) -> DensityMatrix2 {
        let (x0, y0, z0) = (rho0.rho1 - 0.5, rho0.rho3.im, rho0.rho3.re);
        let (phi0, phi1) = self.phi(t);
        let w2 = 2.0 * self.omega;
        let x = phi0 * x0 - phi1 * w2 * y0;
        let y = phi0 * y0 + phi1 * (w2 * x0 - self.lambda * y0);
        let z = z0 * libm::exp(-self.lambda * t);
        DensityMatrix2::from_parts_unchecked(0.5 + x, Complex64::new(z, y))
    }

    /// Evaluates the exact solution on every grid point.
    pub fn series(&self, rho0: &DensityMatrix2, grid: &[f64]) -> Result<TimeSeries> {
        validate_grid(grid)?;
        if grid.first().is_some_and(|&t| t < 0.0) {
            return Err(Error::invalid("time grid", "must be non-negative"));
        }
        let values = grid.iter().map(|&t| self.at_unchecked(rho0, t)).collect();
        TimeSeries::new(grid.to_vec(), values)
    }
}

/// Exact `ρ(t)` for the semigroup equation.
pub fn closed_form_solution(rho0: &DensityMatrix2, p: &ToyParams, t: f64) -> Result<DensityMatrix2> {
    ClosedForm::new(p)?.at(rho0, t)
}

/// Integration scheme for [`evolve_numeric_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Adaptive 5-stage L-stable SDIRK of order 4 with an embedded order-3
    /// error estimate. Handles the `λ/ω = 10⁶` stiffness over `10¹²` s.
    AdaptiveSdirk4,
    /// Classical RK4 with `dt = min(1/(50λ), 1/(50ω))`.
    FixedRk4,
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Scheme.
    pub method: Method,
    /// Target global absolute error on `ρ₁`.
    pub tolerance: f64,
    /// Per-step error budget as a fraction of `tolerance`.
    pub local_fraction: f64,
    /// Hard cap on the number of steps.
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { method: Method::AdaptiveSdirk4, tolerance: 1e-9, local_fraction: 1e-4, max_steps: 50_000_000 }
    }
}

/// Numerical solution with [`IntegratorConfig::default`].
pub fn evolve_numeric(rho0: &DensityMatrix2, p: &ToyParams, grid: &[f64]) -> Result<TimeSeries> {
    evolve_numeric_with(rho0, p, grid, &IntegratorConfig::default())
}

/// Integrates the generator numerically and samples on `grid`, which must
/// start at 0 and be strictly increasing.
pub fn evolve_numeric_with(
    rho0: &DensityMatrix2,
    p: &ToyParams,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<TimeSeries> {
    validate_grid(grid)?;
    if grid.first() != Some(&0.0) {
        return Err(Error::invalid("time grid", "must start at 0"));
    }
    let sys = Affine3::new(p);
    let mut u = [rho0.rho1, rho0.rho3.re, rho0.rho3.im];
    let mut values = Vec::with_capacity(grid.len());
    values.push(*rho0);
    let mut stepper = Stepper::new(cfg, &sys);
    for w in grid.windows(2) {
        stepper.advance(&mut u, w[0], w[1])?;
        values.push(DensityMatrix2::from_parts_unchecked(u[0], Complex64::new(u[1], u[2])));
    }
    TimeSeries::new(grid.to_vec(), values)
}

/// `u' = M u + g` with `u = (ρ₁, Re ρ₃, Im ρ₃)`.
struct Affine3 {
    m: [[f64; 3]; 3],
    g: [f64; 3],
    omega: f64,
    lambda: f64,
}

impl Affine3 {
    fn new(p: &ToyParams) -> Self {
        let (w, l) = (p.omega, p.lambda_rate);
        Self { m: [[0.0, 0.0, -2.0 * w], [0.0, -l, 0.0], [2.0 * w, 0.0, -l]], g: [0.0, 0.0, -w], omega: w, lambda: l }
    }

    fn eval(&self, u: &[f64; 3]) -> [f64; 3] {
        let mut out = self.g;
        for (i, o) in out.iter_mut().enumerate() {
            *o += self.m[i][0] * u[0] + self.m[i][1] * u[1] + self.m[i][2] * u[2];
        }
        out
    }
}

// Hairer & Wanner, SDIRK order 4, γ = 1/4, stiffly accurate.
const GAMMA: f64 = 0.25;
const SDIRK_A: [[f64; 4]; 5] = [
    [0.0, 0.0, 0.0, 0.0],
    [0.5, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0],
];
const SDIRK_B: [f64; 5] = [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25];
const SDIRK_BHAT: [f64; 5] = [59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0];

struct Stepper<'a> {
    cfg: &'a IntegratorConfig,
    sys: &'a Affine3,
    h: f64,
    steps: u64,
}

impl<'a> Stepper<'a> {
    fn new(cfg: &'a IntegratorConfig, sys: &'a Affine3) -> Self {
        let rate = sys.lambda + sys.omega;
        Self { cfg, sys, h: 1e-3 / rate, steps: 0 }
    }

    fn fixed_dt(&self) -> f64 {
        let mut dt = 1.0 / (50.0 * self.sys.lambda);
        if self.sys.omega > 0.0 {
            dt = dt.min(1.0 / (50.0 * self.sys.omega));
        }
        dt
    }

    fn advance(&mut self, u: &mut [f64; 3], t0: f64, t1: f64) -> Result<()> {
        match self.cfg.method {
            Method::FixedRk4 => self.advance_rk4(u, t0, t1),
            Method::AdaptiveSdirk4 => self.advance_sdirk(u, t0, t1),
        }
    }

    fn count_step(&mut self, t: f64) -> Result<()> {
        self.steps += 1;
        if self.steps > self.cfg.max_steps {
            return Err(Error::IntegrationFailure { last_good_time: t });
        }
        Ok(())
    }

    fn advance_rk4(&mut self, u: &mut [f64; 3], t0: f64, t1: f64) -> Result<()> {
        let span = t1 - t0;
        let n = libm::ceil(span / self.fixed_dt()).max(1.0);
        if n > (self.cfg.max_steps - self.steps.min(self.cfg.max_steps)) as f64 {
            return Err(Error::IntegrationFailure { last_good_time: t0 });
        }
        let n = n as u64;
        let h = span / n as f64;
        for i in 0..n {
            self.count_step(t0 + i as f64 * h)?;
            let k1 = self.sys.eval(u);
            let k2 = self.sys.eval(&axpy(u, 0.5 * h, &k1));
            let k3 = self.sys.eval(&axpy(u, 0.5 * h, &k2));
            let k4 = self.sys.eval(&axpy(u, h, &k3));
            for j in 0..3 {
                u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }
        }
        Ok(())
    }

    fn advance_sdirk(&mut self, u: &mut [f64; 3], t0: f64, t1: f64) -> Result<()> {
        let local_tol = self.cfg.tolerance * self.cfg.local_fraction;
        let mut t = t0;
        while t < t1 {
            let remaining = t1 - t;
            let last = self.h >= remaining;
            let h = if last { remaining } else { self.h };
            if h <= f64::EPSILON * t.abs().max(1e-300) * 4.0 {
                return Err(Error::IntegrationFailure { last_good_time: t });
            }
            self.count_step(t)?;
            let (next, err) = sdirk_step(self.sys, u, h);
            let err_norm = err.iter().fold(0.0f64, |m, e| m.max(e.abs())) / local_tol;
            let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * libm::pow(err_norm, -0.25)).clamp(0.2, 5.0) };
            if err_norm <= 1.0 {
                *u = next;
                t = if last { t1 } else { t + h };
                // a clipped final step says nothing about the natural step size
                if !last || factor < 1.0 {
                    self.h = h * factor;
                }
            } else {
                self.h = h * factor;
            }
        }
        Ok(())
    }
}

fn axpy(u: &[f64; 3], a: f64, k: &[f64; 3]) -> [f64; 3] {
    [u[0] + a * k[0], u[1] + a * k[1], u[2] + a * k[2]]
}

/// One SDIRK step; returns the new state and the embedded error estimate.
fn sdirk_step(sys: &Affine3, u: &[f64; 3], h: f64) -> ([f64; 3], [f64; 3]) {
    // (I − hγM) kᵢ = M(u + h Σ aᵢⱼkⱼ) + g
    let mut lhs = [[0.0; 3]; 3];
    for (i, row) in lhs.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = if i == j { 1.0 } else { 0.0 } - h * GAMMA * sys.m[i][j];
        }
    }
    let lu = Lu3::factor(lhs);
    let mut k = [[0.0; 3]; 5];
    for s in 0..5 {
        let mut stage = *u;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = SDIRK_A[s][j];
            for c in 0..3 {
                stage[c] += h * a * kj[c];
            }
        }
        k[s] = lu.solve(sys.eval(&stage));
    }
    let mut next = *u;
    let mut err = [0.0; 3];
    for s in 0..5 {
        for c in 0..3 {
            next[c] += h * SDIRK_B[s] * k[s][c];
            err[c] += h * (SDIRK_B[s] - SDIRK_BHAT[s]) * k[s][c];
        }
    }
    (next, err)
}

/// LU factorization with partial pivoting of a 3×3 matrix.
struct Lu3 {
    lu: [[f64; 3]; 3],
    perm: [usize; 3],
}

impl Lu3 {
    fn factor(mut a: [[f64; 3]; 3]) -> Self {
        let mut perm = [0, 1, 2];
        for col in 0..3 {
            let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
            a.swap(col, pivot);
            perm.swap(col, pivot);
            let top = a[col];
            for row in a.iter_mut().skip(col + 1) {
                let f = row[col] / top[col];
                row[col] = f;
                for (x, p) in row[col + 1..].iter_mut().zip(&top[col + 1..]) {
                    *x -= f * p;
                }
            }
        }
        Self { lu: a, perm }
    }

    fn solve(&self, b: [f64; 3]) -> [f64; 3] {
        let mut x = [b[self.perm[0]], b[self.perm[1]], b[self.perm[2]]];
        for i in 0..3 {
            for j in 0..i {
                x[i] -= self.lu[i][j] * x[j];
            }
        }
        for i in (0..3).rev() {
            for j in i + 1..3 {
                x[i] -= self.lu[i][j] * x[j];
            }
            x[i] /= self.lu[i][i];
        }
        x
    }
}

/// Quasi-stationary stretch of `ρ₁` after reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    /// `t_settle`.
    pub start: f64,
    /// Last time at which `|ρ₁ − value| ≤ delta` still holds (linearly
    /// interpolated to the crossing).
    pub end: f64,
    /// `ρ₁(t_settle)`.
    pub value: f64,
}

impl Plateau {
    /// `end − start`.
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// Maximal interval `[t_settle, end]` on which `ρ₁` stays within `delta` of
/// its value at `t_settle`.
///
/// `ρ₁` is linearly interpolated between samples, both for the reference
/// value and for locating the exit crossing.
pub fn detect_plateau(series: &TimeSeries, t_settle: f64, delta: f64) -> Result<Plateau> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::invalid("delta", "must be > 0"));
    }
    let times = series.times();
    let rho1 = series.rho1();
    if times.len() < 2 {
        return Err(Error::SeriesTooShort("need at least two samples"));
    }
    if t_settle < times[0] || t_settle >= times[times.len() - 1] {
        return Err(Error::SeriesTooShort("series does not cover t_settle"));
    }
    // first index with times[i] > t_settle
    let first = times.partition_point(|&t| t <= t_settle);
    let value = {
        let (ta, tb) = (times[first - 1], times[first]);
        let f = (t_settle - ta) / (tb - ta);
        rho1[first - 1] + f * (rho1[first] - rho1[first - 1])
    };
    let mut prev = (t_settle, value);
    for i in first..times.len() {
        let dev = (rho1[i] - value).abs();
        if dev > delta {
            let prev_dev = (prev.1 - value).abs();
            let f = (delta - prev_dev) / (dev - prev_dev);
            let end = prev.0 + f * (times[i] - prev.0);
            return Ok(Plateau { start: t_settle, end, value });
        }
        prev = (times[i], rho1[i]);
    }
    Ok(Plateau { start: t_settle, end: prev.0, value })
}
