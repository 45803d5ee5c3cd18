//! Order-of-magnitude calculators in CGS units.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Reduced Planck constant, erg·s.
pub const HBAR_CGS: f64 = 1.0546e-27;
/// Nucleon mass, g.
pub const NUCLEON_MASS_G: f64 = 1.67e-24;
/// Standard per-nucleon hit frequency, s⁻¹.
pub const GRW_LAMBDA: f64 = 1e-16;
/// Standard localization parameter, cm⁻².
pub const GRW_ALPHA_CM2: f64 = 1e10;
/// Amplification of `λ` in Adler's proposal.
pub const ADLER_FACTOR: f64 = 1e8;
/// Default perceptual timescale, s (the inverse of the toy model's `λ = 10² s⁻¹`).
pub const PERCEPTUAL_TIMESCALE_S: f64 = 1e-2;
/// Reduction times up to this multiple of the perceptual timescale count as
/// the transition regime.
pub const TRANSITION_FACTOR: f64 = 100.0;
/// Julian year, s.
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// Natural units of [`crate::grw`]: `ħ = 1`, nucleon mass, `10⁻⁵ cm`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalUnits {
    /// Length unit, cm.
    pub length_cm: f64,
    /// Mass unit, g.
    pub mass_g: f64,
}

impl Default for NaturalUnits {
    fn default() -> Self {
        Self { length_cm: 1e-5, mass_g: NUCLEON_MASS_G }
    }
}

impl NaturalUnits {
    /// Time unit `m·L²/ħ`, s.
    pub fn time_s(&self) -> f64 {
        self.mass_g * self.length_cm * self.length_cm / HBAR_CGS
    }

    /// Converts a rate in s⁻¹ to natural units.
    pub fn rate_to_natural(&self, per_second: f64) -> f64 {
        per_second * self.time_s()
    }

    /// Converts `α` in cm⁻² to natural units.
    pub fn alpha_to_natural(&self, alpha_cm2: f64) -> f64 {
        alpha_cm2 * self.length_cm * self.length_cm
    }

    /// Converts a mass in g to natural units.
    pub fn mass_to_natural(&self, grams: f64) -> f64 {
        grams / self.mass_g
    }
}

/// Inputs of the pointer estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Per-nucleon hit frequency, s⁻¹.
    pub lambda_micro: f64,
    /// Localization parameter, cm⁻².
    pub alpha: f64,
    /// Mass, g.
    pub mass: f64,
    /// Initial centre-of-mass spread, cm.
    pub sigma0: f64,
    /// Spread regarded as an appreciable change, cm.
    pub sigma_target: f64,
    /// Number of nucleons; `mass / NUCLEON_MASS_G` unless given.
    pub n_nucleons: f64,
}

impl PhysicalParams {
    /// All inputs must be positive; `n_nucleons` defaults to
    /// `mass / NUCLEON_MASS_G`.
    pub fn new(
        lambda_micro: f64,
        alpha: f64,
        mass: f64,
        sigma0: f64,
        sigma_target: f64,
        n_nucleons: Option<f64>,
    ) -> Result<Self> {
        let n_nucleons = n_nucleons.unwrap_or(mass / NUCLEON_MASS_G);
        for (name, v) in [
            ("lambda_micro", lambda_micro),
            ("alpha", alpha),
            ("mass", mass),
            ("sigma0", sigma0),
            ("sigma_target", sigma_target),
            ("n_nucleons", n_nucleons),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Invalid { what: name, reason: "must be finite and > 0" });
            }
        }
        Ok(Self { lambda_micro, alpha, mass, sigma0, sigma_target, n_nucleons })
    }

    /// A 1 g pointer with spread `10⁻⁵ cm`, target `10⁻¹ cm`, GRW values.
    pub fn pointer() -> Self {
        Self::new(GRW_LAMBDA, GRW_ALPHA_CM2, 1.0, 1e-5, 1e-1, None).expect("constants are valid")
    }

    /// Same inputs with the target spread replaced.
    pub fn with_target(mut self, sigma_target: f64) -> Self {
        self.sigma_target = sigma_target;
        self
    }
}

/// `1/(n·λ)`, s.
pub fn localization_interval(n: f64, lambda_micro: f64) -> Result<f64> {
    if !(n.is_finite() && n >= 1.0) {
        return Err(Error::invalid("n", "must be >= 1"));
    }
    if !(lambda_micro.is_finite() && lambda_micro > 0.0) {
        return Err(Error::invalid("lambda_micro", "must be finite and > 0"));
    }
    Ok(1.0 / (n * lambda_micro))
}

/// Time for a free Gaussian to widen from `sigma0` to `sigma_target`:
/// inverts `σ(t) = σ₀√(1 + (ħt/(2mσ₀²))²)`.
pub fn spread_time(mass: f64, sigma0: f64, sigma_target: f64) -> Result<f64> {
    if !(mass > 0.0 && sigma0 > 0.0) {
        return Err(Error::invalid("spread_time", "mass and sigma0 must be > 0"));
    }
    if sigma_target.is_nan() || sigma_target < sigma0 {
        return Err(Error::invalid("sigma_target", "must be >= sigma0"));
    }
    let r = sigma_target / sigma0;
    Ok(2.0 * mass * sigma0 * sigma0 / HBAR_CGS * libm::sqrt((r - 1.0) * (r + 1.0)))
}

/// Centre-of-mass hits accumulated while the spread grows to the target.
pub fn hits_during_spread(p: &PhysicalParams) -> Result<f64> {
    Ok(spread_time(p.mass, p.sigma0, p.sigma_target)? * p.n_nucleons * p.lambda_micro)
}

/// The pointer table: doubling time and time to reach `sigma_target`, with
/// the hits each implies for the given and the Adler-amplified `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerEstimates {
    /// Time to reach `2σ₀`, s.
    pub doubling_time: f64,
    /// Time to reach `sigma_target`, s.
    pub target_time: f64,
    /// Hits during `doubling_time`.
    pub hits_doubling: f64,
    /// Hits during `target_time`.
    pub hits_target: f64,
    /// `hits_doubling × ADLER_FACTOR`.
    pub adler_hits_doubling: f64,
    /// `hits_target × ADLER_FACTOR`.
    pub adler_hits_target: f64,
}

/// Evaluates [`PointerEstimates`] for `p`.
pub fn pointer_estimates(p: &PhysicalParams) -> Result<PointerEstimates> {
    let doubling = p.with_target(2.0 * p.sigma0);
    let hits_doubling = hits_during_spread(&doubling)?;
    let hits_target = hits_during_spread(p)?;
    Ok(PointerEstimates {
        doubling_time: spread_time(p.mass, p.sigma0, 2.0 * p.sigma0)?,
        target_time: spread_time(p.mass, p.sigma0, p.sigma_target)?,
        hits_doubling,
        hits_target,
        adler_hits_doubling: hits_doubling * ADLER_FACTOR,
        adler_hits_target: hits_target * ADLER_FACTOR,
    })
}

/// Behaviour of a superposition relative to the perceptual timescale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Reduction far slower than perception.
    Quantum,
    /// Reduction within `TRANSITION_FACTOR` of the perceptual timescale.
    Transition,
    /// Reduction within the perceptual timescale.
    Classical,
}

impl Regime {
    /// Classifies a reduction time.
    pub fn classify(reduction_time: f64, perceptual_timescale: f64) -> Self {
        if reduction_time <= perceptual_timescale {
            Regime::Classical
        } else if reduction_time <= TRANSITION_FACTOR * perceptual_timescale {
            Regime::Transition
        } else {
            Regime::Quantum
        }
    }

    /// Lower-case name.
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Quantum => "quantum",
            Regime::Transition => "transition",
            Regime::Classical => "classical",
        }
    }
}

/// One `λ` evaluated against the perceptual timescale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeRow {
    /// Per-constituent rate, s⁻¹.
    pub lambda_micro: f64,
    /// `1/(n·λ)`, s.
    pub reduction_time: f64,
    /// Classification.
    pub regime: Regime,
}

impl RegimeRow {
    fn new(n: f64, lambda_micro: f64, tau_p: f64) -> Result<Self> {
        let reduction_time = localization_interval(n, lambda_micro)?;
        Ok(Self { lambda_micro, reduction_time, regime: Regime::classify(reduction_time, tau_p) })
    }
}

/// Output of [`regime_report`].
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    /// Number of displaced constituents.
    pub n_displaced: f64,
    /// Perceptual timescale, s.
    pub perceptual_timescale: f64,
    /// Row for `p.lambda_micro`.
    pub supplied: RegimeRow,
    /// Row for [`GRW_LAMBDA`].
    pub grw: RegimeRow,
    /// Row for `GRW_LAMBDA × ADLER_FACTOR`.
    pub adler: RegimeRow,
    /// Rate needed for reduction within the perceptual timescale.
    pub required_lambda: f64,
    /// True when even the Adler rate leaves `n_displaced` unreduced within
    /// the perceptual timescale.
    pub adler_tension: bool,
}

impl RegimeReport {
    /// Ordered key/value records.
    pub fn records(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: String| out.push((String::from(k), v));
        push("n_displaced", format!("{:e}", self.n_displaced));
        push("perceptual_timescale_s", format!("{:e}", self.perceptual_timescale));
        for (name, row) in [("supplied", &self.supplied), ("grw", &self.grw), ("adler", &self.adler)] {
            push(&format!("{name}.lambda_per_s"), format!("{:e}", row.lambda_micro));
            push(&format!("{name}.reduction_time_s"), format!("{:e}", row.reduction_time));
            push(&format!("{name}.regime"), String::from(row.regime.as_str()));
        }
        push("required_lambda_per_s", format!("{:e}", self.required_lambda));
        push("adler_tension", format!("{}", self.adler_tension));
        out
    }
}

impl fmt::Display for RegimeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n = {:e} displaced constituents, perceptual timescale {:e} s",
            self.n_displaced, self.perceptual_timescale
        )?;
        for (name, row) in [("supplied", &self.supplied), ("grw", &self.grw), ("adler", &self.adler)] {
            writeln!(
                f,
                "  {name:<8} lambda = {:e}/s  reduction time = {:e} s  -> {}",
                row.lambda_micro,
                row.reduction_time,
                row.regime.as_str()
            )?;
        }
        write!(f, "  reduction within the perceptual time needs lambda >= {:e}/s", self.required_lambda)?;
        if self.adler_tension {
            write!(f, "\n  note: the Adler rate does not reduce this many constituents in time")?;
        }
        Ok(())
    }
}

/// Classifies `n_displaced` constituents for `p.lambda_micro`, the GRW value
/// and the Adler value against the default perceptual timescale.
pub fn regime_report(p: &PhysicalParams, n_displaced: f64) -> Result<RegimeReport> {
    regime_report_with(p, n_displaced, PERCEPTUAL_TIMESCALE_S)
}

/// [`regime_report`] with an explicit perceptual timescale.
pub fn regime_report_with(p: &PhysicalParams, n_displaced: f64, tau_p: f64) -> Result<RegimeReport> {
    if !(tau_p.is_finite() && tau_p > 0.0) {
        return Err(Error::invalid("perceptual_timescale", "must be finite and > 0"));
    }
    let adler = RegimeRow::new(n_displaced, GRW_LAMBDA * ADLER_FACTOR, tau_p)?;
    Ok(RegimeReport {
        n_displaced,
        perceptual_timescale: tau_p,
        supplied: RegimeRow::new(n_displaced, p.lambda_micro, tau_p)?,
        grw: RegimeRow::new(n_displaced, GRW_LAMBDA, tau_p)?,
        adler,
        required_lambda: 1.0 / (n_displaced * tau_p),
        adler_tension: adler.regime != Regime::Classical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn localization_interval_examples() {
        assert!(rel(localization_interval(1e23, 1e-16).unwrap(), 1e-7) < 1e-12);
        assert!(rel(localization_interval(1.0, 1e-16).unwrap(), 1e16) < 1e-12);
        assert!(rel(localization_interval(1.0, 1e-8).unwrap(), 1e8) < 1e-12);
        // 1e16 s is about 3.2e8 years
        let years = localization_interval(1.0, GRW_LAMBDA).unwrap() / SECONDS_PER_YEAR;
        assert!(rel(years, 3.168_808_781e8) < 1e-9);
        assert!(localization_interval(0.5, 1.0).is_err());
    }

    #[test]
    fn spread_time_examples() {
        assert_eq!(spread_time(1.0, 1e-5, 1e-5).unwrap(), 0.0);
        let base = 2.0 * 1e-10 / HBAR_CGS;
        let t = spread_time(1.0, 1e-5, 1e-1).unwrap();
        assert!(rel(t, base * libm::sqrt(1e8 - 1.0)) < 1e-12);
        assert!(rel(t, 1.9e21) < 0.01);
        let t2 = spread_time(1.0, 1e-5, 2e-5).unwrap();
        assert!(rel(t2, libm::sqrt(3.0) * base) < 1e-12);
        assert!(rel(t2, 3.3e17) < 0.01);
        assert!(spread_time(1.0, 1e-5, 1e-6).is_err());
    }

    #[test]
    fn pointer_hit_counts() {
        let e = pointer_estimates(&PhysicalParams::pointer()).unwrap();
        assert!(rel(e.hits_target, 1.1357e29) < 1e-3);
        assert!(rel(e.hits_doubling, 1.9672e25) < 1e-3);
        assert!(e.hits_doubling >= 1e25 && e.hits_target <= 1e30);
        assert!(rel(e.adler_hits_doubling, e.hits_doubling * 1e8) < 1e-15);
        assert!(e.adler_hits_doubling >= 1e33 && e.adler_hits_target < 1e38);
    }

    #[test]
    fn regime_examples() {
        let p = PhysicalParams::pointer();
        let r = regime_report(&p, 1e4).unwrap();
        assert_eq!(r.supplied.regime, Regime::Quantum);
        assert!(rel(r.supplied.reduction_time, 1e12) < 1e-12);

        let r = regime_report(&p, 1e23).unwrap();
        assert_eq!(r.supplied.regime, Regime::Classical);

        let adler = PhysicalParams { lambda_micro: 1e-8, ..p };
        let r = regime_report(&adler, 1e5).unwrap();
        assert!(rel(r.supplied.reduction_time, 1e3) < 1e-12);
        assert_ne!(r.supplied.regime, Regime::Classical);
        assert!(r.adler_tension);
        assert!(rel(r.required_lambda, 1e-3) < 1e-12);
        let keys: Vec<String> = r.records().into_iter().map(|(k, _)| k).collect();
        assert!(keys.iter().any(|k| k == "adler_tension"));
    }

    #[test]
    fn nucleon_count_is_derived_from_mass() {
        let p = PhysicalParams::new(1e-16, 1e10, 2.0, 1e-5, 1e-1, None).unwrap();
        assert!(rel(p.n_nucleons, 2.0 / NUCLEON_MASS_G) < 1e-15);
        assert!(PhysicalParams::new(1e-16, 1e10, -1.0, 1e-5, 1e-1, None).is_err());
    }

    #[test]
    fn natural_units_map_alpha_to_one() {
        let u = NaturalUnits::default();
        assert!(rel(u.alpha_to_natural(GRW_ALPHA_CM2), 1.0) < 1e-12);
        assert!(rel(u.time_s(), 1.67e-34 / 1.0546e-27) < 1e-12);
    }
}
