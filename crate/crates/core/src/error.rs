use thiserror::Error;

/// Everything that can go wrong inside the core library.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// An input violated a documented invariant.
    #[error("invalid {what}: {reason}")]
    Invalid {
        /// Name of the offending quantity.
        what: &'static str,
        /// Human readable description.
        reason: &'static str,
    },
    /// The closed-form solution is not defined for `λ² = 16ω²`.
    #[error("critical damping (lambda^2 == 16 omega^2) is unsupported")]
    CriticalDamping,
    /// The adaptive integrator could not make progress.
    #[error("integration failed at t = {last_good_time}: step size underflow")]
    IntegrationFailure {
        /// Last time reached with an accepted step.
        last_good_time: f64,
    },
    /// A series is too short for the requested analysis.
    #[error("time series too short: {0}")]
    SeriesTooShort(&'static str),
    /// A localization hit left no norm to renormalize.
    #[error("localization annihilated the state (norm^2 = {norm_sq:e})")]
    Annihilated {
        /// Squared norm before renormalization.
        norm_sq: f64,
    },
    /// Spectral weight near the Nyquist momentum exceeds the grid tolerance.
    #[error("grid does not resolve the momentum content (weight {weight:e} near Nyquist)")]
    Nyquist {
        /// Fraction of the norm in the outermost momentum band.
        weight: f64,
    },
    /// The wavefunction reached the grid boundary.
    #[error("wavefunction reaches the grid boundary (relative amplitude {ratio:e})")]
    Boundary {
        /// Boundary amplitude divided by the peak amplitude.
        ratio: f64,
    },
}

impl Error {
    pub(crate) const fn invalid(what: &'static str, reason: &'static str) -> Self {
        Error::Invalid { what, reason }
    }
}
