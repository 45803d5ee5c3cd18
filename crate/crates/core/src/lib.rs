//! Spontaneous-collapse dynamics without the standard library.
//!
//! * [`semigroup`]: the two-level toy model: a spin driven by `H = ħωσ_x`
//!   while being projected onto the `σ_z` eigenbasis at Poisson rate `λ`,
//!   solved both in closed form and with an adaptive L-stable integrator.
//! * [`trajectories`]: the pure-state jump unraveling of the same model and
//!   its seeded ensemble statistics.
//! * [`grw`]: GRW Gaussian hits on a one-dimensional grid wavefunction, with
//!   spectral free propagation between hits.
//! * [`estimates`]: order-of-magnitude calculators (localization intervals,
//!   pointer spreading times, hit counts) in CGS units.
//!
//! Everything here allocates through `alloc` only; file formats, the CLI and
//! the thread pool live in the `collapse-lab` crate.
#![no_std]
#![warn(missing_docs)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod estimates;
pub mod fft;
pub mod grw;
pub mod rng;
pub mod semigroup;
pub mod trajectories;

pub use error::Error;
pub use num_complex::Complex64;

/// Convenience alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;
