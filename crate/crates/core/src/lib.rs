//! Simulation and optimization toolkit for multi-antenna transceivers built
//! around a transmissive reconfigurable metasurface (RMS).
//!
//! - [`sysmodel`]: configuration, UPA geometry, coefficients, Rayleigh split
//! - [`channel`]: far-field Rician and near-field spherical-wave channels
//! - [`timemod`]: time-sequence modulation of symbols onto a harmonic
//! - [`chanest`]: LS cascaded channel estimation and separation
//! - [`dlopt`]: downlink SDMA sum-rate maximization and baselines
//! - [`ulopt`]: uplink OFDMA sum-rate maximization and benchmarks
//! - [`harness`]: seeded Monte Carlo sweeps and CSV output

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chanest;
pub mod channel;
pub mod dlopt;
pub mod error;
pub mod harness;
pub mod solver;
pub mod sysmodel;
pub mod timemod;
pub mod ulopt;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Generator used for every random draw in a trial.
pub type SimRng = rand_chacha::ChaCha8Rng;
