//! Seeded Monte Carlo sweeps over the number of RMS elements.
//!
//! Every (scenario, M, trial) gets its own seed from [`derive_trial_seed`];
//! all algorithms of a trial run on the same channel realization.

mod config;
mod seed;
mod sweep;

pub use config::{parse_config, read_config, SweepConfig, CONFIG_KEYS};
pub use seed::derive_trial_seed;
pub use sweep::{
    chanest_nmse_sweep, realization_digest, run_sweep, trial_realization, write_nmse_csv, write_sweep_csv,
    NmseRecord, Scenario, SweepRecord, NMSE_HEADER, SWEEP_HEADER,
};
