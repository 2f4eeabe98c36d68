use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::SweepConfig;
use super::seed::derive_trial_seed;
use crate::chanest::{ls_cascaded_estimate, nmse, pilot_power_for_snr, separate_channels, simulate_pilot_rx, PilotSchedule};
use crate::channel::{sample_realization, write_dump, ChannelRealization};
use crate::dlopt::{self, DlProblem, DlSolution, EffectiveDlChannel};
use crate::error::{Error, Result};
use crate::solver::OptimOptions;
use crate::sysmodel::SystemConfig;
use crate::ulopt::{self, DualOptions, UlProblem, UlSolution};
use crate::SimRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    Dl,
    Ul,
    Chanest,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Dl => "dl",
            Scenario::Ul => "ul",
            Scenario::Chanest => "chanest",
        }
    }

    /// Algorithm names in output order.
    pub fn algorithms(self) -> &'static [&'static str] {
        match self {
            Scenario::Dl => &["proposed", "ea", "zf", "ra"],
            Scenario::Ul => &["proposed", "three_stage", "random_coefficient", "random_allocation"],
            Scenario::Chanest => &["ls"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dl" => Ok(Scenario::Dl),
            "ul" => Ok(Scenario::Ul),
            "chanest" => Ok(Scenario::Chanest),
            other => Err(Error::InvalidInput(format!("unknown scenario {other:?}"))),
        }
    }
}

pub const SWEEP_HEADER: &str = "scenario,algorithm,M,trial,seed,metric,iterations,converged";
pub const NMSE_HEADER: &str = "snr_db,trial,nmse_cascaded,nmse_separated";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub scenario: Scenario,
    pub algorithm: String,
    pub num_elements: usize,
    pub trial: usize,
    pub seed: u64,
    /// Sum-rate in bits/s/Hz.
    pub metric: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Per-iteration objective; not written to CSV.
    pub objective_trace: Vec<f64>,
}

/// Seed and channel realization shared by every algorithm of one trial.
pub fn trial_realization(
    cfg: &SweepConfig,
    scenario: Scenario,
    num_elements: usize,
    trial: usize,
) -> Result<(SystemConfig, u64, ChannelRealization)> {
    let mut system = cfg.system.with_elements(num_elements)?;
    if scenario == Scenario::Ul {
        system.num_subcarriers = cfg.system.num_subcarriers;
    }
    let seed = derive_trial_seed(cfg.master_seed, scenario, num_elements, trial);
    system.seed = seed;
    let mut rng = SimRng::seed_from_u64(seed);
    let real = sample_realization(&system, &mut rng)?;
    Ok((system, seed, real))
}

/// SHA-256 of the text dump of a realization, hex encoded.
pub fn realization_digest(real: &ChannelRealization) -> Result<String> {
    let mut buf = Vec::new();
    write_dump(real, &mut buf)?;
    Ok(Sha256::digest(&buf).iter().map(|b| format!("{b:02x}")).collect())
}

/// Stream for the random baselines, independent of the channel draws.
fn baseline_rng(seed: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn dl_record(name: &str, m: usize, trial: usize, seed: u64, sol: DlSolution) -> SweepRecord {
    SweepRecord {
        scenario: Scenario::Dl,
        algorithm: name.to_string(),
        num_elements: m,
        trial,
        seed,
        metric: sol.sum_rate,
        iterations: sol.iterations,
        converged: sol.converged,
        objective_trace: sol.objective_trace,
    }
}

fn ul_record(name: &str, m: usize, trial: usize, seed: u64, sol: UlSolution) -> SweepRecord {
    SweepRecord {
        scenario: Scenario::Ul,
        algorithm: name.to_string(),
        num_elements: m,
        trial,
        seed,
        metric: sol.sum_rate,
        iterations: sol.iterations,
        converged: sol.converged,
        objective_trace: sol.objective_trace,
    }
}

fn run_dl_trial(cfg: &SweepConfig, m: usize, trial: usize, opts: &OptimOptions) -> Result<Vec<SweepRecord>> {
    let (system, seed, real) = trial_realization(cfg, Scenario::Dl, m, trial)?;
    let problem = DlProblem::new(EffectiveDlChannel::from_realization(&real), system.dl_total_power, system.noise_power)?;
    let mut rng = baseline_rng(seed);
    Ok(vec![
        dl_record("proposed", m, trial, seed, dlopt::alternating_optimize_dl(&problem, opts)?),
        dl_record("ea", m, trial, seed, dlopt::ea_baseline(&problem, opts)?),
        dl_record("zf", m, trial, seed, dlopt::zf_baseline(&problem)?),
        dl_record("ra", m, trial, seed, dlopt::ra_baseline(&problem, &mut rng)?),
    ])
}

fn run_ul_trial(cfg: &SweepConfig, m: usize, trial: usize, opts: &OptimOptions) -> Result<Vec<SweepRecord>> {
    let (system, seed, real) = trial_realization(cfg, Scenario::Ul, m, trial)?;
    let problem = UlProblem::from_realization(&system, &real)?;
    let dual = DualOptions::default();
    let mut rng = baseline_rng(seed);
    Ok(vec![
        ul_record("proposed", m, trial, seed, ulopt::alternating_optimize_ul(&problem, opts, &dual)?),
        ul_record("three_stage", m, trial, seed, ulopt::three_stage(&problem, opts, &dual)?),
        ul_record("random_coefficient", m, trial, seed, ulopt::random_coefficient(&problem, &mut rng, &dual)?),
        ul_record("random_allocation", m, trial, seed, ulopt::random_allocation(&problem, &mut rng)?),
    ])
}

/// Runs every (M, trial) of a dl or ul sweep in parallel and returns the
/// records sorted by (M, trial, algorithm order).
pub fn run_sweep(cfg: &SweepConfig, scenario: Scenario, opts: &OptimOptions) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> =
        cfg.elements_sweep.iter().flat_map(|&m| (0..cfg.trials).map(move |t| (m, t))).collect();
    let results: Vec<Vec<SweepRecord>> = jobs
        .par_iter()
        .map(|&(m, t)| match scenario {
            Scenario::Dl => run_dl_trial(cfg, m, t, opts),
            Scenario::Ul => run_ul_trial(cfg, m, t, opts),
            Scenario::Chanest => Err(Error::InvalidInput("use chanest_nmse_sweep for the chanest scenario".into())),
        })
        .collect::<Result<_>>()?;
    let order = scenario.algorithms();
    let rank = |name: &str| order.iter().position(|a| *a == name).unwrap_or(order.len());
    let mut records: Vec<SweepRecord> = results.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        (a.num_elements, a.trial, rank(&a.algorithm)).cmp(&(b.num_elements, b.trial, rank(&b.algorithm)))
    });
    Ok(records)
}

pub fn write_sweep_csv<W: Write>(records: &[SweepRecord], out: &mut W) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{:e},{},{}",
            r.scenario, r.algorithm, r.num_elements, r.trial, r.seed, r.metric, r.iterations, r.converged
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmseRecord {
    pub snr_db: f64,
    pub trial: usize,
    /// Mean over users of the cascaded-channel NMSE.
    pub nmse_cascaded: f64,
    /// Mean over users of the NMSE of the separated far-field channel.
    pub nmse_separated: f64,
}

/// LS estimation NMSE versus pilot SNR at a fixed element count.
///
/// Each trial draws one realization (seeded as scenario `chanest`) that is
/// reused at every SNR; pilot noise for SNR index `i` comes from stream
/// `i + 1` of the trial seed. Pilot power is set per user so that
/// `P_p‖c_k‖²/σ²` equals the target SNR.
pub fn chanest_nmse_sweep(cfg: &SweepConfig, snr_db: &[f64], num_elements: usize) -> Result<Vec<NmseRecord>> {
    if snr_db.is_empty() {
        return Err(Error::InvalidInput("empty SNR list".into()));
    }
    if let Some(s) = snr_db.iter().find(|s| !s.is_finite()) {
        return Err(Error::InvalidInput(format!("SNR must be finite, got {s}")));
    }
    let per_trial: Vec<Vec<NmseRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<NmseRecord>> {
            let (system, seed, real) = trial_realization(cfg, Scenario::Chanest, num_elements, trial)?;
            let mut rows = Vec::with_capacity(snr_db.len());
            for (i, &snr) in snr_db.iter().enumerate() {
                let mut rng = SimRng::seed_from_u64(seed);
                rng.set_stream(i as u64 + 1);
                let (mut cas, mut sep) = (0.0, 0.0);
                for c in &real.cascaded.c {
                    let pp = pilot_power_for_snr(c, system.noise_power, 10f64.powf(snr / 10.0));
                    let sched = PilotSchedule::dft(num_elements, pp)?;
                    let y = simulate_pilot_rx(c, &sched, system.noise_power, &mut rng)?;
                    let est = ls_cascaded_estimate(&y, &sched)?;
                    let h_hat = separate_channels(&est, &real.near)?;
                    let h_true: Vec<_> = c.iter().zip(&real.near.g).map(|(a, g)| a / g).collect();
                    cas += nmse(&est.c_hat, c);
                    sep += nmse(&h_hat, &h_true);
                }
                let k = real.cascaded.c.len() as f64;
                rows.push(NmseRecord { snr_db: snr, trial, nmse_cascaded: cas / k, nmse_separated: sep / k });
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let mut records: Vec<NmseRecord> = per_trial.into_iter().flatten().collect();
    records.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db).then(a.trial.cmp(&b.trial)));
    Ok(records)
}

pub fn write_nmse_csv<W: Write>(records: &[NmseRecord], out: &mut W) -> Result<()> {
    writeln!(out, "{NMSE_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{:e},{:e}", r.snr_db, r.trial, r.nmse_cascaded, r.nmse_separated)?;
    }
    Ok(())
}
