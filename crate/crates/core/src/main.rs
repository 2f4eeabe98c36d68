use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;

use rms_core::channel::{sample_realization, write_dump};
use rms_core::harness::{self, Scenario, SweepConfig};
use rms_core::solver::OptimOptions;
use rms_core::sysmodel::TransmissiveCoefficient;
use rms_core::timemod::{modulation_schedule, parse_bits, write_schedule, Scheme};
use rms_core::{Error, Result, SimRng};

#[derive(Parser)]
#[command(name = "rms-sim", version, about = "Transmissive RMS transceiver simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `trials` from the config.
    #[arg(long)]
    trials: Option<usize>,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Downlink sum-rate versus M for proposed, ea, zf and ra.
    DlSweep(SweepArgs),
    /// Uplink sum-rate versus M for proposed, three_stage, random_coefficient and random_allocation.
    UlSweep(SweepArgs),
    /// LS channel-estimation NMSE versus pilot SNR.
    ChanestNmse {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated pilot SNRs in dB.
        #[arg(long, allow_hyphen_values = true)]
        snr_db: String,
        #[arg(long, default_value_t = 25)]
        elements: usize,
    },
    /// Gating schedule for a bit string.
    Modulate {
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        bits: String,
        #[arg(long)]
        out: PathBuf,
        /// Number of elements sharing the symbol, each with a unit beamformer entry.
        #[arg(long, default_value_t = 1)]
        elements: usize,
    },
    /// Text dump of one channel realization.
    DumpChannel {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 25)]
        elements: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?))
}

fn load(path: &Path, trials: Option<usize>, seed: Option<u64>) -> Result<SweepConfig> {
    let mut cfg = harness::read_config(path).map_err(|e| match e {
        Error::Io(io) => Error::Io(std::io::Error::new(io.kind(), format!("{}: {io}", path.display()))),
        other => other,
    })?;
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse().map_err(|_| Error::InvalidInput(format!("invalid SNR value {v:?}"))))
        .collect()
}

fn sweep(args: &SweepArgs, scenario: Scenario) -> Result<()> {
    let cfg = load(&args.config, args.trials, args.seed)?;
    let records = harness::run_sweep(&cfg, scenario, &OptimOptions::default())?;
    let mut out = create(&args.out)?;
    harness::write_sweep_csv(&records, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::DlSweep(args) => sweep(&args, Scenario::Dl),
        Command::UlSweep(args) => sweep(&args, Scenario::Ul),
        Command::ChanestNmse { config, out, snr_db, elements } => {
            let cfg = load(&config, None, None)?;
            let snr_db = parse_list(&snr_db)?;
            let records = harness::chanest_nmse_sweep(&cfg, &snr_db, elements)?;
            let mut w = create(&out)?;
            harness::write_nmse_csv(&records, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::Modulate { scheme, bits, out, elements } => {
            let scheme: Scheme = scheme.parse()?;
            let bits = parse_bits(&bits)?;
            if elements == 0 {
                return Err(Error::InvalidInput("elements must be at least 1".into()));
            }
            let rows = modulation_schedule(scheme, &bits, &TransmissiveCoefficient::ones(elements))?;
            let mut w = create(&out)?;
            write_schedule(&rows, &mut w)?;
            w.flush()?;
            Ok(())
        }
        Command::DumpChannel { config, out, elements, seed } => {
            let cfg = load(&config, None, None)?;
            let system = cfg.system.with_elements(elements)?;
            let real = sample_realization(&system, &mut SimRng::seed_from_u64(seed))?;
            let mut w = create(&out)?;
            write_dump(&real, &mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rms-sim: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
