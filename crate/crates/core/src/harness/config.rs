use std::path::Path;

use crate::error::{Error, Result};
use crate::sysmodel::{db_to_linear, dbm_to_watts, SystemConfig};

/// Keys accepted in a sweep config file.
pub const CONFIG_KEYS: [&str; 14] = [
    "users",
    "elements_sweep",
    "spacing_wavelengths",
    "wavelength_m",
    "feed_distance_m",
    "user_distance_min_m",
    "user_distance_max_m",
    "rice_factor_db",
    "noise_power_dbm",
    "dl_total_power_dbm",
    "ul_user_power_dbm",
    "subcarriers",
    "trials",
    "master_seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Physical parameters; `num_elements` is overridden per sweep point.
    pub system: SystemConfig,
    pub elements_sweep: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { system: SystemConfig::default(), elements_sweep: vec![9, 16, 25, 36, 49], trials: 100, master_seed: 0 }
    }
}

impl SweepConfig {
    /// Validates the system for every element count in the sweep.
    pub fn validate(&self) -> Result<()> {
        if self.elements_sweep.is_empty() {
            return Err(Error::InvalidConfig("elements_sweep is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        for &m in &self.elements_sweep {
            self.system.with_elements(m)?;
        }
        Ok(())
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::InvalidConfig(format!("cannot parse value {value:?} for key {key}")))
}

/// Parses flat `key = value` text. `#` starts a comment; blank lines are
/// ignored; missing keys keep their defaults; unknown keys are errors.
pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut cfg = SweepConfig::default();
    let sys = &mut cfg.system;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1)));
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "users" => sys.num_users = parse_num(key, value)?,
            "elements_sweep" => {
                cfg.elements_sweep = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?
            }
            "spacing_wavelengths" => sys.element_spacing = parse_num(key, value)?,
            "wavelength_m" => sys.wavelength = parse_num(key, value)?,
            "feed_distance_m" => sys.feed_distance = parse_num(key, value)?,
            "user_distance_min_m" => sys.user_distance_min = parse_num(key, value)?,
            "user_distance_max_m" => sys.user_distance_max = parse_num(key, value)?,
            "rice_factor_db" => sys.rice_factor = db_to_linear(parse_num(key, value)?),
            "noise_power_dbm" => sys.noise_power = dbm_to_watts(parse_num(key, value)?),
            "dl_total_power_dbm" => sys.dl_total_power = dbm_to_watts(parse_num(key, value)?),
            "ul_user_power_dbm" => sys.ul_user_power = dbm_to_watts(parse_num(key, value)?),
            "subcarriers" => sys.num_subcarriers = parse_num(key, value)?,
            "trials" => cfg.trials = parse_num(key, value)?,
            "master_seed" => cfg.master_seed = parse_num(key, value)?,
            other => return Err(Error::UnknownConfigKey(other.to_string())),
        }
    }
    sys.seed = cfg.master_seed;
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<SweepConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
