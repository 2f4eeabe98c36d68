//! Least-squares estimation of the uplink cascaded channel through a passive
//! RMS, and separation of the far-field part using the known near-field
//! channel.
//!
//! During pilot slot `t` the surface applies row `t` of the pattern matrix
//! `F`, so the receiver sees `y_t = √P_p · f_tᵀ c + n_t`. Stacking `M` slots
//! gives `y = √P_p · F c + n` and the LS estimate `ĉ = F⁻¹ y / √P_p`.
//!
//! Pilot SNR is defined as `ρ = P_p ‖c‖² / σ²`. With DFT patterns the LS
//! error has covariance `σ²/(M P_p) · I`, so the expected NMSE is `1/ρ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{cscg, NearFieldChannel};
use crate::error::{Error, Result};

/// Relative pivot size below which a pattern matrix counts as singular.
const SINGULAR_PIVOT: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct PilotSchedule {
    pattern: DMatrix<Complex64>,
    inverse: DMatrix<Complex64>,
    pilot_power: f64,
}

impl PilotSchedule {
    /// Pattern rows are the per-slot transmissive coefficients, so every
    /// entry must fit in the unit disk.
    pub fn new(pattern: DMatrix<Complex64>, pilot_power: f64) -> Result<Self> {
        if !pattern.is_square() {
            return Err(Error::DimensionMismatch { expected: pattern.nrows(), actual: pattern.ncols() });
        }
        if !(pilot_power > 0.0) {
            return Err(Error::InvalidInput(format!("pilot power must be positive, got {pilot_power}")));
        }
        if let Some(z) = pattern.iter().find(|z| z.norm() > 1.0 + 1e-12) {
            return Err(Error::AmplitudeViolation(z.norm()));
        }
        let lu = pattern.clone().lu();
        let u = lu.u();
        let pivots: Vec<f64> = u.diagonal().iter().map(|z| z.norm()).collect();
        let largest = pivots.iter().copied().fold(0.0, f64::max);
        if pivots.iter().any(|&p| p <= SINGULAR_PIVOT * largest) || largest == 0.0 {
            return Err(Error::SingularPattern);
        }
        let inverse = lu.try_inverse().ok_or(Error::SingularPattern)?;
        Ok(Self { pattern, inverse, pilot_power })
    }

    /// `M × M` DFT pattern `F[t, m] = exp(-j2π t m / M)`.
    pub fn dft(num_elements: usize, pilot_power: f64) -> Result<Self> {
        let n = num_elements;
        let pattern = DMatrix::from_fn(n, n, |t, m| {
            Complex64::from_polar(1.0, -2.0 * PI * ((t * m) % n) as f64 / n as f64)
        });
        Self::new(pattern, pilot_power)
    }

    pub fn num_slots(&self) -> usize {
        self.pattern.nrows()
    }

    pub fn pattern(&self) -> &DMatrix<Complex64> {
        &self.pattern
    }

    pub fn pilot_power(&self) -> f64 {
        self.pilot_power
    }

    /// Same patterns at a different pilot power.
    pub fn with_pilot_power(&self, pilot_power: f64) -> Result<Self> {
        if !(pilot_power > 0.0) {
            return Err(Error::InvalidInput(format!("pilot power must be positive, got {pilot_power}")));
        }
        Ok(Self { pilot_power, ..self.clone() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CascadedEstimate {
    pub c_hat: Vec<Complex64>,
    /// Filled in by [`CascadedEstimate::with_truth`].
    pub nmse: Option<f64>,
}

impl CascadedEstimate {
    pub fn with_truth(mut self, truth: &[Complex64]) -> Self {
        self.nmse = Some(nmse(&self.c_hat, truth));
        self
    }
}

/// `‖estimate − truth‖² / ‖truth‖²`.
pub fn nmse(estimate: &[Complex64], truth: &[Complex64]) -> f64 {
    let err: f64 = estimate.iter().zip(truth).map(|(a, b)| (a - b).norm_sqr()).sum();
    let energy: f64 = truth.iter().map(|z| z.norm_sqr()).sum();
    err / energy
}

pub fn simulate_pilot_rx<R: Rng + ?Sized>(
    c: &[Complex64],
    sched: &PilotSchedule,
    noise_power: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if c.len() != sched.pattern.ncols() {
        return Err(Error::DimensionMismatch { expected: sched.pattern.ncols(), actual: c.len() });
    }
    let amp = sched.pilot_power.sqrt();
    let sigma = noise_power.sqrt();
    let clean = &sched.pattern * DVector::from_column_slice(c);
    Ok(clean
        .iter()
        .map(|z| {
            let noise = if noise_power > 0.0 { cscg(rng) * sigma } else { Complex64::new(0.0, 0.0) };
            z * amp + noise
        })
        .collect())
}

pub fn ls_cascaded_estimate(y: &[Complex64], sched: &PilotSchedule) -> Result<CascadedEstimate> {
    if y.len() != sched.num_slots() {
        return Err(Error::DimensionMismatch { expected: sched.num_slots(), actual: y.len() });
    }
    let c_hat = (&sched.inverse * DVector::from_column_slice(y)) / Complex64::new(sched.pilot_power.sqrt(), 0.0);
    Ok(CascadedEstimate { c_hat: c_hat.iter().copied().collect(), nmse: None })
}

/// `ĥ_m = ĉ_m / g_m`.
pub fn separate_channels(est: &CascadedEstimate, near: &NearFieldChannel) -> Result<Vec<Complex64>> {
    if est.c_hat.len() != near.g.len() {
        return Err(Error::DimensionMismatch { expected: near.g.len(), actual: est.c_hat.len() });
    }
    est.c_hat
        .iter()
        .zip(&near.g)
        .enumerate()
        .map(|(m, (c, g))| if g.norm() > 0.0 { Ok(c / g) } else { Err(Error::NonSeparable(m)) })
        .collect()
}

/// Pilot power that puts user `c` at pilot SNR `snr` (linear).
pub fn pilot_power_for_snr(c: &[Complex64], noise_power: f64, snr: f64) -> f64 {
    let energy: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    snr * noise_power / energy
}
