//! Time-sequence modulation of RMS elements.
//!
//! An element toggles between its 0 and π states once per period `T`. The
//! baseband control waveform is `+1` in the 0-state and `-1` during the
//! conduction interval `[t_on, t_on + τ)` (taken mod `T`). Its first
//! harmonic carries the payload symbol: `τ` sets the amplitude and `t_on`
//! the phase, independently.

use std::f64::consts::{FRAC_2_PI, PI};
use std::io::Write;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sysmodel::TransmissiveCoefficient;

/// Largest first-harmonic amplitude a ±1 waveform can carry.
pub const MAX_HARMONIC_AMPLITUDE: f64 = FRAC_2_PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatingWaveform {
    t_on: f64,
    tau: f64,
    period: f64,
}

impl GatingWaveform {
    pub fn new(t_on: f64, tau: f64, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        if !(0.0..period).contains(&t_on) {
            return Err(Error::InvalidInput(format!("t_on {t_on} outside [0, {period})")));
        }
        if !(0.0..=period).contains(&tau) {
            return Err(Error::InvalidInput(format!("tau {tau} outside [0, {period}]")));
        }
        Ok(Self { t_on, tau, period })
    }

    pub fn t_on(&self) -> f64 {
        self.t_on
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Waveform value at time `t`; the conduction interval wraps around `T`.
    pub fn sample(&self, t: f64) -> f64 {
        let offset = (t - self.t_on).rem_euclid(self.period);
        if offset < self.tau {
            -1.0
        } else {
            1.0
        }
    }
}

/// Closed-form `l`-th Fourier coefficient of the gating waveform.
pub fn harmonic_coefficient(w: &GatingWaveform, l: u32) -> Complex64 {
    let duty = w.tau / w.period;
    if l == 0 {
        return Complex64::new(1.0 - 2.0 * duty, 0.0);
    }
    let lf = l as f64;
    let amp = -(2.0 / (PI * lf)) * (PI * lf * duty).sin();
    Complex64::from_polar(1.0, -PI * lf * (2.0 * w.t_on + w.tau) / w.period) * amp
}

/// Inverts [`harmonic_coefficient`] at `l = 1`.
pub fn design_gating(target: Complex64, period: f64) -> Result<GatingWaveform> {
    let r = target.norm();
    if r > MAX_HARMONIC_AMPLITUDE * (1.0 + 1e-15) {
        return Err(Error::UnreachableAmplitude(r));
    }
    if r == 0.0 {
        return GatingWaveform::new(0.0, 0.0, period);
    }
    let tau = (period / PI) * (PI * r / 2.0).min(1.0).asin();
    // arg(target) = π - π(2 t_on + τ)/T  (mod 2π)
    let t_on = (0.5 * period * (1.0 - tau / period - target.arg() / PI)).rem_euclid(period);
    let t_on = if t_on >= period { 0.0 } else { t_on };
    GatingWaveform::new(t_on, tau, period)
}

/// Independent check of [`harmonic_coefficient`]: samples the waveform on a
/// uniform grid and reads bin `l` of its DFT.
pub fn fft_oracle(w: &GatingWaveform, l: u32, samples: usize) -> Result<Complex64> {
    let required = 4 * (l as usize + 1);
    if samples < required || !samples.is_power_of_two() {
        return Err(Error::InsufficientSamples { required, got: samples });
    }
    let dt = w.period / samples as f64;
    let mut buf: Vec<Complex64> =
        (0..samples).map(|i| Complex64::new(w.sample(i as f64 * dt), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(samples).process(&mut buf);
    Ok(buf[l as usize] / samples as f64)
}

/// Phase sequence for a 1-bit (BPSK) or 2-bit (Gray-coded QPSK) surface.
pub fn static_phase_modulate(bits: &[bool], depth: u8) -> Result<Vec<f64>> {
    match depth {
        1 => Ok(bits.iter().map(|&b| if b { PI } else { 0.0 }).collect()),
        2 => {
            if !bits.len().is_multiple_of(2) {
                return Err(Error::InvalidInput(format!(
                    "bit count {} is not a multiple of 2",
                    bits.len()
                )));
            }
            Ok(bits
                .chunks_exact(2)
                .map(|pair| match (pair[0], pair[1]) {
                    (false, false) => 0.0,
                    (false, true) => PI / 2.0,
                    (true, true) => PI,
                    (true, false) => 1.5 * PI,
                })
                .collect())
        }
        d => Err(Error::InvalidInput(format!("static phase depth must be 1 or 2, got {d}"))),
    }
}

/// Elementwise product of a beamformer with a payload symbol.
pub fn compose_coefficient(
    beamformer: &TransmissiveCoefficient,
    symbol: Complex64,
) -> Result<TransmissiveCoefficient> {
    let s = symbol.norm();
    if s > 1.0 {
        return Err(Error::AmplitudeViolation(s));
    }
    let amplitudes = beamformer.amplitudes().iter().map(|b| (b * s).min(1.0)).collect();
    let phases = beamformer.phases().iter().map(|t| t + symbol.arg()).collect();
    TransmissiveCoefficient::from_polar(amplitudes, phases)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Bpsk,
    Qpsk,
    Qam16,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Self::Bpsk),
            "qpsk" => Ok(Self::Qpsk),
            "qam16" | "16qam" => Ok(Self::Qam16),
            other => Err(Error::InvalidInput(format!("unknown scheme `{other}`"))),
        }
    }
}

impl Scheme {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Self::Bpsk => 1,
            Self::Qpsk => 2,
            Self::Qam16 => 4,
        }
    }

    /// Maps one symbol's bits to its constellation point. The outermost ring
    /// sits at the reachable maximum `2/π`.
    pub fn map(self, bits: &[bool]) -> Complex64 {
        debug_assert_eq!(bits.len(), self.bits_per_symbol());
        match self {
            Self::Bpsk => Complex64::new(if bits[0] { -FRAC_2_PI } else { FRAC_2_PI }, 0.0),
            Self::Qpsk => {
                let a = FRAC_2_PI * std::f64::consts::FRAC_1_SQRT_2;
                Complex64::new(if bits[0] { -a } else { a }, if bits[1] { -a } else { a })
            }
            Self::Qam16 => {
                let scale = FRAC_2_PI / (3.0 * std::f64::consts::SQRT_2);
                Complex64::new(gray_level(bits[0], bits[1]), gray_level(bits[2], bits[3])) * scale
            }
        }
    }

    /// Every point of the alphabet, in bit-pattern order.
    pub fn alphabet(self) -> Vec<Complex64> {
        let n = self.bits_per_symbol();
        (0..1usize << n)
            .map(|v| {
                let bits: Vec<bool> = (0..n).rev().map(|i| v >> i & 1 == 1).collect();
                self.map(&bits)
            })
            .collect()
    }

    pub fn modulate(self, bits: &[bool]) -> Result<Vec<Complex64>> {
        let n = self.bits_per_symbol();
        if !bits.len().is_multiple_of(n) {
            return Err(Error::InvalidInput(format!(
                "bit count {} is not a multiple of {n}",
                bits.len()
            )));
        }
        Ok(bits.chunks_exact(n).map(|c| self.map(c)).collect())
    }
}

// Gray-coded PAM-4 level: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
fn gray_level(b0: bool, b1: bool) -> f64 {
    match (b0, b1) {
        (false, false) => -3.0,
        (false, true) => -1.0,
        (true, true) => 1.0,
        (true, false) => 3.0,
    }
}

/// Parses a string of `0`/`1`, ignoring whitespace and `_`.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidInput(format!("invalid bit character `{other}`"))),
        })
        .collect()
}

/// One element's gating parameters for one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleRow {
    pub element: usize,
    pub symbol_index: usize,
    pub t_on_frac: f64,
    pub tau_frac: f64,
    /// First-harmonic coefficient the waveform actually produces.
    pub realized: Complex64,
}

/// Gating schedule for a bit stream on every element of `beamformer`.
pub fn modulation_schedule(
    scheme: Scheme,
    bits: &[bool],
    beamformer: &TransmissiveCoefficient,
) -> Result<Vec<ScheduleRow>> {
    let symbols = scheme.modulate(bits)?;
    let mut rows = Vec::with_capacity(symbols.len() * beamformer.len());
    for (symbol_index, &s) in symbols.iter().enumerate() {
        let coef = compose_coefficient(beamformer, s)?;
        for element in 0..coef.len() {
            let w = design_gating(coef.entry(element), 1.0)?;
            rows.push(ScheduleRow {
                element,
                symbol_index,
                t_on_frac: w.t_on(),
                tau_frac: w.tau(),
                realized: harmonic_coefficient(&w, 1),
            });
        }
    }
    Ok(rows)
}

pub const SCHEDULE_HEADER: &str = "element,symbol_index,t_on_frac,tau_frac,re,im";

pub fn write_schedule<W: Write>(rows: &[ScheduleRow], out: &mut W) -> Result<()> {
    writeln!(out, "{SCHEDULE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.element, r.symbol_index, r.t_on_frac, r.tau_frac, r.realized.re, r.realized.im
        )?;
    }
    Ok(())
}
