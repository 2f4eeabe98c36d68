//! System configuration, UPA geometry, transmissive coefficients and the
//! far/near field split.
//!
//! Units are SI throughout: distances and wavelength in meters, powers in
//! watts, the Rice factor as a linear power ratio. Decibel conversions only
//! happen at the config-file boundary (see [`crate::harness::config`]).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance used when checking that a complex entry fits in the unit disk.
const AMPLITUDE_SLACK: f64 = 1e-12;

/// Physical and algorithmic parameters of one RMS system instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub num_users: usize,
    /// Number of RMS elements, a perfect square.
    pub num_elements: usize,
    /// Element pitch in wavelengths.
    pub element_spacing: f64,
    pub wavelength: f64,
    /// Distance from the feed (or receiving) antenna to the RMS center.
    pub feed_distance: f64,
    pub user_distance_min: f64,
    pub user_distance_max: f64,
    /// Linear Rice factor.
    pub rice_factor: f64,
    pub noise_power: f64,
    pub dl_total_power: f64,
    pub ul_user_power: f64,
    pub num_subcarriers: usize,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            num_users: 4,
            num_elements: 25,
            element_spacing: 0.5,
            wavelength: 0.04,
            feed_distance: 0.1,
            user_distance_min: 20.0,
            user_distance_max: 50.0,
            rice_factor: db_to_linear(3.0),
            noise_power: dbm_to_watts(-90.0),
            dl_total_power: dbm_to_watts(30.0),
            ul_user_power: dbm_to_watts(20.0),
            num_subcarriers: 16,
            seed: 0,
        }
    }
}

impl SystemConfig {
    /// Checks every invariant, including the far-field placement of users and
    /// the near-field placement of the feed.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.num_users == 0 {
            return bad("num_users must be at least 1".into());
        }
        if self.num_subcarriers == 0 {
            return bad("num_subcarriers must be at least 1".into());
        }
        side_length(self.num_elements)?;
        for (name, v) in [
            ("wavelength", self.wavelength),
            ("element_spacing", self.element_spacing),
            ("noise_power", self.noise_power),
            ("dl_total_power", self.dl_total_power),
            ("ul_user_power", self.ul_user_power),
            ("feed_distance", self.feed_distance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.rice_factor >= 0.0 && self.rice_factor.is_finite()) {
            return bad(format!("rice_factor must be >= 0, got {}", self.rice_factor));
        }
        if !(self.user_distance_min > 0.0 && self.user_distance_max >= self.user_distance_min) {
            return bad(format!(
                "user distance range [{}, {}] is empty or non-positive",
                self.user_distance_min, self.user_distance_max
            ));
        }
        let rayleigh = rayleigh_distance(self.aperture()?, self.wavelength)?;
        if self.user_distance_min <= rayleigh {
            return bad(format!(
                "user_distance_min {} m is inside the Rayleigh distance {rayleigh} m",
                self.user_distance_min
            ));
        }
        if self.feed_distance >= rayleigh {
            return bad(format!(
                "feed_distance {} m is not inside the Rayleigh distance {rayleigh} m (M = {})",
                self.feed_distance, self.num_elements
            ));
        }
        Ok(())
    }

    /// Copy of this config with a different element count, validated.
    pub fn with_elements(&self, num_elements: usize) -> Result<Self> {
        let cfg = Self { num_elements, ..self.clone() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn geometry(&self) -> Result<UpaGeometry> {
        upa_positions(self.num_elements, self.element_spacing, self.wavelength)
    }

    pub fn aperture(&self) -> Result<f64> {
        let side = side_length(self.num_elements)?;
        Ok(diagonal_aperture(side, self.element_spacing * self.wavelength))
    }

    pub fn rayleigh_distance(&self) -> Result<f64> {
        rayleigh_distance(self.aperture()?, self.wavelength)
    }

    /// Feed sits on the array normal, on the opposite side from the users.
    pub fn feed_position(&self) -> [f64; 3] {
        [0.0, 0.0, -self.feed_distance]
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Per-element complex transmissive coefficient `β·e^{jθ}` with `β ∈ [0, 1]`
/// and `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissiveCoefficient {
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
}

impl TransmissiveCoefficient {
    pub fn from_polar(amplitudes: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != phases.len() {
            return Err(Error::DimensionMismatch {
                expected: amplitudes.len(),
                actual: phases.len(),
            });
        }
        if let Some(&b) = amplitudes.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return Err(Error::InvalidInput(format!("amplitude {b} outside [0, 1]")));
        }
        let phases = phases.into_iter().map(wrap_phase).collect();
        Ok(Self { amplitudes, phases })
    }

    /// Builds a coefficient from complex entries. Entries with modulus above 1
    /// (beyond rounding slack) are rejected.
    pub fn from_complex(entries: &[Complex64]) -> Result<Self> {
        let mut amplitudes = Vec::with_capacity(entries.len());
        let mut phases = Vec::with_capacity(entries.len());
        for z in entries {
            let (r, th) = z.to_polar();
            if r > 1.0 + AMPLITUDE_SLACK || !r.is_finite() {
                return Err(Error::AmplitudeViolation(r));
            }
            amplitudes.push(r.min(1.0));
            phases.push(if r == 0.0 { 0.0 } else { wrap_phase(th) });
        }
        Ok(Self { amplitudes, phases })
    }

    /// Unit-amplitude coefficient with the given phases.
    pub fn unit_phases(phases: &[f64]) -> Self {
        Self {
            amplitudes: vec![1.0; phases.len()],
            phases: phases.iter().copied().map(wrap_phase).collect(),
        }
    }

    pub fn ones(len: usize) -> Self {
        Self { amplitudes: vec![1.0; len], phases: vec![0.0; len] }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn entry(&self, m: usize) -> Complex64 {
        Complex64::from_polar(self.amplitudes[m], self.phases[m])
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        (0..self.len()).map(|m| self.entry(m)).collect()
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Square UPA on the `z = 0` plane, centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct UpaGeometry {
    pub side: usize,
    pub pitch: f64,
    /// Element positions, row-major over (y, x).
    pub positions: Vec<[f64; 3]>,
    /// Diagonal extent of the grid.
    pub aperture: f64,
}

impl UpaGeometry {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRegion {
    FarField,
    NearField,
}

/// `2D²/λ`.
pub fn rayleigh_distance(aperture: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength > 0.0) {
        return Err(Error::InvalidConfig(format!("wavelength must be positive, got {wavelength}")));
    }
    if !(aperture >= 0.0) {
        return Err(Error::InvalidConfig(format!("aperture must be >= 0, got {aperture}")));
    }
    Ok(2.0 * aperture * aperture / wavelength)
}

/// Far field strictly beyond the Rayleigh distance; the boundary itself is
/// near field.
pub fn classify_field(distance: f64, aperture: f64, wavelength: f64) -> Result<FieldRegion> {
    if !(distance > 0.0) {
        return Err(Error::InvalidInput(format!("distance must be positive, got {distance}")));
    }
    let boundary = rayleigh_distance(aperture, wavelength)?;
    Ok(if distance > boundary { FieldRegion::FarField } else { FieldRegion::NearField })
}

pub fn upa_positions(num_elements: usize, spacing: f64, wavelength: f64) -> Result<UpaGeometry> {
    let side = side_length(num_elements)?;
    if !(spacing > 0.0 && wavelength > 0.0) {
        return Err(Error::InvalidConfig("spacing and wavelength must be positive".into()));
    }
    let pitch = spacing * wavelength;
    let center = (side as f64 - 1.0) / 2.0;
    let positions = (0..side)
        .flat_map(|iy| {
            (0..side).map(move |ix| [(ix as f64 - center) * pitch, (iy as f64 - center) * pitch, 0.0])
        })
        .collect();
    Ok(UpaGeometry { side, pitch, positions, aperture: diagonal_aperture(side, pitch) })
}

fn diagonal_aperture(side: usize, pitch: f64) -> f64 {
    std::f64::consts::SQRT_2 * (side as f64 - 1.0) * pitch
}

fn side_length(num_elements: usize) -> Result<usize> {
    let side = (num_elements as f64).sqrt().round() as usize;
    if num_elements == 0 || side * side != num_elements {
        return Err(Error::InvalidConfig(format!(
            "num_elements must be a positive perfect square, got {num_elements}"
        )));
    }
    Ok(side)
}

/// Unit vector for (azimuth, elevation). Azimuth rotates the array normal
/// (+z) toward +x, elevation tilts it toward +y; `(0, 0)` is broadside.
pub fn direction(azimuth: f64, elevation: f64) -> [f64; 3] {
    [
        elevation.cos() * azimuth.sin(),
        elevation.sin(),
        elevation.cos() * azimuth.cos(),
    ]
}
