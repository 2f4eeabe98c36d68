//! Far-field Rician RMS-user channels, the near-field spherical-wave RMS-feed
//! channel, and their cascade.
//!
//! Draw order for one realization (so trials replay exactly from a seed):
//! for each user `k` in order, distance `U[d_min, d_max]`, azimuth
//! `U[-π/2, π/2)`, elevation `U[-π/4, π/4)`; then the NLoS matrix row-major
//! over `(k, m)`, each entry as a standard-normal real part followed by a
//! standard-normal imaginary part, both scaled by `1/√2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sysmodel::{direction, SystemConfig, UpaGeometry};

/// Far-field part of one channel draw.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldChannel {
    /// Small-scale fading, one row of length `M` per user.
    pub h: Vec<Vec<Complex64>>,
    /// Unit-modulus LoS steering rows the Rician mix was built from.
    pub h_los: Vec<Vec<Complex64>>,
    /// Linear free-space power gain per user.
    pub path_loss: Vec<f64>,
    /// (azimuth, elevation) per user, radians.
    pub user_angles: Vec<(f64, f64)>,
    pub user_distances: Vec<f64>,
}

impl FarFieldChannel {
    pub fn num_users(&self) -> usize {
        self.h.len()
    }

    pub fn num_elements(&self) -> usize {
        self.h.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearFieldChannel {
    pub g: Vec<Complex64>,
    pub feed_position: [f64; 3],
}

/// Per-user cascaded vectors `c_k = g ⊙ h_k · √path_loss_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedChannel {
    pub c: Vec<Vec<Complex64>>,
}

/// Everything drawn for one Monte Carlo trial. Uplink and downlink share it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub far: FarFieldChannel,
    pub near: NearFieldChannel,
    pub cascaded: CascadedChannel,
}

/// UPA steering vector `a_m = exp(j·2π/λ·⟨p_m, u(az, el)⟩)`.
pub fn steering_vector_upa(
    azimuth: f64,
    elevation: f64,
    geom: &UpaGeometry,
    wavelength: f64,
) -> Vec<Complex64> {
    let u = direction(azimuth, elevation);
    let k = 2.0 * PI / wavelength;
    geom.positions
        .iter()
        .map(|p| Complex64::from_polar(1.0, k * (p[0] * u[0] + p[1] * u[1] + p[2] * u[2])))
        .collect()
}

/// Friis free-space power gain `(λ / 4πd)²`.
pub fn free_space_gain(distance: f64, wavelength: f64) -> f64 {
    let a = wavelength / (4.0 * PI * distance);
    a * a
}

/// Circularly symmetric complex Gaussian sample with unit variance.
pub fn cscg<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Rician draw for users at fixed angles and distances.
pub fn sample_far_channel<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    angles: &[(f64, f64)],
    distances: &[f64],
    rng: &mut R,
) -> Result<FarFieldChannel> {
    if angles.len() != distances.len() {
        return Err(Error::DimensionMismatch { expected: angles.len(), actual: distances.len() });
    }
    let geom = cfg.geometry()?;
    let kappa = cfg.rice_factor;
    let (los_w, nlos_w) = if kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        ((kappa / (1.0 + kappa)).sqrt(), (1.0 / (1.0 + kappa)).sqrt())
    };
    let h_los: Vec<Vec<Complex64>> = angles
        .iter()
        .map(|&(az, el)| steering_vector_upa(az, el, &geom, cfg.wavelength))
        .collect();
    let h = h_los
        .iter()
        .map(|row| row.iter().map(|&a| a * los_w + cscg(rng) * nlos_w).collect())
        .collect();
    let path_loss = distances.iter().map(|&d| free_space_gain(d, cfg.wavelength)).collect();
    Ok(FarFieldChannel {
        h,
        h_los,
        path_loss,
        user_angles: angles.to_vec(),
        user_distances: distances.to_vec(),
    })
}

/// Spherical-wave LoS channel `g_m = λ/(4π r_m) · exp(-j2π r_m/λ)` using the
/// exact element-to-feed distance.
pub fn near_field_channel(
    geom: &UpaGeometry,
    feed_position: [f64; 3],
    wavelength: f64,
) -> Result<NearFieldChannel> {
    let mut g = Vec::with_capacity(geom.len());
    for (m, p) in geom.positions.iter().enumerate() {
        let r = ((p[0] - feed_position[0]).powi(2)
            + (p[1] - feed_position[1]).powi(2)
            + (p[2] - feed_position[2]).powi(2))
        .sqrt();
        if r == 0.0 {
            return Err(Error::SingularGeometry(m));
        }
        g.push(Complex64::from_polar(wavelength / (4.0 * PI * r), -2.0 * PI * r / wavelength));
    }
    Ok(NearFieldChannel { g, feed_position })
}

pub fn cascaded_channel(near: &NearFieldChannel, far: &FarFieldChannel) -> Result<CascadedChannel> {
    let m = near.g.len();
    let c = far
        .h
        .iter()
        .zip(&far.path_loss)
        .map(|(row, &pl)| {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, actual: row.len() });
            }
            let amp = pl.sqrt();
            Ok(row.iter().zip(&near.g).map(|(h, g)| g * h * amp).collect())
        })
        .collect::<Result<_>>()?;
    Ok(CascadedChannel { c })
}

/// Draws user positions and a full realization in the documented order.
pub fn sample_realization<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    rng: &mut R,
) -> Result<ChannelRealization> {
    cfg.validate()?;
    let mut distances = Vec::with_capacity(cfg.num_users);
    let mut angles = Vec::with_capacity(cfg.num_users);
    for _ in 0..cfg.num_users {
        distances.push(rng.random_range(cfg.user_distance_min..=cfg.user_distance_max));
        let az = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        let el = rng.random_range(-FRAC_PI_4..FRAC_PI_4);
        angles.push((az, el));
    }
    let far = sample_far_channel(cfg, &angles, &distances, rng)?;
    let near = near_field_channel(&cfg.geometry()?, cfg.feed_position(), cfg.wavelength)?;
    let cascaded = cascaded_channel(&near, &far)?;
    Ok(ChannelRealization { far, near, cascaded })
}

/// Writes a realization as plain text, one entry per line, with 17
/// significant digits:
///
/// ```text
/// dims <K> <M>
/// pathloss <k> <value>
/// H <k> <m> <re> <im>
/// g <m> <re> <im>
/// ```
pub fn write_dump<W: Write>(real: &ChannelRealization, out: &mut W) -> Result<()> {
    writeln!(out, "dims {} {}", real.far.num_users(), real.near.g.len())?;
    for (k, pl) in real.far.path_loss.iter().enumerate() {
        writeln!(out, "pathloss {k} {pl:.16e}")?;
    }
    for (k, row) in real.far.h.iter().enumerate() {
        for (m, z) in row.iter().enumerate() {
            writeln!(out, "H {k} {m} {:.16e} {:.16e}", z.re, z.im)?;
        }
    }
    for (m, z) in real.near.g.iter().enumerate() {
        writeln!(out, "g {m} {:.16e} {:.16e}", z.re, z.im)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sysmodel::upa_positions;
    use crate::SimRng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn broadside_and_single_element() {
        let g = upa_positions(25, 0.5, 0.04).unwrap();
        for a in steering_vector_upa(0.0, 0.0, &g, 0.04) {
            assert_relative_eq!((a - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        }
        let g1 = upa_positions(1, 0.5, 0.04).unwrap();
        assert_eq!(steering_vector_upa(0.7, -0.3, &g1, 0.04), vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn endfire_two_by_two() {
        // x-coordinates are ±λ/4, so the phase is 2π/λ · (±λ/4) = ±π/2
        let g = upa_positions(4, 0.5, 0.04).unwrap();
        let a = steering_vector_upa(FRAC_PI_2, 0.0, &g, 0.04);
        for (p, z) in g.positions.iter().zip(&a) {
            let expected = if p[0] < 0.0 { -FRAC_PI_2 } else { FRAC_PI_2 };
            assert_relative_eq!(z.arg(), expected, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn steering_is_unit_modulus(az in -10.0f64..10.0, el in -10.0f64..10.0) {
            let g = upa_positions(16, 0.5, 0.04).unwrap();
            for z in steering_vector_upa(az, el, &g, 0.04) {
                prop_assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn near_field_single_element() {
        let lambda = 0.04;
        let g = upa_positions(1, 0.5, lambda).unwrap();
        let r = 0.1;
        let nf = near_field_channel(&g, [0.0, 0.0, -r], lambda).unwrap();
        let expected = Complex64::from_polar(lambda / (4.0 * PI * r), -2.0 * PI * r / lambda);
        assert_relative_eq!((nf.g[0] - expected).norm(), 0.0, epsilon = 1e-15);
        let nf2 = near_field_channel(&g, [0.0, 0.0, -2.0 * r], lambda).unwrap();
        assert_relative_eq!(nf2.g[0].norm(), nf.g[0].norm() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn near_field_corner_weaker_than_center() {
        let g = upa_positions(25, 0.5, 0.04).unwrap();
        let nf = near_field_channel(&g, [0.0, 0.0, -0.1], 0.04).unwrap();
        let center = nf.g[12].norm();
        for corner in [0, 4, 20, 24] {
            assert!(nf.g[corner].norm() < center);
        }
        let again = near_field_channel(&g, [0.0, 0.0, -0.1], 0.04).unwrap();
        assert_eq!(nf, again);
    }

    #[test]
    fn near_field_coincident_feed() {
        let g = upa_positions(1, 0.5, 0.04).unwrap();
        assert!(matches!(
            near_field_channel(&g, [0.0, 0.0, 0.0], 0.04),
            Err(Error::SingularGeometry(0))
        ));
    }

    fn far_with(h: Vec<Vec<Complex64>>, pl: Vec<f64>) -> FarFieldChannel {
        let k = h.len();
        FarFieldChannel {
            h_los: h.clone(),
            h,
            path_loss: pl,
            user_angles: vec![(0.0, 0.0); k],
            user_distances: vec![1.0; k],
        }
    }

    #[test]
    fn cascade_identity_and_zero() {
        let mut rng = SimRng::seed_from_u64(3);
        let h: Vec<Vec<Complex64>> = (0..2).map(|_| (0..3).map(|_| cscg(&mut rng)).collect()).collect();
        let far = far_with(h.clone(), vec![1.0, 1.0]);
        let ones = NearFieldChannel { g: vec![Complex64::new(1.0, 0.0); 3], feed_position: [0.0; 3] };
        assert_eq!(cascaded_channel(&ones, &far).unwrap().c, h);

        let mut g = ones.clone();
        g.g[1] = Complex64::new(0.0, 0.0);
        let c = cascaded_channel(&g, &far).unwrap();
        assert!(c.c.iter().all(|row| row[1] == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn cascade_matches_elementwise_oracle() {
        let mut rng = SimRng::seed_from_u64(9);
        let h: Vec<Vec<Complex64>> = vec![(0..3).map(|_| cscg(&mut rng)).collect()];
        let g: Vec<Complex64> = (0..3).map(|_| cscg(&mut rng)).collect();
        let far = far_with(h.clone(), vec![0.25]);
        let near = NearFieldChannel { g: g.clone(), feed_position: [0.0; 3] };
        let c = cascaded_channel(&near, &far).unwrap();
        for m in 0..3 {
            let expected = Complex64::new(
                0.5 * (g[m].re * h[0][m].re - g[m].im * h[0][m].im),
                0.5 * (g[m].re * h[0][m].im + g[m].im * h[0][m].re),
            );
            assert_relative_eq!((c.c[0][m] - expected).norm(), 0.0, epsilon = 1e-15);
        }
        let short = NearFieldChannel { g: g[..2].to_vec(), feed_position: [0.0; 3] };
        assert!(matches!(cascaded_channel(&short, &far), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rician_limits() {
        let base = SystemConfig { num_users: 1, num_elements: 9, ..Default::default() };
        let angles = [(0.3, -0.2)];
        let dist = [30.0];
        let mut rng = SimRng::seed_from_u64(11);

        let cfg = SystemConfig { rice_factor: 1e6, ..base.clone() };
        let mut sq = 0.0;
        let mut n = 0.0;
        for _ in 0..1000 {
            let far = sample_far_channel(&cfg, &angles, &dist, &mut rng).unwrap();
            for (h, a) in far.h[0].iter().zip(&far.h_los[0]) {
                sq += (h - a).norm_sqr();
                n += 1.0;
            }
        }
        assert!((sq / n).sqrt() < 1e-2);

        let cfg = SystemConfig { rice_factor: 0.0, ..base.clone() };
        let mut rng_a = SimRng::seed_from_u64(5);
        let mut rng_b = SimRng::seed_from_u64(5);
        let far = sample_far_channel(&cfg, &angles, &dist, &mut rng_a).unwrap();
        let nlos: Vec<Complex64> = (0..9).map(|_| cscg(&mut rng_b)).collect();
        assert_eq!(far.h[0], nlos);

        let cfg = SystemConfig { rice_factor: 1.0, ..base };
        let draws = 10_000;
        let mut samples = Vec::with_capacity(draws);
        for _ in 0..draws {
            samples.push(sample_far_channel(&cfg, &angles, &dist, &mut rng).unwrap().h[0][4]);
        }
        let mean = samples.iter().sum::<Complex64>() / draws as f64;
        let var = samples.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / (draws - 1) as f64;
        assert!((var - 0.5).abs() < 0.025, "variance {var}");
    }

    #[test]
    fn path_loss_is_friis() {
        assert_relative_eq!(free_space_gain(10.0, 0.04), (0.04 / (40.0 * PI)).powi(2), epsilon = 1e-20);
    }

    #[test]
    fn realization_is_seed_deterministic() {
        let cfg = SystemConfig::default();
        let a = sample_realization(&cfg, &mut SimRng::seed_from_u64(42)).unwrap();
        let b = sample_realization(&cfg, &mut SimRng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
        let c = sample_realization(&cfg, &mut SimRng::seed_from_u64(43)).unwrap();
        assert_ne!(a, c);
        for d in &a.far.user_distances {
            assert!((20.0..=50.0).contains(d));
        }
    }

    #[test]
    fn dump_format() {
        let cfg = SystemConfig { num_users: 2, num_elements: 9, ..Default::default() };
        let r = sample_realization(&cfg, &mut SimRng::seed_from_u64(1)).unwrap();
        let mut buf = Vec::new();
        write_dump(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "dims 2 9");
        assert_eq!(lines.len(), 1 + 2 + 18 + 9);
        // 17 significant digits round-trip exactly
        let first_h: Vec<&str> = lines[3].split_whitespace().collect();
        assert_eq!(first_h[0], "H");
        assert_eq!(first_h[3].parse::<f64>().unwrap(), r.far.h[0][0].re);
        assert_eq!(first_h[4].parse::<f64>().unwrap(), r.far.h[0][0].im);
    }
}
