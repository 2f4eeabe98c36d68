//! Downlink multi-user SDMA sum-rate maximization.
//!
//! The feed illuminates the RMS, which forms one beam per user. User `k`
//! sees `ĥ_kᵀ w_j` from beam `j`, where `ĥ_k = √PL_k · (g ⊙ h_k)` is the
//! feed→RMS→user channel. The per-element passive constraint is relaxed to
//! unit-norm beamformers `‖w_k‖ = 1` plus a total power budget `Σ p_k ≤ P`.
//!
//! The proposed method alternates two monotone steps:
//!
//! - powers for fixed beams: the sum-rate is `Σ_k log(T_k(p)) − log(I_k(p))`
//!   with `T_k`, `I_k` affine in `p`. Each SCA round linearizes the
//!   subtracted concave term and maximizes the resulting concave minorant
//!   over the budget simplex by projected gradient;
//! - beams for fixed powers: at the current point the linearized surrogate
//!   has the same gradient as the true sum-rate, so each round takes that
//!   gradient step on the product of unit spheres and only accepts it if the
//!   true sum-rate improves, halving the step otherwise.
//!
//! All internal arithmetic is in natural-log units; reported rates are in
//! bits/s/Hz.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{cscg, ChannelRealization};
use crate::error::{Error, Result};
pub use crate::solver::OptimOptions;
use crate::solver::{project_capped_simplex, random_simplex};

pub type Beamformers = Vec<Vec<Complex64>>;

/// End-to-end channel rows `ĥ_k`, one per user.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveDlChannel {
    rows: Vec<Vec<Complex64>>,
}

impl EffectiveDlChannel {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || m == 0 {
            return Err(Error::InvalidInput("effective channel must be non-empty".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, actual: r.len() });
        }
        Ok(Self { rows })
    }

    /// The effective channel is exactly the cascaded channel of the draw.
    pub fn from_realization(real: &ChannelRealization) -> Self {
        Self { rows: real.cascaded.c.clone() }
    }

    pub fn num_users(&self) -> usize {
        self.rows.len()
    }

    pub fn num_elements(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    /// `ĥ_kᵀ w` (no conjugation).
    pub fn response(&self, k: usize, w: &[Complex64]) -> Complex64 {
        self.rows[k].iter().zip(w).map(|(h, x)| h * x).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlProblem {
    pub channel: EffectiveDlChannel,
    pub total_power: f64,
    pub noise_power: f64,
}

impl DlProblem {
    pub fn new(channel: EffectiveDlChannel, total_power: f64, noise_power: f64) -> Result<Self> {
        if !(total_power > 0.0) {
            return Err(Error::InvalidInput(format!("total power must be positive, got {total_power}")));
        }
        if !(noise_power > 0.0) {
            return Err(Error::InvalidInput(format!("noise power must be positive, got {noise_power}")));
        }
        Ok(Self { channel, total_power, noise_power })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DlSolution {
    pub beamformers: Beamformers,
    pub powers: Vec<f64>,
    pub rates: Vec<f64>,
    pub sum_rate: f64,
    /// Sum-rate after initialization and after every AO round.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl DlSolution {
    fn evaluate(problem: &DlProblem, beamformers: Beamformers, powers: Vec<f64>) -> Result<Self> {
        let rates = user_rates(&beamformers, &powers, &problem.channel, problem.noise_power)?;
        let sum_rate = rates.iter().sum();
        Ok(Self {
            beamformers,
            powers,
            rates,
            sum_rate,
            objective_trace: vec![sum_rate],
            iterations: 0,
            converged: true,
        })
    }
}

fn check_shapes(w: &Beamformers, p: &[f64], heff: &EffectiveDlChannel, noise_power: f64) -> Result<()> {
    if !(noise_power > 0.0) {
        return Err(Error::InvalidInput(format!("noise power must be positive, got {noise_power}")));
    }
    let k = heff.num_users();
    if w.len() != k {
        return Err(Error::DimensionMismatch { expected: k, actual: w.len() });
    }
    if p.len() != k {
        return Err(Error::DimensionMismatch { expected: k, actual: p.len() });
    }
    if let Some(col) = w.iter().find(|c| c.len() != heff.num_elements()) {
        return Err(Error::DimensionMismatch { expected: heff.num_elements(), actual: col.len() });
    }
    Ok(())
}

/// `a[k][j] = |ĥ_kᵀ w_j|²`.
pub fn gain_matrix(w: &Beamformers, heff: &EffectiveDlChannel) -> Vec<Vec<f64>> {
    (0..heff.num_users())
        .map(|k| w.iter().map(|wj| heff.response(k, wj).norm_sqr()).collect())
        .collect()
}

pub fn sinr(k: usize, w: &Beamformers, p: &[f64], heff: &EffectiveDlChannel, noise_power: f64) -> Result<f64> {
    check_shapes(w, p, heff, noise_power)?;
    if k >= heff.num_users() {
        return Err(Error::InvalidInput(format!("user index {k} out of range")));
    }
    let mut interference = 0.0;
    let mut signal = 0.0;
    for (j, wj) in w.iter().enumerate() {
        let g = p[j] * heff.response(k, wj).norm_sqr();
        if j == k {
            signal = g;
        } else {
            interference += g;
        }
    }
    Ok(signal / (interference + noise_power))
}

pub fn user_rates(w: &Beamformers, p: &[f64], heff: &EffectiveDlChannel, noise_power: f64) -> Result<Vec<f64>> {
    (0..heff.num_users())
        .map(|k| sinr(k, w, p, heff, noise_power).map(|s| (1.0 + s).log2()))
        .collect()
}

/// `Σ_k log₂(1 + SINR_k)`.
pub fn sum_rate(w: &Beamformers, p: &[f64], heff: &EffectiveDlChannel, noise_power: f64) -> Result<f64> {
    Ok(user_rates(w, p, heff, noise_power)?.iter().sum())
}

/// Sum-rate in nats from a precomputed SNR-scaled gain matrix `b[k][j]`
/// and powers `q`.
fn nat_rate(b: &[Vec<f64>], q: &[f64]) -> f64 {
    b.iter()
        .enumerate()
        .map(|(k, row)| {
            let total: f64 = 1.0 + row.iter().zip(q).map(|(a, x)| a * x).sum::<f64>();
            let interf = total - row[k] * q[k];
            total.ln() - interf.ln()
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub powers: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// SCA power allocation for fixed beamformers, started from `init`.
pub fn optimize_power_sca(
    w: &Beamformers,
    heff: &EffectiveDlChannel,
    total_power: f64,
    noise_power: f64,
    init: &[f64],
    opts: &OptimOptions,
) -> Result<PowerResult> {
    check_shapes(w, init, heff, noise_power)?;
    if !(total_power > 0.0) {
        return Err(Error::InvalidInput(format!("total power must be positive, got {total_power}")));
    }
    let k = heff.num_users();
    let scale = total_power / noise_power;
    let b: Vec<Vec<f64>> = gain_matrix(w, heff)
        .into_iter()
        .map(|row| row.into_iter().map(|a| a * scale).collect())
        .collect();
    let mut q = project_capped_simplex(&init.iter().map(|p| p / total_power).collect::<Vec<_>>());
    let mut value = nat_rate(&b, &q);
    let mut converged = false;
    let mut rounds = 0;
    while rounds < opts.max_outer {
        rounds += 1;
        // linearize Σ_k ln I_k at q
        let interf_at: Vec<f64> = (0..k)
            .map(|i| 1.0 + (0..k).filter(|&j| j != i).map(|j| b[i][j] * q[j]).sum::<f64>())
            .collect();
        let lin_grad: Vec<f64> = (0..k)
            .map(|j| (0..k).filter(|&i| i != j).map(|i| b[i][j] / interf_at[i]).sum())
            .collect();
        let surrogate = |x: &[f64]| -> f64 {
            let s: f64 = b.iter().map(|row| (1.0 + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>()).ln()).sum();
            s - x.iter().zip(&lin_grad).map(|(v, g)| v * g).sum::<f64>()
        };
        let grad = |x: &[f64]| -> Vec<f64> {
            let totals: Vec<f64> = b
                .iter()
                .map(|row| 1.0 + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>())
                .collect();
            (0..k)
                .map(|j| (0..k).map(|i| b[i][j] / totals[i]).sum::<f64>() - lin_grad[j])
                .collect()
        };
        let x = maximize_on_simplex(&q, surrogate, grad, opts.max_inner);
        let next_value = nat_rate(&b, &x);
        if next_value <= value {
            converged = true;
            break;
        }
        let gain = next_value - value;
        q = x;
        value = next_value;
        if gain <= opts.tol * value.abs() {
            converged = true;
            break;
        }
    }
    Ok(PowerResult { powers: q.iter().map(|x| x * total_power).collect(), iterations: rounds, converged })
}

/// Projected gradient ascent with Armijo backtracking on `{x ≥ 0, Σx ≤ 1}`.
fn maximize_on_simplex(
    start: &[f64],
    f: impl Fn(&[f64]) -> f64,
    grad: impl Fn(&[f64]) -> Vec<f64>,
    max_iter: usize,
) -> Vec<f64> {
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut step = f64::NAN;
    for _ in 0..max_iter {
        let g = grad(&x);
        let gmax = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if gmax == 0.0 {
            break;
        }
        if !step.is_finite() {
            step = 1.0 / gmax;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let y = project_capped_simplex(&x.iter().zip(&g).map(|(a, d)| a + step * d).collect::<Vec<_>>());
            let dir: f64 = y.iter().zip(&x).zip(&g).map(|((a, b), d)| (a - b) * d).sum();
            if dir <= 0.0 {
                // projected step is stationary
                return x;
            }
            let fy = f(&y);
            if fy >= fx + 1e-4 * dir {
                let moved = y.iter().zip(&x).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
                let improvement = fy - fx;
                x = y;
                fx = fy;
                step *= 2.0;
                accepted = true;
                if moved < 1e-13 || improvement <= 1e-15 * fx.abs() {
                    return x;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    x
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamResult {
    pub beamformers: Beamformers,
    pub iterations: usize,
    pub converged: bool,
}

/// Sum-rate (nats) and its Wirtinger gradient with respect to each `w_j*`.
fn rate_and_gradient(
    w: &Beamformers,
    snr_weights: &[f64],
    heff: &EffectiveDlChannel,
) -> (f64, Vec<Vec<Complex64>>) {
    let k = heff.num_users();
    let z: Vec<Vec<Complex64>> = (0..k).map(|i| w.iter().map(|wj| heff.response(i, wj)).collect()).collect();
    let mut value = 0.0;
    let mut coef = vec![vec![0.0; k]; k];
    for i in 0..k {
        let total: f64 = 1.0 + (0..k).map(|j| snr_weights[j] * z[i][j].norm_sqr()).sum::<f64>();
        let interf = total - snr_weights[i] * z[i][i].norm_sqr();
        value += total.ln() - interf.ln();
        for j in 0..k {
            coef[i][j] = snr_weights[j] * (1.0 / total - if i == j { 0.0 } else { 1.0 / interf });
        }
    }
    let m = heff.num_elements();
    let grads = (0..k)
        .map(|j| {
            let mut g = vec![Complex64::new(0.0, 0.0); m];
            for i in 0..k {
                let s = z[i][j] * coef[i][j];
                for (gm, h) in g.iter_mut().zip(&heff.rows[i]) {
                    *gm += h.conj() * s;
                }
            }
            g
        })
        .collect();
    (value, grads)
}

fn nat_rate_beams(w: &Beamformers, snr_weights: &[f64], heff: &EffectiveDlChannel) -> f64 {
    let k = heff.num_users();
    (0..k)
        .map(|i| {
            let a: Vec<f64> = w.iter().map(|wj| heff.response(i, wj).norm_sqr()).collect();
            let total: f64 = 1.0 + a.iter().zip(snr_weights).map(|(x, s)| x * s).sum::<f64>();
            let interf = total - a[i] * snr_weights[i];
            total.ln() - interf.ln()
        })
        .sum()
}

fn normalize(v: &mut [Complex64]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

/// Beamformer ascent for fixed powers, started from `init`.
pub fn optimize_beamformers_sca(
    p: &[f64],
    heff: &EffectiveDlChannel,
    noise_power: f64,
    init: &Beamformers,
    opts: &OptimOptions,
) -> Result<BeamResult> {
    check_shapes(init, p, heff, noise_power)?;
    let snr_weights: Vec<f64> = p.iter().map(|x| x / noise_power).collect();
    let mut w = init.clone();
    w.iter_mut().for_each(|c| normalize(c));
    let mut step = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    let (mut value, mut grads) = rate_and_gradient(&w, &snr_weights, heff);
    while iterations < opts.max_inner {
        iterations += 1;
        // tangent component of the gradient on each sphere
        for (g, wj) in grads.iter_mut().zip(&w) {
            let radial: f64 = g.iter().zip(wj).map(|(a, b)| (b.conj() * a).re).sum();
            g.iter_mut().zip(wj).for_each(|(a, b)| *a -= b * radial);
        }
        let gnorm = grads.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if gnorm <= 1e-14 * value.abs().max(1.0) {
            converged = true;
            break;
        }
        if !step.is_finite() {
            step = 0.5 / gnorm;
        }
        step = step.min(1.0 / gnorm);
        let mut accepted = None;
        while step * gnorm > 1e-12 {
            let mut cand = w.clone();
            for (c, g) in cand.iter_mut().zip(&grads) {
                c.iter_mut().zip(g).for_each(|(x, d)| *x += d * step);
                normalize(c);
            }
            let v = nat_rate_beams(&cand, &snr_weights, heff);
            if v > value {
                accepted = Some((cand, v));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, v)) = accepted else {
            converged = true;
            break;
        };
        let improvement = v - value;
        w = cand;
        step *= 2.0;
        (value, grads) = rate_and_gradient(&w, &snr_weights, heff);
        if improvement <= opts.inner_tol * value.abs() {
            converged = true;
            break;
        }
    }
    Ok(BeamResult { beamformers: w, iterations, converged })
}

/// Per-user matched filters `conj(ĥ_k)/‖ĥ_k‖`.
pub fn matched_beamformers(heff: &EffectiveDlChannel) -> Beamformers {
    heff.rows
        .iter()
        .map(|row| {
            let mut w: Vec<Complex64> = row.iter().map(|h| h.conj()).collect();
            normalize(&mut w);
            w
        })
        .collect()
}

/// Columns of the right pseudo-inverse `Hᴴ(HHᴴ)⁻¹`, normalized.
pub fn zf_beamformers(heff: &EffectiveDlChannel) -> Result<Beamformers> {
    let (k, m) = (heff.num_users(), heff.num_elements());
    if k > m {
        return Err(Error::DegenerateChannel(format!("{k} users exceed {m} elements")));
    }
    let h = DMatrix::from_fn(k, m, |i, j| heff.rows[i][j]);
    let sv = h.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smax > 0.0) || smin <= 1e-10 * smax {
        return Err(Error::DegenerateChannel("effective channel is rank deficient".into()));
    }
    let hh = h.adjoint();
    let gram_inv = (&h * &hh)
        .try_inverse()
        .ok_or_else(|| Error::DegenerateChannel("Gram matrix is singular".into()))?;
    let pinv = hh * gram_inv;
    Ok((0..k)
        .map(|j| {
            let mut w: Vec<Complex64> = pinv.column(j).iter().copied().collect();
            normalize(&mut w);
            w
        })
        .collect())
}

pub fn equal_allocation(total_power: f64, num_users: usize) -> Vec<f64> {
    vec![total_power / num_users as f64; num_users]
}

/// Isotropic unit-norm beamformers and simplex-uniform powers summing to
/// `total_power`.
pub fn random_solution_dl<R: Rng + ?Sized>(
    rng: &mut R,
    total_power: f64,
    num_users: usize,
    num_elements: usize,
) -> (Beamformers, Vec<f64>) {
    let w = (0..num_users)
        .map(|_| {
            let mut v: Vec<Complex64> = (0..num_elements).map(|_| cscg(rng)).collect();
            normalize(&mut v);
            v
        })
        .collect();
    (w, random_simplex(rng, num_users, total_power))
}

/// AO from a given starting point; beams are updated first in each round.
pub fn alternating_optimize_dl_from(
    problem: &DlProblem,
    init_beams: Beamformers,
    init_powers: Vec<f64>,
    opts: &OptimOptions,
) -> Result<DlSolution> {
    let heff = &problem.channel;
    let sigma2 = problem.noise_power;
    let mut w = init_beams;
    let mut p = init_powers;
    let mut current = sum_rate(&w, &p, heff, sigma2)?;
    let mut trace = vec![current];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_outer {
        iterations += 1;
        let beams = optimize_beamformers_sca(&p, heff, sigma2, &w, opts)?;
        let candidate = sum_rate(&beams.beamformers, &p, heff, sigma2)?;
        if candidate >= current {
            w = beams.beamformers;
        }
        let powers = optimize_power_sca(&w, heff, problem.total_power, sigma2, &p, opts)?;
        let next_p = powers.powers;
        let next = sum_rate(&w, &next_p, heff, sigma2)?;
        if next >= sum_rate(&w, &p, heff, sigma2)? {
            p = next_p;
        }
        let value = sum_rate(&w, &p, heff, sigma2)?;
        let improvement = value - current;
        current = value.max(current);
        trace.push(current);
        if improvement <= opts.tol * current.abs() {
            converged = true;
            break;
        }
    }
    let mut sol = DlSolution::evaluate(problem, w, p)?;
    sol.objective_trace = trace;
    sol.iterations = iterations;
    sol.converged = converged;
    Ok(sol)
}

/// The proposed AO method.
///
/// Runs from matched-filter beams with equal powers and, when the channel
/// admits it, also from zero-forcing beams with equal powers; the better
/// result is returned.
pub fn alternating_optimize_dl(problem: &DlProblem, opts: &OptimOptions) -> Result<DlSolution> {
    let k = problem.channel.num_users();
    let ea = equal_allocation(problem.total_power, k);
    let mut best = alternating_optimize_dl_from(problem, matched_beamformers(&problem.channel), ea.clone(), opts)?;
    if let Ok(zf) = zf_beamformers(&problem.channel) {
        let alt = alternating_optimize_dl_from(problem, zf, ea, opts)?;
        if alt.sum_rate > best.sum_rate {
            best = alt;
        }
    }
    Ok(best)
}

/// Equal powers with beamformers optimized from matched filters.
pub fn ea_baseline(problem: &DlProblem, opts: &OptimOptions) -> Result<DlSolution> {
    let k = problem.channel.num_users();
    let p = equal_allocation(problem.total_power, k);
    let beams = optimize_beamformers_sca(
        &p,
        &problem.channel,
        problem.noise_power,
        &matched_beamformers(&problem.channel),
        opts,
    )?;
    let mut sol = DlSolution::evaluate(problem, beams.beamformers, p)?;
    sol.iterations = beams.iterations;
    sol.converged = beams.converged;
    Ok(sol)
}

/// Zero-forcing beams with equal powers.
pub fn zf_baseline(problem: &DlProblem) -> Result<DlSolution> {
    let k = problem.channel.num_users();
    DlSolution::evaluate(problem, zf_beamformers(&problem.channel)?, equal_allocation(problem.total_power, k))
}

pub fn ra_baseline<R: Rng + ?Sized>(problem: &DlProblem, rng: &mut R) -> Result<DlSolution> {
    let (w, p) = random_solution_dl(
        rng,
        problem.total_power,
        problem.channel.num_users(),
        problem.channel.num_elements(),
    );
    DlSolution::evaluate(problem, w, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SimRng;
    use approx::assert_relative_eq;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_heff(rng: &mut SimRng, k: usize, m: usize) -> EffectiveDlChannel {
        EffectiveDlChannel::from_rows((0..k).map(|_| (0..m).map(|_| cscg(rng)).collect()).collect()).unwrap()
    }

    fn tight() -> OptimOptions {
        OptimOptions { tol: 1e-12, inner_tol: 1e-14, max_outer: 500, max_inner: 2000 }
    }

    #[test]
    fn single_user_sinr_has_no_interference() {
        let heff = EffectiveDlChannel::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 2.0)]]).unwrap();
        let w = vec![vec![c(0.6, 0.0), c(0.0, -0.8)]];
        // ĥᵀw = 0.6 + 1.6 = 2.2
        let s = sinr(0, &w, &[3.0], &heff, 0.5).unwrap();
        assert_relative_eq!(s, 3.0 * 2.2 * 2.2 / 0.5, epsilon = 1e-12);
        assert!(sinr(0, &w, &[3.0], &heff, 0.0).is_err());
    }

    #[test]
    fn two_user_hand_instance() {
        // ĥ_1 = [1, 0], ĥ_2 = [0, 1], w_1 = [0.8, 0.6], w_2 = [0.6, -0.8]
        let heff = EffectiveDlChannel::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        let w = vec![vec![c(0.8, 0.0), c(0.6, 0.0)], vec![c(0.6, 0.0), c(-0.8, 0.0)]];
        let p = [2.0, 1.0];
        let s1 = sinr(0, &w, &p, &heff, 0.1).unwrap();
        let s2 = sinr(1, &w, &p, &heff, 0.1).unwrap();
        assert_relative_eq!(s1, 2.0 * 0.64 / (1.0 * 0.36 + 0.1), epsilon = 1e-12);
        assert_relative_eq!(s2, 1.0 * 0.64 / (2.0 * 0.36 + 0.1), epsilon = 1e-12);
        let r = sum_rate(&w, &p, &heff, 0.1).unwrap();
        let expected = (1.0f64 + 1.28 / 0.46).log2() + (1.0f64 + 0.64 / 0.82).log2();
        assert_relative_eq!(r, expected, epsilon = 1e-12);
    }

    #[test]
    fn sum_rate_trivial_values() {
        let mut rng = SimRng::seed_from_u64(1);
        let heff = random_heff(&mut rng, 3, 4);
        let w = matched_beamformers(&heff);
        assert_eq!(sum_rate(&w, &[0.0; 3], &heff, 1.0).unwrap(), 0.0);

        let heff = EffectiveDlChannel::from_rows(vec![vec![c(1.0, 0.0)]]).unwrap();
        let r = sum_rate(&vec![vec![c(1.0, 0.0)]], &[1.0], &heff, 1.0).unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn scale_covariance() {
        let mut rng = SimRng::seed_from_u64(2);
        let heff = random_heff(&mut rng, 4, 9);
        let (w, p) = random_solution_dl(&mut rng, 3.0, 4, 9);
        let a = sum_rate(&w, &p, &heff, 0.2).unwrap();
        let scaled: Vec<f64> = p.iter().map(|x| x * 7.5).collect();
        let b = sum_rate(&w, &scaled, &heff, 0.2 * 7.5).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn power_single_user_takes_everything() {
        let mut rng = SimRng::seed_from_u64(3);
        let heff = random_heff(&mut rng, 1, 4);
        let w = matched_beamformers(&heff);
        let r = optimize_power_sca(&w, &heff, 2.5, 0.1, &[0.3], &OptimOptions::default()).unwrap();
        assert_relative_eq!(r.powers[0], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn power_symmetric_split() {
        let heff = EffectiveDlChannel::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
            .unwrap();
        let w = matched_beamformers(&heff);
        let r = optimize_power_sca(&w, &heff, 2.0, 0.3, &[1.7, 0.3], &tight()).unwrap();
        assert!((r.powers[0] - 1.0).abs() < 1e-6, "{:?}", r.powers);
        assert!((r.powers[1] - 1.0).abs() < 1e-6, "{:?}", r.powers);
        // grid oracle agrees that the split is optimal
        let rate = |x: f64| sum_rate(&w, &[x, 2.0 - x], &heff, 0.3).unwrap();
        let best = (0..=1000).map(|i| 2.0 * i as f64 / 1000.0).max_by(|a, b| rate(*a).total_cmp(&rate(*b))).unwrap();
        assert_relative_eq!(best, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn power_matches_grid_on_asymmetric_instance() {
        let mut rng = SimRng::seed_from_u64(4);
        let heff = random_heff(&mut rng, 2, 3);
        let (w, _) = random_solution_dl(&mut rng, 1.0, 2, 3);
        let total = 10.0;
        let sigma2 = 0.05;
        let r = optimize_power_sca(&w, &heff, total, sigma2, &equal_allocation(total, 2), &tight()).unwrap();
        let got = sum_rate(&w, &r.powers, &heff, sigma2).unwrap();
        // the optimum lies on Σp = P or at an interior point; grid the triangle
        let n = 1000;
        let mut best: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=(n - i) {
                let p = [total * i as f64 / n as f64, total * j as f64 / n as f64];
                best = best.max(sum_rate(&w, &p, &heff, sigma2).unwrap());
            }
        }
        assert!(got >= best * (1.0 - 1e-3), "{got} vs grid {best}");
    }

    #[test]
    fn single_user_beam_reaches_mrt_optimum() {
        let mut rng = SimRng::seed_from_u64(5);
        let heff = random_heff(&mut rng, 1, 9);
        let (w0, _) = random_solution_dl(&mut rng, 1.0, 1, 9);
        let p = [2.0];
        let sigma2 = 0.5;
        let r = optimize_beamformers_sca(&p, &heff, sigma2, &w0, &tight()).unwrap();
        let norm2: f64 = heff.rows()[0].iter().map(|z| z.norm_sqr()).sum();
        let optimum = (1.0 + p[0] * norm2 / sigma2).log2();
        let got = sum_rate(&r.beamformers, &p, &heff, sigma2).unwrap();
        assert!((got - optimum).abs() < 1e-6 * optimum, "{got} vs {optimum}");
        let mrt = matched_beamformers(&heff);
        let inner: Complex64 = mrt[0].iter().zip(&r.beamformers[0]).map(|(a, b)| a.conj() * b).sum();
        assert!((inner.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn orthogonal_rows_zf_and_sca_agree() {
        let heff = EffectiveDlChannel::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap();
        let p = [1.0, 1.0];
        let zf = zf_beamformers(&heff).unwrap();
        let sca = optimize_beamformers_sca(&p, &heff, 0.1, &matched_beamformers(&heff), &tight()).unwrap();
        let a = sum_rate(&zf, &p, &heff, 0.1).unwrap();
        let b = sum_rate(&sca.beamformers, &p, &heff, 0.1).unwrap();
        assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn zf_nulls_interference() {
        let mut rng = SimRng::seed_from_u64(6);
        let heff = random_heff(&mut rng, 2, 4);
        let w = zf_beamformers(&heff).unwrap();
        for (k, wk) in w.iter().enumerate() {
            assert_relative_eq!(wk.iter().map(|z| z.norm_sqr()).sum::<f64>(), 1.0, epsilon = 1e-12);
            for j in 0..2 {
                if j != k {
                    assert!(heff.response(j, wk).norm() < 1e-9);
                }
            }
        }
        let p = [1.0, 2.0];
        for k in 0..2 {
            let s = sinr(k, &w, &p, &heff, 0.3).unwrap();
            assert_relative_eq!(s, p[k] * heff.response(k, &w[k]).norm_sqr() / 0.3, max_relative = 1e-9);
        }

        let one = random_heff(&mut rng, 1, 4);
        let zf1 = zf_beamformers(&one).unwrap();
        let mrt = matched_beamformers(&one);
        let inner: Complex64 = mrt[0].iter().zip(&zf1[0]).map(|(a, b)| a.conj() * b).sum();
        assert_relative_eq!(inner.norm(), 1.0, epsilon = 1e-12);

        let wide = random_heff(&mut rng, 3, 2);
        assert!(matches!(zf_beamformers(&wide), Err(Error::DegenerateChannel(_))));
        let row: Vec<Complex64> = (0..3).map(|_| cscg(&mut rng)).collect();
        let dup = EffectiveDlChannel::from_rows(vec![row.clone(), row]).unwrap();
        assert!(matches!(zf_beamformers(&dup), Err(Error::DegenerateChannel(_))));
    }

    #[test]
    fn equal_allocation_values() {
        assert_eq!(equal_allocation(4.0, 4), vec![1.0; 4]);
        assert_eq!(equal_allocation(2.5, 1), vec![2.5]);
        assert_relative_eq!(equal_allocation(1.0, 3).iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn random_solution_invariants_and_determinism() {
        let (w, p) = random_solution_dl(&mut SimRng::seed_from_u64(7), 2.0, 4, 9);
        for wk in &w {
            assert_relative_eq!(wk.iter().map(|z| z.norm_sqr()).sum::<f64>(), 1.0, epsilon = 1e-12);
        }
        assert!(p.iter().all(|&x| x >= 0.0));
        assert!(p.iter().sum::<f64>() <= 2.0 + 1e-9);
        let again = random_solution_dl(&mut SimRng::seed_from_u64(7), 2.0, 4, 9);
        assert_eq!((w, p), again);
    }

    #[test]
    fn ao_fixed_point_terminates_fast() {
        let mut rng = SimRng::seed_from_u64(8);
        let heff = random_heff(&mut rng, 1, 9);
        let problem = DlProblem::new(heff, 1.0, 0.1).unwrap();
        let sol = alternating_optimize_dl(&problem, &OptimOptions::default()).unwrap();
        assert!(sol.iterations <= 2, "{}", sol.iterations);
        assert!(sol.converged);
    }

    #[test]
    fn ao_solution_invariants() {
        let mut rng = SimRng::seed_from_u64(9);
        let heff = random_heff(&mut rng, 4, 16);
        let problem = DlProblem::new(heff, 1.0, 0.01).unwrap();
        let sol = alternating_optimize_dl(&problem, &OptimOptions::default()).unwrap();
        for wk in &sol.beamformers {
            assert!((wk.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert!(sol.powers.iter().all(|&p| p >= 0.0));
        assert!(sol.powers.iter().sum::<f64>() <= 1.0 + 1e-9);
        assert!(sol.objective_trace.windows(2).all(|w| w[1] >= w[0]));
        assert_relative_eq!(sol.sum_rate, *sol.objective_trace.last().unwrap(), max_relative = 1e-12);
        let ea = ea_baseline(&problem, &OptimOptions::default()).unwrap();
        let zf = zf_baseline(&problem).unwrap();
        let ra = ra_baseline(&problem, &mut rng).unwrap();
        assert!(sol.sum_rate >= ea.sum_rate && sol.sum_rate >= zf.sum_rate && sol.sum_rate >= ra.sum_rate);
    }
}
