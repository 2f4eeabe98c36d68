//! Uplink OFDMA sum-rate maximization through a transmissive RMS receiver.
//!
//! Users share `N` subcarriers exclusively. One transmissive coefficient `f`
//! is applied on all subcarriers, so user `k` sees the scalar power gain
//! `|fᵀ c_k|²` everywhere (frequency-flat). The proposed method alternates:
//!
//! 1. subcarrier assignment and power allocation for fixed `f` by Lagrangian
//!    dual decomposition over the per-user power budgets, with primal
//!    recovery (best feasible iterate, then single-subcarrier reassignment
//!    and swap moves, each re-solved by water-filling);
//! 2. projected gradient ascent on `f` for fixed assignment and powers,
//!    projecting each entry onto the unit disk.
//!
//! Each round keeps the incumbent when a step would not improve, so the
//! objective trace never decreases.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
pub use crate::solver::OptimOptions;
use crate::solver::random_simplex;
use crate::sysmodel::{SystemConfig, TransmissiveCoefficient};

#[derive(Debug, Clone, PartialEq)]
pub struct UlProblem {
    /// Cascaded channel `c_k` per user.
    pub cascaded: Vec<Vec<Complex64>>,
    pub num_subcarriers: usize,
    /// Per-user power budgets (watts).
    pub budgets: Vec<f64>,
    /// Noise power per subcarrier (watts).
    pub noise_power: f64,
}

impl UlProblem {
    pub fn new(
        cascaded: Vec<Vec<Complex64>>,
        num_subcarriers: usize,
        budgets: Vec<f64>,
        noise_power: f64,
    ) -> Result<Self> {
        if cascaded.is_empty() {
            return Err(Error::InvalidInput("at least one user is required".into()));
        }
        if budgets.len() != cascaded.len() {
            return Err(Error::DimensionMismatch { expected: cascaded.len(), actual: budgets.len() });
        }
        let m = cascaded[0].len();
        if let Some(c) = cascaded.iter().find(|c| c.len() != m) {
            return Err(Error::DimensionMismatch { expected: m, actual: c.len() });
        }
        if num_subcarriers == 0 {
            return Err(Error::InvalidInput("at least one subcarrier is required".into()));
        }
        if let Some(b) = budgets.iter().find(|b| !(**b > 0.0)) {
            return Err(Error::InvalidInput(format!("power budgets must be positive, got {b}")));
        }
        if !(noise_power > 0.0) {
            return Err(Error::InvalidInput(format!("noise power must be positive, got {noise_power}")));
        }
        Ok(Self { cascaded, num_subcarriers, budgets, noise_power })
    }

    pub fn from_realization(cfg: &SystemConfig, real: &ChannelRealization) -> Result<Self> {
        let k = real.cascaded.c.len();
        Self::new(real.cascaded.c.clone(), cfg.num_subcarriers, vec![cfg.ul_user_power; k], cfg.noise_power)
    }

    pub fn num_users(&self) -> usize {
        self.cascaded.len()
    }

    pub fn num_elements(&self) -> usize {
        self.cascaded[0].len()
    }

    /// Flat `K × N` gain matrix `|fᵀ c_k|²` for coefficient `f`.
    pub fn gain_matrix(&self, f: &TransmissiveCoefficient) -> Vec<Vec<f64>> {
        let fc = f.to_complex();
        self.cascaded
            .iter()
            .map(|c| vec![effective_gain_raw(&fc, c); self.num_subcarriers])
            .collect()
    }
}

/// Exclusive subcarrier ownership: `owner[n]` is the user holding `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    num_users: usize,
    owner: Vec<Option<usize>>,
}

impl Assignment {
    pub fn new(num_users: usize, owner: Vec<Option<usize>>) -> Result<Self> {
        if let Some(k) = owner.iter().flatten().find(|&&k| k >= num_users) {
            return Err(Error::InvalidInput(format!("owner {k} out of range for {num_users} users")));
        }
        Ok(Self { num_users, owner })
    }

    pub fn empty(num_users: usize, num_subcarriers: usize) -> Self {
        Self { num_users, owner: vec![None; num_subcarriers] }
    }

    pub fn owner(&self, n: usize) -> Option<usize> {
        self.owner[n]
    }

    pub fn owners(&self) -> &[Option<usize>] {
        &self.owner
    }

    /// `x_{k,n}`.
    pub fn is_assigned(&self, k: usize, n: usize) -> bool {
        self.owner[n] == Some(k)
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_subcarriers(&self) -> usize {
        self.owner.len()
    }

    pub fn subcarriers_of(&self, k: usize) -> Vec<usize> {
        (0..self.owner.len()).filter(|&n| self.owner[n] == Some(k)).collect()
    }

    /// Dense `K × N` 0/1 matrix.
    pub fn matrix(&self) -> Vec<Vec<u8>> {
        (0..self.num_users)
            .map(|k| self.owner.iter().map(|o| u8::from(*o == Some(k))).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UlSolution {
    pub assignment: Assignment,
    /// `K × N` powers, zero off the assignment.
    pub powers: Vec<Vec<f64>>,
    pub coefficient: TransmissiveCoefficient,
    pub sum_rate: f64,
    pub objective_trace: Vec<f64>,
    /// Final dual variables of each assignment step, per user.
    pub dual_trace: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
}

fn effective_gain_raw(f: &[Complex64], c: &[Complex64]) -> f64 {
    f.iter().zip(c).map(|(a, b)| a * b).sum::<Complex64>().norm_sqr()
}

/// `|fᵀ c_k|²`.
pub fn effective_gain(f: &TransmissiveCoefficient, c: &[Complex64]) -> Result<f64> {
    if f.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: f.len(), actual: c.len() });
    }
    Ok(effective_gain_raw(&f.to_complex(), c))
}

/// Exact water-filling `p_n = max(0, μ − σ²/g_n)` with `Σ p_n = budget`.
///
/// Subcarriers with non-positive gain get zero power.
pub fn waterfill_user(gains: &[f64], budget: f64, noise_power: f64) -> Vec<f64> {
    let mut floors: Vec<(usize, f64)> = gains
        .iter()
        .enumerate()
        .filter(|(_, g)| **g > 0.0)
        .map(|(n, g)| (n, noise_power / g))
        .collect();
    let mut p = vec![0.0; gains.len()];
    if floors.is_empty() || !(budget > 0.0) {
        return p;
    }
    floors.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut level = 0.0;
    let mut acc = 0.0;
    for (i, &(_, floor)) in floors.iter().enumerate() {
        let candidate = (budget + acc + floor) / (i + 1) as f64;
        if i > 0 && candidate <= floor {
            break;
        }
        acc += floor;
        level = candidate;
    }
    for &(n, floor) in &floors {
        p[n] = (level - floor).max(0.0);
    }
    // absorb rounding so the budget is met exactly
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        let s = budget / total;
        p.iter_mut().for_each(|x| *x *= s);
    }
    p
}

/// Rate in bits/s/Hz of one user on its subcarriers.
fn user_rate(gains: &[f64], powers: &[f64], noise_power: f64) -> f64 {
    gains.iter().zip(powers).map(|(g, p)| (1.0 + p * g / noise_power).log2()).sum()
}

/// Sum-rate of an assignment with per-(k, n) powers and gains.
pub fn assignment_rate(assignment: &Assignment, powers: &[Vec<f64>], gains: &[Vec<f64>], noise_power: f64) -> f64 {
    (0..assignment.num_subcarriers())
        .filter_map(|n| assignment.owner(n).map(|k| (1.0 + powers[k][n] * gains[k][n] / noise_power).log2()))
        .sum()
}

/// Water-fills every user over the subcarriers it owns. Returns the `K × N`
/// powers and the resulting sum-rate.
pub fn waterfill_assignment(
    assignment: &Assignment,
    gains: &[Vec<f64>],
    budgets: &[f64],
    noise_power: f64,
) -> (Vec<Vec<f64>>, f64) {
    let n_sc = assignment.num_subcarriers();
    let mut powers = vec![vec![0.0; n_sc]; assignment.num_users()];
    let mut total = 0.0;
    for (k, row) in powers.iter_mut().enumerate() {
        let subs = assignment.subcarriers_of(k);
        let g: Vec<f64> = subs.iter().map(|&n| gains[k][n]).collect();
        let p = waterfill_user(&g, budgets[k], noise_power);
        total += user_rate(&g, &p, noise_power);
        for (&n, x) in subs.iter().zip(p) {
            row[n] = x;
        }
    }
    (powers, total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualOptions {
    pub max_iter: usize,
    /// `a` in the diminishing step `a / (1 + t)`, applied to the normalized
    /// duals `λ_k P_k` and relative budget violations.
    pub step: f64,
    /// Relative budget violation counted as converged.
    pub tol: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self { max_iter: 200, step: 1.0, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualResult {
    pub assignment: Assignment,
    pub powers: Vec<Vec<f64>>,
    pub sum_rate: f64,
    /// Final `λ_k`.
    pub duals: Vec<f64>,
    pub iterations: usize,
    /// Whether the dual iterates met the budget tolerance.
    pub converged: bool,
}

/// Dual decomposition on an explicit `K × N` gain matrix.
pub fn dual_assign_and_power_gains(
    gains: &[Vec<f64>],
    budgets: &[f64],
    noise_power: f64,
    opts: &DualOptions,
) -> Result<DualResult> {
    let k_users = gains.len();
    if k_users == 0 || budgets.len() != k_users {
        return Err(Error::DimensionMismatch { expected: k_users, actual: budgets.len() });
    }
    let n_sc = gains[0].len();
    if let Some(row) = gains.iter().find(|r| r.len() != n_sc) {
        return Err(Error::DimensionMismatch { expected: n_sc, actual: row.len() });
    }
    // normalized duals ν_k = λ_k P_k, initialized at λ_k = K / P_k
    let mut nu = vec![k_users as f64; k_users];
    let nu_floor = 1e-9;
    let mut best: Option<(Assignment, Vec<Vec<f64>>, f64)> = None;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let lambda: Vec<f64> = nu.iter().zip(budgets).map(|(v, b)| v / b).collect();
        let mut owner = vec![None; n_sc];
        let mut usage = vec![0.0; k_users];
        for (n, slot) in owner.iter_mut().enumerate() {
            let mut winner = None;
            let mut best_value = f64::NEG_INFINITY;
            let mut winner_power = 0.0;
            for k in 0..k_users {
                let g = gains[k][n];
                let p = if g > 0.0 { (1.0 / (lambda[k] * LN_2) - noise_power / g).max(0.0) } else { 0.0 };
                let value = (1.0 + g * p / noise_power).log2() - lambda[k] * p;
                // strict comparison keeps the lowest index on ties
                if value > best_value {
                    best_value = value;
                    winner = Some(k);
                    winner_power = p;
                }
            }
            *slot = winner;
            if let Some(k) = winner {
                usage[k] += winner_power;
            }
        }
        iterations += 1;
        let assignment = Assignment { num_users: k_users, owner };
        let (powers, rate) = waterfill_assignment(&assignment, gains, budgets, noise_power);
        if best.as_ref().is_none_or(|b| rate > b.2) {
            best = Some((assignment, powers, rate));
        }
        let violation: Vec<f64> = usage.iter().zip(budgets).map(|(u, b)| (u - b) / b).collect();
        let satisfied = violation
            .iter()
            .zip(&nu)
            .all(|(v, n)| v.abs() < opts.tol || (*n <= nu_floor && *v <= 0.0));
        if satisfied {
            converged = true;
            break;
        }
        let alpha = opts.step / iterations as f64;
        for (n, v) in nu.iter_mut().zip(&violation) {
            *n = (*n + alpha * v).max(nu_floor);
        }
    }
    let (assignment, _, _) = best.expect("at least one dual iteration runs");
    let assignment = local_search(assignment, gains, budgets, noise_power);
    let (powers, sum_rate) = waterfill_assignment(&assignment, gains, budgets, noise_power);
    Ok(DualResult {
        assignment,
        powers,
        sum_rate,
        duals: nu.iter().zip(budgets).map(|(v, b)| v / b).collect(),
        iterations,
        converged,
    })
}

/// Improves an assignment by single-subcarrier moves and pairwise swaps,
/// re-water-filling the affected users, until no move helps.
fn local_search(mut assignment: Assignment, gains: &[Vec<f64>], budgets: &[f64], noise_power: f64) -> Assignment {
    let k_users = assignment.num_users;
    let n_sc = assignment.num_subcarriers();
    let user_value = |a: &Assignment, k: usize| -> f64 {
        let g: Vec<f64> = a.subcarriers_of(k).iter().map(|&n| gains[k][n]).collect();
        let p = waterfill_user(&g, budgets[k], noise_power);
        user_rate(&g, &p, noise_power)
    };
    let mut values: Vec<f64> = (0..k_users).map(|k| user_value(&assignment, k)).collect();
    // each accepted move strictly increases the sum-rate, so this terminates;
    // the cap only guards against floating-point cycling
    for _ in 0..(4 * n_sc * k_users + 16) {
        let mut improved = false;
        'moves: for n in 0..n_sc {
            for target in 0..k_users {
                let from = assignment.owner[n];
                if from == Some(target) {
                    continue;
                }
                let mut cand = assignment.clone();
                cand.owner[n] = Some(target);
                let target_value = user_value(&cand, target);
                let mut delta = target_value - values[target];
                let from_value = from.map(|f| user_value(&cand, f));
                if let (Some(f), Some(v)) = (from, from_value) {
                    delta += v - values[f];
                }
                if delta > 1e-12 {
                    values[target] = target_value;
                    if let (Some(f), Some(v)) = (from, from_value) {
                        values[f] = v;
                    }
                    assignment = cand;
                    improved = true;
                    break 'moves;
                }
            }
        }
        if !improved {
            'swaps: for a in 0..n_sc {
                for b in (a + 1)..n_sc {
                    let (Some(ka), Some(kb)) = (assignment.owner[a], assignment.owner[b]) else {
                        continue;
                    };
                    if ka == kb {
                        continue;
                    }
                    let mut cand = assignment.clone();
                    cand.owner.swap(a, b);
                    let va = user_value(&cand, ka);
                    let vb = user_value(&cand, kb);
                    if va + vb > values[ka] + values[kb] + 1e-12 {
                        values[ka] = va;
                        values[kb] = vb;
                        assignment = cand;
                        improved = true;
                        break 'swaps;
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
    assignment
}

/// Dual decomposition for the flat gains induced by `f`.
pub fn dual_assign_and_power(
    problem: &UlProblem,
    f: &TransmissiveCoefficient,
    opts: &DualOptions,
) -> Result<DualResult> {
    if f.len() != problem.num_elements() {
        return Err(Error::DimensionMismatch { expected: problem.num_elements(), actual: f.len() });
    }
    dual_assign_and_power_gains(&problem.gain_matrix(f), &problem.budgets, problem.noise_power, opts)
}

/// Sum-rate of `(assignment, powers)` under coefficient `f`.
pub fn ul_sum_rate(problem: &UlProblem, assignment: &Assignment, powers: &[Vec<f64>], f: &TransmissiveCoefficient) -> f64 {
    assignment_rate(assignment, powers, &problem.gain_matrix(f), problem.noise_power)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientResult {
    pub coefficient: TransmissiveCoefficient,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Per-user weights `Σ_n q_n / (1 + q_n |a_k|²)` with `q_n = p_{k,n}/σ²`:
/// the derivative of the user's rate (nats) with respect to `|a_k|²`.
fn coefficient_objective(
    f: &[Complex64],
    cascaded: &[Vec<Complex64>],
    snr: &[Vec<f64>],
) -> (f64, Vec<Complex64>) {
    let mut value = 0.0;
    let mut weights = Vec::with_capacity(cascaded.len());
    let mut responses = Vec::with_capacity(cascaded.len());
    for (c, q) in cascaded.iter().zip(snr) {
        let a: Complex64 = f.iter().zip(c).map(|(x, y)| x * y).sum();
        let g = a.norm_sqr();
        let mut w = 0.0;
        for &qn in q {
            value += (1.0 + qn * g).ln();
            w += qn / (1.0 + qn * g);
        }
        weights.push(w);
        responses.push(a);
    }
    let m = f.len();
    let mut grad = vec![Complex64::new(0.0, 0.0); m];
    for ((c, w), a) in cascaded.iter().zip(&weights).zip(&responses) {
        let s = a * w;
        for (gm, cm) in grad.iter_mut().zip(c) {
            *gm += cm.conj() * s;
        }
    }
    (value, grad)
}

fn objective_only(f: &[Complex64], cascaded: &[Vec<Complex64>], snr: &[Vec<f64>]) -> f64 {
    cascaded
        .iter()
        .zip(snr)
        .map(|(c, q)| {
            let g = f.iter().zip(c).map(|(x, y)| x * y).sum::<Complex64>().norm_sqr();
            q.iter().map(|qn| (1.0 + qn * g).ln()).sum::<f64>()
        })
        .sum()
}

fn project_unit_disk(f: &mut [Complex64]) {
    for z in f {
        let r = z.norm();
        if r > 1.0 {
            *z /= r;
        }
    }
}

/// Projected gradient ascent on `f` for a fixed assignment and powers.
pub fn update_coefficient(
    problem: &UlProblem,
    assignment: &Assignment,
    powers: &[Vec<f64>],
    f0: &TransmissiveCoefficient,
    opts: &OptimOptions,
) -> Result<CoefficientResult> {
    if f0.len() != problem.num_elements() {
        return Err(Error::DimensionMismatch { expected: problem.num_elements(), actual: f0.len() });
    }
    // only the powers on owned subcarriers matter
    let snr: Vec<Vec<f64>> = (0..problem.num_users())
        .map(|k| assignment.subcarriers_of(k).iter().map(|&n| powers[k][n] / problem.noise_power).collect())
        .collect();
    let mut f = f0.to_complex();
    let (mut value, mut grad) = coefficient_objective(&f, &problem.cascaded, &snr);
    let mut trace = vec![value / LN_2];
    let mut step = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_inner {
        iterations += 1;
        let gmax = grad.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if gmax == 0.0 {
            converged = true;
            break;
        }
        if !step.is_finite() {
            step = 1.0 / gmax;
        }
        let mut accepted = None;
        while step * gmax > 1e-12 {
            let mut cand: Vec<Complex64> = f.iter().zip(&grad).map(|(x, d)| x + d * step).collect();
            project_unit_disk(&mut cand);
            let v = objective_only(&cand, &problem.cascaded, &snr);
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
        f = cand;
        (value, grad) = coefficient_objective(&f, &problem.cascaded, &snr);
        trace.push(value / LN_2);
        step *= 2.0;
        if improvement <= opts.inner_tol * value.abs() {
            converged = true;
            break;
        }
    }
    Ok(CoefficientResult {
        coefficient: TransmissiveCoefficient::from_complex(&f)?,
        objective_trace: trace,
        iterations,
        converged,
    })
}

/// Unit-amplitude coefficient co-phasing the strongest user's cascaded
/// channel: `f_m = exp(-j·arg c_{k*,m})`.
pub fn initial_coefficient(problem: &UlProblem) -> TransmissiveCoefficient {
    let strongest = problem
        .cascaded
        .iter()
        .enumerate()
        .map(|(k, c)| (k, c.iter().map(|z| z.norm_sqr()).sum::<f64>()))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0;
    aligned_coefficient(&problem.cascaded[strongest])
}

pub fn aligned_coefficient(c: &[Complex64]) -> TransmissiveCoefficient {
    let phases: Vec<f64> = c.iter().map(|z| -z.arg()).collect();
    TransmissiveCoefficient::unit_phases(&phases)
}

pub fn random_phase_coefficient<R: Rng + ?Sized>(rng: &mut R, num_elements: usize) -> TransmissiveCoefficient {
    let phases: Vec<f64> = (0..num_elements).map(|_| rng.random_range(0.0..TAU)).collect();
    TransmissiveCoefficient::unit_phases(&phases)
}

/// The proposed AO method.
pub fn alternating_optimize_ul(problem: &UlProblem, opts: &OptimOptions, dual: &DualOptions) -> Result<UlSolution> {
    let mut f = initial_coefficient(problem);
    let first = dual_assign_and_power(problem, &f, dual)?;
    let mut assignment = first.assignment;
    let mut powers = first.powers;
    let mut current = ul_sum_rate(problem, &assignment, &powers, &f);
    let mut trace = vec![current];
    let mut dual_trace = vec![first.duals];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_outer {
        iterations += 1;
        let coef = update_coefficient(problem, &assignment, &powers, &f, opts)?;
        if ul_sum_rate(problem, &assignment, &powers, &coef.coefficient) >= current {
            f = coef.coefficient;
        }
        let after_coef = ul_sum_rate(problem, &assignment, &powers, &f);
        let gains = problem.gain_matrix(&f);

        // incumbent assignment re-filled on the new gains never does worse
        let (refilled, refilled_rate) = waterfill_assignment(&assignment, &gains, &problem.budgets, problem.noise_power);
        if refilled_rate >= after_coef {
            powers = refilled;
        }
        let mut value = refilled_rate.max(after_coef);
        let next = dual_assign_and_power_gains(&gains, &problem.budgets, problem.noise_power, dual)?;
        dual_trace.push(next.duals.clone());
        if next.sum_rate > value {
            value = next.sum_rate;
            assignment = next.assignment;
            powers = next.powers;
        }
        let improvement = value - current;
        current = value.max(current);
        trace.push(current);
        if improvement <= opts.tol * current.abs() {
            converged = true;
            break;
        }
    }
    Ok(UlSolution {
        sum_rate: ul_sum_rate(problem, &assignment, &powers, &f),
        assignment,
        powers,
        coefficient: f,
        objective_trace: trace,
        dual_trace,
        iterations,
        converged,
    })
}

/// One pass of assignment/power followed by one coefficient update.
pub fn three_stage(problem: &UlProblem, opts: &OptimOptions, dual: &DualOptions) -> Result<UlSolution> {
    let f0 = initial_coefficient(problem);
    let first = dual_assign_and_power(problem, &f0, dual)?;
    let start = ul_sum_rate(problem, &first.assignment, &first.powers, &f0);
    let coef = update_coefficient(problem, &first.assignment, &first.powers, &f0, opts)?;
    let sum_rate = ul_sum_rate(problem, &first.assignment, &first.powers, &coef.coefficient);
    Ok(UlSolution {
        assignment: first.assignment,
        powers: first.powers,
        coefficient: coef.coefficient,
        sum_rate,
        objective_trace: vec![start, sum_rate],
        dual_trace: vec![first.duals],
        iterations: 1,
        converged: coef.converged,
    })
}

/// Random-phase coefficient, then one assignment/power pass.
pub fn random_coefficient<R: Rng + ?Sized>(problem: &UlProblem, rng: &mut R, dual: &DualOptions) -> Result<UlSolution> {
    let f = random_phase_coefficient(rng, problem.num_elements());
    let res = dual_assign_and_power(problem, &f, dual)?;
    Ok(UlSolution {
        sum_rate: res.sum_rate,
        objective_trace: vec![res.sum_rate],
        dual_trace: vec![res.duals],
        assignment: res.assignment,
        powers: res.powers,
        coefficient: f,
        iterations: res.iterations,
        converged: res.converged,
    })
}

/// Uniform random owner per subcarrier, simplex-uniform powers within each
/// user's budget, random-phase coefficient.
pub fn random_allocation<R: Rng + ?Sized>(problem: &UlProblem, rng: &mut R) -> Result<UlSolution> {
    let k_users = problem.num_users();
    let n_sc = problem.num_subcarriers;
    let owner: Vec<Option<usize>> = (0..n_sc).map(|_| Some(rng.random_range(0..k_users))).collect();
    let assignment = Assignment { num_users: k_users, owner };
    let mut powers = vec![vec![0.0; n_sc]; k_users];
    for (k, row) in powers.iter_mut().enumerate() {
        let subs = assignment.subcarriers_of(k);
        if subs.is_empty() {
            continue;
        }
        for (&n, p) in subs.iter().zip(random_simplex(rng, subs.len(), problem.budgets[k])) {
            row[n] = p;
        }
    }
    let f = random_phase_coefficient(rng, problem.num_elements());
    let sum_rate = ul_sum_rate(problem, &assignment, &powers, &f);
    Ok(UlSolution {
        assignment,
        powers,
        coefficient: f,
        sum_rate,
        objective_trace: vec![sum_rate],
        dual_trace: Vec::new(),
        iterations: 0,
        converged: true,
    })
}
