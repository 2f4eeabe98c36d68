//! Shared pieces of the iterative optimizers.

use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimOptions {
    /// Relative objective improvement below which an outer loop stops.
    pub tol: f64,
    /// Relative improvement below which an inner ascent stops.
    pub inner_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self { tol: 1e-4, inner_tol: 1e-9, max_outer: 50, max_inner: 200 }
    }
}

/// Euclidean projection onto `{x ≥ 0, Σx ≤ 1}`.
pub fn project_capped_simplex(v: &[f64]) -> Vec<f64> {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= 1.0 {
        return clipped;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumsum += x;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Uniform point on `{x ≥ 0, Σx = total}`.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize, total: f64) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|x| total * x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SimRng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn projection_cases() {
        assert_eq!(project_capped_simplex(&[0.2, -0.1, 0.3]), vec![0.2, 0.0, 0.3]);
        let p = project_capped_simplex(&[2.0, 1.0]);
        assert_relative_eq!(p[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(p[1], 0.0, epsilon = 1e-15);
        let p = project_capped_simplex(&[0.8, 0.8]);
        assert_relative_eq!(p[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn simplex_draws_sum_to_total() {
        let mut rng = SimRng::seed_from_u64(0);
        for n in 1..6 {
            let x = random_simplex(&mut rng, n, 3.0);
            assert!(x.iter().all(|&v| v >= 0.0));
            assert_relative_eq!(x.iter().sum::<f64>(), 3.0, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent(v in prop::collection::vec(-3.0f64..3.0, 1..8)) {
            let p = project_capped_simplex(&v);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!(p.iter().sum::<f64>() <= 1.0 + 1e-12);
            let q = project_capped_simplex(&p);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
