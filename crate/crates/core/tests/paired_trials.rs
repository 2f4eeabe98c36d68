use rms_core::harness::{self, realization_digest, trial_realization, Scenario, SweepConfig};
use rms_core::solver::OptimOptions;

#[test]
fn every_algorithm_of_a_trial_uses_one_realization() {
    let cfg = SweepConfig { elements_sweep: vec![9, 16], trials: 3, ..SweepConfig::default() };
    for scenario in [Scenario::Dl, Scenario::Ul] {
        let recs = harness::run_sweep(&cfg, scenario, &OptimOptions::default()).unwrap();
        for r in &recs {
            let (_, seed, real) = trial_realization(&cfg, scenario, r.num_elements, r.trial).unwrap();
            assert_eq!(seed, r.seed);
            let (_, _, again) = trial_realization(&cfg, scenario, r.num_elements, r.trial).unwrap();
            assert_eq!(realization_digest(&real).unwrap(), realization_digest(&again).unwrap());
        }
        let mut keys: Vec<_> = recs.iter().map(|r| (r.num_elements, r.trial, r.algorithm.clone())).collect();
        let n = keys.len();
        keys.dedup();
        assert_eq!(keys.len(), n);
    }
}

#[test]
fn seed_ignores_algorithm() {
    let cfg = SweepConfig { elements_sweep: vec![25], trials: 2, ..SweepConfig::default() };
    let recs = harness::run_sweep(&cfg, Scenario::Dl, &OptimOptions::default()).unwrap();
    for chunk in recs.chunks(4) {
        assert!(chunk.iter().all(|r| r.seed == harness::derive_trial_seed(0, Scenario::Dl, 25, r.trial)));
    }
}
