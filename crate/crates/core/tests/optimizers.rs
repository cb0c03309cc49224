use noisebench_core::landscapes::{LandscapeSpec, NoiseModel};
use noisebench_core::optimizers::{
    crowding_distance, ranks_2d, ranks_general, run_optimizer, select_survivors, Algorithm, Budget,
    OptimizerConfig, RunRecord, Scheme,
};
use noisebench_core::posthoc::reevaluate_ideal;
use noisebench_core::indicators::hypervolume;
use noisebench_core::ObjectiveVector;
use proptest::prelude::*;

fn sphere_cfg(alg: Algorithm, mu: usize, budget: Budget, eps2: f64) -> OptimizerConfig {
    let spec = LandscapeSpec::multi_sphere(10, 2).unwrap().with_noise(if eps2 > 0.0 {
        NoiseModel::decision(eps2)
    } else {
        NoiseModel::none()
    });
    OptimizerConfig::new(alg, spec, mu, budget, 42)
}

fn grating_cfg(alg: Algorithm, mu: usize, budget: Budget) -> OptimizerConfig {
    OptimizerConfig::new(alg, LandscapeSpec::grating_study(10).unwrap(), mu, budget, 42)
}

fn decreases(rec: &RunRecord) -> Vec<(usize, f64)> {
    std::iter::once(rec.initial_hv)
        .chain(rec.trace.iter().copied())
        .collect::<Vec<_>>()
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] < w[0] - 1e-12)
        .map(|(g, w)| (g + 1, w[1] - w[0]))
        .collect()
}

#[test]
fn steady_state_trace_never_decreases() {
    for spec in [LandscapeSpec::grating_study(10).unwrap(), LandscapeSpec::multi_sphere(10, 2).unwrap()] {
        let cfg = OptimizerConfig::new(Algorithm::SmsEmoa, spec, 100, Budget::Generations(1000), 1);
        let rec = run_optimizer(&cfg).unwrap();
        assert_eq!(decreases(&rec), vec![]);
    }
}

/// While the pooled parents and offspring have no more than μ mutually
/// non-dominated points, selection keeps all of them and cannot lose
/// hypervolume.
#[test]
fn generational_trace_never_decreases_before_the_front_saturates() {
    for alg in [Algorithm::MoCma, Algorithm::Nsga2] {
        let rec = run_optimizer(&grating_cfg(alg, 100, Budget::Generations(40))).unwrap();
        assert_eq!(decreases(&rec), vec![], "{alg:?}");
        let rec = run_optimizer(&sphere_cfg(alg, 100, Budget::Generations(40), 0.0)).unwrap();
        assert_eq!(decreases(&rec), vec![], "{alg:?}");
    }
}

/// Removing the μ least contributors one at a time from 2μ candidates can
/// end below the hypervolume of the parent set, which is itself one of the
/// candidate subsets. Once the front saturates this shows up as small dips
/// (around 1e-4) in the noise-free MO-CMA trace.
#[test]
#[ignore = "greedy (μ+μ) reduction is not monotone; run with --ignored to see the dips"]
fn mocma_noise_free_trace_is_monotone() {
    let cfg = sphere_cfg(Algorithm::MoCma, 100, Budget::Generations(1000), 0.0);
    let rec = run_optimizer(&cfg).unwrap();
    let d = decreases(&rec);
    assert!(d.is_empty(), "{} decreases, first {:?}", d.len(), &d[..d.len().min(5)]);
}

#[test]
fn scheme_evaluation_counts() {
    let mu = 12;
    for (scheme, expect) in [(Scheme::D, mu + 50 * mu), (Scheme::E, mu + 50 * 2 * mu), (Scheme::O, mu + 55 * mu)] {
        let cfg = sphere_cfg(Algorithm::MoCma, mu, Budget::Generations(50), 0.01).with_scheme(scheme);
        let rec = run_optimizer(&cfg).unwrap();
        assert_eq!(rec.generations, 50);
        assert_eq!(rec.evaluations, expect as u64, "{scheme:?}");
        assert_eq!(rec.trace.len(), 50);
    }
}

#[test]
fn reruns_are_identical_and_streams_differ() {
    for alg in [Algorithm::MoCma, Algorithm::SmsEmoa, Algorithm::Nsga2] {
        let cfg = sphere_cfg(alg, 10, Budget::Evaluations(2_000), 0.01);
        let a = run_optimizer(&cfg).unwrap();
        assert!(a.same_outcome(&run_optimizer(&cfg).unwrap()), "{alg:?}");
        let b = run_optimizer(&cfg.clone().with_stream(1)).unwrap();
        assert_ne!(a.genotypes(), b.genotypes(), "{alg:?}");
    }
}

#[test]
fn zero_budget_keeps_the_initial_population() {
    for alg in [Algorithm::MoCma, Algorithm::SmsEmoa, Algorithm::Nsga2] {
        for budget in [Budget::Evaluations(0), Budget::Generations(0)] {
            let rec = run_optimizer(&sphere_cfg(alg, 8, budget, 0.0)).unwrap();
            assert_eq!(rec.evaluations, 8);
            assert_eq!(rec.generations, 0);
            assert!(rec.trace.is_empty());
            assert_eq!(rec.final_hv(), rec.initial_hv);
        }
    }
}

#[test]
fn evaluation_budget_is_never_exceeded() {
    for alg in [Algorithm::MoCma, Algorithm::SmsEmoa, Algorithm::Nsga2] {
        for scheme in [Scheme::D, Scheme::E, Scheme::O] {
            for limit in [10u64, 37, 500, 1234] {
                let cfg = sphere_cfg(alg, 10, Budget::Evaluations(limit), 0.01).with_scheme(scheme);
                let rec = run_optimizer(&cfg).unwrap();
                assert!(rec.evaluations <= limit.max(10), "{alg:?} {scheme:?} {limit}: {}", rec.evaluations);
            }
        }
    }
}

#[test]
fn reevaluation_changes_nothing_without_noise() {
    let d = sphere_cfg(Algorithm::MoCma, 10, Budget::Generations(60), 0.0);
    let e = d.clone().with_scheme(Scheme::E);
    let (rd, re) = (run_optimizer(&d).unwrap(), run_optimizer(&e).unwrap());
    assert_eq!(rd.genotypes(), re.genotypes());
    assert_eq!(rd.trace, re.trace);
    assert_eq!(re.evaluations, rd.evaluations + 60 * 10);
}

#[test]
fn noisy_runs_overvalue_their_population() {
    let cfg = sphere_cfg(Algorithm::MoCma, 30, Budget::Generations(400), 0.01);
    let rec = run_optimizer(&cfg).unwrap();
    let ideal = reevaluate_ideal(&rec.genotypes(), &cfg.landscape, "test").unwrap();
    let ideal_hv = hypervolume(&ideal.all, &cfg.reference_point).unwrap();
    assert!(rec.final_hv() > ideal_hv, "perceived {} vs ideal {ideal_hv}", rec.final_hv());
}

#[test]
fn run_records_roundtrip_through_json() {
    let rec = run_optimizer(&grating_cfg(Algorithm::MoCma, 6, Budget::Generations(5))).unwrap();
    let text = serde_json::to_string(&rec).unwrap();
    let back: RunRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(back, rec);
}

#[test]
fn sms_emoa_replaces_the_least_contributor() {
    let r = ObjectiveVector::minimize(vec![4.0, 4.0]);
    let pts: Vec<ObjectiveVector> = [[1.0, 3.0], [2.0, 2.0], [3.0, 1.0], [2.1, 1.9]]
        .iter()
        .map(|p| ObjectiveVector::minimize(p.to_vec()))
        .collect();
    // (2.1, 1.9) and (2, 2) crowd each other; one of them goes
    let keep = select_survivors(&pts, &[0, 0, 0, 1], 3, &r).unwrap();
    assert_eq!(keep.len(), 3);
    assert!(keep.contains(&0) && keep.contains(&2));
}

fn flat(pts: &[Vec<f64>]) -> Vec<f64> {
    pts.iter().flatten().copied().collect()
}

fn best_subset_hv(pts: &[ObjectiveVector], keep: usize, r: &ObjectiveVector) -> f64 {
    let n = pts.len();
    (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == keep)
        .map(|mask| {
            let s: Vec<ObjectiveVector> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pts[i].clone()).collect();
            hypervolume(&s, r).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_dimensional_ranks_match_general(pts in prop::collection::vec(prop::collection::vec(0u8..8, 2), 1..60)) {
        let pts: Vec<Vec<f64>> = pts.into_iter().map(|p| p.into_iter().map(f64::from).collect()).collect();
        let f = flat(&pts);
        prop_assert_eq!(ranks_2d(&f), ranks_general(2, &f));
    }

    #[test]
    fn dropping_one_point_is_optimal(pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 2..9)) {
        let r = ObjectiveVector::minimize(vec![1.5, 1.5]);
        let ovs: Vec<ObjectiveVector> = pts.iter().map(|p| ObjectiveVector::minimize(p.clone())).collect();
        let keep = select_survivors(&ovs, &vec![0; ovs.len()], ovs.len() - 1, &r).unwrap();
        let kept: Vec<ObjectiveVector> = keep.iter().map(|&i| ovs[i].clone()).collect();
        let got = hypervolume(&kept, &r).unwrap();
        prop_assert!((got - best_subset_hv(&ovs, ovs.len() - 1, &r)).abs() < 1e-12);
    }

    #[test]
    fn crowding_boundaries_are_infinite(pts in prop::collection::vec(0.0f64..1.0, 3..30)) {
        // a front along f2 = 1 − f1
        let f: Vec<f64> = pts.iter().flat_map(|&a| [a, 1.0 - a]).collect();
        let front: Vec<usize> = (0..pts.len()).collect();
        let d = crowding_distance(2, &f, &front);
        let (lo, hi) = pts.iter().enumerate().fold((0, 0), |(lo, hi), (i, &v)| {
            (if v < pts[lo] { i } else { lo }, if v > pts[hi] { i } else { hi })
        });
        prop_assert!(d[lo].is_infinite() && d[hi].is_infinite());
        prop_assert!(d.iter().all(|&x| x >= 0.0));
    }
}
