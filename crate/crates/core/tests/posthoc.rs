use noisebench_core::landscapes::{LandscapeSpec, NoiseModel};
use noisebench_core::optimizers::{run_optimizer, Algorithm, Budget, OptimizerConfig};
use noisebench_core::posthoc::{reconstruct_front, sample_cloud};
use noisebench_core::RandomStream;

/// Resampling the final population of a noisy MO-CMA run and keeping the
/// non-dominated draws recovers the perceived front closely. It stays a little
/// below it: perceived values are the survivors among many more draws than
/// the hundred per member used here.
#[test]
fn reconstruction_recovers_the_perceived_front() {
    let spec = LandscapeSpec::multi_sphere(10, 2).unwrap().with_noise(NoiseModel::decision(0.01));
    let cfg = OptimizerConfig::new(Algorithm::MoCma, spec.clone(), 100, Budget::Generations(10_000), 2010);
    let rec = run_optimizer(&cfg).unwrap();
    let mut rng = RandomStream::new(5);
    let clouds: Vec<_> = rec
        .genotypes()
        .iter()
        .enumerate()
        .map(|(i, x)| sample_cloud(i, x, &spec, 0.01, 100, &mut rng).unwrap())
        .collect();
    let front = reconstruct_front(&clouds, "test").unwrap();
    assert!(front.len() <= 100 * 100);
    let hv = front.hypervolume(&cfg.reference_point).unwrap();
    let gap = (rec.final_hv() - hv) / rec.final_hv();
    assert!(gap > 0.0 && gap < 0.05, "reconstructed {hv} vs perceived {} ({:.2}%)", rec.final_hv(), 100.0 * gap);
}
