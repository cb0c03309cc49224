//! Shared inputs for the benchmarks.

use noisebench_core::landscapes::SphereFront;
use noisebench_core::{ObjectiveVector, RandomStream};

/// `count` mutually non-dominated points on the bi-sphere front, shuffled.
pub fn front_2d(count: usize, seed: u64) -> Vec<ObjectiveVector> {
    let mut rng = RandomStream::new(seed);
    let mut pts: Vec<ObjectiveVector> =
        SphereFront::evenly_spaced(count).into_iter().map(|(a, b)| ObjectiveVector::minimize(vec![a, b])).collect();
    for i in (1..pts.len()).rev() {
        pts.swap(i, rng.index(i + 1));
    }
    pts
}

/// `count` non-dominated points on the positive unit sphere in three
/// objectives.
pub fn front_3d(count: usize, seed: u64) -> Vec<ObjectiveVector> {
    let mut rng = RandomStream::new(seed);
    (0..count)
        .map(|_| {
            let v: Vec<f64> = (0..3).map(|_| rng.standard_normal().abs()).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            ObjectiveVector::minimize(v.iter().map(|x| x / norm).collect())
        })
        .collect()
}

/// Uniform random points in the unit square, mostly dominated.
pub fn cloud_2d(count: usize, seed: u64) -> Vec<ObjectiveVector> {
    let mut rng = RandomStream::new(seed);
    (0..count).map(|_| ObjectiveVector::minimize(vec![rng.uniform(), rng.uniform()])).collect()
}
