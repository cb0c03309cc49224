//! A-posteriori analysis of final populations: noise-free re-evaluation,
//! resampling under run-time noise, disturbance ellipses, front
//! reconstruction from resampled clouds and a cluster count.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::indicators::{FrontKind, FrontRecord};
use crate::landscapes::{multisphere_perceived_moments, LandscapeSpec, NoiseModel};
use crate::objective::{nondominated_indices, ObjectiveVector};
use crate::rng::RandomStream;

/// Noise-free values of every genotype plus their non-dominated subset.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealEvaluation {
    pub front: FrontRecord,
    /// One entry per genotype, in input order.
    pub all: Vec<ObjectiveVector>,
}

pub fn reevaluate_ideal(
    genotypes: &[Vec<f64>],
    spec: &LandscapeSpec,
    provenance: impl Into<String>,
) -> Result<IdealEvaluation> {
    let clean = spec.noise_free();
    let all = genotypes.iter().map(|x| clean.evaluate(x)).collect::<Result<Vec<_>>>()?;
    let front = FrontRecord::new(all.clone(), FrontKind::Ideal, provenance)?;
    Ok(IdealEvaluation { front, all })
}

/// `k` noisy evaluations of one genotype with their empirical moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCloud {
    pub source_index: usize,
    pub draws: Vec<ObjectiveVector>,
    pub mean: Vec<f64>,
    /// Row-major `m × m` sample covariance (divisor k − 1).
    pub covariance: Vec<f64>,
}

impl SampleCloud {
    pub fn from_draws(source_index: usize, draws: Vec<ObjectiveVector>) -> Result<Self> {
        let k = draws.len();
        if k < 2 {
            return invalid(format!("a sample cloud needs at least two draws, got {k}"));
        }
        let m = draws[0].m();
        if draws.iter().any(|d| d.m() != m) {
            return invalid("cloud draws have mixed dimensions");
        }
        let mut mean = vec![0.0; m];
        for d in &draws {
            for (acc, v) in mean.iter_mut().zip(&d.values) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= k as f64);
        let mut covariance = vec![0.0; m * m];
        for d in &draws {
            for i in 0..m {
                let di = d.values[i] - mean[i];
                for j in 0..=i {
                    covariance[i * m + j] += di * (d.values[j] - mean[j]);
                }
            }
        }
        for i in 0..m {
            for j in 0..=i {
                let v = covariance[i * m + j] / (k - 1) as f64;
                covariance[i * m + j] = v;
                covariance[j * m + i] = v;
            }
        }
        Ok(Self { source_index, draws, mean, covariance })
    }

    pub fn m(&self) -> usize {
        self.mean.len()
    }

    pub fn variance(&self, i: usize) -> f64 {
        self.covariance[i * self.m() + i]
    }
}

/// Evaluates `x` `k` times under decision noise of strength `eps2`,
/// regardless of the noise configured on `spec`.
pub fn sample_cloud(
    source_index: usize,
    x: &[f64],
    spec: &LandscapeSpec,
    eps2: f64,
    k: usize,
    rng: &mut RandomStream,
) -> Result<SampleCloud> {
    if k < 2 {
        return invalid(format!("a sample cloud needs k >= 2, got {k}"));
    }
    if !(eps2 >= 0.0 && eps2.is_finite()) {
        return invalid(format!("noise strength {eps2} must be finite and >= 0"));
    }
    let noisy = spec.clone().with_noise(NoiseModel::decision(eps2));
    let draws = (0..k).map(|_| noisy.noisy_evaluate(x, rng)).collect::<Result<Vec<_>>>()?;
    SampleCloud::from_draws(source_index, draws)
}

/// Two-standard-deviation ellipse of a bi-objective distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub center: [f64; 2],
    /// Semi-axis lengths, major first: twice the square roots of the
    /// covariance eigenvalues.
    pub semi_axes: [f64; 2],
    /// Unit direction of each semi-axis.
    pub axes: [[f64; 2]; 2],
}

impl Ellipse {
    /// Angle of the major axis against the first objective, in radians.
    pub fn angle(&self) -> f64 {
        self.axes[0][1].atan2(self.axes[0][0])
    }
}

fn ellipse_from_covariance(center: [f64; 2], a: f64, b: f64, c: f64) -> Ellipse {
    // [[a, b], [b, c]]
    let half_tr = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let l1 = (half_tr + disc).max(0.0);
    let l2 = (half_tr - disc).max(0.0);
    let major = if b.abs() > 1e-300 {
        let v = [l1 - c, b];
        let norm = v[0].hypot(v[1]);
        [v[0] / norm, v[1] / norm]
    } else if a >= c {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    Ellipse {
        center,
        semi_axes: [2.0 * l1.sqrt(), 2.0 * l2.sqrt()],
        axes: [major, [-major[1], major[0]]],
    }
}

/// Empirical ellipse of a bi-objective cloud.
pub fn disturbance_ellipse(cloud: &SampleCloud) -> Result<Ellipse> {
    if cloud.m() != 2 {
        return Err(Error::NotImplemented(format!("ellipses for m = {}", cloud.m())));
    }
    let c = &cloud.covariance;
    Ok(ellipse_from_covariance([cloud.mean[0], cloud.mean[1]], c[0], c[1], c[3]))
}

/// Axis-aligned ellipse from per-objective means and variances.
pub fn ellipse_from_moments(mean: &[f64], variance: &[f64]) -> Result<Ellipse> {
    if mean.len() != 2 || variance.len() != 2 {
        return Err(Error::NotImplemented(format!("ellipses for m = {}", mean.len())));
    }
    if variance.iter().any(|v| !(*v >= 0.0)) {
        return invalid("variances must be non-negative");
    }
    Ok(ellipse_from_covariance([mean[0], mean[1]], variance[0], 0.0, variance[1]))
}

/// Closed-form ellipse of a sphere point with ideal values `f` in `n`
/// dimensions under noise `eps2`.
pub fn sphere_analytic_ellipse(f: &[f64], n: usize, eps2: f64) -> Result<Ellipse> {
    let mut mean = Vec::with_capacity(f.len());
    let mut var = Vec::with_capacity(f.len());
    for &v in f {
        let (mu, s2) = multisphere_perceived_moments(v, n, eps2)?;
        mean.push(mu);
        var.push(s2);
    }
    ellipse_from_moments(&mean, &var)
}

/// Non-dominated subset of all draws pooled across `clouds`.
pub fn reconstruct_front(clouds: &[SampleCloud], provenance: impl Into<String>) -> Result<FrontRecord> {
    if clouds.is_empty() {
        return invalid("front reconstruction needs at least one cloud");
    }
    let pooled: Vec<ObjectiveVector> = clouds.iter().flat_map(|c| c.draws.iter().cloned()).collect();
    let keep = nondominated_indices(&pooled)?;
    let points = keep.into_iter().map(|i| pooled[i].clone()).collect();
    FrontRecord::new(points, FrontKind::Sampled, provenance)
}

/// Number of connected components when points closer than `tol` are linked.
pub fn cluster_count(points: &[ObjectiveVector], tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return invalid(format!("cluster tolerance must be positive, got {tol}"));
    }
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut components = n;
    for i in 0..n {
        for j in i + 1..n {
            let d2: f64 = points[i].values.iter().zip(&points[j].values).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 <= tol * tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                    components -= 1;
                }
            }
        }
    }
    Ok(components)
}

/// Divides every objective by the matching entry of `scale`.
pub fn normalize(points: &[ObjectiveVector], scale: &[f64]) -> Vec<ObjectiveVector> {
    points
        .iter()
        .map(|p| {
            let values = p.values.iter().zip(scale).map(|(v, s)| v / s).collect();
            ObjectiveVector::new(values, p.senses)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_cloud_is_degenerate() {
        let spec = LandscapeSpec::multi_sphere(4, 2).unwrap();
        let mut rng = RandomStream::new(1);
        let c = sample_cloud(0, &[0.5, 0.1, 0.0, 0.0], &spec, 0.0, 5, &mut rng).unwrap();
        assert!(c.draws.windows(2).all(|w| w[0] == w[1]));
        assert!(c.covariance.iter().all(|v| *v == 0.0));
        let e = disturbance_ellipse(&c).unwrap();
        assert_eq!(e.semi_axes, [0.0, 0.0]);
        let f = reconstruct_front(&[c], "t").unwrap();
        assert_eq!(f.len(), 5);
        assert!(sample_cloud(0, &[0.0; 4], &spec, 0.01, 1, &mut rng).is_err());
    }

    #[test]
    fn diagonal_ellipse() {
        let e = ellipse_from_moments(&[0.0, 0.0], &[0.04, 0.01]).unwrap();
        assert!((e.semi_axes[0] - 0.4).abs() < 1e-15 && (e.semi_axes[1] - 0.2).abs() < 1e-15);
        assert_eq!(e.axes[0], [1.0, 0.0]);
        let e = ellipse_from_moments(&[0.0, 0.0], &[0.01, 0.04]).unwrap();
        assert_eq!(e.axes[0], [0.0, 1.0]);
    }

    #[test]
    fn rotated_ellipse_axes_are_orthonormal_eigenvectors() {
        let (a, b, c) = (2.0, 0.7, 1.0);
        let e = ellipse_from_covariance([0.0, 0.0], a, b, c);
        for (k, v) in e.axes.iter().enumerate() {
            let lambda = (e.semi_axes[k] / 2.0).powi(2);
            let av = [a * v[0] + b * v[1], b * v[0] + c * v[1]];
            assert!((av[0] - lambda * v[0]).abs() < 1e-12 && (av[1] - lambda * v[1]).abs() < 1e-12);
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-12);
        }
        let dot = e.axes[0][0] * e.axes[1][0] + e.axes[0][1] * e.axes[1][1];
        assert!(dot.abs() < 1e-12);
    }

    #[test]
    fn sphere_analytic_example() {
        let e = sphere_analytic_ellipse(&[1.0, 1.0], 10, 0.01).unwrap();
        assert!((e.center[0] - 1.1).abs() < 1e-12 && (e.center[1] - 1.1).abs() < 1e-12);
        for s in e.semi_axes {
            assert!((s - 2.0 * 0.042f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn ellipse_needs_two_objectives() {
        let draws = vec![ObjectiveVector::minimize(vec![1.0, 2.0, 3.0]); 3];
        let c = SampleCloud::from_draws(0, draws).unwrap();
        assert!(matches!(disturbance_ellipse(&c), Err(Error::NotImplemented(_))));
    }

    #[test]
    fn clusters() {
        let p = |a: f64, b: f64| ObjectiveVector::minimize(vec![a, b]);
        assert_eq!(cluster_count(&vec![p(1.0, 1.0); 4], 0.05).unwrap(), 1);
        assert_eq!(cluster_count(&[p(0.0, 0.0), p(0.15, 0.0)], 0.05).unwrap(), 2);
        // chained within tolerance
        assert_eq!(cluster_count(&[p(0.0, 0.0), p(0.04, 0.0), p(0.08, 0.0)], 0.05).unwrap(), 1);
        assert!(cluster_count(&[], 0.0).is_err());
    }

    #[test]
    fn disjoint_clouds_reconstruct_to_union() {
        let p = |a: f64, b: f64| ObjectiveVector::minimize(vec![a, b]);
        let c1 = SampleCloud::from_draws(0, vec![p(0.0, 2.0), p(0.1, 2.1)]).unwrap();
        let c2 = SampleCloud::from_draws(1, vec![p(2.0, 0.0), p(2.1, 0.1)]).unwrap();
        let f = reconstruct_front(&[c1, c2], "t").unwrap();
        assert_eq!(f.points, vec![p(0.0, 2.0), p(2.0, 0.0)]);
    }

    #[test]
    fn ideal_of_sphere_center() {
        let spec = LandscapeSpec::multi_sphere(3, 2).unwrap().with_noise(NoiseModel::decision(0.5));
        let r = reevaluate_ideal(&[vec![1.0, 0.0, 0.0]], &spec, "t").unwrap();
        assert_eq!(r.all[0].values, vec![0.0, 2.0]);
    }
}
