//! Slow, independent reference computations used to check the fast paths.

use crate::rng::RandomStream;

/// Hypervolume of minimization-form points by inclusion–exclusion over all
/// subsets. Exponential; meant for at most a dozen points.
pub fn hv_inclusion_exclusion(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    let inside: Vec<&Vec<f64>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a < r))
        .collect();
    let k = inside.len();
    assert!(k <= 20, "inclusion-exclusion is limited to 20 points");
    let m = reference.len();
    let mut total = 0.0;
    let mut corner = vec![0.0; m];
    for mask in 1u32..(1u32 << k) {
        corner.iter_mut().for_each(|c| *c = f64::NEG_INFINITY);
        for (i, p) in inside.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (c, v) in corner.iter_mut().zip(p.iter()) {
                    *c = c.max(*v);
                }
            }
        }
        let vol: f64 = corner.iter().zip(reference).map(|(c, r)| r - c).product();
        if mask.count_ones() % 2 == 1 {
            total += vol;
        } else {
            total -= vol;
        }
    }
    total
}

/// Monte-Carlo hypervolume estimate inside the box `[lower, reference]`,
/// with its standard error.
pub fn hv_monte_carlo(
    points: &[Vec<f64>],
    lower: &[f64],
    reference: &[f64],
    samples: usize,
    rng: &mut RandomStream,
) -> (f64, f64) {
    let m = reference.len();
    let box_vol: f64 = lower.iter().zip(reference).map(|(l, r)| r - l).product();
    let mut u = vec![0.0; m];
    let mut hits = 0usize;
    for _ in 0..samples {
        for (j, v) in u.iter_mut().enumerate() {
            *v = rng.uniform_in(lower[j], reference[j]);
        }
        if points.iter().any(|p| p.iter().zip(&u).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p * box_vol, box_vol * (p * (1.0 - p) / samples as f64).sqrt())
}

/// Raw interference sum Σ_l Σ_k cos(qh(l − k) + φ_l − φ_k).
pub fn raw_intensity_double_sum(qh: f64, phases: &[f64]) -> f64 {
    let mut s = 0.0;
    for (l, pl) in phases.iter().enumerate() {
        for (k, pk) in phases.iter().enumerate() {
            s += (qh * (l as f64 - k as f64) + pl - pk).cos();
        }
    }
    s
}

/// Sample mean and variance with their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: f64,
    pub variance: f64,
    pub se_mean: f64,
    pub se_variance: f64,
}

impl MomentEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let (mut m2, mut m4) = (0.0, 0.0);
        for v in values {
            let d = (v - mean) * (v - mean);
            m2 += d;
            m4 += d * d;
        }
        let variance = m2 / (k - 1.0);
        let m4 = m4 / k;
        Self {
            mean,
            variance,
            se_mean: (variance / k).sqrt(),
            se_variance: ((m4 - variance * variance).max(0.0) / k).sqrt(),
        }
    }

    /// Mean within `z` standard errors of `expected`.
    pub fn mean_matches(&self, expected: f64, z: f64) -> bool {
        (self.mean - expected).abs() <= z * self.se_mean.max(1e-15)
    }

    pub fn variance_matches(&self, expected: f64, z: f64) -> bool {
        (self.variance - expected).abs() <= z * self.se_variance.max(1e-15)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusion_exclusion_two_boxes() {
        let pts = vec![vec![0.0, 0.8], vec![0.5, 0.2]];
        assert!((hv_inclusion_exclusion(&pts, &[1.0, 1.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_unit_square() {
        let mut rng = RandomStream::new(4);
        let (est, se) = hv_monte_carlo(&[vec![0.5, 0.5]], &[0.0, 0.0], &[1.0, 1.0], 100_000, &mut rng);
        assert!((est - 0.25).abs() < 4.0 * se);
    }

    #[test]
    fn double_sum_of_equal_phases() {
        assert!((raw_intensity_double_sum(0.0, &[0.3; 5]) - 25.0).abs() < 1e-12);
    }
}
