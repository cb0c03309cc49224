//! Simulated binary crossover and polynomial mutation on a box.

use serde::{Deserialize, Serialize};

use crate::landscapes::Bounds;
use crate::rng::RandomStream;

/// Operator settings shared by NSGA-II and SMS-EMOA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariationParams {
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    pub mutation_eta: f64,
    /// Per-variable mutation probability; `None` means 1/n.
    pub mutation_prob: Option<f64>,
}

impl Default for VariationParams {
    fn default() -> Self {
        Self { crossover_prob: 0.9, crossover_eta: 15.0, mutation_eta: 20.0, mutation_prob: None }
    }
}

impl VariationParams {
    pub fn mutation_prob_for(&self, n: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / n as f64)
    }
}

fn spread_factor(u: f64, beta: f64, eta: f64) -> f64 {
    let alpha = 2.0 - beta.powf(-(eta + 1.0));
    if u <= 1.0 / alpha {
        (u * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// Bounded SBX producing two children. Children are clipped to `bounds`.
pub fn sbx(
    p1: &[f64],
    p2: &[f64],
    bounds: Bounds,
    params: &VariationParams,
    rng: &mut RandomStream,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.uniform() > params.crossover_prob {
        return (c1, c2);
    }
    let (lo, hi) = (bounds.lower, bounds.upper);
    let eta = params.crossover_eta;
    for i in 0..p1.len() {
        if rng.uniform() > 0.5 || (p1[i] - p2[i]).abs() <= 1e-14 {
            continue;
        }
        let y1 = p1[i].min(p2[i]);
        let y2 = p1[i].max(p2[i]);
        let u = rng.uniform();
        let beta_lo = 1.0 + 2.0 * (y1 - lo).max(0.0) / (y2 - y1);
        let beta_hi = 1.0 + 2.0 * (hi - y2).max(0.0) / (y2 - y1);
        let a = (0.5 * ((y1 + y2) - spread_factor(u, beta_lo, eta) * (y2 - y1))).clamp(lo, hi);
        let b = (0.5 * ((y1 + y2) + spread_factor(u, beta_hi, eta) * (y2 - y1))).clamp(lo, hi);
        if rng.uniform() <= 0.5 {
            c1[i] = b;
            c2[i] = a;
        } else {
            c1[i] = a;
            c2[i] = b;
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation in place; the result is clipped to `bounds`.
pub fn polynomial_mutation(x: &mut [f64], bounds: Bounds, params: &VariationParams, rng: &mut RandomStream) {
    let pm = params.mutation_prob_for(x.len());
    let eta = params.mutation_eta;
    let (lo, hi) = (bounds.lower, bounds.upper);
    let width = hi - lo;
    for v in x.iter_mut() {
        if rng.uniform() > pm {
            continue;
        }
        let y = v.clamp(lo, hi);
        let d1 = (y - lo) / width;
        let d2 = (hi - y) / width;
        let u = rng.uniform();
        let pow = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let val = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
            val.powf(pow) - 1.0
        } else {
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - val.powf(pow)
        };
        *v = (y + dq * width).clamp(lo, hi);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: Bounds = Bounds { lower: 0.0, upper: 1.0 };

    #[test]
    fn children_stay_in_bounds() {
        let mut rng = RandomStream::new(3);
        let p = VariationParams::default();
        for _ in 0..2000 {
            let a: Vec<f64> = (0..5).map(|_| rng.uniform()).collect();
            let b: Vec<f64> = (0..5).map(|_| rng.uniform()).collect();
            let (mut c1, c2) = sbx(&a, &b, B, &p, &mut rng);
            polynomial_mutation(&mut c1, B, &p, &mut rng);
            assert!(c1.iter().chain(&c2).all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn sbx_preserves_mean_per_variable() {
        // the two children are symmetric about the parents' midpoint when no
        // bound is active
        let mut rng = RandomStream::new(5);
        let p = VariationParams { crossover_prob: 1.0, ..Default::default() };
        let wide = Bounds { lower: -1e6, upper: 1e6 };
        for _ in 0..200 {
            let (c1, c2) = sbx(&[0.2, 0.7], &[0.6, 0.1], wide, &p, &mut rng);
            assert!((c1[0] + c2[0] - 0.8).abs() < 1e-9);
            assert!((c1[1] + c2[1] - 0.8).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_parents_are_copied() {
        let mut rng = RandomStream::new(1);
        let p = VariationParams { crossover_prob: 1.0, ..Default::default() };
        let (c1, c2) = sbx(&[0.3, 0.3], &[0.3, 0.3], B, &p, &mut rng);
        assert_eq!(c1, vec![0.3, 0.3]);
        assert_eq!(c2, vec![0.3, 0.3]);
    }

    #[test]
    fn zero_mutation_probability_is_identity() {
        let mut rng = RandomStream::new(1);
        let p = VariationParams { mutation_prob: Some(0.0), ..Default::default() };
        let mut x = vec![0.1, 0.9];
        polynomial_mutation(&mut x, B, &p, &mut rng);
        assert_eq!(x, vec![0.1, 0.9]);
    }
}
