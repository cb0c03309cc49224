//! Two-sample Mann–Whitney U test.
//!
//! `U_a` counts pairs where the `a` value is larger (ties count one half), so
//! a large `U_a` favours `a` when larger values are better.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{invalid, Result};

/// Samples smaller than this (in either group) use the exact distribution.
pub const EXACT_BELOW: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    TwoSided,
    /// `a` tends to be larger than `b`.
    Greater,
    /// `a` tends to be smaller than `b`.
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `a` significantly larger.
    Better,
    /// `b` significantly larger.
    Worse,
    Indistinct,
}

impl Direction {
    pub fn symbol(self) -> char {
        match self {
            Direction::Better => '+',
            Direction::Worse => '−',
            Direction::Indistinct => '≈',
        }
    }

    /// Direction when smaller values are better.
    pub fn flipped(self) -> Self {
        match self {
            Direction::Better => Direction::Worse,
            Direction::Worse => Direction::Better,
            Direction::Indistinct => Direction::Indistinct,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    pub u_a: f64,
    pub u_b: f64,
    pub p_value: f64,
    pub method: TestMethod,
    pub reject: bool,
    pub direction: Direction,
}

impl MannWhitney {
    pub fn u_min(&self) -> f64 {
        self.u_a.min(self.u_b)
    }
}

/// Two-sided test at level `alpha`; direction assumes larger is better.
pub fn mann_whitney(a: &[f64], b: &[f64], alpha: f64) -> Result<MannWhitney> {
    mann_whitney_with(a, b, alpha, Alternative::TwoSided)
}

/// Midranks of the pooled sample, doubled so they stay integral.
fn doubled_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // positions i+1..=j share rank (i+1+j)/2
        let doubled = (i + 1 + j) as u64;
        for &k in &order[i..j] {
            ranks[k] = doubled;
        }
        i = j;
    }
    ranks
}

/// Distribution of the doubled rank sum of `na` items drawn from `ranks`:
/// `counts[s]` is the number of subsets with that sum.
fn rank_sum_counts(ranks: &[u64], na: usize) -> Vec<f64> {
    let total: u64 = ranks.iter().sum();
    let width = total as usize + 1;
    // table[k][s]: subsets of size k with doubled sum s
    let mut table = vec![vec![0.0f64; width]; na + 1];
    table[0][0] = 1.0;
    for (seen, &r) in ranks.iter().enumerate() {
        let r = r as usize;
        for k in (1..=na.min(seen + 1)).rev() {
            let (lower, upper) = table.split_at_mut(k);
            let src = &lower[k - 1];
            let dst = &mut upper[0];
            for s in (r..width).rev() {
                if src[s - r] != 0.0 {
                    dst[s] += src[s - r];
                }
            }
        }
    }
    table.swap_remove(na)
}

fn normal_upper(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

pub fn mann_whitney_with(
    a: &[f64],
    b: &[f64],
    alpha: f64,
    alternative: Alternative,
) -> Result<MannWhitney> {
    if a.is_empty() || b.is_empty() {
        return invalid("Mann-Whitney test needs two non-empty samples");
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return invalid("Mann-Whitney samples contain NaN");
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return invalid(format!("significance level must lie in (0,1), got {alpha}"));
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let ra2: u64 = ranks[..na].iter().sum();
    let offset2 = (na * (na + 1)) as u64;
    let u_a = (ra2 as f64 - offset2 as f64) / 2.0;
    let u_b = (na * nb) as f64 - u_a;

    // upper tail: P(U ≥ u_a), lower tail: P(U ≤ u_a)
    let (upper, lower, method) = if na.min(nb) < EXACT_BELOW {
        let counts = rank_sum_counts(&ranks, na);
        let total: f64 = counts.iter().sum();
        let lower: f64 = counts[..=ra2 as usize].iter().sum::<f64>() / total;
        let upper: f64 = counts[ra2 as usize..].iter().sum::<f64>() / total;
        (upper.min(1.0), lower.min(1.0), TestMethod::Exact)
    } else {
        let n = (na + nb) as f64;
        let mut tie_term = 0.0;
        let mut sorted = pooled.clone();
        sorted.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            let t = (j - i) as f64;
            tie_term += t * t * t - t;
            i = j;
        }
        let mean = (na * nb) as f64 / 2.0;
        let var = (na * nb) as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
        if var <= 0.0 {
            (1.0, 1.0, TestMethod::Normal)
        } else {
            let sd = var.sqrt();
            let upper = normal_upper((u_a - mean - 0.5) / sd);
            let lower = normal_upper((mean - u_a - 0.5) / sd);
            (upper.min(1.0), lower.min(1.0), TestMethod::Normal)
        }
    };
    let p_value = match alternative {
        Alternative::TwoSided => (2.0 * upper.min(lower)).min(1.0),
        Alternative::Greater => upper,
        Alternative::Less => lower,
    };
    let reject = p_value <= alpha;
    let direction = if !reject || u_a == u_b {
        Direction::Indistinct
    } else if u_a > u_b {
        Direction::Better
    } else {
        Direction::Worse
    };
    Ok(MannWhitney { u_a, u_b, p_value, method, reject, direction })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let a = [0.1, 0.2, 0.3, 0.4];
        let r = mann_whitney(&a, &a, 0.05).unwrap();
        assert_eq!(r.direction, Direction::Indistinct);
        assert!(!r.reject);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two() {
        let r = mann_whitney(&[1.0, 3.0], &[2.0, 4.0], 0.05).unwrap();
        assert_eq!((r.u_a, r.u_b, r.u_min()), (1.0, 3.0, 1.0));
        // U over the 6 equally likely splits: 0,1,2,2,3,4
        assert!((r.p_value - 2.0 / 3.0).abs() < 1e-12);
        assert!(!r.reject);
    }

    #[test]
    fn complete_separation() {
        let a: Vec<f64> = (0..30).map(|i| 100.0 + i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64 * 0.5).collect();
        let r = mann_whitney(&a, &b, 0.05).unwrap();
        assert_eq!(r.u_a, 900.0);
        assert_eq!(r.method, TestMethod::Normal);
        assert!(r.reject && r.p_value < 1e-9);
        assert_eq!(r.direction, Direction::Better);
        let r = mann_whitney(&a[..10], &b[..10], 0.05).unwrap();
        assert_eq!(r.method, TestMethod::Exact);
        // one arrangement out of C(20,10), doubled
        assert!((r.p_value - 2.0 / 184_756.0).abs() < 1e-15);
        assert_eq!(r.direction, Direction::Better);
    }

    #[test]
    fn exact_with_ties_matches_enumeration() {
        let a = [1.0, 2.0, 2.0, 5.0];
        let b = [2.0, 3.0, 3.0];
        let r = mann_whitney_with(&a, &b, 0.05, Alternative::Less).unwrap();
        // brute force over all C(7,4) splits of the pooled ranks
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        let u_of = |idx: &[usize]| {
            let mut u = 0.0;
            for &i in idx {
                for j in (0..7).filter(|j| !idx.contains(j)) {
                    u += if pooled[i] > pooled[j] { 1.0 } else if pooled[i] == pooled[j] { 0.5 } else { 0.0 };
                }
            }
            u
        };
        let (mut hit, mut all) = (0, 0);
        for mask in 0u32..128 {
            if mask.count_ones() != 4 {
                continue;
            }
            let idx: Vec<usize> = (0..7).filter(|i| mask >> i & 1 == 1).collect();
            all += 1;
            if u_of(&idx) <= r.u_a + 1e-12 {
                hit += 1;
            }
        }
        assert!((r.p_value - hit as f64 / all as f64).abs() < 1e-12);
    }

    #[test]
    fn swapping_flips_direction() {
        let a = [5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let b = [1.0, 2.0, 3.0, 4.0, 5.5, 0.0];
        let ab = mann_whitney(&a, &b, 0.05).unwrap();
        let ba = mann_whitney(&b, &a, 0.05).unwrap();
        assert_eq!(ab.reject, ba.reject);
        assert_eq!(ab.direction, ba.direction.flipped());
        assert!((ab.p_value - ba.p_value).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(mann_whitney(&[], &[1.0], 0.05).is_err());
        assert!(mann_whitney(&[1.0], &[f64::NAN], 0.05).is_err());
        assert!(mann_whitney(&[1.0], &[2.0], 1.5).is_err());
    }
}
