//! Far-field intensity of an n-slit grating with per-slit phases, its
//! perceived moments under phase noise, and the analytic front of the
//! bi-objective instance q = (0, π/4), h = 4.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::error::{invalid, Error, Result};

use super::{Family, LandscapeSpec};

pub const STUDY_B: f64 = 1.0;
pub const STUDY_H: f64 = 4.0;

/// Unnormalized sinc: sin(x)/x, with sinc(0) = 1.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub(super) fn intensity_unchecked(q: f64, phases: &[f64], b: f64, h: f64) -> f64 {
    let n = phases.len() as f64;
    let qh = q * h;
    let (mut re, mut im) = (0.0, 0.0);
    for (k, &phi) in phases.iter().enumerate() {
        let (s, c) = (qh * k as f64 + phi).sin_cos();
        re += c;
        im += s;
    }
    let envelope = sinc(0.5 * q * b);
    envelope * envelope * (re * re + im * im) / (n * n)
}

/// Normalized intensity at screen position `q`.
pub fn eval_grating_intensity(q: f64, phases: &[f64], b: f64, h: f64) -> Result<f64> {
    if phases.is_empty() {
        return invalid("empty phase vector");
    }
    Ok(intensity_unchecked(q, phases, b, h))
}

/// Expected perceived intensity under N(0, eps2) noise on every phase.
pub fn grating_perceived_mean(q: f64, phases: &[f64], b: f64, h: f64, eps2: f64) -> Result<f64> {
    if eps2 < 0.0 {
        return Err(Error::Domain(format!("eps2 = {eps2} must be >= 0")));
    }
    let intensity = eval_grating_intensity(q, phases, b, h)?;
    let n = phases.len() as f64;
    let damp = (-eps2).exp();
    let envelope = sinc(0.5 * q * b).powi(2);
    Ok(damp * intensity + envelope * (1.0 - damp) / n)
}

/// Accumulated cosine sums over the six classes of index quadruples
/// (l₁, k₁, l₂, k₂) with l₁ > k₁ and l₂ > k₂, keyed by which indices
/// coincide. `a` denotes the pair phase a_lk = qh(l − k) + φ_l − φ_k.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PartitionSums {
    /// Same pair twice: Σ cos(2a).
    pub same_pair_cos2a: f64,
    /// Shared upper index (l₁ = l₂, k₁ ≠ k₂): Σ cos(a₁ − a₂), Σ cos(a₁ + a₂).
    pub same_upper_diff: f64,
    pub same_upper_sum: f64,
    /// Shared lower index (k₁ = k₂, l₁ ≠ l₂).
    pub same_lower_diff: f64,
    pub same_lower_sum: f64,
    /// Chained (l₁ = k₂).
    pub chain_upper_diff: f64,
    pub chain_upper_sum: f64,
    /// Chained (k₁ = l₂).
    pub chain_lower_diff: f64,
    pub chain_lower_sum: f64,
    /// Disjoint pairs: Σ cos(a₁) cos(a₂). Cancels in the variance.
    pub disjoint_prod: f64,
    pub counts: PartitionCounts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PartitionCounts {
    pub same_pair: usize,
    pub same_upper: usize,
    pub same_lower: usize,
    pub chain_upper: usize,
    pub chain_lower: usize,
    pub disjoint: usize,
}

impl PartitionSums {
    pub fn compute(qh: f64, phases: &[f64]) -> Self {
        let n = phases.len();
        let a = |l: usize, k: usize| qh * (l - k) as f64 + phases[l] - phases[k];
        let mut s = PartitionSums::default();
        for l1 in 1..n {
            for k1 in 0..l1 {
                let a1 = a(l1, k1);
                for l2 in 1..n {
                    for k2 in 0..l2 {
                        let a2 = a(l2, k2);
                        if l1 == l2 && k1 == k2 {
                            s.same_pair_cos2a += (2.0 * a1).cos();
                            s.counts.same_pair += 1;
                        } else if l1 == l2 {
                            s.same_upper_diff += (a1 - a2).cos();
                            s.same_upper_sum += (a1 + a2).cos();
                            s.counts.same_upper += 1;
                        } else if k1 == k2 {
                            s.same_lower_diff += (a1 - a2).cos();
                            s.same_lower_sum += (a1 + a2).cos();
                            s.counts.same_lower += 1;
                        } else if l1 == k2 {
                            s.chain_upper_diff += (a1 - a2).cos();
                            s.chain_upper_sum += (a1 + a2).cos();
                            s.counts.chain_upper += 1;
                        } else if k1 == l2 {
                            s.chain_lower_diff += (a1 - a2).cos();
                            s.chain_lower_sum += (a1 + a2).cos();
                            s.counts.chain_lower += 1;
                        } else {
                            s.disjoint_prod += a1.cos() * a2.cos();
                            s.counts.disjoint += 1;
                        }
                    }
                }
            }
        }
        s
    }
}

/// Variance of the perceived raw interference sum
/// J = n + 2 Σ_{l>k} cos(a_lk + δφ_l − δφ_k).
pub fn raw_sum_variance(qh: f64, phases: &[f64], eps2: f64) -> f64 {
    let n = phases.len() as f64;
    let s = PartitionSums::compute(qh, phases);
    let e1 = (-eps2).exp();
    let e2 = (-2.0 * eps2).exp();
    let shared = s.same_upper_diff + s.same_lower_diff + s.chain_upper_sum + s.chain_lower_sum;
    let crossed = s.same_upper_sum + s.same_lower_sum + s.chain_upper_diff + s.chain_lower_diff;
    let var = n * (n - 1.0) * (1.0 - e2) - 2.0 * e2 * (1.0 - e2) * s.same_pair_cos2a
        + 2.0 * e1 * (1.0 - e1) * shared
        - 2.0 * e2 * (1.0 - e1) * crossed;
    // Cancellation can leave a tiny negative residue at eps2 ≈ 0.
    var.max(0.0)
}

/// Variance of the perceived intensity under N(0, eps2) phase noise.
pub fn grating_perceived_variance(q: f64, phases: &[f64], b: f64, h: f64, eps2: f64) -> Result<f64> {
    if eps2 < 0.0 {
        return Err(Error::Domain(format!("eps2 = {eps2} must be >= 0")));
    }
    if phases.len() < 2 {
        return invalid("the variance needs at least two phases");
    }
    let n = phases.len() as f64;
    let envelope = sinc(0.5 * q * b).powi(2);
    Ok(envelope * envelope / n.powi(4) * raw_sum_variance(q * h, phases, eps2))
}

/// Upper bound on the raw-sum variance with every cosine majorized by one.
pub fn grating_variance_bound(n: usize, eps2: f64) -> f64 {
    let n = n as f64;
    n * (n - 1.0)
        * ((1.0 - (-4.0 * eps2).exp())
            + 2.0 * (-eps2).exp() * (1.0 - (-2.0 * eps2).exp()) * (n - 2.0))
}

/// The linearized bound 4 n (n − 1)² ε².
pub fn grating_variance_small_noise_bound(n: usize, eps2: f64) -> f64 {
    let n = n as f64;
    4.0 * n * (n - 1.0) * (n - 1.0) * eps2
}

/// Analytic Pareto front of the bi-objective instance q = (0, π/h) with the
/// second position half a period from the first.
///
/// In raw-sum space the front is the segment ȷ₁ + ȷ₂ = n² + δ with
/// ȷᵢ ∈ [δ, n²], δ = n mod 2. Phases with all even-indexed slits equal and
/// all odd-indexed slits equal attain it; θ = φ₁ − φ₀ traverses it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingFront {
    pub n: usize,
    pub b: f64,
    pub h: f64,
    /// sinc²(q₂ b / 2), the intensity scale of the second objective.
    pub scale2: f64,
}

impl GratingFront {
    /// Front for positions (0, π/4); only h = 4 puts π/4 half a period away.
    pub fn new(n: usize, b: f64, h: f64) -> Result<Self> {
        if n < 2 || !(b > 0.0) {
            return invalid("the grating front needs n >= 2 and b > 0");
        }
        if (h * FRAC_PI_4 - PI).abs() > 1e-12 {
            return Err(Error::NotImplemented(format!(
                "analytic front is known only when q = π/4 sits half a period away (h = 4), got h = {h}"
            )));
        }
        Ok(Self::unchecked(n, b, h, FRAC_PI_4))
    }

    pub fn study(n: usize) -> Result<Self> {
        Self::new(n, STUDY_B, STUDY_H)
    }

    /// Front for a grating landscape, if its positions fit the known instance.
    pub fn for_landscape(spec: &LandscapeSpec) -> Result<Self> {
        let g = match (&spec.family, &spec.grating) {
            (Family::DiffractionGrating, Some(g)) => g,
            _ => return invalid("not a grating landscape"),
        };
        let ok = g.positions.len() == 2 && g.positions[0] == 0.0 && {
            let phase = (g.positions[1] * g.h).rem_euclid(TAU);
            (phase - PI).abs() < 1e-9
        };
        if !ok {
            return Err(Error::NotImplemented(
                "analytic front is known only for positions (0, q) with q·h = π (mod 2π)".into(),
            ));
        }
        Ok(Self::unchecked(spec.n, g.b, g.h, g.positions[1]))
    }

    fn unchecked(n: usize, b: f64, h: f64, q2: f64) -> Self {
        Self { n, b, h, scale2: sinc(0.5 * q2 * b).powi(2) }
    }

    pub fn delta(&self) -> usize {
        self.n % 2
    }

    /// ȷ₁ + ȷ₂ along the front.
    pub fn raw_total(&self) -> f64 {
        (self.n * self.n + self.delta()) as f64
    }

    fn counts(&self) -> (f64, f64) {
        let even = self.n.div_ceil(2) as f64;
        let odd = (self.n / 2) as f64;
        (even, odd)
    }

    /// Raw sums (ȷ₁, ȷ₂) of the Pareto-optimal phase vector with angle θ.
    pub fn raw_point(&self, theta: f64) -> (f64, f64) {
        let (a, b) = self.counts();
        let base = a * a + b * b;
        let cross = 2.0 * a * b * theta.cos();
        (base + cross, base - cross)
    }

    /// Intensities (I₁, I₂) of the Pareto-optimal phase vector with angle θ.
    pub fn intensity_point(&self, theta: f64) -> (f64, f64) {
        let (j1, j2) = self.raw_point(theta);
        let n2 = (self.n * self.n) as f64;
        (j1 / n2, self.scale2 * j2 / n2)
    }

    /// A Pareto-optimal phase vector: even slits at `base`, odd slits at
    /// `base + θ`.
    pub fn phases(&self, theta: f64, base: f64) -> Vec<f64> {
        (0..self.n).map(|k| if k % 2 == 0 { base } else { base + theta }).collect()
    }

    /// Smallest first-objective intensity on the front.
    pub fn min_i1(&self) -> f64 {
        self.delta() as f64 / (self.n * self.n) as f64
    }

    /// Second-objective intensity as a function of the first along the front.
    pub fn i2_of_i1(&self, i1: f64) -> f64 {
        let n2 = (self.n * self.n) as f64;
        self.scale2 * (self.raw_total() - n2 * i1) / n2
    }

    /// End points of the front segment in intensity space.
    pub fn endpoints(&self) -> [(f64, f64); 2] {
        let lo = self.min_i1();
        [(1.0, self.i2_of_i1(1.0)), (lo, self.i2_of_i1(lo))]
    }

    /// `count` front points evenly spaced in I₁, ascending.
    pub fn evenly_spaced(&self, count: usize) -> Vec<(f64, f64)> {
        super::sphere::spaced(count, self.min_i1(), 1.0).map(|i1| (i1, self.i2_of_i1(i1))).collect()
    }

    /// Whether an intensity pair lies on the front within `tol`
    /// (tolerance measured on raw sums divided by n²).
    pub fn contains(&self, i1: f64, i2: f64, tol: f64) -> bool {
        let n2 = (self.n * self.n) as f64;
        let j1 = i1 * n2;
        let j2 = i2 * n2 / self.scale2;
        let lo = self.delta() as f64;
        (j1 + j2 - self.raw_total()).abs() / n2 <= tol
            && j1 >= lo - tol * n2
            && j2 >= lo - tol * n2
            && j1 <= n2 + tol * n2
            && j2 <= n2 + tol * n2
    }

    /// Area dominated by the continuous front with respect to (0, 0).
    pub fn hypervolume(&self) -> f64 {
        let n2 = (self.n * self.n) as f64;
        let lo = self.min_i1();
        let s = self.scale2;
        lo * s + s / n2 * (self.raw_total() * (1.0 - lo) - 0.5 * n2 * (1.0 - lo * lo))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_sum_intensity(q: f64, phases: &[f64], b: f64, h: f64) -> f64 {
        let n = phases.len();
        let mut total = n as f64;
        for k in 0..n {
            for l in k + 1..n {
                total += 2.0 * (q * h * (l - k) as f64 + phases[l] - phases[k]).cos();
            }
        }
        sinc(0.5 * q * b).powi(2) * total / (n * n) as f64
    }

    #[test]
    fn sinc_convention() {
        assert_eq!(sinc(0.0), 1.0);
        assert!((sinc(PI)).abs() < 1e-15);
        assert!((sinc(1e-7) - 1.0).abs() < 1e-14);
        assert!((sinc(0.5) - 0.5f64.sin() / 0.5).abs() < 1e-15);
    }

    #[test]
    fn intensity_examples() {
        let v = |q, p: &[f64]| eval_grating_intensity(q, p, 1.0, 4.0).unwrap();
        assert!((v(0.0, &[0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!(v(FRAC_PI_4, &[0.0, 0.0]).abs() < 1e-15);
        assert!(v(0.0, &[0.0, PI]).abs() < 1e-15);
        assert!(eval_grating_intensity(0.0, &[], 1.0, 4.0).is_err());
    }

    #[test]
    fn fast_and_double_sum_forms_agree() {
        let mut rng = crate::rng::RandomStream::new(2);
        for _ in 0..500 {
            let n = 2 + rng.index(12);
            let phases: Vec<f64> = (0..n).map(|_| rng.uniform_in(-7.0, 7.0)).collect();
            let q = rng.uniform_in(-3.0, 3.0);
            let fast = intensity_unchecked(q, &phases, 1.0, 4.0);
            let slow = double_sum_intensity(q, &phases, 1.0, 4.0);
            assert!((fast - slow).abs() < 1e-12);
        }
    }

    #[test]
    fn perceived_mean_examples() {
        let phases = vec![0.3, 1.1, -0.4, 2.0];
        let i = eval_grating_intensity(0.5, &phases, 1.0, 4.0).unwrap();
        assert_eq!(grating_perceived_mean(0.5, &phases, 1.0, 4.0, 0.0).unwrap(), i);
        let m = grating_perceived_mean(0.0, &[0.0; 10], 1.0, 4.0, 0.01).unwrap();
        let expect = (-0.01f64).exp() + (1.0 - (-0.01f64).exp()) / 10.0;
        assert!((m - expect).abs() < 1e-15);
        assert!((m - 0.9910448).abs() < 1e-7);
        let far = grating_perceived_mean(0.7, &phases, 1.0, 4.0, 1e6).unwrap();
        assert!((far - sinc(0.35).powi(2) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn variance_two_slit_reduction() {
        // Ĩ = (1 + cos δφ)/2 with δφ ~ N(0, 2ε²) has variance (1 − e^{−2ε²})²/8.
        let v = grating_perceived_variance(0.0, &[0.0, 0.0], 1.0, 4.0, 0.01).unwrap();
        let expect = (1.0 - (-0.02f64).exp()).powi(2) / 8.0;
        assert!((v - expect).abs() < 1e-18);
        assert!((v - 4.9012e-5).abs() < 1e-8);
        assert_eq!(grating_perceived_variance(0.3, &[0.1, 0.5, 2.0], 1.0, 4.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn partition_counts_match_closed_forms() {
        for n in 2..9usize {
            let s = PartitionSums::compute(0.0, &vec![0.0; n]);
            let nf = n as f64;
            let pairs = nf * (nf - 1.0) / 2.0;
            let same_upper = nf * (nf - 1.0) * (2.0 * nf - 1.0) / 6.0 + 0.5 * (3.0 - 2.0 * nf) * nf * (nf - 1.0)
                + nf * (nf - 1.0) * (nf - 2.0);
            let chain_upper = -nf * (nf - 1.0) * (2.0 * nf - 1.0) / 6.0 + 0.5 * nf * (nf - 1.0).powi(2);
            let disjoint = pairs * (pairs - 2.0 * nf + 3.0);
            assert_eq!(s.counts.same_pair as f64, pairs);
            assert!((s.counts.same_upper as f64 - same_upper).abs() < 1e-9);
            assert!((s.counts.same_lower as f64 - same_upper).abs() < 1e-9);
            assert!((s.counts.chain_upper as f64 - chain_upper).abs() < 1e-9);
            assert!((s.counts.chain_lower as f64 - chain_upper).abs() < 1e-9);
            assert!((s.counts.disjoint as f64 - disjoint).abs() < 1e-9);
        }
    }

    #[test]
    fn variance_respects_bounds() {
        let mut rng = crate::rng::RandomStream::new(9);
        for _ in 0..1000 {
            let n = 2 + rng.index(9);
            let phases: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.0, TAU)).collect();
            let eps2 = rng.uniform_in(0.0, 0.2);
            let qh = rng.uniform_in(-PI, PI);
            let v = raw_sum_variance(qh, &phases, eps2);
            assert!(v >= 0.0);
            assert!(v <= grating_variance_bound(n, eps2) + 1e-9);
            assert!(v <= grating_variance_small_noise_bound(n, eps2) + 1e-9);
        }
    }

    #[test]
    fn front_examples() {
        let f = GratingFront::study(10).unwrap();
        let (a, b) = f.intensity_point(0.0);
        assert!((a - 1.0).abs() < 1e-15 && b.abs() < 1e-15);
        let (a, b) = f.intensity_point(PI);
        assert!(a.abs() < 1e-15);
        assert!((b - (PI / 8.0).sin().powi(2) / (PI / 8.0).powi(2)).abs() < 1e-15);
        assert!((f.hypervolume() - 0.47482).abs() < 1e-5);
        assert!(matches!(GratingFront::new(10, 1.0, 3.0), Err(Error::NotImplemented(_))));
    }

    #[test]
    fn generator_phases_hit_the_front() {
        for n in [2usize, 3, 4, 5, 10, 11] {
            let f = GratingFront::study(n).unwrap();
            for k in 0..50 {
                let theta = k as f64 * 0.1357;
                let phases = f.phases(theta, 0.7);
                let i1 = eval_grating_intensity(0.0, &phases, 1.0, 4.0).unwrap();
                let i2 = eval_grating_intensity(FRAC_PI_4, &phases, 1.0, 4.0).unwrap();
                let (e1, e2) = f.intensity_point(theta);
                assert!((i1 - e1).abs() < 1e-12 && (i2 - e2).abs() < 1e-12);
                assert!(f.contains(i1, i2, 1e-12));
            }
        }
    }

    #[test]
    fn odd_front_hypervolume_matches_sweep() {
        let f = GratingFront::study(5).unwrap();
        // dense staircase under the segment converges to the area
        let pts = f.evenly_spaced(200_001);
        let mut area = 0.0;
        let mut prev = 0.0;
        for &(i1, i2) in &pts {
            area += (i1 - prev) * i2;
            prev = i1;
        }
        assert!((area - f.hypervolume()).abs() < 1e-5);
    }

    #[test]
    fn landscape_front_lookup() {
        let spec = LandscapeSpec::grating_study(10).unwrap();
        let f = GratingFront::for_landscape(&spec).unwrap();
        assert_eq!(f, GratingFront::study(10).unwrap());
        let other = LandscapeSpec::grating(10, 1.0, 4.0, vec![0.0, 0.1 * TAU / 4.0]).unwrap();
        assert!(matches!(GratingFront::for_landscape(&other), Err(Error::NotImplemented(_))));
    }
}
