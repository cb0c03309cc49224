use crate::error::{Error, Result};

/// f_i = ‖x − e_i‖² for the first `out.len()` basis vectors e_i.
pub(super) fn eval_into(x: &[f64], out: &mut [f64]) {
    // Summed directly: the expanded ‖x‖² − 2xᵢ + 1 loses the front near its ends.
    for (i, o) in out.iter_mut().enumerate() {
        *o = x
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let d = if j == i { v - 1.0 } else { v };
                d * d
            })
            .sum();
    }
}

/// The bi-sphere Pareto front, f2 as a function of f1 ∈ [0, 2].
pub fn multisphere_front(f1: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&f1) {
        return Err(Error::Domain(format!("f1 = {f1} lies outside [0, 2]")));
    }
    let r = 1.0 - (f1 / 2.0).sqrt();
    Ok(2.0 * r * r)
}

/// Mean and variance of a perceived sphere objective whose noise-free value
/// is `f`, under decision noise of variance `eps2` in `n` dimensions.
pub fn multisphere_perceived_moments(f: f64, n: usize, eps2: f64) -> Result<(f64, f64)> {
    if f < 0.0 || eps2 < 0.0 {
        return Err(Error::Domain(format!("need f >= 0 and eps2 >= 0 (got f = {f}, eps2 = {eps2})")));
    }
    let n = n as f64;
    let mean = f + n * eps2;
    let var = 4.0 * eps2 * (f + 0.5 * n * eps2);
    Ok((mean, var))
}

/// The analytic bi-sphere front in objective space.
#[derive(Debug, Clone, Copy, Default)]
pub struct SphereFront;

impl SphereFront {
    /// Hypervolume dominated by the front inside the box bounded by (2, 2):
    /// 4 − ∫₀² f2(f1) df1 = 4 − 2/3.
    pub const HV_REF_2_2: f64 = 10.0 / 3.0;

    /// Point on the front whose pre-image is `(1 − t)·c₁ + t·c₂`, t ∈ [0, 1].
    pub fn point(t: f64) -> (f64, f64) {
        (2.0 * t * t, 2.0 * (1.0 - t) * (1.0 - t))
    }

    /// `count` points evenly spaced in f1 over [0, 2], ascending in f1.
    pub fn evenly_spaced(count: usize) -> Vec<(f64, f64)> {
        spaced(count, 0.0, 2.0)
            .map(|f1| (f1, multisphere_front(f1).expect("f1 in range")))
            .collect()
    }

    /// Distance in f2 between the point and the front, within `tol`.
    pub fn contains(f1: f64, f2: f64, tol: f64) -> bool {
        match multisphere_front(f1) {
            Ok(g) => (g - f2).abs() <= tol,
            Err(_) => false,
        }
    }
}

pub(crate) fn spaced(count: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..count).map(move |k| {
        if count == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (count - 1) as f64
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn front_examples() {
        assert_eq!(multisphere_front(0.0).unwrap(), 2.0);
        assert_eq!(multisphere_front(2.0).unwrap(), 0.0);
        assert!((multisphere_front(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(multisphere_front(-0.1), Err(Error::Domain(_))));
        assert!(matches!(multisphere_front(2.1), Err(Error::Domain(_))));
    }

    #[test]
    fn moment_examples() {
        let (m, v) = multisphere_perceived_moments(1.0, 10, 0.01).unwrap();
        assert!((m - 1.1).abs() < 1e-12 && (v - 0.042).abs() < 1e-12);
        assert_eq!(multisphere_perceived_moments(5.0, 10, 0.0).unwrap(), (5.0, 0.0));
        let (m, v) = multisphere_perceived_moments(0.0, 30, 0.02).unwrap();
        assert!((m - 0.6).abs() < 1e-12 && (v - 0.024).abs() < 1e-12);
        assert!(multisphere_perceived_moments(-1.0, 2, 0.1).is_err());
    }

    #[test]
    fn segment_preimage_maps_onto_front() {
        for k in 0..=10_000 {
            let t = k as f64 / 10_000.0;
            let x: Vec<f64> = vec![1.0 - t, t, 0.0, 0.0];
            let mut f = [0.0; 2];
            eval_into(&x, &mut f);
            assert!((multisphere_front(f[0]).unwrap() - f[1]).abs() < 1e-12);
            let (p1, p2) = SphereFront::point(t);
            assert!((p1 - f[0]).abs() < 1e-12 && (p2 - f[1]).abs() < 1e-12);
        }
    }
}
