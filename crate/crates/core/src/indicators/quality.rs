//! Relative hypervolume loss, front-distance statistic and box-plot summaries.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::objective::ObjectiveVector;

/// Relative deterioration `(v_ref − v) / v_ref`.
pub fn delta_v(v_ref: f64, v: f64) -> Result<f64> {
    if !(v_ref > 0.0) || !v_ref.is_finite() {
        return invalid(format!("reference hypervolume must be positive, got {v_ref}"));
    }
    Ok((v_ref - v) / v_ref)
}

/// Result of [`delta_d`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaD {
    pub value: f64,
    /// Indices (after sorting) whose reference point has zero norm and was
    /// left out of the sum.
    pub excluded: Vec<usize>,
}

fn sorted_by_first(points: &[ObjectiveVector]) -> Vec<&ObjectiveVector> {
    let mut v: Vec<&ObjectiveVector> = points.iter().collect();
    v.sort_by(|a, b| {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    v
}

/// Sum over index-paired points of `‖f_k − p_k‖² / ‖p_k‖`.
///
/// Both populations are sorted ascending by the first objective (ties broken
/// by later objectives) before pairing.
pub fn delta_d(front: &[ObjectiveVector], reference: &[ObjectiveVector]) -> Result<DeltaD> {
    if front.len() != reference.len() {
        return invalid(format!(
            "population sizes differ: {} vs {}",
            front.len(),
            reference.len()
        ));
    }
    let f = sorted_by_first(front);
    let p = sorted_by_first(reference);
    let mut value = 0.0;
    let mut excluded = Vec::new();
    for (k, (fk, pk)) in f.iter().zip(&p).enumerate() {
        if fk.m() != pk.m() {
            return invalid("objective counts differ between populations");
        }
        let norm = pk.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            excluded.push(k);
            continue;
        }
        let d2: f64 = fk.values.iter().zip(&pk.values).map(|(a, b)| (a - b) * (a - b)).sum();
        value += d2 / norm;
    }
    if !excluded.is_empty() {
        log::warn!("delta_d: {} zero-norm reference point(s) excluded", excluded.len());
    }
    Ok(DeltaD { value, excluded })
}

/// Five-number summary with linearly interpolated quantiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

pub fn box_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return invalid("box statistics of an empty sample");
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (v.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(v.len() - 1);
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    Ok(BoxStats {
        min: v[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: v[v.len() - 1],
        mean: v.iter().sum::<f64>() / v.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(v: &[[f64; 2]]) -> Vec<ObjectiveVector> {
        v.iter().map(|p| ObjectiveVector::maximize(p.to_vec())).collect()
    }

    #[test]
    fn delta_v_examples() {
        assert_eq!(delta_v(0.5, 0.5).unwrap(), 0.0);
        assert_eq!(delta_v(0.5, 0.0).unwrap(), 1.0);
        assert!((delta_v(0.47482, 0.44705).unwrap() - 0.05849).abs() < 5e-6);
        assert!(delta_v(0.0, 0.1).is_err());
        assert!(delta_v(-1.0, 0.1).is_err());
    }

    #[test]
    fn delta_d_examples() {
        let p = mv(&[[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(delta_d(&p, &p).unwrap().value, 0.0);
        let r = delta_d(&mv(&[[1.0, 1.0]]), &mv(&[[1.0, 0.0]])).unwrap();
        assert_eq!(r.value, 1.0);
        let r = delta_d(&mv(&[[2.0, 0.0], [0.0, 2.0]]), &p).unwrap();
        assert_eq!(r.value, 2.0);
        assert!(delta_d(&p, &p[..1]).is_err());
        let r = delta_d(&mv(&[[1.0, 1.0]]), &mv(&[[0.0, 0.0]])).unwrap();
        assert_eq!((r.value, r.excluded), (0.0, vec![0]));
    }

    #[test]
    fn quantiles() {
        let b = box_stats(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((b.min, b.q1, b.median, b.q3, b.max, b.mean), (1.0, 2.0, 3.0, 4.0, 5.0, 3.0));
        let b = box_stats(&[1.0, 2.0]).unwrap();
        assert_eq!(b.median, 1.5);
        assert!(box_stats(&[]).is_err());
    }
}
