//! Environmental selection by Pareto rank and hypervolume contribution.
//!
//! Whole fronts are accepted in rank order. Surplus members of the first
//! front that does not fit are removed one at a time, always dropping the
//! member with the least exclusive hypervolume. Contributions are measured
//! against the configured reference point first; members that contribute
//! nothing there (e.g. outside its box) are ordered by their contribution
//! against an adaptive reference placed one unit beyond the front's worst
//! value in each objective. Remaining ties remove the older member, then the
//! lower index.

use std::cmp::Ordering;

use crate::error::{invalid, Result};
use crate::indicators::hypervolume_min_form;
use crate::objective::{flatten_min_form, ObjectiveVector};

use super::sorting::{fronts_from_ranks, ranks_min_form};

/// Offset of the adaptive reference beyond the front's worst value.
pub const ADAPTIVE_REF_OFFSET: f64 = 1.0;

/// Indices of the `mu` survivors of `points` in ascending order.
pub fn select_survivors(
    points: &[ObjectiveVector],
    birth_gens: &[u64],
    mu: usize,
    reference: &ObjectiveVector,
) -> Result<Vec<usize>> {
    if birth_gens.len() != points.len() {
        return invalid("one birth generation per point is required");
    }
    if mu > points.len() {
        return invalid(format!("cannot keep {mu} of {} points", points.len()));
    }
    if let Some(p) = points.first() {
        if p.senses != reference.senses {
            return invalid("reference point orientation differs from the points'");
        }
    }
    let (m, flat) = flatten_min_form(points)?;
    let keep = survivors_min_form(m, &flat, birth_gens, mu, &reference.to_min_form());
    Ok((0..points.len()).filter(|&i| keep[i]).collect())
}

/// Keep mask over minimization-form points stored row-major.
pub(crate) fn survivors_min_form(
    m: usize,
    flat: &[f64],
    birth_gens: &[u64],
    mu: usize,
    reference: &[f64],
) -> Vec<bool> {
    let n = birth_gens.len();
    let mut keep = vec![false; n];
    if mu == 0 {
        return keep;
    }
    let ranks = ranks_min_form(m, flat);
    let mut kept = 0;
    for front in fronts_from_ranks(&ranks) {
        if kept + front.len() <= mu {
            for &i in &front {
                keep[i] = true;
            }
            kept += front.len();
            if kept == mu {
                break;
            }
            continue;
        }
        let remove = kept + front.len() - mu;
        let removed = if m == 2 {
            greedy_removal_2d(flat, &front, birth_gens, remove, reference)
        } else {
            greedy_removal_general(m, flat, &front, birth_gens, remove, reference)
        };
        for &i in &front {
            keep[i] = true;
        }
        for i in removed {
            keep[i] = false;
        }
        break;
    }
    keep
}

fn adaptive_reference(m: usize, flat: &[f64], front: &[usize]) -> Vec<f64> {
    (0..m)
        .map(|j| {
            front.iter().map(|&i| flat[i * m + j]).fold(f64::NEG_INFINITY, f64::max) + ADAPTIVE_REF_OFFSET
        })
        .collect()
}

#[derive(Clone, Copy)]
struct Key {
    fixed: f64,
    adaptive: f64,
    birth: u64,
    index: usize,
}

fn cmp_keys(a: &Key, b: &Key) -> Ordering {
    a.fixed
        .total_cmp(&b.fixed)
        .then(a.adaptive.total_cmp(&b.adaptive))
        .then(a.birth.cmp(&b.birth))
        .then(a.index.cmp(&b.index))
}

/// Exclusive area of a point between its sorted neighbours, clipped to the
/// reference box.
fn box_contribution(p: (f64, f64), right: f64, above: f64, r: &[f64]) -> f64 {
    let w = (right.min(r[0]) - p.0).max(0.0);
    let h = (above.min(r[1]) - p.1).max(0.0);
    w * h
}

fn greedy_removal_2d(
    flat: &[f64],
    front: &[usize],
    birth: &[u64],
    remove: usize,
    fixed_ref: &[f64],
) -> Vec<usize> {
    let adaptive_ref = adaptive_reference(2, flat, front);
    let mut order = front.to_vec();
    order.sort_by(|&a, &b| {
        flat[2 * a].total_cmp(&flat[2 * b]).then(flat[2 * a + 1].total_cmp(&flat[2 * b + 1]))
    });
    let k = order.len();
    let pt = |s: usize| (flat[2 * order[s]], flat[2 * order[s] + 1]);
    let mut prev: Vec<Option<usize>> = (0..k).map(|s| s.checked_sub(1)).collect();
    let mut next: Vec<Option<usize>> = (0..k).map(|s| (s + 1 < k).then_some(s + 1)).collect();
    let mut alive = vec![true; k];
    let key_of = |s: usize, prev: &[Option<usize>], next: &[Option<usize>]| {
        let right = next[s].map_or(f64::INFINITY, |t| pt(t).0);
        let above = prev[s].map_or(f64::INFINITY, |t| pt(t).1);
        Key {
            fixed: box_contribution(pt(s), right, above, fixed_ref),
            adaptive: box_contribution(pt(s), right, above, &adaptive_ref),
            birth: birth[order[s]],
            index: order[s],
        }
    };
    let mut keys: Vec<Key> = (0..k).map(|s| key_of(s, &prev, &next)).collect();
    let mut removed = Vec::with_capacity(remove);
    for _ in 0..remove {
        let s = (0..k)
            .filter(|&s| alive[s])
            .min_by(|&a, &b| cmp_keys(&keys[a], &keys[b]))
            .expect("front larger than removal count");
        alive[s] = false;
        removed.push(order[s]);
        let (p, q) = (prev[s], next[s]);
        if let Some(p) = p {
            next[p] = q;
        }
        if let Some(q) = q {
            prev[q] = p;
        }
        for t in [p, q].into_iter().flatten() {
            keys[t] = key_of(t, &prev, &next);
        }
    }
    removed
}

fn greedy_removal_general(
    m: usize,
    flat: &[f64],
    front: &[usize],
    birth: &[u64],
    remove: usize,
    fixed_ref: &[f64],
) -> Vec<usize> {
    let adaptive_ref = adaptive_reference(m, flat, front);
    let mut alive: Vec<usize> = front.to_vec();
    let mut removed = Vec::with_capacity(remove);
    let gather = |set: &[usize], skip: usize| -> Vec<f64> {
        set.iter()
            .filter(|&&i| i != skip)
            .flat_map(|&i| flat[i * m..(i + 1) * m].iter().copied())
            .collect()
    };
    for _ in 0..remove {
        let all = gather(&alive, usize::MAX);
        let total_fixed = hypervolume_min_form(m, &all, fixed_ref);
        let total_adaptive = hypervolume_min_form(m, &all, &adaptive_ref);
        let keys: Vec<Key> = alive
            .iter()
            .map(|&i| {
                let rest = gather(&alive, i);
                Key {
                    fixed: (total_fixed - hypervolume_min_form(m, &rest, fixed_ref)).max(0.0),
                    adaptive: (total_adaptive - hypervolume_min_form(m, &rest, &adaptive_ref)).max(0.0),
                    birth: birth[i],
                    index: i,
                }
            })
            .collect();
        let pos = (0..alive.len()).min_by(|&a, &b| cmp_keys(&keys[a], &keys[b])).expect("non-empty");
        removed.push(alive.remove(pos));
    }
    removed
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mx(v: &[[f64; 2]]) -> Vec<ObjectiveVector> {
        v.iter().map(|p| ObjectiveVector::maximize(p.to_vec())).collect()
    }

    #[test]
    fn dominated_newcomer_is_removed() {
        let pts: Vec<_> = [[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]]
            .iter()
            .map(|p| ObjectiveVector::minimize(p.to_vec()))
            .collect();
        let r = ObjectiveVector::minimize(vec![10.0, 10.0]);
        assert_eq!(select_survivors(&pts, &[0, 0, 1], 2, &r).unwrap(), vec![0, 1]);
    }

    #[test]
    fn least_contributor_is_removed() {
        let pts = mx(&[[1.0, 0.2], [0.5, 0.8], [0.9, 0.9]]);
        let r = ObjectiveVector::maximize(vec![0.0, 0.0]);
        assert_eq!(select_survivors(&pts, &[0, 0, 1], 2, &r).unwrap(), vec![0, 2]);
        // all mutually non-dominated: (0.5,0.8) now has the smaller share
        let pts = mx(&[[1.0, 0.2], [0.5, 0.8], [0.2, 0.85]]);
        assert_eq!(select_survivors(&pts, &[0, 0, 0], 2, &r).unwrap(), vec![0, 1]);
    }

    #[test]
    fn ties_remove_older_first() {
        let pts = mx(&[[1.0, 1.0], [1.0, 1.0]]);
        let r = ObjectiveVector::maximize(vec![0.0, 0.0]);
        assert_eq!(select_survivors(&pts, &[3, 2], 1, &r).unwrap(), vec![0]);
        assert_eq!(select_survivors(&pts, &[2, 3], 1, &r).unwrap(), vec![1]);
    }

    #[test]
    fn outside_reference_box_ordered_by_adaptive_reference() {
        // nothing beats the fixed reference; the adaptive one keeps the
        // extremes and the better-spread interior point
        let pts: Vec<_> = [[10.0, 40.0], [20.0, 30.0], [21.0, 29.5], [40.0, 10.0]]
            .iter()
            .map(|p| ObjectiveVector::minimize(p.to_vec()))
            .collect();
        let r = ObjectiveVector::minimize(vec![2.0, 2.0]);
        let s = select_survivors(&pts, &[0; 4], 3, &r).unwrap();
        assert_eq!(s, vec![0, 1, 3]);
    }

    #[test]
    fn general_path_matches_2d_path() {
        let mut rng = crate::rng::RandomStream::new(9);
        for _ in 0..200 {
            let n = 2 + rng.index(10);
            let flat: Vec<f64> = (0..2 * n).map(|_| (rng.uniform() * 8.0).round() / 4.0).collect();
            let birth: Vec<u64> = (0..n).map(|_| rng.index(3) as u64).collect();
            let mu = 1 + rng.index(n);
            let r = [1.5, 1.5];
            let ranks = ranks_min_form(2, &flat);
            let fronts = fronts_from_ranks(&ranks);
            for f in &fronts {
                if f.len() < 2 {
                    continue;
                }
                let a = greedy_removal_2d(&flat, f, &birth, f.len() - 1, &r);
                let b = greedy_removal_general(2, &flat, f, &birth, f.len() - 1, &r);
                assert_eq!(a, b);
            }
            assert_eq!(survivors_min_form(2, &flat, &birth, mu, &r).iter().filter(|&&k| k).count(), mu);
        }
    }
}
