//! Non-dominated sorting and crowding distance.

use crate::error::Result;
use crate::objective::{dominates_min, flatten_min_form, ObjectiveVector};

/// Pareto rank of every point (0 = non-dominated).
pub fn nondominated_sort(points: &[ObjectiveVector]) -> Result<Vec<usize>> {
    let (m, flat) = flatten_min_form(points)?;
    Ok(ranks_min_form(m, &flat))
}

/// Ranks of minimization-form points stored row-major.
pub fn ranks_min_form(m: usize, flat: &[f64]) -> Vec<usize> {
    if m == 2 {
        ranks_2d(flat)
    } else {
        ranks_general(m, flat)
    }
}

/// Peeling sort with domination counts, O(m N²).
pub fn ranks_general(m: usize, flat: &[f64]) -> Vec<usize> {
    let n = if m == 0 { 0 } else { flat.len() / m };
    let row = |i: usize| &flat[i * m..(i + 1) * m];
    let mut dominated_by = vec![0usize; n];
    let mut dominates: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates_min(row(i), row(j)) {
                dominates[i].push(j);
                dominated_by[j] += 1;
            } else if dominates_min(row(j), row(i)) {
                dominates[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut ranks = vec![0usize; n];
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    let mut rank = 0;
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            ranks[i] = rank;
            for &j in &dominates[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        current = next;
        rank += 1;
    }
    ranks
}

/// Two-objective sort in O(N log N): points are visited by increasing first
/// objective and placed into the first front whose tail does not dominate
/// them.
pub fn ranks_2d(flat: &[f64]) -> Vec<usize> {
    let n = flat.len() / 2;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        flat[2 * a].total_cmp(&flat[2 * b]).then(flat[2 * a + 1].total_cmp(&flat[2 * b + 1]))
    });
    let mut tails: Vec<(f64, f64)> = Vec::new();
    let mut ranks = vec![0usize; n];
    for &i in &order {
        let p = (flat[2 * i], flat[2 * i + 1]);
        let dominated = |t: &(f64, f64)| t.1 < p.1 || (t.1 == p.1 && t.0 < p.0);
        let k = tails.partition_point(dominated);
        if k == tails.len() {
            tails.push(p);
        } else {
            tails[k] = p;
        }
        ranks[i] = k;
    }
    ranks
}

/// Groups indices by rank, lowest rank first.
pub fn fronts_from_ranks(ranks: &[usize]) -> Vec<Vec<usize>> {
    let depth = ranks.iter().copied().max().map_or(0, |r| r + 1);
    let mut fronts = vec![Vec::new(); depth];
    for (i, &r) in ranks.iter().enumerate() {
        fronts[r].push(i);
    }
    fronts
}

/// Crowding distance of the members of one front. Boundary members of each
/// objective get +∞.
pub fn crowding_distance(m: usize, flat: &[f64], front: &[usize]) -> Vec<f64> {
    let k = front.len();
    let mut dist = vec![0.0f64; k];
    if k <= 2 {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        return dist;
    }
    let mut order: Vec<usize> = (0..k).collect();
    for obj in 0..m {
        let val = |p: usize| flat[front[p] * m + obj];
        order.sort_by(|&a, &b| val(a).total_cmp(&val(b)));
        let lo = val(order[0]);
        let hi = val(order[k - 1]);
        dist[order[0]] = f64::INFINITY;
        dist[order[k - 1]] = f64::INFINITY;
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        for w in 1..k - 1 {
            dist[order[w]] += (val(order[w + 1]) - val(order[w - 1])) / span;
        }
    }
    dist
}
