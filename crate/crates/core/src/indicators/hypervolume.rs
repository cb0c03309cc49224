//! Exact hypervolume for two and three objectives.
//!
//! Points are handled in minimization form. Only points strictly better than
//! the reference point in every objective contribute.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::objective::{flatten_min_form, nondominated_indices, ObjectiveVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontKind {
    Perceived,
    Ideal,
    Sampled,
    Analytic,
}

impl fmt::Display for FrontKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrontKind::Perceived => "perceived",
            FrontKind::Ideal => "ideal",
            FrontKind::Sampled => "sampled",
            FrontKind::Analytic => "analytic",
        })
    }
}

impl FromStr for FrontKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perceived" => Ok(FrontKind::Perceived),
            "ideal" => Ok(FrontKind::Ideal),
            "sampled" => Ok(FrontKind::Sampled),
            "analytic" => Ok(FrontKind::Analytic),
            other => invalid(format!("unknown front kind '{other}'")),
        }
    }
}

/// A set of objective vectors with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRecord {
    pub points: Vec<ObjectiveVector>,
    pub kind: FrontKind,
    pub provenance: String,
}

impl FrontRecord {
    /// Builds a record. Perceived, ideal and analytic fronts are pruned to
    /// their non-dominated subset.
    pub fn new(points: Vec<ObjectiveVector>, kind: FrontKind, provenance: impl Into<String>) -> Result<Self> {
        let provenance = provenance.into();
        let points = match kind {
            FrontKind::Sampled => points,
            _ => {
                let keep = nondominated_indices(&points)?;
                if keep.len() < points.len() {
                    log::debug!(
                        "{provenance}: pruned {} dominated point(s) from {kind} front",
                        points.len() - keep.len()
                    );
                }
                keep.into_iter().map(|i| points[i].clone()).collect()
            }
        };
        Ok(Self { points, kind, provenance })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hypervolume(&self, reference: &ObjectiveVector) -> Result<f64> {
        hypervolume(&self.points, reference)
    }
}

fn check(points: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<(usize, Vec<f64>, Vec<f64>)> {
    let m = reference.m();
    if m > 3 {
        return Err(Error::NotImplemented(format!("hypervolume for m = {m} > 3")));
    }
    if m < 2 {
        return invalid("hypervolume needs at least two objectives");
    }
    if reference.senses.uniform_sense().is_none() {
        return invalid("hypervolume needs one sense shared by all objectives");
    }
    if let Some(p) = points.first() {
        if p.m() != m {
            return invalid(format!("front has {} objectives, reference point has {m}", p.m()));
        }
        if p.senses != reference.senses {
            return invalid("reference point orientation differs from the front's");
        }
    }
    let (_, flat) = flatten_min_form(points)?;
    Ok((m, flat, reference.to_min_form()))
}

/// Lebesgue measure of the region dominated by `points` and bounded by
/// `reference`.
pub fn hypervolume(points: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<f64> {
    let (m, flat, r) = check(points, reference)?;
    Ok(hypervolume_min_form(m, &flat, &r))
}

/// Hypervolume of minimization-form points stored row-major.
pub fn hypervolume_min_form(m: usize, flat: &[f64], r: &[f64]) -> f64 {
    match m {
        2 => {
            let mut pts: Vec<[f64; 2]> = flat
                .chunks_exact(2)
                .filter(|p| p[0] < r[0] && p[1] < r[1])
                .map(|p| [p[0], p[1]])
                .collect();
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
            hv2d_sorted(&pts, [r[0], r[1]])
        }
        3 => {
            let pts: Vec<[f64; 3]> = flat
                .chunks_exact(3)
                .filter(|p| p[0] < r[0] && p[1] < r[1] && p[2] < r[2])
                .map(|p| [p[0], p[1], p[2]])
                .collect();
            hv3d(&pts, [r[0], r[1], r[2]])
        }
        _ => unreachable!("checked by caller"),
    }
}

/// 2-D sweep over points sorted ascending by the first coordinate, all
/// strictly inside the reference box.
fn hv2d_sorted(pts: &[[f64; 2]], r: [f64; 2]) -> f64 {
    let mut area = 0.0;
    let mut floor = r[1];
    for p in pts {
        if p[1] < floor {
            area += (r[0] - p[0]) * (floor - p[1]);
            floor = p[1];
        }
    }
    area
}

/// 3-D sweep along the last coordinate with 2-D slabs.
fn hv3d(pts: &[[f64; 3]], r: [f64; 3]) -> f64 {
    let mut order: Vec<&[f64; 3]> = pts.iter().collect();
    order.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut slab: Vec<[f64; 2]> = Vec::with_capacity(order.len());
    let mut volume = 0.0;
    for (i, p) in order.iter().enumerate() {
        let pos = slab.partition_point(|q| q[0] < p[0] || (q[0] == p[0] && q[1] < p[1]));
        slab.insert(pos, [p[0], p[1]]);
        let top = order.get(i + 1).map_or(r[2], |q| q[2]);
        if top > p[2] {
            volume += hv2d_sorted(&slab, [r[0], r[1]]) * (top - p[2]);
        }
    }
    volume
}

fn mutually_nondominated_2d(flat: &[f64]) -> bool {
    let mut pts: Vec<(f64, f64)> = flat.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.windows(2).all(|w| w[0] == w[1] || (w[0].0 < w[1].0 && w[0].1 > w[1].1))
}

/// Exclusive hypervolume of every point: HV(front) − HV(front without it).
/// Points outside the reference box get zero.
pub fn hv_contributions(front: &[ObjectiveVector], reference: &ObjectiveVector) -> Result<Vec<f64>> {
    if front.is_empty() {
        return Ok(Vec::new());
    }
    let (m, flat, r) = check(front, reference)?;
    let k = front.len();
    let inside = |i: usize| (0..m).all(|j| flat[i * m + j] < r[j]);
    let mut out = vec![0.0; k];
    if m == 2 && mutually_nondominated_2d(&flat) {
        let mut order: Vec<usize> = (0..k).filter(|&i| inside(i)).collect();
        order.sort_by(|&a, &b| {
            flat[2 * a].total_cmp(&flat[2 * b]).then(flat[2 * a + 1].total_cmp(&flat[2 * b + 1]))
        });
        for (pos, &i) in order.iter().enumerate() {
            let right = order.get(pos + 1).map_or(r[0], |&j| flat[2 * j]);
            let above = if pos == 0 { r[1] } else { flat[2 * order[pos - 1] + 1] };
            let w = (right - flat[2 * i]).max(0.0);
            let h = (above - flat[2 * i + 1]).max(0.0);
            out[i] = w * h;
        }
    } else {
        let total = hypervolume_min_form(m, &flat, &r);
        for (i, o) in out.iter_mut().enumerate() {
            if !inside(i) {
                continue;
            }
            let rest: Vec<f64> = flat
                .chunks_exact(m)
                .enumerate()
                .filter(|(j, _)| *j != i)
                .flat_map(|(_, p)| p.iter().copied())
                .collect();
            *o = (total - hypervolume_min_form(m, &rest, &r)).max(0.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maxv(v: &[[f64; 2]]) -> Vec<ObjectiveVector> {
        v.iter().map(|p| ObjectiveVector::maximize(p.to_vec())).collect()
    }

    #[test]
    fn examples() {
        let r = ObjectiveVector::maximize(vec![0.0, 0.0]);
        assert_eq!(hypervolume(&maxv(&[[1.0, 1.0]]), &r).unwrap(), 1.0);
        assert!((hypervolume(&maxv(&[[1.0, 0.2], [0.5, 0.8]]), &r).unwrap() - 0.5).abs() < 1e-15);
        let rm = ObjectiveVector::minimize(vec![2.0, 2.0]);
        assert_eq!(hypervolume(&[ObjectiveVector::minimize(vec![0.0, 0.0])], &rm).unwrap(), 4.0);
        assert_eq!(hypervolume(&[], &rm).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let r4 = ObjectiveVector::minimize(vec![1.0; 4]);
        assert!(matches!(hypervolume(&[], &r4), Err(Error::NotImplemented(_))));
        let r = ObjectiveVector::minimize(vec![1.0, 1.0]);
        let p = ObjectiveVector::maximize(vec![0.5, 0.5]);
        assert!(matches!(hypervolume(&[p], &r), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn outside_points_contribute_nothing() {
        let r = ObjectiveVector::maximize(vec![0.0, 0.0]);
        let front = maxv(&[[1.0, 0.0], [0.5, 0.5]]);
        assert_eq!(hypervolume(&front, &r).unwrap(), 0.25);
        assert_eq!(hv_contributions(&front, &r).unwrap(), vec![0.0, 0.25]);
    }

    #[test]
    fn contribution_examples() {
        let r = ObjectiveVector::maximize(vec![0.0, 0.0]);
        let c = hv_contributions(&maxv(&[[1.0, 0.2], [0.5, 0.8]]), &r).unwrap();
        assert!((c[0] - 0.1).abs() < 1e-15 && (c[1] - 0.3).abs() < 1e-15);
        assert_eq!(hv_contributions(&maxv(&[[1.0, 1.0]]), &r).unwrap(), vec![1.0]);
        let dup = hv_contributions(&maxv(&[[1.0, 0.2], [1.0, 0.2], [0.5, 0.8]]), &r).unwrap();
        assert_eq!(&dup[..2], &[0.0, 0.0]);
        assert!(hv_contributions(&[], &r).unwrap().is_empty());
    }

    #[test]
    fn three_d_unit_cube_and_staircase() {
        let r = ObjectiveVector::minimize(vec![1.0, 1.0, 1.0]);
        let pts = vec![ObjectiveVector::minimize(vec![0.0, 0.0, 0.0])];
        assert_eq!(hypervolume(&pts, &r).unwrap(), 1.0);
        let pts = vec![
            ObjectiveVector::minimize(vec![0.0, 0.5, 0.5]),
            ObjectiveVector::minimize(vec![0.5, 0.0, 0.5]),
            ObjectiveVector::minimize(vec![0.5, 0.5, 0.0]),
        ];
        // three 1×½×½ slabs, pairwise overlaps ½×½×½, triple overlap ½³
        let expect = 3.0 * 0.25 - 3.0 * 0.125 + 0.125;
        assert!((hypervolume(&pts, &r).unwrap() - expect).abs() < 1e-15);
        let c = hv_contributions(&pts, &r).unwrap();
        for v in c {
            assert!((v - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn front_record_prunes_dominated() {
        let pts = maxv(&[[1.0, 0.2], [0.5, 0.8], [0.4, 0.1]]);
        let rec = FrontRecord::new(pts.clone(), FrontKind::Ideal, "t").unwrap();
        assert_eq!(rec.len(), 2);
        let rec = FrontRecord::new(pts, FrontKind::Sampled, "t").unwrap();
        assert_eq!(rec.len(), 3);
        assert_eq!("ideal".parse::<FrontKind>().unwrap(), FrontKind::Ideal);
        assert!("bogus".parse::<FrontKind>().is_err());
    }
}
