//! Objective vectors, optimization senses and Pareto dominance.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Maps a raw value into minimization form.
    #[inline]
    pub fn to_min(self, v: f64) -> f64 {
        match self {
            Sense::Minimize => v,
            Sense::Maximize => -v,
        }
    }
}

/// Per-objective senses, packed as a bit mask (bit set = maximize).
///
/// Supports up to 32 objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<Sense>", try_from = "Vec<Sense>")]
pub struct Senses {
    m: u8,
    maximize_mask: u32,
}

impl From<Senses> for Vec<Sense> {
    fn from(s: Senses) -> Self {
        s.to_vec()
    }
}

impl TryFrom<Vec<Sense>> for Senses {
    type Error = String;

    fn try_from(v: Vec<Sense>) -> std::result::Result<Self, String> {
        if v.len() > Senses::MAX_OBJECTIVES {
            return Err(format!("at most {} objectives are supported", Senses::MAX_OBJECTIVES));
        }
        Ok(Senses::from_slice(&v))
    }
}

impl Senses {
    pub const MAX_OBJECTIVES: usize = 32;

    pub fn uniform(m: usize, sense: Sense) -> Self {
        assert!(m <= Self::MAX_OBJECTIVES, "at most 32 objectives are supported");
        let maximize_mask = match sense {
            Sense::Minimize => 0,
            Sense::Maximize if m == 32 => u32::MAX,
            Sense::Maximize => (1u32 << m) - 1,
        };
        Self { m: m as u8, maximize_mask }
    }

    pub fn from_slice(senses: &[Sense]) -> Self {
        assert!(senses.len() <= Self::MAX_OBJECTIVES, "at most 32 objectives are supported");
        let mut maximize_mask = 0u32;
        for (i, s) in senses.iter().enumerate() {
            if *s == Sense::Maximize {
                maximize_mask |= 1 << i;
            }
        }
        Self { m: senses.len() as u8, maximize_mask }
    }

    pub fn len(&self) -> usize {
        self.m as usize
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn get(&self, i: usize) -> Sense {
        if self.maximize_mask & (1 << i) != 0 {
            Sense::Maximize
        } else {
            Sense::Minimize
        }
    }

    /// `Some(sense)` when every objective shares the same sense.
    pub fn uniform_sense(&self) -> Option<Sense> {
        let full = Self::uniform(self.len(), Sense::Maximize).maximize_mask;
        if self.maximize_mask == 0 {
            Some(Sense::Minimize)
        } else if self.maximize_mask == full {
            Some(Sense::Maximize)
        } else {
            None
        }
    }

    pub fn to_vec(&self) -> Vec<Sense> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

/// A point in objective space together with the sense of every objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    pub values: Vec<f64>,
    pub senses: Senses,
}

impl ObjectiveVector {
    pub fn new(values: Vec<f64>, senses: Senses) -> Self {
        assert_eq!(values.len(), senses.len(), "values and senses must have the same length");
        Self { values, senses }
    }

    pub fn minimize(values: Vec<f64>) -> Self {
        let senses = Senses::uniform(values.len(), Sense::Minimize);
        Self { values, senses }
    }

    pub fn maximize(values: Vec<f64>) -> Self {
        let senses = Senses::uniform(values.len(), Sense::Maximize);
        Self { values, senses }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Value `i` in minimization form.
    #[inline]
    pub fn min_form(&self, i: usize) -> f64 {
        self.senses.get(i).to_min(self.values[i])
    }

    pub fn to_min_form(&self) -> Vec<f64> {
        (0..self.m()).map(|i| self.min_form(i)).collect()
    }

    /// `self` Pareto-dominates `other`: no worse everywhere, better somewhere.
    pub fn dominates(&self, other: &ObjectiveVector) -> bool {
        dominates_min(&self.to_min_form(), &other.to_min_form())
    }

    /// `self` is no worse than `other` in every objective.
    pub fn weakly_dominates(&self, other: &ObjectiveVector) -> bool {
        (0..self.m()).all(|i| self.min_form(i) <= other.min_form(i))
    }

    /// Strictly better than `reference` in every objective.
    pub fn strictly_better_than(&self, reference: &ObjectiveVector) -> bool {
        (0..self.m()).all(|i| self.min_form(i) < reference.min_form(i))
    }
}

/// Dominance on minimization-form slices.
#[inline]
pub fn dominates_min(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Checks that all points share one dimension and one sense vector, and
/// returns them flattened in minimization form (row-major, `m` per point).
pub(crate) fn flatten_min_form(points: &[ObjectiveVector]) -> Result<(usize, Vec<f64>)> {
    let Some(first) = points.first() else {
        return Ok((0, Vec::new()));
    };
    let m = first.m();
    let mut flat = Vec::with_capacity(points.len() * m);
    for p in points {
        if p.m() != m {
            return invalid(format!("mixed objective dimensions: {} and {}", m, p.m()));
        }
        if p.senses != first.senses {
            return invalid("points carry different objective senses");
        }
        flat.extend((0..m).map(|i| p.min_form(i)));
    }
    Ok((m, flat))
}

/// Indices of the mutually non-dominated members of `points`. Exact
/// duplicates are all kept.
pub fn nondominated_indices(points: &[ObjectiveVector]) -> Result<Vec<usize>> {
    let (m, flat) = flatten_min_form(points)?;
    let row = |i: usize| &flat[i * m..(i + 1) * m];
    Ok((0..points.len())
        .filter(|&i| !(0..points.len()).any(|j| j != i && dominates_min(row(j), row(i))))
        .collect())
}
