//! Test landscapes: the multi-sphere and the diffraction grating, with their
//! decision-space noise model.

mod grating;
mod sphere;

pub use grating::{
    eval_grating_intensity, grating_perceived_mean, grating_perceived_variance,
    grating_variance_bound, grating_variance_small_noise_bound, raw_sum_variance, sinc,
    GratingFront, PartitionSums, STUDY_B, STUDY_H,
};
pub use sphere::{multisphere_front, multisphere_perceived_moments, SphereFront};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::objective::{ObjectiveVector, Sense, Senses};
use crate::rng::RandomStream;

/// The ε² values used throughout the noisy campaigns.
pub const NOISE_GRID: [f64; 5] = [0.001, 0.005, 0.01, 0.02, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    MultiSphere,
    DiffractionGrating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    DecisionAdditiveGaussian,
}

/// Additive Gaussian disturbance of every decision coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Per-coordinate variance ε². Ignored when `kind` is `None`.
    pub strength: f64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, strength: 0.0 }
    }

    pub fn decision(eps2: f64) -> Self {
        Self { kind: NoiseKind::DecisionAdditiveGaussian, strength: eps2 }
    }

    /// Effective variance: zero for the noise-free model.
    pub fn variance(&self) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::DecisionAdditiveGaussian => self.strength,
        }
    }

    pub fn is_noisy(&self) -> bool {
        self.variance() > 0.0
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn clip(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GratingParams {
    /// Slit width.
    pub b: f64,
    /// Slit spacing.
    pub h: f64,
    /// Absolute screen positions, one per objective.
    pub positions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSpec {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub senses: Senses,
    /// Initialization interval, shared by every coordinate.
    pub bounds: Bounds,
    pub grating: Option<GratingParams>,
    pub noise: NoiseModel,
}

impl LandscapeSpec {
    /// `m`-objective sphere in `n` dimensions with centers at the first `m`
    /// standard basis vectors.
    pub fn multi_sphere(n: usize, m: usize) -> Result<Self> {
        let spec = Self {
            family: Family::MultiSphere,
            n,
            m,
            senses: Senses::uniform(m, Sense::Minimize),
            bounds: Bounds { lower: -10.0, upper: 10.0 },
            grating: None,
            noise: NoiseModel::none(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn grating(n: usize, b: f64, h: f64, positions: Vec<f64>) -> Result<Self> {
        let spec = Self {
            family: Family::DiffractionGrating,
            n,
            m: positions.len(),
            senses: Senses::uniform(positions.len(), Sense::Maximize),
            bounds: Bounds { lower: 0.0, upper: std::f64::consts::TAU },
            grating: Some(GratingParams { b, h, positions }),
            noise: NoiseModel::none(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The bi-objective grating instance with a linear front:
    /// b = 1, h = 4, positions (0, π/4).
    pub fn grating_study(n: usize) -> Result<Self> {
        Self::grating(n, STUDY_B, STUDY_H, vec![0.0, std::f64::consts::FRAC_PI_4])
    }

    pub fn with_noise(mut self, noise: NoiseModel) -> Self {
        self.noise = noise;
        self
    }

    pub fn noise_free(&self) -> Self {
        self.clone().with_noise(NoiseModel::none())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("decision dimension n = {} must be at least 2", self.n)));
        }
        if self.m < 2 {
            return Err(Error::Config(format!("objective count m = {} must be at least 2", self.m)));
        }
        if self.senses.len() != self.m {
            return Err(Error::Config("senses length differs from m".into()));
        }
        if self.m > Senses::MAX_OBJECTIVES {
            return Err(Error::Config("too many objectives".into()));
        }
        if !(self.bounds.lower < self.bounds.upper) {
            return Err(Error::Config("empty initialization interval".into()));
        }
        if self.noise.kind == NoiseKind::DecisionAdditiveGaussian
            && !(self.noise.strength >= 0.0 && self.noise.strength.is_finite())
        {
            return Err(Error::Config(format!("noise strength {} must be finite and >= 0", self.noise.strength)));
        }
        match self.family {
            Family::MultiSphere => {
                if self.m > self.n {
                    return Err(Error::Config(format!(
                        "multi-sphere needs m <= n (got m = {}, n = {})",
                        self.m, self.n
                    )));
                }
                if self.senses.uniform_sense() != Some(Sense::Minimize) {
                    return Err(Error::Config("multi-sphere objectives are minimized".into()));
                }
            }
            Family::DiffractionGrating => {
                let Some(g) = &self.grating else {
                    return Err(Error::Config("grating landscape without grating parameters".into()));
                };
                if !(g.b > 0.0 && g.h > 0.0) {
                    return Err(Error::Config("grating needs b > 0 and h > 0".into()));
                }
                if g.positions.len() != self.m {
                    return Err(Error::Config("one screen position per objective is required".into()));
                }
                if self.senses.uniform_sense() != Some(Sense::Maximize) {
                    return Err(Error::Config("grating intensities are maximized".into()));
                }
            }
        }
        Ok(())
    }

    /// Noise-free objective values written into `out` (length `m`).
    pub fn evaluate_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return invalid(format!("decision vector has length {}, expected {}", x.len(), self.n));
        }
        debug_assert_eq!(out.len(), self.m);
        match self.family {
            Family::MultiSphere => sphere::eval_into(x, out),
            Family::DiffractionGrating => {
                let g = self.grating.as_ref().expect("validated grating parameters");
                for (o, &q) in out.iter_mut().zip(&g.positions) {
                    *o = grating::intensity_unchecked(q, x, g.b, g.h);
                }
            }
        }
        Ok(())
    }

    /// Noise-free evaluation.
    pub fn evaluate(&self, x: &[f64]) -> Result<ObjectiveVector> {
        let mut out = vec![0.0; self.m];
        self.evaluate_into(x, &mut out)?;
        Ok(ObjectiveVector::new(out, self.senses))
    }

    /// One perceived evaluation: the landscape evaluated at a single noisy
    /// draw around `x`. The draw itself is discarded.
    pub fn noisy_evaluate(&self, x: &[f64], rng: &mut RandomStream) -> Result<ObjectiveVector> {
        let mut out = vec![0.0; self.m];
        let mut scratch = Vec::with_capacity(self.n);
        self.noisy_evaluate_into(x, rng, &mut scratch, &mut out)?;
        Ok(ObjectiveVector::new(out, self.senses))
    }

    pub(crate) fn noisy_evaluate_into(
        &self,
        x: &[f64],
        rng: &mut RandomStream,
        scratch: &mut Vec<f64>,
        out: &mut [f64],
    ) -> Result<()> {
        if !self.noise.is_noisy() {
            return self.evaluate_into(x, out);
        }
        let sd = self.noise.variance().sqrt();
        scratch.clear();
        scratch.extend(x.iter().map(|&v| v + sd * rng.standard_normal()));
        self.evaluate_into(scratch, out)
    }
}

/// Returns `x + N(0, ε² I)`; the identity for the noise-free model.
pub fn apply_decision_noise(x: &[f64], model: &NoiseModel, rng: &mut RandomStream) -> Vec<f64> {
    if model.kind == NoiseKind::None {
        return x.to_vec();
    }
    let sd = model.variance().sqrt();
    x.iter().map(|&v| v + sd * rng.standard_normal()).collect()
}
