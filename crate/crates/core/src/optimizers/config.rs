use serde::{Deserialize, Serialize};

use crate::cma_kernel::KernelOverrides;
use crate::error::{Error, Result};
use crate::landscapes::{Family, LandscapeSpec};
use crate::objective::ObjectiveVector;

use super::variation::VariationParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    MoCma,
    SmsEmoa,
    Nsga2,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MoCma => "mo-cma",
            Algorithm::SmsEmoa => "sms-emoa",
            Algorithm::Nsga2 => "nsga2",
        }
    }
}

/// Parental re-evaluation policy of MO-CMA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Never re-evaluate parents.
    #[default]
    D,
    /// Re-evaluate every parent each generation.
    E,
    /// Re-evaluate every parent once per epoch of `reeval_interval`
    /// generations.
    O,
}

/// When an MO-CMA offspring counts as a success for its parent's kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuccessRule {
    /// The offspring is selected into the next parent population.
    #[default]
    Survival,
    /// The offspring weakly dominates its parent.
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    /// Total landscape evaluations, initialization and re-evaluations
    /// included.
    Evaluations(u64),
    /// Completed generations.
    Generations(u64),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitMode {
    /// Uniform in the landscape's initialization interval.
    #[default]
    Uniform,
    /// Explicit starting points, one per population member.
    Points(Vec<Vec<f64>>),
}

fn default_reeval_interval() -> u64 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_reeval_interval")]
    pub reeval_interval: u64,
    pub mu: usize,
    pub lambda: usize,
    pub budget: Budget,
    pub seed: u64,
    /// Stream id under `seed`.
    #[serde(default)]
    pub stream: u64,
    #[serde(default)]
    pub init: InitMode,
    pub landscape: LandscapeSpec,
    pub reference_point: ObjectiveVector,
    #[serde(default)]
    pub success_rule: SuccessRule,
    #[serde(default)]
    pub variation: VariationParams,
    #[serde(default)]
    pub kernel: KernelOverrides,
    /// Initial MO-CMA step size; defaults to 0.3 × the initialization width.
    #[serde(default)]
    pub sigma0: Option<f64>,
}

/// Hypervolume reference point used by default for each landscape family:
/// (2, …, 2) for the minimized sphere, the origin for grating intensities.
pub fn default_reference(landscape: &LandscapeSpec) -> ObjectiveVector {
    let v = match landscape.family {
        Family::MultiSphere => 2.0,
        Family::DiffractionGrating => 0.0,
    };
    ObjectiveVector::new(vec![v; landscape.m], landscape.senses)
}

impl OptimizerConfig {
    /// A configuration with default settings: λ matched to the algorithm,
    /// scheme D, uniform initialization and the family's reference point.
    pub fn new(algorithm: Algorithm, landscape: LandscapeSpec, mu: usize, budget: Budget, seed: u64) -> Self {
        let lambda = match algorithm {
            Algorithm::SmsEmoa => 1,
            _ => mu,
        };
        let reference_point = default_reference(&landscape);
        Self {
            algorithm,
            scheme: Scheme::D,
            reeval_interval: default_reeval_interval(),
            mu,
            lambda,
            budget,
            seed,
            stream: 0,
            init: InitMode::Uniform,
            landscape,
            reference_point,
            success_rule: SuccessRule::Survival,
            variation: VariationParams::default(),
            kernel: KernelOverrides::default(),
            sigma0: None,
        }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn initial_sigma(&self) -> f64 {
        self.sigma0.unwrap_or(0.3 * self.landscape.bounds.width())
    }

    pub fn validate(&self) -> Result<()> {
        let err = |msg: String| Err(Error::Config(msg));
        self.landscape.validate()?;
        if self.mu == 0 {
            return err("population size mu must be positive".into());
        }
        match self.algorithm {
            Algorithm::SmsEmoa if self.lambda != 1 => {
                return err(format!("sms-emoa is steady state (lambda = 1), got lambda = {}", self.lambda))
            }
            Algorithm::MoCma | Algorithm::Nsga2 if self.lambda != self.mu => {
                return err(format!(
                    "{} needs lambda = mu (got lambda = {}, mu = {})",
                    self.algorithm.name(),
                    self.lambda,
                    self.mu
                ))
            }
            _ => {}
        }
        if self.algorithm == Algorithm::Nsga2 && self.mu % 2 == 1 {
            log::debug!("odd NSGA-II population: the last pair contributes one child");
        }
        if self.scheme == Scheme::O && self.reeval_interval < 2 {
            return err(format!("scheme O needs reeval_interval >= 2, got {}", self.reeval_interval));
        }
        if self.reference_point.m() != self.landscape.m || self.reference_point.senses != self.landscape.senses {
            return err("reference point must match the landscape's objectives and senses".into());
        }
        if self.reference_point.values.iter().any(|v| !v.is_finite()) {
            return err("reference point must be finite".into());
        }
        if let Some(s) = self.sigma0 {
            if !(s > 0.0 && s.is_finite()) {
                return err(format!("sigma0 must be positive, got {s}"));
            }
        }
        if let InitMode::Points(points) = &self.init {
            if points.len() != self.mu {
                return err(format!("{} seed points given for mu = {}", points.len(), self.mu));
            }
            if points.iter().any(|p| p.len() != self.landscape.n || p.iter().any(|v| !v.is_finite())) {
                return err(format!("seed points must be finite vectors of length {}", self.landscape.n));
            }
        }
        let v = &self.variation;
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !prob_ok(v.crossover_prob) || !v.mutation_prob.is_none_or(prob_ok) {
            return err("variation probabilities must lie in [0, 1]".into());
        }
        if !(v.crossover_eta >= 0.0 && v.mutation_eta >= 0.0) {
            return err("distribution indices must be non-negative".into());
        }
        Ok(())
    }
}
