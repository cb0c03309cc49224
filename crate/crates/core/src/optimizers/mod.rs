//! The evolutionary multi-objective optimizers: generational MO-CMA-ES with
//! three parental re-evaluation schemes, steady-state SMS-EMOA and NSGA-II,
//! plus the shared sorting and selection machinery.

mod config;
mod mocma;
mod nsga2;
mod run;
mod selection;
mod smsemoa;
mod sorting;
mod variation;

pub use config::{Algorithm, Budget, InitMode, OptimizerConfig, Scheme, SuccessRule};
pub use mocma::mocma_step;
pub use nsga2::nsga2_step;
pub use run::{initialize, run_optimizer, ArchivedMember, RunRecord};
pub use selection::{select_survivors, ADAPTIVE_REF_OFFSET};
pub use smsemoa::smsemoa_step;
pub use sorting::{
    crowding_distance, fronts_from_ranks, nondominated_sort, ranks_2d, ranks_general,
    ranks_min_form,
};
pub use variation::{polynomial_mutation, sbx, VariationParams};

use crate::cma_kernel::KernelState;
use crate::error::{invalid, Result};
use crate::landscapes::LandscapeSpec;
use crate::objective::ObjectiveVector;
use crate::rng::RandomStream;

/// One member of a population.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    /// Most recent evaluation of `x`.
    pub perceived: ObjectiveVector,
    pub kernel: Option<KernelState>,
    pub birth_gen: u64,
    pub eval_count: u64,
}

/// The parent population between generations.
#[derive(Debug, Clone, PartialEq)]
pub struct Archive {
    pub members: Vec<Individual>,
    pub capacity: usize,
    /// Completed generations.
    pub generation: u64,
}

impl Archive {
    pub fn perceived(&self) -> Vec<ObjectiveVector> {
        self.members.iter().map(|i| i.perceived.clone()).collect()
    }

    pub fn genotypes(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|i| i.x.clone()).collect()
    }
}

/// Whether a step ran to completion or was skipped for lack of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Completed,
    BudgetExhausted,
}

/// Counts landscape evaluations against an optional limit.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    landscape: &'a LandscapeSpec,
    evaluations: u64,
    limit: Option<u64>,
    scratch: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(landscape: &'a LandscapeSpec, limit: Option<u64>) -> Self {
        Self { landscape, evaluations: 0, limit, scratch: Vec::with_capacity(landscape.n) }
    }

    pub fn landscape(&self) -> &LandscapeSpec {
        self.landscape
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn can_afford(&self, count: u64) -> bool {
        self.limit.is_none_or(|l| self.evaluations + count <= l)
    }

    /// One perceived evaluation; always counted, even past the limit.
    pub fn evaluate(&mut self, x: &[f64], rng: &mut RandomStream) -> Result<ObjectiveVector> {
        let mut out = vec![0.0; self.landscape.m];
        self.landscape.noisy_evaluate_into(x, rng, &mut self.scratch, &mut out)?;
        self.evaluations += 1;
        Ok(ObjectiveVector::new(out, self.landscape.senses))
    }
}

fn check_archive(archive: &Archive, cfg: &OptimizerConfig) -> Result<()> {
    if archive.members.len() != cfg.mu {
        return invalid(format!(
            "archive holds {} members, configuration expects {}",
            archive.members.len(),
            cfg.mu
        ));
    }
    Ok(())
}
