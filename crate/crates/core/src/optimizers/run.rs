use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cma_kernel::{KernelState, KernelSummary};
use crate::error::Result;
use crate::indicators::hypervolume;
use crate::objective::ObjectiveVector;
use crate::rng::RandomStream;

use super::{
    mocma_step, nsga2_step, smsemoa_step, Algorithm, Archive, Budget, Evaluator, Individual, InitMode,
    OptimizerConfig, StepOutcome,
};

/// One final population member as stored in a run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchivedMember {
    pub x: Vec<f64>,
    pub perceived: Vec<f64>,
    pub kernel: Option<KernelSummary>,
    pub birth_gen: u64,
    pub eval_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: OptimizerConfig,
    /// Perceived hypervolume of the initial population.
    pub initial_hv: f64,
    /// Perceived hypervolume after every completed generation.
    pub trace: Vec<f64>,
    pub evaluations: u64,
    pub generations: u64,
    pub archive: Vec<ArchivedMember>,
    pub wall_clock_secs: f64,
}

impl RunRecord {
    pub fn perceived_front(&self) -> Vec<ObjectiveVector> {
        let senses = self.config.landscape.senses;
        self.archive.iter().map(|a| ObjectiveVector::new(a.perceived.clone(), senses)).collect()
    }

    pub fn genotypes(&self) -> Vec<Vec<f64>> {
        self.archive.iter().map(|a| a.x.clone()).collect()
    }

    /// Hypervolume of the final perceived population.
    pub fn final_hv(&self) -> f64 {
        self.trace.last().copied().unwrap_or(self.initial_hv)
    }

    /// Equality of everything except the wall-clock time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        RunRecord { wall_clock_secs: 0.0, ..self.clone() } == RunRecord { wall_clock_secs: 0.0, ..other.clone() }
    }
}

/// Builds and evaluates the initial population. Always performed, whatever
/// the budget.
pub fn initialize(cfg: &OptimizerConfig, eval: &mut Evaluator<'_>, rng: &mut RandomStream) -> Result<Archive> {
    let spec = &cfg.landscape;
    let points: Vec<Vec<f64>> = match &cfg.init {
        InitMode::Uniform => (0..cfg.mu)
            .map(|_| (0..spec.n).map(|_| rng.uniform_in(spec.bounds.lower, spec.bounds.upper)).collect())
            .collect(),
        InitMode::Points(p) => p.clone(),
    };
    let params = cfg.kernel.resolve(spec.n);
    let mut members = Vec::with_capacity(cfg.mu);
    for x in points {
        let perceived = eval.evaluate(&x, rng)?;
        let kernel = match cfg.algorithm {
            Algorithm::MoCma => Some(KernelState::new(x.clone(), cfg.initial_sigma(), &params)?),
            _ => None,
        };
        members.push(Individual { x, perceived, kernel, birth_gen: 0, eval_count: 1 });
    }
    Ok(Archive { members, capacity: cfg.mu, generation: 0 })
}

fn generation(
    archive: &mut Archive,
    cfg: &OptimizerConfig,
    eval: &mut Evaluator<'_>,
    rng: &mut RandomStream,
) -> Result<StepOutcome> {
    match cfg.algorithm {
        Algorithm::MoCma => mocma_step(archive, cfg, eval, rng),
        Algorithm::Nsga2 => nsga2_step(archive, cfg, eval, rng),
        Algorithm::SmsEmoa => {
            // a generation is μ steady-state steps, started only when all fit
            if !eval.can_afford(cfg.mu as u64) {
                return Ok(StepOutcome::BudgetExhausted);
            }
            for _ in 0..cfg.mu {
                smsemoa_step(archive, cfg, eval, rng)?;
            }
            archive.generation += 1;
            Ok(StepOutcome::Completed)
        }
    }
}

/// Runs one optimizer to its budget. Deterministic given the configuration.
pub fn run_optimizer(cfg: &OptimizerConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rng = RandomStream::with_stream(cfg.seed, cfg.stream);
    let (limit, max_generations) = match cfg.budget {
        Budget::Evaluations(e) => (Some(e), u64::MAX),
        Budget::Generations(g) => (None, g),
    };
    let mut eval = Evaluator::new(&cfg.landscape, limit);
    let mut archive = initialize(cfg, &mut eval, &mut rng)?;
    let initial_hv = hypervolume(&archive.perceived(), &cfg.reference_point)?;
    let mut trace = Vec::new();
    while archive.generation < max_generations {
        if generation(&mut archive, cfg, &mut eval, &mut rng)? == StepOutcome::BudgetExhausted {
            break;
        }
        trace.push(hypervolume(&archive.perceived(), &cfg.reference_point)?);
    }
    let archive_out = archive
        .members
        .iter()
        .map(|i| ArchivedMember {
            x: i.x.clone(),
            perceived: i.perceived.values.clone(),
            kernel: i.kernel.as_ref().map(KernelState::summary),
            birth_gen: i.birth_gen,
            eval_count: i.eval_count,
        })
        .collect();
    Ok(RunRecord {
        config: cfg.clone(),
        initial_hv,
        trace,
        evaluations: eval.evaluations(),
        generations: archive.generation,
        archive: archive_out,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    })
}
