use crate::error::Result;
use crate::objective::flatten_min_form;
use crate::rng::RandomStream;

use super::selection::survivors_min_form;
use super::variation::{polynomial_mutation, sbx};
use super::{check_archive, Archive, Evaluator, Individual, OptimizerConfig, StepOutcome};

/// One steady-state step: a single offspring from two uniformly drawn
/// parents, then removal of the worst-ranked member contributing the least
/// hypervolume. The generation counter is left to the caller.
pub fn smsemoa_step(
    archive: &mut Archive,
    cfg: &OptimizerConfig,
    eval: &mut Evaluator<'_>,
    rng: &mut RandomStream,
) -> Result<StepOutcome> {
    check_archive(archive, cfg)?;
    if !eval.can_afford(1) {
        return Ok(StepOutcome::BudgetExhausted);
    }
    let mu = cfg.mu;
    let bounds = cfg.landscape.bounds;
    let a = rng.index(mu);
    let b = if mu > 1 { (a + 1 + rng.index(mu - 1)) % mu } else { a };
    let (mut x, _) = sbx(&archive.members[a].x, &archive.members[b].x, bounds, &cfg.variation, rng);
    polynomial_mutation(&mut x, bounds, &cfg.variation, rng);
    let perceived = eval.evaluate(&x, rng)?;
    archive.members.push(Individual {
        x,
        perceived,
        kernel: None,
        birth_gen: archive.generation + 1,
        eval_count: 1,
    });

    let pool: Vec<_> = archive.members.iter().map(|i| i.perceived.clone()).collect();
    let births: Vec<u64> = archive.members.iter().map(|i| i.birth_gen).collect();
    let (m, flat) = flatten_min_form(&pool)?;
    let keep = survivors_min_form(m, &flat, &births, mu, &cfg.reference_point.to_min_form());
    let out = keep.iter().position(|k| !k).expect("one member is removed");
    archive.members.remove(out);
    Ok(StepOutcome::Completed)
}
