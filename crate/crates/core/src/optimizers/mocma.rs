use crate::error::{invalid, Result};
use crate::objective::flatten_min_form;
use crate::rng::RandomStream;

use super::selection::survivors_min_form;
use super::{check_archive, Archive, Evaluator, Individual, OptimizerConfig, Scheme, StepOutcome, SuccessRule};

fn reevaluates(cfg: &OptimizerConfig, generation: u64) -> bool {
    match cfg.scheme {
        Scheme::D => false,
        Scheme::E => true,
        Scheme::O => generation % cfg.reeval_interval == 0,
    }
}

/// One MO-CMA generation: optional parental re-evaluation, one offspring per
/// kernel, (μ+μ) selection and the kernel updates.
///
/// Nothing is evaluated when the generation does not fit into the remaining
/// budget.
pub fn mocma_step(
    archive: &mut Archive,
    cfg: &OptimizerConfig,
    eval: &mut Evaluator<'_>,
    rng: &mut RandomStream,
) -> Result<StepOutcome> {
    check_archive(archive, cfg)?;
    let mu = cfg.mu;
    let generation = archive.generation + 1;
    let reeval = reevaluates(cfg, generation);
    let cost = mu as u64 * if reeval { 2 } else { 1 };
    if !eval.can_afford(cost) {
        return Ok(StepOutcome::BudgetExhausted);
    }
    if archive.members.iter().any(|m| m.kernel.is_none()) {
        return invalid("MO-CMA members need kernel states");
    }
    let params = cfg.kernel.resolve(cfg.landscape.n);

    if reeval {
        for member in archive.members.iter_mut() {
            member.perceived = eval.evaluate(&member.x, rng)?;
            member.eval_count += 1;
        }
    }

    let mut offspring = Vec::with_capacity(mu);
    let mut steps = Vec::with_capacity(mu);
    for parent in &archive.members {
        let kernel = parent.kernel.as_ref().expect("checked above");
        let (x, step) = kernel.sample(rng);
        let perceived = eval.evaluate(&x, rng)?;
        let mut child_kernel = kernel.clone();
        child_kernel.x.clone_from(&x);
        offspring.push(Individual {
            x,
            perceived,
            kernel: Some(child_kernel),
            birth_gen: generation,
            eval_count: 1,
        });
        steps.push(step);
    }

    let pool: Vec<_> = archive
        .members
        .iter()
        .chain(&offspring)
        .map(|i| i.perceived.clone())
        .collect();
    let births: Vec<u64> = archive.members.iter().chain(&offspring).map(|i| i.birth_gen).collect();
    let (m, flat) = flatten_min_form(&pool)?;
    let keep = survivors_min_form(m, &flat, &births, mu, &cfg.reference_point.to_min_form());

    let success: Vec<bool> = (0..mu)
        .map(|i| match cfg.success_rule {
            SuccessRule::Survival => keep[mu + i],
            SuccessRule::Pairwise => offspring[i].perceived.weakly_dominates(&archive.members[i].perceived),
        })
        .collect();

    let mut next = Vec::with_capacity(mu);
    for (i, mut parent) in std::mem::take(&mut archive.members).into_iter().enumerate() {
        if keep[i] {
            let k = parent.kernel.as_mut().expect("checked above");
            k.update_step_size(success[i], &params);
            next.push(parent);
        }
    }
    for (i, (mut child, step)) in offspring.into_iter().zip(steps).enumerate() {
        if keep[mu + i] {
            let k = child.kernel.as_mut().expect("inherited kernel");
            k.update_step_size(success[i], &params);
            k.update_covariance(&step, &params);
            next.push(child);
        }
    }
    archive.members = next;
    archive.generation = generation;
    Ok(StepOutcome::Completed)
}
