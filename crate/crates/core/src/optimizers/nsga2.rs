use crate::error::Result;
use crate::objective::flatten_min_form;
use crate::rng::RandomStream;

use super::sorting::{crowding_distance, fronts_from_ranks, ranks_min_form};
use super::variation::{polynomial_mutation, sbx};
use super::{check_archive, Archive, Evaluator, Individual, OptimizerConfig, StepOutcome};

/// Rank and crowding distance of every member.
fn rank_and_crowding(m: usize, flat: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let ranks = ranks_min_form(m, flat);
    let mut crowd = vec![0.0; ranks.len()];
    for front in fronts_from_ranks(&ranks) {
        for (&i, d) in front.iter().zip(crowding_distance(m, flat, &front)) {
            crowd[i] = d;
        }
    }
    (ranks, crowd)
}

fn tournament(ranks: &[usize], crowd: &[f64], rng: &mut RandomStream) -> usize {
    let a = rng.index(ranks.len());
    let b = rng.index(ranks.len());
    if ranks[a] != ranks[b] {
        return if ranks[a] < ranks[b] { a } else { b };
    }
    if crowd[a] != crowd[b] {
        return if crowd[a] > crowd[b] { a } else { b };
    }
    if rng.uniform() < 0.5 {
        a
    } else {
        b
    }
}

/// One NSGA-II generation: tournament mating, SBX and polynomial mutation
/// for λ = μ offspring, then (μ+μ) selection by rank and crowding distance.
pub fn nsga2_step(
    archive: &mut Archive,
    cfg: &OptimizerConfig,
    eval: &mut Evaluator<'_>,
    rng: &mut RandomStream,
) -> Result<StepOutcome> {
    check_archive(archive, cfg)?;
    let mu = cfg.mu;
    if !eval.can_afford(mu as u64) {
        return Ok(StepOutcome::BudgetExhausted);
    }
    let generation = archive.generation + 1;
    let bounds = cfg.landscape.bounds;
    let (m, flat) = flatten_min_form(&archive.perceived())?;
    let (ranks, crowd) = rank_and_crowding(m, &flat);

    let mut children = Vec::with_capacity(mu);
    while children.len() < mu {
        let a = tournament(&ranks, &crowd, rng);
        let b = tournament(&ranks, &crowd, rng);
        let (c1, c2) = sbx(&archive.members[a].x, &archive.members[b].x, bounds, &cfg.variation, rng);
        for mut c in [c1, c2] {
            if children.len() < mu {
                polynomial_mutation(&mut c, bounds, &cfg.variation, rng);
                children.push(c);
            }
        }
    }
    for x in children {
        let perceived = eval.evaluate(&x, rng)?;
        archive.members.push(Individual { x, perceived, kernel: None, birth_gen: generation, eval_count: 1 });
    }

    let (m, flat) = flatten_min_form(&archive.perceived())?;
    let ranks = ranks_min_form(m, &flat);
    let mut keep = vec![false; archive.members.len()];
    let mut kept = 0;
    for front in fronts_from_ranks(&ranks) {
        if kept + front.len() <= mu {
            front.iter().for_each(|&i| keep[i] = true);
            kept += front.len();
            if kept == mu {
                break;
            }
            continue;
        }
        let d = crowding_distance(m, &flat, &front);
        let mut order: Vec<usize> = (0..front.len()).collect();
        order.sort_by(|&p, &q| d[q].total_cmp(&d[p]));
        for &p in order.iter().take(mu - kept) {
            keep[front[p]] = true;
        }
        break;
    }
    let mut idx = 0;
    archive.members.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });
    archive.generation = generation;
    Ok(StepOutcome::Completed)
}
