//! Post-hoc analysis of staged runs: noise-free re-evaluation, resampling,
//! front reconstruction and disturbance ellipses.

use std::collections::BTreeMap;
use std::path::Path;

use noisebench_core::landscapes::Family;
use noisebench_core::posthoc::{
    disturbance_ellipse, reconstruct_front, reevaluate_ideal, sample_cloud, sphere_analytic_ellipse, Ellipse,
    SampleCloud,
};
use noisebench_core::{ObjectiveVector, RandomStream};

use crate::campaign::{load_staged, StagedRun};
use crate::error::{CliError, CliResult};
use crate::tables::{self, CloudRow, EllipseRow, FrontRow, FrontTable};

fn select(out: &Path, runs: &[String]) -> CliResult<Vec<StagedRun>> {
    let all = load_staged(out)?;
    if runs.is_empty() {
        return Ok(all);
    }
    for id in runs {
        if !all.iter().any(|s| &s.run_id == id) {
            return Err(CliError::Usage(format!("no staged run `{id}` under {}", out.display())));
        }
    }
    Ok(all.into_iter().filter(|s| runs.contains(&s.run_id)).collect())
}

fn load_fronts(out: &Path) -> CliResult<FrontTable> {
    let path = out.join(tables::FRONTS_CSV);
    if path.exists() {
        FrontTable::read(&path)
    } else {
        Ok(FrontTable::default())
    }
}

/// Appends the non-dominated noise-free fronts as `ideal` rows. Returns the
/// number of rows written.
pub fn reevaluate(out: &Path, runs: &[String]) -> CliResult<usize> {
    let staged = select(out, runs)?;
    let mut fronts = load_fronts(out)?;
    let with_x = fronts.width().1 > 0;
    let mut rows = Vec::new();
    for s in &staged {
        let rec = &s.record;
        let ideal = reevaluate_ideal(&rec.genotypes(), &rec.config.landscape, &s.run_id)?;
        let keep = noisebench_core::objective::nondominated_indices(&ideal.all)?;
        rows.extend(keep.into_iter().map(|i| FrontRow {
            run_id: s.run_id.clone(),
            case: s.case.clone(),
            variant: s.variant.clone(),
            kind: "ideal".into(),
            generation: rec.generations,
            member: i,
            f: ideal.all[i].values.clone(),
            x: if with_x { rec.archive[i].x.clone() } else { Vec::new() },
        }));
    }
    let count = rows.len();
    let ids: Vec<String> = staged.iter().map(|s| s.run_id.clone()).collect();
    fronts.replace_kind("ideal", &ids, rows);
    fronts.write(&out.join(tables::FRONTS_CSV))?;
    Ok(count)
}

/// Draws `k` perceived evaluations of every final member into `clouds.csv`.
/// The noise strength defaults to the one each run was optimized under.
pub fn sample(out: &Path, runs: &[String], k: usize, eps2: Option<f64>, seed: u64) -> CliResult<usize> {
    if k < 2 {
        return Err(CliError::Usage(format!("--k must be at least 2, got {k}")));
    }
    let staged = select(out, runs)?;
    let mut rows = Vec::new();
    for s in &staged {
        let spec = &s.record.config.landscape;
        if spec.m != 2 {
            return Err(noisebench_core::Error::NotImplemented(format!("clouds for m = {}", spec.m)).into());
        }
        let strength = eps2.unwrap_or_else(|| spec.noise.variance());
        if strength == 0.0 {
            log::warn!("{}: sampling without noise gives degenerate clouds", s.run_id);
        }
        let mut rng = RandomStream::for_run(seed, s.cell as u64, s.run as u64);
        for (member, a) in s.record.archive.iter().enumerate() {
            let cloud = sample_cloud(member, &a.x, spec, strength, k, &mut rng)?;
            rows.extend(cloud.draws.iter().enumerate().map(|(draw, d)| CloudRow {
                run_id: s.run_id.clone(),
                member,
                draw,
                eps2: strength,
                f1: d.values[0],
                f2: d.values[1],
            }));
        }
    }
    let path = out.join(tables::CLOUDS_CSV);
    let mut all: Vec<CloudRow> = if path.exists() { tables::read_records(&path)? } else { Vec::new() };
    let ids: Vec<&String> = staged.iter().map(|s| &s.run_id).collect();
    all.retain(|r| !ids.contains(&&r.run_id));
    let count = rows.len();
    all.extend(rows);
    all.sort_by(|a, b| (&a.run_id, a.member, a.draw).cmp(&(&b.run_id, b.member, b.draw)));
    tables::write_records(&path, &all)?;
    Ok(count)
}

/// Clouds of `clouds.csv` grouped by run and member.
fn load_clouds(out: &Path, staged: &[StagedRun]) -> CliResult<BTreeMap<(String, usize), (f64, SampleCloud)>> {
    let path = out.join(tables::CLOUDS_CSV);
    if !path.exists() {
        return Err(CliError::MissingData(format!("{} not found; run `posthoc sample` first", path.display())));
    }
    let rows: Vec<CloudRow> = tables::read_records(&path)?;
    let mut grouped: BTreeMap<(String, usize), (f64, Vec<ObjectiveVector>)> = BTreeMap::new();
    for r in rows {
        let Some(s) = staged.iter().find(|s| s.run_id == r.run_id) else { continue };
        let senses = s.record.config.landscape.senses;
        grouped
            .entry((r.run_id, r.member))
            .or_insert_with(|| (r.eps2, Vec::new()))
            .1
            .push(ObjectiveVector::new(vec![r.f1, r.f2], senses));
    }
    grouped
        .into_iter()
        .map(|(key, (eps2, draws))| Ok((key.clone(), (eps2, SampleCloud::from_draws(key.1, draws)?))))
        .collect()
}

/// Pools each run's clouds and appends their non-dominated subset as
/// `sampled` rows.
pub fn reconstruct(out: &Path, runs: &[String]) -> CliResult<usize> {
    let staged = select(out, runs)?;
    let clouds = load_clouds(out, &staged)?;
    let mut fronts = load_fronts(out)?;
    let mut rows = Vec::new();
    let mut ids = Vec::new();
    for s in &staged {
        let mine: Vec<SampleCloud> =
            clouds.iter().filter(|((id, _), _)| *id == s.run_id).map(|(_, (_, c))| c.clone()).collect();
        if mine.is_empty() {
            log::warn!("{}: no clouds sampled, skipped", s.run_id);
            continue;
        }
        let front = reconstruct_front(&mine, &s.run_id)?;
        rows.extend(front.points.iter().enumerate().map(|(i, p)| FrontRow {
            run_id: s.run_id.clone(),
            case: s.case.clone(),
            variant: s.variant.clone(),
            kind: "sampled".into(),
            generation: s.record.generations,
            member: i,
            f: p.values.clone(),
            x: Vec::new(),
        }));
        ids.push(s.run_id.clone());
    }
    let count = rows.len();
    fronts.replace_kind("sampled", &ids, rows);
    fronts.write(&out.join(tables::FRONTS_CSV))?;
    Ok(count)
}

fn ellipse_row(run_id: &str, member: usize, source: &str, e: &Ellipse) -> EllipseRow {
    EllipseRow {
        run_id: run_id.to_string(),
        member,
        source: source.to_string(),
        center1: e.center[0],
        center2: e.center[1],
        semi_major: e.semi_axes[0],
        semi_minor: e.semi_axes[1],
        angle: e.angle(),
    }
}

/// Writes an empirical ellipse per sampled cloud to `ellipses.csv`, plus
/// the closed-form ellipse for sphere runs.
pub fn ellipses(out: &Path, runs: &[String]) -> CliResult<usize> {
    let staged = select(out, runs)?;
    let clouds = load_clouds(out, &staged)?;
    let mut rows = Vec::new();
    for ((id, member), (eps2, cloud)) in &clouds {
        rows.push(ellipse_row(id, *member, "empirical", &disturbance_ellipse(cloud)?));
        let s = staged.iter().find(|s| &s.run_id == id).expect("cloud of a selected run");
        let spec = &s.record.config.landscape;
        if spec.family == Family::MultiSphere {
            let f = spec.noise_free().evaluate(&s.record.archive[*member].x)?;
            rows.push(ellipse_row(id, *member, "analytic", &sphere_analytic_ellipse(&f.values, spec.n, *eps2)?));
        }
    }
    let count = rows.len();
    tables::write_records(&out.join(tables::ELLIPSES_CSV), &rows)?;
    Ok(count)
}
