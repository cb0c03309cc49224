//! Running a campaign: one optimizer run per (cell, run) pair on a worker
//! pool, each staged to its own JSON file, then merged into the tables.
//!
//! Staged runs double as a resume manifest. A rerun skips every run whose
//! staged record matches its configuration, so an interrupted campaign
//! picks up where it stopped and a completed one is only re-tabulated.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use noisebench_core::indicators::{box_stats, BoxStats};
use noisebench_core::optimizers::{run_optimizer, OptimizerConfig, RunRecord};
use noisebench_core::rng::run_stream_id;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{evaluate_run, AnalyticFront, RunMetrics};
use crate::config::{CampaignConfig, Cell};
use crate::error::{CliError, CliResult};
use crate::tables::{self, FrontRow, FrontTable, TraceRow};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub workers: usize,
    /// Replaces the configured base seed.
    pub seed: Option<u64>,
    /// Adds decision vectors to `fronts.csv`.
    pub genotypes: bool,
    pub include_long: bool,
}

/// A finished run as staged on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StagedRun {
    pub run_id: String,
    pub cell: usize,
    pub run: usize,
    pub label: String,
    pub case: String,
    pub variant: String,
    pub record: RunRecord,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CampaignReport {
    pub cells: usize,
    pub skipped_cells: usize,
    pub executed: usize,
    pub reused: usize,
}

pub fn run_id(cell: usize, run: usize) -> String {
    format!("c{cell:03}-r{run:03}")
}

pub fn staged_path(out: &Path, id: &str) -> PathBuf {
    out.join(tables::RUNS_DIR).join(format!("{id}.json"))
}

fn run_config(cell: &Cell, run: usize, seed: u64) -> OptimizerConfig {
    let mut cfg = cell.config.clone();
    cfg.seed = seed;
    cfg.stream = run_stream_id(cell.index as u64, run as u64);
    cfg
}

fn load_matching(path: &Path, cfg: &OptimizerConfig) -> Option<StagedRun> {
    let staged: StagedRun = tables::read_json(path).ok()?;
    (staged.record.config == *cfg).then_some(staged)
}

pub fn run_campaign(config: &CampaignConfig, config_path: &Path, opts: &RunOptions) -> CliResult<CampaignReport> {
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.base_seed = seed;
    }
    let all_cells = config.expand(config_path)?;
    let cells: Vec<Cell> = all_cells.iter().filter(|c| opts.include_long || !c.long_running).cloned().collect();
    for c in all_cells.iter().filter(|c| c.long_running && !opts.include_long) {
        log::warn!("skipping long-running {c}; pass --include-long to run it");
    }
    let runs_dir = opts.out.join(tables::RUNS_DIR);
    fs::create_dir_all(&runs_dir).map_err(|e| CliError::io(format!("creating {}", runs_dir.display()), e))?;
    tables::write_json(&opts.out.join(tables::CONFIG_SNAPSHOT), &config)?;

    let jobs: Vec<(&Cell, usize)> = cells.iter().flat_map(|c| (0..c.runs).map(move |r| (c, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", opts.workers)))?;
    let outcomes: Vec<CliResult<bool>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, run)| {
                let id = run_id(cell.index, run);
                let path = staged_path(&opts.out, &id);
                let cfg = run_config(cell, run, config.base_seed);
                if load_matching(&path, &cfg).is_some() {
                    log::debug!("{id}: reusing staged result");
                    return Ok(false);
                }
                log::info!("{id}: {} run {run}", cell.label);
                let record = run_optimizer(&cfg)?;
                let staged = StagedRun {
                    run_id: id,
                    cell: cell.index,
                    run,
                    label: cell.label.clone(),
                    case: cell.case_key(),
                    variant: cell.variant(),
                    record,
                };
                tables::write_json(&path, &staged)?;
                Ok(true)
            })
            .collect()
    });
    let mut report = CampaignReport {
        cells: cells.len(),
        skipped_cells: all_cells.len() - cells.len(),
        ..Default::default()
    };
    for o in outcomes {
        if o? {
            report.executed += 1;
        } else {
            report.reused += 1;
        }
    }
    tabulate(&config, &cells, opts)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub index: usize,
    pub label: String,
    pub case: String,
    pub variant: String,
    pub runs: usize,
    pub analytic_hv: Option<f64>,
    pub evaluations: BoxStats,
    pub perceived_hv: BoxStats,
    pub ideal_hv: BoxStats,
    pub delta_v_perceived: Option<BoxStats>,
    pub delta_v_ideal: Option<BoxStats>,
    pub delta_d_perceived: Option<BoxStats>,
    pub delta_d_ideal: Option<BoxStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub name: String,
    pub base_seed: u64,
    pub cells: Vec<CellSummary>,
    pub notes: BTreeMap<String, String>,
}

fn optional_stats(values: Vec<Option<f64>>) -> CliResult<Option<BoxStats>> {
    match values.into_iter().collect::<Option<Vec<f64>>>() {
        Some(v) if !v.is_empty() => Ok(Some(box_stats(&v)?)),
        _ => Ok(None),
    }
}

/// Merges staged runs, in cell and run order, into the campaign tables.
fn tabulate(config: &CampaignConfig, cells: &[Cell], opts: &RunOptions) -> CliResult<()> {
    let mut metrics = Vec::new();
    let mut fronts = FrontTable::default();
    let mut traces = Vec::new();
    let mut summaries = Vec::new();
    let mut analytic_cases = BTreeMap::new();
    for cell in cells {
        let analytic = AnalyticFront::of(&cell.config.landscape);
        if let Some(a) = analytic {
            analytic_cases.entry(cell.case_key()).or_insert(a);
        }
        let mut cell_metrics: Vec<RunMetrics> = Vec::with_capacity(cell.runs);
        for run in 0..cell.runs {
            let id = run_id(cell.index, run);
            let staged: StagedRun = tables::read_json(&staged_path(&opts.out, &id))?;
            let rec = &staged.record;
            let eval = evaluate_run(&id, cell.index, run, &staged.case, &staged.variant, rec)?;
            for (member, a) in rec.archive.iter().enumerate() {
                fronts.rows.push(FrontRow {
                    run_id: id.clone(),
                    case: staged.case.clone(),
                    variant: staged.variant.clone(),
                    kind: "perceived".into(),
                    generation: rec.generations,
                    member,
                    f: a.perceived.clone(),
                    x: if opts.genotypes { a.x.clone() } else { Vec::new() },
                });
            }
            traces.push(TraceRow { run_id: id.clone(), generation: 0, perceived_hv: rec.initial_hv });
            traces.extend(rec.trace.iter().enumerate().map(|(g, &hv)| TraceRow {
                run_id: id.clone(),
                generation: g as u64 + 1,
                perceived_hv: hv,
            }));
            cell_metrics.push(eval.metrics);
        }
        let col = |f: fn(&RunMetrics) -> f64| cell_metrics.iter().map(f).collect::<Vec<_>>();
        let opt = |f: fn(&RunMetrics) -> Option<f64>| cell_metrics.iter().map(f).collect::<Vec<_>>();
        summaries.push(CellSummary {
            index: cell.index,
            label: cell.label.clone(),
            case: cell.case_key(),
            variant: cell.variant(),
            runs: cell.runs,
            analytic_hv: analytic.and_then(|a| a.hypervolume(&cell.config.reference_point)),
            evaluations: box_stats(&col(|r| r.evaluations as f64))?,
            perceived_hv: box_stats(&col(|r| r.perceived_hv))?,
            ideal_hv: box_stats(&col(|r| r.ideal_hv))?,
            delta_v_perceived: optional_stats(opt(|r| r.delta_v_perceived))?,
            delta_v_ideal: optional_stats(opt(|r| r.delta_v_ideal))?,
            delta_d_perceived: optional_stats(opt(|r| r.delta_d_perceived))?,
            delta_d_ideal: optional_stats(opt(|r| r.delta_d_ideal))?,
        });
        metrics.extend(cell_metrics);
    }
    for (case, a) in &analytic_cases {
        fronts.rows.extend(a.plot_points().into_iter().enumerate().map(|(member, (f1, f2))| FrontRow {
            run_id: String::new(),
            case: case.clone(),
            variant: "analytic".into(),
            kind: "analytic".into(),
            generation: 0,
            member,
            f: vec![f1, f2],
            x: Vec::new(),
        }));
    }
    tables::write_records(&opts.out.join(tables::RUNS_CSV), &metrics)?;
    fronts.write(&opts.out.join(tables::FRONTS_CSV))?;
    tables::write_records(&opts.out.join(tables::TRACES_CSV), &traces)?;
    let summary = CampaignSummary {
        name: config.name.clone(),
        base_seed: config.base_seed,
        cells: summaries,
        notes: config.notes.clone(),
    };
    tables::write_json(&opts.out.join(tables::SUMMARY_JSON), &summary)
}

/// Every staged run in an output directory, sorted by run id.
pub fn load_staged(out: &Path) -> CliResult<Vec<StagedRun>> {
    let dir = out.join(tables::RUNS_DIR);
    let entries = fs::read_dir(&dir).map_err(|e| {
        CliError::MissingData(format!(
            "no staged runs under {} ({e}); final-population genotypes are kept only there, \
             fronts.csv alone is not enough for post-hoc analysis",
            dir.display()
        ))
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| tables::read_json(p)).collect()
}
