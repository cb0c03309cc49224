//! Box-plot summaries and pairwise rank-sum tests over `runs.csv`.

use std::fmt::Write as _;
use std::path::Path;

use noisebench_core::indicators::{box_stats, mann_whitney, TestMethod};
use serde::{Deserialize, Serialize};

use crate::analysis::RunMetrics;
use crate::error::{CliError, CliResult};
use crate::tables;

pub const STATS_CSV: &str = "stats.csv";
pub const UTEST_CSV: &str = "utest.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRow {
    pub case: String,
    pub variant: String,
    pub metric: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UTestRow {
    pub case: String,
    pub metric: String,
    pub a: String,
    pub b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub u_a: f64,
    pub u_b: f64,
    pub p_value: f64,
    pub method: String,
    /// `+` when `a` has the significantly larger hypervolume.
    pub direction: String,
}

type Metric = (&'static str, fn(&RunMetrics) -> Option<f64>);

const BOX_METRICS: [Metric; 6] = [
    ("perceived_hv", |r| Some(r.perceived_hv)),
    ("ideal_hv", |r| Some(r.ideal_hv)),
    ("delta_v_perceived", |r| r.delta_v_perceived),
    ("delta_v_ideal", |r| r.delta_v_ideal),
    ("delta_d_perceived", |r| r.delta_d_perceived),
    ("delta_d_ideal", |r| r.delta_d_ideal),
];

const TEST_METRICS: [Metric; 2] = [("perceived_hv", |r| Some(r.perceived_hv)), ("ideal_hv", |r| Some(r.ideal_hv))];

/// Test cases with their variants, in order of first appearance.
fn grouped(runs: &[RunMetrics]) -> Vec<(String, Vec<(String, Vec<&RunMetrics>)>)> {
    let mut out: Vec<(String, Vec<(String, Vec<&RunMetrics>)>)> = Vec::new();
    for r in runs {
        let case = match out.iter_mut().find(|(c, _)| *c == r.case) {
            Some(c) => c,
            None => {
                out.push((r.case.clone(), Vec::new()));
                out.last_mut().unwrap()
            }
        };
        match case.1.iter_mut().find(|(v, _)| *v == r.variant) {
            Some(v) => v.1.push(r),
            None => case.1.push((r.variant.clone(), vec![r])),
        }
    }
    out
}

pub struct StatsReport {
    pub boxes: Vec<BoxRow>,
    pub tests: Vec<UTestRow>,
    /// Human-readable table of test outcomes on the ideal hypervolume.
    pub table: String,
}

pub fn compute(runs: &[RunMetrics], alpha: f64) -> CliResult<StatsReport> {
    let mut boxes = Vec::new();
    let mut tests = Vec::new();
    let mut table = String::new();
    for (case, variants) in grouped(runs) {
        for (variant, rs) in &variants {
            for (metric, get) in BOX_METRICS {
                let values: Option<Vec<f64>> = rs.iter().map(|r| get(r)).collect();
                let Some(values) = values else { continue };
                let b = box_stats(&values)?;
                boxes.push(BoxRow {
                    case: case.clone(),
                    variant: variant.clone(),
                    metric: metric.into(),
                    count: values.len(),
                    min: b.min,
                    q1: b.q1,
                    median: b.median,
                    q3: b.q3,
                    max: b.max,
                    mean: b.mean,
                });
            }
        }
        let _ = writeln!(table, "{case}");
        if variants.len() < 2 {
            let _ = writeln!(table, "  (single variant, nothing to compare)");
        }
        for i in 0..variants.len() {
            for j in i + 1..variants.len() {
                let (va, ra) = &variants[i];
                let (vb, rb) = &variants[j];
                if ra.len() < 2 || rb.len() < 2 {
                    log::warn!("{case}: {va} vs {vb} skipped, each side needs at least two runs");
                    let _ = writeln!(table, "  {va} vs {vb}: skipped (too few runs)");
                    continue;
                }
                let mut cells = Vec::new();
                for (metric, get) in TEST_METRICS {
                    let a: Vec<f64> = ra.iter().filter_map(|r| get(r)).collect();
                    let b: Vec<f64> = rb.iter().filter_map(|r| get(r)).collect();
                    let t = mann_whitney(&a, &b, alpha)?;
                    cells.push(format!("{metric} {}", t.direction.symbol()));
                    tests.push(UTestRow {
                        case: case.clone(),
                        metric: metric.into(),
                        a: va.clone(),
                        b: vb.clone(),
                        n_a: a.len(),
                        n_b: b.len(),
                        u_a: t.u_a,
                        u_b: t.u_b,
                        p_value: t.p_value,
                        method: match t.method {
                            TestMethod::Exact => "exact".into(),
                            TestMethod::Normal => "normal".into(),
                        },
                        direction: t.direction.symbol().to_string(),
                    });
                }
                let _ = writeln!(table, "  {va} vs {vb}: {}", cells.join(", "));
            }
        }
    }
    Ok(StatsReport { boxes, tests, table })
}

/// Reads `runs.csv` from `out`, writes `stats.csv` and `utest.csv` next to
/// it and returns the report.
pub fn run_stats(out: &Path, alpha: f64) -> CliResult<StatsReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {alpha}")));
    }
    let path = out.join(tables::RUNS_CSV);
    if !path.exists() {
        return Err(CliError::MissingData(format!("{} not found; run a campaign first", path.display())));
    }
    let runs: Vec<RunMetrics> = tables::read_records(&path)?;
    let report = compute(&runs, alpha)?;
    tables::write_records(&out.join(STATS_CSV), &report.boxes)?;
    tables::write_records(&out.join(UTEST_CSV), &report.tests)?;
    Ok(report)
}
