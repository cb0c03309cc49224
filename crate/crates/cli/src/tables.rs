//! CSV tables written by campaigns and post-hoc analysis.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a
//! table read back and rewritten is byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{de::DeserializeOwned, Serialize};

use crate::error::{CliError, CliResult};

pub const RUNS_CSV: &str = "runs.csv";
pub const FRONTS_CSV: &str = "fronts.csv";
pub const TRACES_CSV: &str = "traces.csv";
pub const CLOUDS_CSV: &str = "clouds.csv";
pub const ELLIPSES_CSV: &str = "ellipses.csv";
pub const SUMMARY_JSON: &str = "summary.json";
pub const CONFIG_SNAPSHOT: &str = "config.json";
pub const RUNS_DIR: &str = "runs";

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    let ctx = || format!("writing {}", path.display());
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(ctx(), e))?;
    f.write_all(bytes).map_err(|e| CliError::io(ctx(), e))?;
    f.sync_all().map_err(|e| CliError::io(ctx(), e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(ctx(), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::json(path.display().to_string(), e))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(format!("parsing {}", path.display()), e))
}

pub fn write_records<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::csv(path.display().to_string(), e))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(path.display().to_string(), e.into_error()))?;
    write_atomic(path, &bytes)
}

pub fn read_records<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(format!("opening {}", path.display()), e))?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(|e| CliError::csv(format!("reading {}", path.display()), e))
}

/// One point of a front, with optional genotype.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontRow {
    pub run_id: String,
    pub case: String,
    pub variant: String,
    pub kind: String,
    pub generation: u64,
    pub member: usize,
    pub f: Vec<f64>,
    pub x: Vec<f64>,
}

/// `fronts.csv`: run id, generation, kind, member index, test case and
/// variant, then `f1..fM` and `x1..xN` sized to the widest row. Shorter
/// rows leave trailing cells empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrontTable {
    pub rows: Vec<FrontRow>,
}

const FRONT_LEAD: [&str; 6] = ["run_id", "generation", "kind", "member_index", "case", "variant"];

fn parse_num<T: std::str::FromStr>(s: &str, what: &str, path: &Path, line: usize) -> CliResult<T> {
    s.parse().map_err(|_| CliError::MissingData(format!("{}:{line}: bad {what} `{s}`", path.display())))
}

impl FrontTable {
    pub fn width(&self) -> (usize, usize) {
        let m = self.rows.iter().map(|r| r.f.len()).max().unwrap_or(0);
        let n = self.rows.iter().map(|r| r.x.len()).max().unwrap_or(0);
        (m, n)
    }

    pub fn header(m: usize, n: usize) -> Vec<String> {
        let mut h: Vec<String> = FRONT_LEAD.iter().map(|s| s.to_string()).collect();
        h.extend((1..=m).map(|i| format!("f{i}")));
        h.extend((1..=n).map(|i| format!("x{i}")));
        h
    }

    pub fn to_csv_bytes(&self) -> CliResult<Vec<u8>> {
        let (m, n) = self.width();
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e| CliError::csv("formatting fronts", e);
        w.write_record(Self::header(m, n)).map_err(err)?;
        for r in &self.rows {
            let mut rec: Vec<String> = vec![
                r.run_id.clone(),
                r.generation.to_string(),
                r.kind.clone(),
                r.member.to_string(),
                r.case.clone(),
                r.variant.clone(),
            ];
            rec.extend((0..m).map(|i| r.f.get(i).map(|v| v.to_string()).unwrap_or_default()));
            rec.extend((0..n).map(|i| r.x.get(i).map(|v| v.to_string()).unwrap_or_default()));
            w.write_record(&rec).map_err(err)?;
        }
        w.into_inner().map_err(|e| CliError::io("formatting fronts", e.into_error()))
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_atomic(path, &self.to_csv_bytes()?)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(format!("opening {}", path.display()), e))?;
        let header = r.headers().map_err(|e| CliError::csv(path.display().to_string(), e))?.clone();
        if header.len() < FRONT_LEAD.len() || header.iter().zip(FRONT_LEAD).any(|(a, b)| a != b) {
            return Err(CliError::MissingData(format!("{} is not a fronts table", path.display())));
        }
        let m = header.iter().filter(|h| h.starts_with('f') && h[1..].parse::<usize>().is_ok()).count();
        let mut rows = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let line = k + 2;
            let rec = rec.map_err(|e| CliError::csv(path.display().to_string(), e))?;
            let nums = |range: std::ops::Range<usize>| -> CliResult<Vec<f64>> {
                range
                    .filter_map(|i| rec.get(i).filter(|s| !s.is_empty()))
                    .map(|s| parse_num(s, "number", path, line))
                    .collect()
            };
            let lead = FRONT_LEAD.len();
            rows.push(FrontRow {
                run_id: rec[0].to_string(),
                generation: parse_num(&rec[1], "generation", path, line)?,
                kind: rec[2].to_string(),
                member: parse_num(&rec[3], "member_index", path, line)?,
                case: rec[4].to_string(),
                variant: rec[5].to_string(),
                f: nums(lead..lead + m)?,
                x: nums(lead + m..rec.len())?,
            });
        }
        Ok(Self { rows })
    }

    /// Replaces every row of `kind` belonging to one of `run_ids`, keeping
    /// the remaining rows in place and appending the new ones.
    pub fn replace_kind(&mut self, kind: &str, run_ids: &[String], new_rows: Vec<FrontRow>) {
        self.rows.retain(|r| !(r.kind == kind && run_ids.contains(&r.run_id)));
        self.rows.extend(new_rows);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct TraceRow {
    pub run_id: String,
    pub generation: u64,
    pub perceived_hv: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct CloudRow {
    pub run_id: String,
    pub member: usize,
    pub draw: usize,
    pub eps2: f64,
    pub f1: f64,
    pub f2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct EllipseRow {
    pub run_id: String,
    pub member: usize,
    /// `empirical` (from a resampled cloud) or `analytic`.
    pub source: String,
    pub center1: f64,
    pub center2: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub angle: f64,
}
