//! Hypervolume of a point set read from CSV.

use std::path::Path;

use noisebench_core::indicators::hypervolume;
use noisebench_core::{ObjectiveVector, Sense, Senses};

use crate::error::{CliError, CliResult};

/// Reads objective vectors: the `f1..fm` columns when present, otherwise
/// every column. Rows with empty objective cells are skipped.
pub fn read_points(path: &Path, sense: Sense) -> CliResult<Vec<ObjectiveVector>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(format!("opening {}", path.display()), e))?;
    let header = r.headers().map_err(|e| CliError::csv(path.display().to_string(), e))?.clone();
    let named: Vec<usize> = (1..)
        .map_while(|k| header.iter().position(|h| h == format!("f{k}")))
        .collect();
    let cols: Vec<usize> = if named.is_empty() { (0..header.len()).collect() } else { named };
    let senses = Senses::uniform(cols.len(), sense);
    let mut points = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::csv(path.display().to_string(), e))?;
        if cols.iter().any(|&i| rec.get(i).is_none_or(str::is_empty)) {
            continue;
        }
        let values = cols
            .iter()
            .map(|&i| {
                rec[i].trim().parse::<f64>().map_err(|_| {
                    CliError::Usage(format!("{}:{}: `{}` is not a number", path.display(), k + 2, &rec[i]))
                })
            })
            .collect::<CliResult<Vec<f64>>>()?;
        points.push(ObjectiveVector::new(values, senses));
    }
    Ok(points)
}

pub fn parse_reference(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad reference coordinate `{s}`"))))
        .collect()
}

pub fn compute(path: &Path, reference: &[f64], sense: Sense) -> CliResult<f64> {
    let points = read_points(path, sense)?;
    if let Some(p) = points.first() {
        if p.m() != reference.len() {
            return Err(CliError::Usage(format!(
                "points have {} objectives but the reference point has {}",
                p.m(),
                reference.len()
            )));
        }
    }
    let reference = ObjectiveVector::new(reference.to_vec(), Senses::uniform(reference.len(), sense));
    Ok(hypervolume(&points, &reference)?)
}
