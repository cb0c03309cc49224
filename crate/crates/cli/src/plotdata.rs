//! Row selection from the campaign tables for plotting.

use std::path::Path;

use crate::error::{CliError, CliResult};

/// A `key=value` filter; `run` is accepted as shorthand for `run_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    pub column: String,
    pub value: String,
}

pub fn parse_selection(spec: &str) -> CliResult<Vec<Filter>> {
    spec.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|term| {
            let (k, v) = term
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("selection term `{term}` is not of the form key=value")))?;
            let column = match k.trim() {
                "run" => "run_id",
                other => other,
            };
            Ok(Filter { column: column.to_string(), value: v.trim().to_string() })
        })
        .collect()
}

/// Copies the header and every row of `table` matching all filters.
pub fn select(table: &Path, filters: &[Filter]) -> CliResult<Vec<u8>> {
    let mut r = csv::Reader::from_path(table).map_err(|e| CliError::csv(format!("opening {}", table.display()), e))?;
    let header = r.headers().map_err(|e| CliError::csv(table.display().to_string(), e))?.clone();
    let mut columns = Vec::with_capacity(filters.len());
    for f in filters {
        let Some(i) = header.iter().position(|h| h == f.column) else {
            let known: Vec<&str> = header.iter().collect();
            return Err(CliError::Usage(format!(
                "unknown selection key `{}`; {} has columns {}",
                f.column,
                table.display(),
                known.join(", ")
            )));
        };
        columns.push((i, f.value.as_str()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(|e| CliError::csv("writing selection", e))?;
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::csv(table.display().to_string(), e))?;
        if columns.iter().all(|&(i, v)| rec.get(i) == Some(v)) {
            w.write_record(&rec).map_err(|e| CliError::csv("writing selection", e))?;
        }
    }
    w.into_inner().map_err(|e| CliError::io("writing selection", e.into_error()))
}
