//! CSV schemas. Every file starts with the line `# schema=v1`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use enas_runtime_core::drift::EhtBoundReport;
use enas_runtime_core::MutationOp;

use crate::error::{CliError, CliResult};

pub const SCHEMA_LINE: &str = "# schema=v1";

pub fn writer<W: Write>(mut out: W) -> CliResult<csv::Writer<W>> {
    writeln!(out, "{SCHEMA_LINE}")?;
    Ok(csv::WriterBuilder::new().from_writer(out))
}

/// Opens a CSV file. A leading `# schema=` line must name this version; files
/// without one are read as-is.
pub fn reader(path: &Path) -> CliResult<csv::Reader<std::io::Cursor<String>>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    if let Some(first) = text.lines().next() {
        let first = first.trim();
        if first.starts_with("# schema=") && first != SCHEMA_LINE {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: format!("unsupported {:?}, expected {SCHEMA_LINE:?}", first),
            });
        }
    }
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(std::io::Cursor::new(text)))
}

pub fn op_columns(op: MutationOp) -> (&'static str, Option<usize>) {
    (op.name(), op.q())
}

/// One row of `eht-bound` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub operator: String,
    pub q: Option<usize>,
    pub lambda: usize,
    #[serde(rename = "E_d0")]
    pub e_d0: f64,
    pub avg_drift_upper: f64,
    pub eht_lower_bound: f64,
}

impl From<&EhtBoundReport> for BoundRow {
    fn from(r: &EhtBoundReport) -> Self {
        let (operator, q) = op_columns(r.operator);
        BoundRow {
            operator: operator.to_string(),
            q,
            lambda: r.lambda,
            e_d0: r.expected_initial_distance,
            avg_drift_upper: r.average_drift_upper,
            eht_lower_bound: r.eht_lower_bound,
        }
    }
}

/// One row of `simulate` output; mean and std are blank when no trial hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub operator: String,
    pub q: Option<usize>,
    pub lambda: usize,
    pub trials: usize,
    pub mean_generations: Option<f64>,
    pub std: Option<f64>,
    pub censored: usize,
}

/// One row of `compare` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub operator: String,
    pub q: Option<usize>,
    pub lambda: usize,
    pub eht_lower_bound: f64,
    pub mean_generations: Option<f64>,
    pub censored: usize,
    pub violation: bool,
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> CliResult<()> {
    let mut w = writer(out)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Vec<T>> {
    Ok(read_numbered_rows(path)?.into_iter().map(|(_, row)| row).collect())
}

/// Rows paired with their 1-based line numbers in the file.
pub fn read_numbered_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Vec<(usize, T)>> {
    let mut r = reader(path)?;
    let fail = |line: usize, e: csv::Error| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("does not match the expected schema: {e}"),
    };
    let headers = r
        .headers()
        .map_err(|e| fail(e.position().map_or(1, |p| p.line() as usize), e))?
        .clone();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record.map_err(|e| fail(e.position().map_or(0, |p| p.line() as usize), e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push((line, record.deserialize(Some(&headers)).map_err(|e| fail(line, e))?));
    }
    Ok(rows)
}
