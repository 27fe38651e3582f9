//! Tabular benchmark files.
//!
//! One record per line, `<edge-bits>:<op-digits>,<fitness>`. Lines starting
//! with `#` and blank lines are ignored. The first other line may be a header
//! `v=<int>,L=<int>` fixing the search space.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use enas_runtime_core::landscape::{FitnessLandscape, TabularLandscape};
use enas_runtime_core::{Error as CoreError, Genotype, SearchSpaceParams};

use crate::error::{CliError, CliResult};

fn parse_header(line: &str) -> Option<Result<(usize, usize), String>> {
    let (v_part, l_part) = line.split_once(',')?;
    let v = v_part.trim().strip_prefix("v=")?;
    let l = l_part.trim().strip_prefix("L=")?;
    Some(match (v.parse(), l.parse()) {
        (Ok(v), Ok(l)) => Ok((v, l)),
        _ => Err(format!("malformed header {line:?}")),
    })
}

/// Parses benchmark text. `params` is required when the text has no header
/// and must agree with the header when both are present.
pub fn parse_tabular_benchmark<R: BufRead>(
    reader: R,
    source: &Path,
    params: Option<SearchSpaceParams>,
) -> CliResult<TabularLandscape> {
    let fail = |line: usize, message: String| CliError::Parse {
        path: source.to_path_buf(),
        line,
        message,
    };
    let mut space = params;
    let mut seen_record = false;
    let mut records = Vec::new();
    let mut lines_of = std::collections::HashMap::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| fail(lineno, e.to_string()))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if !seen_record {
            if let Some(header) = parse_header(text) {
                let (v, l) = header.map_err(|m| fail(lineno, m))?;
                let declared = SearchSpaceParams::new(v, l).map_err(|e| fail(lineno, e.to_string()))?;
                if let Some(given) = params {
                    if given != declared {
                        return Err(fail(
                            lineno,
                            format!("header declares {declared} but {given} was requested"),
                        ));
                    }
                }
                space = Some(declared);
                seen_record = true;
                continue;
            }
        }
        seen_record = true;
        let p = space.ok_or_else(|| {
            fail(lineno, "no `v=..,L=..` header; pass --v and --L".to_string())
        })?;
        let (geno, fit) = text
            .split_once(',')
            .ok_or_else(|| fail(lineno, "expected `<genotype>,<fitness>`".to_string()))?;
        let g = Genotype::parse(&p, geno).map_err(|e| fail(lineno, e.to_string()))?;
        let f: f64 = fit
            .trim()
            .parse()
            .map_err(|_| fail(lineno, format!("fitness {:?} is not a number", fit.trim())))?;
        if !f.is_finite() {
            return Err(fail(lineno, format!("fitness {f} is not finite")));
        }
        if let Some(first) = lines_of.insert(g.clone(), lineno) {
            return Err(fail(
                lineno,
                format!("genotype {g} already appeared on line {first}"),
            ));
        }
        records.push((g, f));
    }
    let p = space.ok_or_else(|| fail(0, "file has no records".to_string()))?;
    TabularLandscape::new(&p, records).map_err(|e| match &e {
        CoreError::TiedOptimum { first, second, .. } => {
            let line = lines_of
                .iter()
                .filter(|(g, _)| g.to_string() == *second || g.to_string() == *first)
                .map(|(_, &l)| l)
                .max()
                .unwrap_or(0);
            fail(line, e.to_string())
        }
        _ => CliError::Core(e),
    })
}

pub fn load_tabular_benchmark(
    path: &Path,
    params: Option<SearchSpaceParams>,
) -> CliResult<TabularLandscape> {
    let file = File::open(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    parse_tabular_benchmark(BufReader::new(file), path, params)
}

/// Writes a header and every record in genotype order. Fitness uses the
/// shortest decimal that parses back to the same value.
pub fn write_tabular_benchmark<W: Write>(out: &mut W, table: &TabularLandscape) -> CliResult<()> {
    writeln!(out, "{}", table.params())?;
    for (g, f) in table.records() {
        writeln!(out, "{g},{f}")?;
    }
    Ok(())
}
