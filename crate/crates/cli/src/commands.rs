//! Subcommand bodies. Each writes CSV to `out` and returns what it wrote.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use enas_runtime_core::drift::EhtBoundReport;
use enas_runtime_core::genotype::{genotype_with_profile, PopulationCounts};
use enas_runtime_core::landscape::{generate_synthetic_table, TableShape};
use enas_runtime_core::operators::random_genotype;
use enas_runtime_core::simulator::mc_transition_oracle;
use enas_runtime_core::transition::{exact_enumeration_oracle, step_distribution};
use enas_runtime_core::{DistanceProfile, MutationOp, RandomSeed, SearchSpaceParams};

use crate::benchio::write_tabular_benchmark;
use crate::csvio::{self, BoundRow, CompareRow, SimRow};
use crate::error::{CliError, CliResult};
use crate::spec::{ExperimentSpec, OracleKind};
use crate::sweep::{build_landscape, Engine, PointRun};

/// Allowed ratio of bound to empirical mean before a row counts as a
/// violation.
pub const COMPARE_SLACK: f64 = 1.05;

/// `d,C_d,chi_d,chi_d_gamma_1..chi_d_gamma_λ` for `d = 0..=n`, exact integers.
pub fn cmd_count<W: Write>(p: &SearchSpaceParams, lambda: usize, out: W) -> CliResult<()> {
    let counts = PopulationCounts::new(p, lambda)?;
    let mut w = csvio::writer(out)?;
    let mut header = vec!["d".to_string(), "C_d".into(), "chi_d".into()];
    header.extend((1..=lambda).map(|g| format!("chi_d_gamma_{g}")));
    w.write_record(&header)?;
    for d in 0..=p.n() {
        let mut row = vec![
            d.to_string(),
            counts.solutions(d).to_string(),
            counts.subspace(d).to_string(),
        ];
        row.extend((1..=lambda).map(|g| counts.class(d, g).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `d_y,probability[,oracle]` over the union of supports.
pub fn cmd_transition<W: Write>(
    spec: &ExperimentSpec,
    op: MutationOp,
    prof: DistanceProfile,
    out: W,
) -> CliResult<Vec<(usize, f64, Option<f64>)>> {
    let p = &spec.params;
    let analytic = step_distribution(p, op, prof)?;
    let oracle = match spec.oracle {
        OracleKind::None => None,
        kind => {
            let opt = random_genotype(p, &mut spec.seed.derive("target", 0).rng());
            let x = genotype_with_profile(p, &opt, prof)?;
            Some(match kind {
                OracleKind::Exact => exact_enumeration_oracle(p, &x, op, &opt)?.to_f64(),
                _ => mc_transition_oracle(
                    p,
                    &x,
                    op,
                    &opt,
                    spec.mc_samples,
                    spec.seed.derive("mc", 0),
                )?,
            })
        }
    };
    let mut rows = Vec::new();
    for d_y in 0..=p.n() {
        let a = analytic.mass(d_y);
        let o = oracle.as_ref().map(|o| o.mass(d_y));
        if a != 0.0 || o.is_some_and(|m| m != 0.0) {
            rows.push((d_y, a, o));
        }
    }
    let mut w = csvio::writer(out)?;
    if oracle.is_some() {
        w.write_record(["d_y", "probability", "oracle"])?;
    } else {
        w.write_record(["d_y", "probability"])?;
    }
    for &(d_y, a, o) in &rows {
        let mut rec = vec![d_y.to_string(), a.to_string()];
        if let Some(o) = o {
            rec.push(o.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(rows)
}

fn all_points(spec: &ExperimentSpec) -> Vec<(MutationOp, usize)> {
    spec.ops
        .iter()
        .flat_map(|&op| spec.lambdas.iter().map(move |&l| (op, l)))
        .collect()
}

/// Lower-bound sweep, one row per operator and λ.
pub fn cmd_eht_bound<W: Write>(spec: &ExperimentSpec, out: W) -> CliResult<Vec<EhtBoundReport>> {
    let engine = Engine::new(spec.jobs)?;
    let landscape = build_landscape(spec)?;
    let pi_t = engine.pi_t(spec, landscape.as_ref(), &[])?;
    let reports = engine.bounds(spec, &pi_t)?;
    let rows: Vec<BoundRow> = reports.iter().map(BoundRow::from).collect();
    csvio::write_rows(out, &rows)?;
    Ok(reports)
}

/// Empirical sweep, one row per operator and λ.
pub fn cmd_simulate<W: Write>(spec: &ExperimentSpec, out: W) -> CliResult<Vec<PointRun>> {
    let engine = Engine::new(spec.jobs)?;
    let landscape = build_landscape(spec)?;
    let runs = engine.simulate(spec, landscape.as_ref(), &all_points(spec), false)?;
    let rows: Vec<SimRow> = runs.iter().map(PointRun::row).collect();
    csvio::write_rows(out, &rows)?;
    Ok(runs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<CompareRow>,
    pub violations: usize,
}

type JoinKey = (String, Option<usize>, usize);

/// Joins bound rows with empirical rows on `(operator, q, lambda)`.
pub fn join_rows(bounds: &[BoundRow], sims: &[SimRow]) -> CliResult<Comparison> {
    let mut empirical: BTreeMap<JoinKey, &SimRow> = BTreeMap::new();
    for s in sims {
        if empirical
            .insert((s.operator.clone(), s.q, s.lambda), s)
            .is_some()
        {
            return Err(CliError::Validation(format!(
                "empirical rows repeat ({}, {:?}, {})",
                s.operator, s.q, s.lambda
            )));
        }
    }
    if empirical.len() != bounds.len() {
        return Err(CliError::Validation(format!(
            "theory has {} rows but empirical has {}",
            bounds.len(),
            empirical.len()
        )));
    }
    let mut rows = Vec::with_capacity(bounds.len());
    for b in bounds {
        let s = empirical.get(&(b.operator.clone(), b.q, b.lambda)).ok_or_else(|| {
            CliError::Validation(format!(
                "no empirical row for ({}, {:?}, {})",
                b.operator, b.q, b.lambda
            ))
        })?;
        let violation = s
            .mean_generations
            .is_some_and(|m| b.eht_lower_bound > m * COMPARE_SLACK);
        rows.push(CompareRow {
            operator: b.operator.clone(),
            q: b.q,
            lambda: b.lambda,
            eht_lower_bound: b.eht_lower_bound,
            mean_generations: s.mean_generations,
            censored: s.censored,
            violation,
        });
    }
    let violations = rows.iter().filter(|r| r.violation).count();
    Ok(Comparison { rows, violations })
}

/// Theory against experiment. With both paths given the two CSVs are joined;
/// otherwise both sweeps run here, sharing the Mutation#1 runs between the
/// empirical rows and the π_t fit.
pub fn cmd_compare<W: Write>(
    spec: &ExperimentSpec,
    theory: Option<&Path>,
    empirical: Option<&Path>,
    out: W,
) -> CliResult<Comparison> {
    let (bounds, sims): (Vec<BoundRow>, Vec<SimRow>) = match (theory, empirical) {
        (Some(t), Some(e)) => (csvio::read_rows(t)?, csvio::read_rows(e)?),
        (None, None) => {
            let engine = Engine::new(spec.jobs)?;
            let landscape = build_landscape(spec)?;
            let mut m1_points = Vec::new();
            let mut others = Vec::new();
            for point in all_points(spec) {
                if point.0 == MutationOp::OneBitBitFair {
                    m1_points.push(point);
                } else {
                    others.push(point);
                }
            }
            let m1 = engine.simulate(spec, landscape.as_ref(), &m1_points, true)?;
            let rest = engine.simulate(spec, landscape.as_ref(), &others, false)?;
            let pi_t = engine.pi_t(spec, landscape.as_ref(), &m1)?;
            let reports = engine.bounds(spec, &pi_t)?;
            let mut runs: Vec<&PointRun> = m1.iter().chain(&rest).collect();
            runs.sort_by_key(|r| (r.op, r.lambda));
            (
                reports.iter().map(BoundRow::from).collect(),
                runs.into_iter().map(PointRun::row).collect(),
            )
        }
        _ => {
            return Err(CliError::Validation(
                "compare needs both --theory and --empirical, or neither".into(),
            ))
        }
    };
    let comparison = join_rows(&bounds, &sims)?;
    csvio::write_rows(out, &comparison.rows)?;
    Ok(comparison)
}

/// Pooled Mutation#1 distance samples per λ with their Gaussian fit:
/// `lambda,d,empirical,gaussian,mu,sigma`.
pub fn cmd_pi_t<W: Write>(spec: &ExperimentSpec, out: W) -> CliResult<()> {
    let engine = Engine::new(spec.jobs)?;
    let landscape = build_landscape(spec)?;
    let points: Vec<(MutationOp, usize)> = spec
        .lambdas
        .iter()
        .map(|&l| (MutationOp::OneBitBitFair, l))
        .collect();
    let runs = engine.simulate(spec, landscape.as_ref(), &points, true)?;
    let n = spec.params.n();
    let mut w = csvio::writer(out)?;
    w.write_record(["lambda", "d", "empirical", "gaussian", "mu", "sigma"])?;
    for run in &runs {
        let empirical = enas_runtime_core::drift::empirical_distribution(&run.samples, n)?;
        let fit = enas_runtime_core::drift::gaussian_fit_distribution(&run.samples, n)?;
        let (mu, sigma) = match fit.provenance() {
            enas_runtime_core::drift::Provenance::GaussianFit { mu, sigma } => (mu, sigma),
            _ => unreachable!("gaussian fit provenance"),
        };
        for d in 0..=n {
            w.write_record([
                run.lambda.to_string(),
                d.to_string(),
                empirical.mass(d).to_string(),
                fit.mass(d).to_string(),
                mu.to_string(),
                sigma.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Full synthetic benchmark table in the benchmark file format.
pub fn cmd_generate_table<W: Write>(
    p: &SearchSpaceParams,
    seed: RandomSeed,
    shape: TableShape,
    mut out: W,
) -> CliResult<()> {
    let table = generate_synthetic_table(p, seed, shape)?;
    writeln!(out, "# synthetic benchmark, seed={}", seed.0)?;
    write_tabular_benchmark(&mut out, &table)?;
    out.flush()?;
    Ok(())
}
