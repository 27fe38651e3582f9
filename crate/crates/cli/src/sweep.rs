//! Parallel evaluation of sweep points.
//!
//! Seeds: the landscape target comes from `(seed, "landscape", 0)`, and every
//! operator at population size λ runs from `(seed, "lambda", λ)`, so all
//! operators see the same initial populations. Trial `i` of a point then
//! derives `("trial", i)` from the point seed.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Deserialize;

use enas_runtime_core::drift::{
    gaussian_fit_distribution, uniform_initial_distribution, CaseStudy, DistanceDistribution,
    EhtBoundReport, Provenance,
};
use enas_runtime_core::landscape::{DistanceLandscape, FitnessLandscape, JitteredDistanceLandscape};
use enas_runtime_core::simulator::{run_trial, HittingTimeStats, Outcome, RunConfig};
use enas_runtime_core::MutationOp;

use crate::benchio::load_tabular_benchmark;
use crate::csvio;
use crate::error::{CliError, CliResult};
use crate::spec::{ExperimentSpec, LandscapeSpec, PiTSource};

pub fn build_landscape(spec: &ExperimentSpec) -> CliResult<Box<dyn FitnessLandscape>> {
    let seed = spec.seed.derive("landscape", 0);
    Ok(match &spec.landscape {
        LandscapeSpec::Distance => Box::new(DistanceLandscape::random(&spec.params, seed)),
        LandscapeSpec::DistanceJitter => {
            Box::new(JitteredDistanceLandscape::random(&spec.params, seed))
        }
        LandscapeSpec::Table(path) => Box::new(load_tabular_benchmark(path, Some(spec.params))?),
    })
}

pub fn point_config(spec: &ExperimentSpec, op: MutationOp, lambda: usize) -> RunConfig {
    RunConfig {
        params: spec.params,
        lambda,
        op,
        max_generations: spec.max_generations,
        seed: spec.seed.derive("lambda", lambda as u64),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRun {
    pub op: MutationOp,
    pub lambda: usize,
    pub stats: HittingTimeStats,
    /// Pooled pre-hitting distances, when requested.
    pub samples: Vec<usize>,
}

impl PointRun {
    pub fn row(&self) -> csvio::SimRow {
        let (operator, q) = csvio::op_columns(self.op);
        csvio::SimRow {
            operator: operator.to_string(),
            q,
            lambda: self.lambda,
            trials: self.stats.trials,
            mean_generations: self.stats.mean,
            std: self.stats.std,
            censored: self.stats.censored_count,
        }
    }
}

pub struct Engine {
    pool: rayon::ThreadPool,
}

impl Engine {
    pub fn new(jobs: usize) -> CliResult<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot start worker threads: {e}")))?;
        Ok(Self { pool })
    }

    /// Runs every `(op, λ)` point; results come back in the order given.
    pub fn simulate(
        &self,
        spec: &ExperimentSpec,
        landscape: &dyn FitnessLandscape,
        points: &[(MutationOp, usize)],
        keep_samples: bool,
    ) -> CliResult<Vec<PointRun>> {
        self.pool.install(|| {
            points
                .par_iter()
                .map(|&(op, lambda)| run_point(spec, landscape, op, lambda, keep_samples))
                .collect()
        })
    }

    /// π_t per λ from `spec.pi_t`. Gaussian fits reuse Mutation#1 runs from
    /// `m1_runs` when present.
    pub fn pi_t(
        &self,
        spec: &ExperimentSpec,
        landscape: &dyn FitnessLandscape,
        m1_runs: &[PointRun],
    ) -> CliResult<BTreeMap<usize, DistanceDistribution>> {
        let n = spec.params.n();
        let mut out = BTreeMap::new();
        match &spec.pi_t {
            PiTSource::Uniform => {
                for &lambda in &spec.lambdas {
                    out.insert(lambda, uniform_initial_distribution(&spec.params, lambda)?);
                }
            }
            PiTSource::Empirical(path) => {
                let table = read_pi_t_file(path, n)?;
                for &lambda in &spec.lambdas {
                    let dist = table
                        .get(&Some(lambda))
                        .or_else(|| table.get(&None))
                        .ok_or_else(|| {
                            CliError::Validation(format!(
                                "{} has no distribution for lambda = {lambda}",
                                path.display()
                            ))
                        })?;
                    out.insert(lambda, dist.clone());
                }
            }
            PiTSource::GaussianFit => {
                let missing: Vec<(MutationOp, usize)> = spec
                    .lambdas
                    .iter()
                    .filter(|&&l| !m1_runs.iter().any(|r| r.lambda == l && !r.samples.is_empty()))
                    .map(|&l| (MutationOp::OneBitBitFair, l))
                    .collect();
                let extra = self.simulate(spec, landscape, &missing, true)?;
                for run in m1_runs.iter().chain(&extra) {
                    if run.op == MutationOp::OneBitBitFair && !run.samples.is_empty() {
                        out.insert(run.lambda, gaussian_fit_distribution(&run.samples, n)?);
                    }
                }
                for &lambda in &spec.lambdas {
                    if !out.contains_key(&lambda) {
                        return Err(enas_runtime_core::Error::EmptySample.into());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Bound reports sorted by operator, then λ.
    pub fn bounds(
        &self,
        spec: &ExperimentSpec,
        pi_t: &BTreeMap<usize, DistanceDistribution>,
    ) -> CliResult<Vec<EhtBoundReport>> {
        let qs: Vec<usize> = spec.ops.iter().filter_map(|op| op.q()).collect();
        let study = CaseStudy::new(&spec.params, &qs)?;
        let points: Vec<(MutationOp, usize)> = spec
            .ops
            .iter()
            .flat_map(|&op| spec.lambdas.iter().map(move |&l| (op, l)))
            .collect();
        self.pool.install(|| {
            points
                .par_iter()
                .map(|&(op, lambda)| Ok(study.bound(op, lambda, &pi_t[&lambda])?))
                .collect()
        })
    }
}

fn run_point(
    spec: &ExperimentSpec,
    landscape: &dyn FitnessLandscape,
    op: MutationOp,
    lambda: usize,
    keep_samples: bool,
) -> CliResult<PointRun> {
    let cfg = point_config(spec, op, lambda);
    let per_trial: Vec<(Outcome, Vec<usize>)> = (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let r = run_trial(&cfg, landscape, i)?;
            let samples = if keep_samples {
                r.pre_hitting_distances().to_vec()
            } else {
                Vec::new()
            };
            Ok((r.outcome, samples))
        })
        .collect::<Result<_, enas_runtime_core::Error>>()?;
    let mut samples = Vec::new();
    let mut outcomes = Vec::with_capacity(per_trial.len());
    for (o, s) in per_trial {
        outcomes.push(o);
        samples.extend(s);
    }
    Ok(PointRun {
        op,
        lambda,
        stats: HittingTimeStats::from_outcomes(outcomes),
        samples,
    })
}

#[derive(Debug, Deserialize)]
struct PiTRecord {
    lambda: Option<usize>,
    d: usize,
    mass: Option<f64>,
    empirical: Option<f64>,
}

/// Reads `d` with a `mass` (or `empirical`) column and an optional `lambda`
/// column; rows without λ apply to every λ.
pub fn read_pi_t_file(
    path: &std::path::Path,
    n: usize,
) -> CliResult<BTreeMap<Option<usize>, DistanceDistribution>> {
    let rows: Vec<(usize, PiTRecord)> = csvio::read_numbered_rows(path)?;
    let mut weights: BTreeMap<Option<usize>, Vec<f64>> = BTreeMap::new();
    for (line, r) in &rows {
        let bad = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line: *line,
            message,
        };
        if r.d > n {
            return Err(bad(format!("distance {} exceeds n = {n}", r.d)));
        }
        let m = r
            .mass
            .or(r.empirical)
            .ok_or_else(|| bad("needs a `mass` or `empirical` column".into()))?;
        weights.entry(r.lambda).or_insert_with(|| vec![0.0; n + 1])[r.d] += m;
    }
    if weights.is_empty() {
        return Err(CliError::Validation(format!("{} has no rows", path.display())));
    }
    weights
        .into_iter()
        .map(|(k, w)| Ok((k, DistanceDistribution::from_weights(w, Provenance::Empirical)?)))
        .collect()
}
