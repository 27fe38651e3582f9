//! Experiment specifications: flag and config-file values merged over
//! defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use enas_runtime_core::{MutationOp, RandomSeed, SearchSpaceParams};

use crate::error::{CliError, CliResult};

pub const DEFAULT_V: usize = 7;
pub const DEFAULT_L: usize = 2;
pub const DEFAULT_SWEEP: LambdaSweep = LambdaSweep {
    start: 1,
    stop: 97,
    step: 4,
};
pub const DEFAULT_QS: [usize; 5] = [1, 2, 3, 4, 5];
pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_MAX_GENS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

/// `START:STOP:STEP` with `STOP` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LambdaSweep {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

impl LambdaSweep {
    pub fn values(&self) -> Vec<usize> {
        (self.start..=self.stop).step_by(self.step).collect()
    }
}

impl FromStr for LambdaSweep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(format!("lambda sweep {s:?} must be START:STOP:STEP"));
        };
        let num = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("lambda sweep {s:?}: {x:?} is not a positive integer"))
        };
        let sweep = LambdaSweep {
            start: num(start)?,
            stop: num(stop)?,
            step: num(step)?,
        };
        if sweep.start == 0 || sweep.step == 0 || sweep.stop < sweep.start {
            return Err(format!(
                "lambda sweep {s:?} needs 1 <= START <= STOP and STEP >= 1"
            ));
        }
        Ok(sweep)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LandscapeSpec {
    /// `n − hamming(x, target)` with a seeded target.
    Distance,
    /// The distance landscape plus a seeded per-genotype jitter in `[0, 0.5)`.
    DistanceJitter,
    Table(PathBuf),
}

impl FromStr for LandscapeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "distance" => Ok(LandscapeSpec::Distance),
            "distance-jitter" => Ok(LandscapeSpec::DistanceJitter),
            _ => match s.strip_prefix("table:") {
                Some(path) if !path.is_empty() => Ok(LandscapeSpec::Table(path.into())),
                _ => Err(format!(
                    "landscape {s:?} must be distance, distance-jitter or table:PATH"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PiTSource {
    /// Uniform over non-optimal populations.
    Uniform,
    /// Gaussian fitted to Mutation#1 runs at each λ.
    GaussianFit,
    Empirical(PathBuf),
}

impl FromStr for PiTSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(PiTSource::Uniform),
            "gaussian-fit" => Ok(PiTSource::GaussianFit),
            _ => match s.strip_prefix("empirical:") {
                Some(path) if !path.is_empty() => Ok(PiTSource::Empirical(path.into())),
                _ => Err(format!(
                    "pi-t source {s:?} must be uniform, gaussian-fit or empirical:PATH"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    None,
    Exact,
    Mc,
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(OracleKind::None),
            "exact" => Ok(OracleKind::Exact),
            "mc" => Ok(OracleKind::Mc),
            _ => Err(format!("oracle {s:?} must be none, exact or mc")),
        }
    }
}

/// Values that may come from flags or a config file. Every field is
/// optional; [`Overrides::merge`] layers flags over the file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Overrides {
    pub v: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<usize>,
    pub lambda: Option<usize>,
    pub lambda_sweep: Option<String>,
    pub op: Option<Vec<String>>,
    pub q: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub max_gens: Option<usize>,
    pub seed: Option<u64>,
    pub landscape: Option<String>,
    pub pi_t: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub oracle: Option<String>,
    pub samples: Option<usize>,
}

impl Overrides {
    /// `self` wins wherever it is set.
    pub fn merge(self, lower: Overrides) -> Overrides {
        Overrides {
            v: self.v.or(lower.v),
            l: self.l.or(lower.l),
            lambda: self.lambda.or(lower.lambda),
            lambda_sweep: self.lambda_sweep.or(lower.lambda_sweep),
            op: self.op.or(lower.op),
            q: self.q.or(lower.q),
            trials: self.trials.or(lower.trials),
            max_gens: self.max_gens.or(lower.max_gens),
            seed: self.seed.or(lower.seed),
            landscape: self.landscape.or(lower.landscape),
            pi_t: self.pi_t.or(lower.pi_t),
            out: self.out.or(lower.out),
            jobs: self.jobs.or(lower.jobs),
            oracle: self.oracle.or(lower.oracle),
            samples: self.samples.or(lower.samples),
        }
    }

    pub fn from_toml_file(path: &Path) -> CliResult<Overrides> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Input {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| {
            CliError::Validation(format!("config {}: {}", path.display(), e.message()))
        })
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub params: SearchSpaceParams,
    pub lambdas: Vec<usize>,
    /// Operators in output order, q-slot mutation expanded over the q set.
    pub ops: Vec<MutationOp>,
    pub trials: usize,
    pub max_generations: usize,
    pub seed: RandomSeed,
    pub landscape: LandscapeSpec,
    pub pi_t: PiTSource,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub oracle: OracleKind,
    pub mc_samples: usize,
}

fn parse_field<T: FromStr<Err = String>>(value: Option<&str>, default: T) -> CliResult<T> {
    match value {
        Some(s) => s.parse().map_err(CliError::Validation),
        None => Ok(default),
    }
}

fn positive(what: &str, value: usize) -> CliResult<usize> {
    if value == 0 {
        return Err(CliError::Validation(format!("{what} must be at least 1")));
    }
    Ok(value)
}

fn expand_ops(names: &[String], qs: &[usize]) -> CliResult<Vec<MutationOp>> {
    let mut ops = Vec::new();
    for raw in names {
        for name in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "m1" => ops.push(MutationOp::OneBitBitFair),
                "m2" => ops.push(MutationOp::OneBitOffspringFair),
                "m4" => ops.push(MutationOp::Bitwise),
                "m3" => ops.extend(qs.iter().map(|&q| MutationOp::QBit(q))),
                other => match other.parse::<MutationOp>() {
                    Ok(op) => ops.push(op),
                    Err(_) => {
                        return Err(CliError::Validation(format!(
                            "operator {other:?} must be one of m1, m2, m3, m4"
                        )))
                    }
                },
            }
        }
    }
    ops.sort();
    ops.dedup();
    if ops.is_empty() {
        return Err(CliError::Validation("no operators selected".into()));
    }
    Ok(ops)
}

impl ExperimentSpec {
    pub fn resolve(o: &Overrides) -> CliResult<ExperimentSpec> {
        let params = SearchSpaceParams::new(o.v.unwrap_or(DEFAULT_V), o.l.unwrap_or(DEFAULT_L))?;
        let lambdas = match (o.lambda, &o.lambda_sweep) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation(
                    "--lambda and --lambda-sweep are mutually exclusive".into(),
                ))
            }
            (Some(l), None) => vec![positive("lambda", l)?],
            (None, Some(s)) => s.parse::<LambdaSweep>().map_err(CliError::Validation)?.values(),
            (None, None) => DEFAULT_SWEEP.values(),
        };
        let qs = match &o.q {
            Some(qs) => qs.clone(),
            None => DEFAULT_QS.into_iter().filter(|&q| q <= params.n()).collect(),
        };
        let default_ops = ["m1", "m2", "m3", "m4"].map(String::from).to_vec();
        let ops = expand_ops(o.op.as_ref().unwrap_or(&default_ops), &qs)?;
        for op in &ops {
            op.validate(&params)?;
        }
        let landscape = parse_field(o.landscape.as_deref(), LandscapeSpec::Distance)?;
        if let LandscapeSpec::Table(path) = &landscape {
            require_file(path)?;
        }
        let pi_t = parse_field(o.pi_t.as_deref(), PiTSource::GaussianFit)?;
        if let PiTSource::Empirical(path) = &pi_t {
            require_file(path)?;
        }
        let jobs = match o.jobs {
            Some(j) => positive("jobs", j)?,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        Ok(ExperimentSpec {
            params,
            lambdas,
            ops,
            trials: positive("trials", o.trials.unwrap_or(DEFAULT_TRIALS))?,
            max_generations: positive("max-gens", o.max_gens.unwrap_or(DEFAULT_MAX_GENS))?,
            seed: RandomSeed(o.seed.unwrap_or(DEFAULT_SEED)),
            landscape,
            pi_t,
            out: o.out.clone(),
            jobs,
            oracle: parse_field(o.oracle.as_deref(), OracleKind::None)?,
            mc_samples: o.samples.unwrap_or(DEFAULT_MC_SAMPLES),
        })
    }
}

fn require_file(path: &Path) -> CliResult<()> {
    if !path.is_file() {
        return Err(CliError::Validation(format!(
            "{} does not exist or is not a file",
            path.display()
        )));
    }
    Ok(())
}
