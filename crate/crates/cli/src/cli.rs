//! Flag parsing and dispatch.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use enas_runtime_core::landscape::TableShape;
use enas_runtime_core::DistanceProfile;

use crate::commands;
use crate::error::{CliError, CliResult, EXIT_VIOLATIONS};
use crate::spec::{ExperimentSpec, Overrides};

#[derive(Debug, Parser)]
#[command(
    name = "enas-runtime",
    version,
    about = "Expected-hitting-time bounds and simulations for (λ+λ) evolutionary architecture search"
)]
pub struct Cli {
    /// TOML file with defaults for any of the shared flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact sizes of solution and population distance classes.
    Count(Shared),
    /// Offspring-distance distribution of one operator from a profile.
    Transition {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
    },
    /// Lower bounds on the expected hitting time over a λ sweep.
    EhtBound(Shared),
    /// Empirical hitting times over a λ sweep.
    Simulate(Shared),
    /// Bounds joined with empirical means; flags rows where the bound
    /// exceeds the mean by more than 5%.
    Compare {
        #[command(flatten)]
        shared: Shared,
        /// Existing eht-bound CSV.
        #[arg(long, requires = "empirical")]
        theory: Option<PathBuf>,
        /// Existing simulate CSV.
        #[arg(long, requires = "theory")]
        empirical: Option<PathBuf>,
    },
    /// Pooled Mutation#1 distance samples per λ and their Gaussian fit.
    PiT(Shared),
    /// Write a full synthetic benchmark table.
    GenerateTable {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, value_enum, default_value_t = Shape::Distance)]
        shape: Shape,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Shape {
    Distance,
    Random,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Shared {
    /// Number of nodes.
    #[arg(long = "v")]
    pub v: Option<usize>,
    /// Number of candidate operations.
    #[arg(long = "L")]
    pub l: Option<usize>,
    /// Single population size.
    #[arg(long)]
    pub lambda: Option<usize>,
    /// START:STOP:STEP, STOP inclusive.
    #[arg(long)]
    pub lambda_sweep: Option<String>,
    /// m1, m2, m3, m4 (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    pub op: Option<Vec<String>>,
    /// Slot counts for m3 (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<usize>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub max_gens: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// distance, distance-jitter or table:PATH.
    #[arg(long)]
    pub landscape: Option<String>,
    /// uniform, gaussian-fit or empirical:PATH.
    #[arg(long)]
    pub pi_t: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// none, exact or mc.
    #[arg(long)]
    pub oracle: Option<String>,
    /// Draws for the Monte-Carlo oracle.
    #[arg(long)]
    pub samples: Option<usize>,
}

impl From<Shared> for Overrides {
    fn from(s: Shared) -> Self {
        Overrides {
            v: s.v,
            l: s.l,
            lambda: s.lambda,
            lambda_sweep: s.lambda_sweep,
            op: s.op,
            q: s.q,
            trials: s.trials,
            max_gens: s.max_gens,
            seed: s.seed,
            landscape: s.landscape,
            pi_t: s.pi_t,
            out: s.out,
            jobs: s.jobs,
            oracle: s.oracle,
            samples: s.samples,
        }
    }
}

fn resolve(config: &Option<PathBuf>, shared: Shared) -> CliResult<(Overrides, ExperimentSpec)> {
    let file = match config {
        Some(path) => Overrides::from_toml_file(path)?,
        None => Overrides::default(),
    };
    let merged = Overrides::from(shared).merge(file);
    let spec = ExperimentSpec::resolve(&merged)?;
    Ok((merged, spec))
}

fn output(spec: &ExperimentSpec) -> CliResult<Box<dyn Write>> {
    Ok(match &spec.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Runtime(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs one invocation and returns the process exit status.
pub fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Count(shared) => {
            let (merged, spec) = resolve(&cli.config, shared)?;
            commands::cmd_count(&spec.params, merged.lambda.unwrap_or(1), output(&spec)?)?;
        }
        Command::Transition { shared, d1, d2 } => {
            let (merged, spec) = resolve(&cli.config, shared)?;
            if merged.op.is_none() {
                return Err(CliError::Validation("transition needs --op".into()));
            }
            let [op] = spec.ops[..] else {
                return Err(CliError::Validation(
                    "transition takes exactly one operator; give m3 a single --q".into(),
                ));
            };
            let prof: DistanceProfile = spec.params.profile(d1, d2)?;
            commands::cmd_transition(&spec, op, prof, output(&spec)?)?;
        }
        Command::EhtBound(shared) => {
            let (_, spec) = resolve(&cli.config, shared)?;
            commands::cmd_eht_bound(&spec, output(&spec)?)?;
        }
        Command::Simulate(shared) => {
            let (_, spec) = resolve(&cli.config, shared)?;
            commands::cmd_simulate(&spec, output(&spec)?)?;
        }
        Command::Compare {
            shared,
            theory,
            empirical,
        } => {
            let (_, spec) = resolve(&cli.config, shared)?;
            let cmp = commands::cmd_compare(
                &spec,
                theory.as_deref(),
                empirical.as_deref(),
                output(&spec)?,
            )?;
            eprintln!(
                "{} rows, {} violations of bound <= {} x mean",
                cmp.rows.len(),
                cmp.violations,
                commands::COMPARE_SLACK
            );
            if cmp.violations > 0 {
                return Ok(EXIT_VIOLATIONS);
            }
        }
        Command::PiT(shared) => {
            let (_, spec) = resolve(&cli.config, shared)?;
            commands::cmd_pi_t(&spec, output(&spec)?)?;
        }
        Command::GenerateTable { shared, shape } => {
            let (_, spec) = resolve(&cli.config, shared)?;
            let shape = match shape {
                Shape::Distance => TableShape::DistanceCorrelated,
                Shape::Random => TableShape::Random,
            };
            commands::cmd_generate_table(&spec.params, spec.seed, shape, output(&spec)?)?;
        }
    }
    Ok(0)
}
