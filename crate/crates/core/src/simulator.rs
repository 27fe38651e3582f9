//! The (λ+λ) generational loop and hitting-time statistics.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::drift::{empirical_distribution, DistanceDistribution};
use crate::genotype::{mismatches, Genotype, SearchSpaceParams};
use crate::landscape::FitnessLandscape;
use crate::operators::{init_population, truncation_select, MutationOp, Population};
use crate::transition::DistanceStepDistribution;
use crate::{Error, RandomSeed, Result};

/// Smallest sample count accepted by [`mc_transition_oracle`].
pub const MC_MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub params: SearchSpaceParams,
    pub lambda: usize,
    pub op: MutationOp,
    pub max_generations: usize,
    pub seed: RandomSeed,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 {
            return Err(Error::OutOfRange {
                what: "lambda",
                value: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        if self.max_generations == 0 {
            return Err(Error::OutOfRange {
                what: "max_generations",
                value: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        self.op.validate(&self.params)
    }

    /// The configuration of trial `index`, seeded from `(seed, "trial", index)`.
    pub fn trial(&self, index: usize) -> RunConfig {
        RunConfig {
            seed: self.seed.derive("trial", index as u64),
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    /// The optimum entered the population at this generation.
    Hit(usize),
    /// Not found within this many generations.
    Censored(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimeRecord {
    pub outcome: Outcome,
    /// Minimum member distance `d(ξ_t)` for `t = 0, 1, ...`.
    pub distance_trajectory: Vec<usize>,
    /// Maximum member fitness per generation.
    pub best_fitness: Vec<f64>,
}

impl HittingTimeRecord {
    pub fn generations(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Hit(t) => Some(t),
            Outcome::Censored(_) => None,
        }
    }

    /// Distances of the generations before the optimum was found.
    pub fn pre_hitting_distances(&self) -> &[usize] {
        match self.outcome {
            Outcome::Hit(t) => &self.distance_trajectory[..t],
            Outcome::Censored(_) => &self.distance_trajectory,
        }
    }
}

fn check_landscape(cfg: &RunConfig, landscape: &dyn FitnessLandscape) -> Result<()> {
    if landscape.params() != &cfg.params {
        return Err(Error::Landscape(alloc::format!(
            "landscape is over {}, run is over {}",
            landscape.params(),
            cfg.params
        )));
    }
    landscape.optimum().validate(&cfg.params)
}

/// One run: initialize uniformly, then each generation mutate every parent
/// once and keep the best λ of parents and offspring. Generation 0 is the
/// initial population.
///
/// A q-slot operator reaches the optimum only from distance exactly `q`. On a
/// landscape ordered by distance, once every member is closer than `q` no
/// genotype at distance `q` can survive selection again, so the run is
/// reported as censored at that point instead of iterating to the cap.
pub fn run_enas(cfg: &RunConfig, landscape: &dyn FitnessLandscape) -> Result<HittingTimeRecord> {
    cfg.validate()?;
    check_landscape(cfg, landscape)?;
    let p = &cfg.params;
    let opt = landscape.optimum().slots();
    let mut rng = cfg.seed.rng();
    let min_distance =
        |pop: &Population| pop.iter().map(|x| mismatches(x.slots(), opt)).min().unwrap_or(0);
    let max_of = |f: &[f64]| f.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let stall_below = match cfg.op {
        MutationOp::QBit(q) if landscape.strictly_distance_ordered() => Some(q),
        _ => None,
    };
    let stalled = |pop: &Population| {
        stall_below.is_some_and(|q| pop.iter().all(|x| mismatches(x.slots(), opt) < q))
    };

    let mut pop = init_population(p, cfg.lambda, &mut rng)?;
    let mut fitness: Vec<f64> = pop.iter().map(|x| landscape.evaluate(x)).collect();
    let mut trajectory = vec![min_distance(&pop)];
    let mut best = vec![max_of(&fitness)];
    if trajectory[0] == 0 {
        return Ok(HittingTimeRecord {
            outcome: Outcome::Hit(0),
            distance_trajectory: trajectory,
            best_fitness: best,
        });
    }
    for t in 1..=cfg.max_generations {
        let offspring =
            Population::new(pop.iter().map(|x| cfg.op.apply(p, x, &mut rng)).collect());
        let off_fitness: Vec<f64> = offspring.iter().map(|x| landscape.evaluate(x)).collect();
        let (next, next_fitness) =
            truncation_select(&pop, &fitness, &offspring, &off_fitness, &mut rng)?;
        pop = next;
        fitness = next_fitness;
        let d = min_distance(&pop);
        trajectory.push(d);
        best.push(max_of(&fitness));
        if d == 0 {
            return Ok(HittingTimeRecord {
                outcome: Outcome::Hit(t),
                distance_trajectory: trajectory,
                best_fitness: best,
            });
        }
        if stalled(&pop) {
            break;
        }
    }
    Ok(HittingTimeRecord {
        outcome: Outcome::Censored(cfg.max_generations),
        distance_trajectory: trajectory,
        best_fitness: best,
    })
}

/// Trial `index` of `cfg`; see [`RunConfig::trial`].
pub fn run_trial(
    cfg: &RunConfig,
    landscape: &dyn FitnessLandscape,
    index: usize,
) -> Result<HittingTimeRecord> {
    run_enas(&cfg.trial(index), landscape)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingTimeStats {
    pub trials: usize,
    /// Over uncensored trials; `None` when all were censored.
    pub mean: Option<f64>,
    /// Sample standard deviation; `None` with fewer than two hits.
    pub std: Option<f64>,
    pub median: Option<f64>,
    pub censored_count: usize,
    /// Hitting generation → number of trials.
    pub histogram: BTreeMap<usize, usize>,
}

impl HittingTimeStats {
    pub fn from_outcomes<I: IntoIterator<Item = Outcome>>(outcomes: I) -> Self {
        let mut trials = 0;
        let mut censored_count = 0;
        let mut histogram = BTreeMap::new();
        for o in outcomes {
            trials += 1;
            match o {
                Outcome::Hit(t) => *histogram.entry(t).or_insert(0) += 1,
                Outcome::Censored(_) => censored_count += 1,
            }
        }
        let hits = trials - censored_count;
        let (mut mean, mut std, mut median) = (None, None, None);
        if hits > 0 {
            let sum: f64 = histogram.iter().map(|(&t, &c)| (t * c) as f64).sum();
            let m = sum / hits as f64;
            mean = Some(m);
            if hits > 1 {
                let ss: f64 = histogram
                    .iter()
                    .map(|(&t, &c)| c as f64 * (t as f64 - m) * (t as f64 - m))
                    .sum();
                std = Some(libm::sqrt(ss / (hits - 1) as f64));
            }
            median = Some(histogram_median(&histogram, hits));
        }
        Self {
            trials,
            mean,
            std,
            median,
            censored_count,
            histogram,
        }
    }
}

fn histogram_median(histogram: &BTreeMap<usize, usize>, hits: usize) -> f64 {
    // 0-based order statistics (hits-1)/2 and hits/2
    let (lo_rank, hi_rank) = ((hits - 1) / 2, hits / 2);
    let (mut lo, mut hi) = (None, None);
    let mut seen = 0;
    for (&t, &c) in histogram {
        if lo.is_none() && lo_rank < seen + c {
            lo = Some(t);
        }
        if hi_rank < seen + c {
            hi = Some(t);
            break;
        }
        seen += c;
    }
    (lo.unwrap_or(0) + hi.unwrap_or(0)) as f64 / 2.0
}

/// `trials` independent runs, trial `i` seeded from `(cfg.seed, i)`.
pub fn run_trials(
    cfg: &RunConfig,
    landscape: &dyn FitnessLandscape,
    trials: usize,
) -> Result<HittingTimeStats> {
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    let mut outcomes = Vec::with_capacity(trials);
    for i in 0..trials {
        outcomes.push(run_trial(cfg, landscape, i)?.outcome);
    }
    Ok(HittingTimeStats::from_outcomes(outcomes))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSample {
    pub distribution: DistanceDistribution,
    /// Pooled pre-hitting distances, trial by trial.
    pub samples: Vec<usize>,
}

/// Pools `d(ξ_t)` over every pre-hitting generation of every trial.
pub fn sample_distance_distribution(
    cfg: &RunConfig,
    landscape: &dyn FitnessLandscape,
    trials: usize,
) -> Result<DistanceSample> {
    let mut samples = Vec::new();
    for i in 0..trials {
        samples.extend_from_slice(run_trial(cfg, landscape, i)?.pre_hitting_distances());
    }
    distance_sample(samples, cfg.params.n())
}

/// Wraps pooled distances with their histogram.
pub fn distance_sample(samples: Vec<usize>, n: usize) -> Result<DistanceSample> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(DistanceSample {
        distribution: empirical_distribution(&samples, n)?,
        samples,
    })
}

/// Empirical distribution of `hamming(op(x), opt)` over `samples` draws.
pub fn mc_transition_oracle(
    params: &SearchSpaceParams,
    x: &Genotype,
    op: MutationOp,
    opt: &Genotype,
    samples: usize,
    seed: RandomSeed,
) -> Result<DistanceStepDistribution<f64>> {
    if samples < MC_MIN_SAMPLES {
        return Err(Error::OutOfRange {
            what: "samples",
            value: samples,
            min: MC_MIN_SAMPLES,
            max: usize::MAX,
        });
    }
    x.validate(params)?;
    opt.validate(params)?;
    op.validate(params)?;
    let mut rng = seed.rng();
    let mut counts = vec![0u64; params.n() + 1];
    for _ in 0..samples {
        let y = op.apply(params, x, &mut rng);
        counts[mismatches(y.slots(), opt.slots())] += 1;
    }
    Ok(DistanceStepDistribution::from_masses(
        counts.into_iter().map(|c| c as f64 / samples as f64).collect(),
    ))
}
