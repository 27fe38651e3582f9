//! Fitness landscapes with a unique optimum.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::genotype::{all_genotypes, mismatches, solution_space_size, Genotype, SearchSpaceParams};
use crate::operators::random_genotype;
use crate::rng::{fnv1a, splitmix64};
use crate::{Error, RandomSeed, Result};

/// Largest space [`generate_synthetic_table`] will tabulate.
pub const FULL_TABLE_LIMIT: u64 = 10_000_000;

/// A fitness function over one search space whose unique maximizer is
/// [`optimum`](FitnessLandscape::optimum).
pub trait FitnessLandscape: Send + Sync {
    fn params(&self) -> &SearchSpaceParams;
    fn evaluate(&self, x: &Genotype) -> f64;
    fn optimum(&self) -> &Genotype;

    /// True when fitness strictly decreases with Hamming distance to the
    /// optimum, so that closer genotypes always win selection.
    fn strictly_distance_ordered(&self) -> bool {
        false
    }
}

/// `f(x) = n − hamming(x, target)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceLandscape {
    params: SearchSpaceParams,
    target: Genotype,
}

impl DistanceLandscape {
    pub fn new(params: &SearchSpaceParams, target: Genotype) -> Result<Self> {
        target.validate(params)?;
        Ok(Self {
            params: *params,
            target,
        })
    }

    /// Target drawn from `seed`.
    pub fn random(params: &SearchSpaceParams, seed: RandomSeed) -> Self {
        let target = random_genotype(params, &mut seed.rng());
        Self {
            params: *params,
            target,
        }
    }
}

impl FitnessLandscape for DistanceLandscape {
    fn params(&self) -> &SearchSpaceParams {
        &self.params
    }

    fn evaluate(&self, x: &Genotype) -> f64 {
        (self.params.n() - mismatches(x.slots(), self.target.slots())) as f64
    }

    fn optimum(&self) -> &Genotype {
        &self.target
    }

    fn strictly_distance_ordered(&self) -> bool {
        true
    }
}

/// `n − hamming(x, target)` plus a seeded per-genotype jitter in `[0, 0.5)`.
/// The jitter breaks ties inside distance classes without reordering them, so
/// the target stays the unique maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct JitteredDistanceLandscape {
    params: SearchSpaceParams,
    target: Genotype,
    seed: u64,
}

impl JitteredDistanceLandscape {
    pub fn new(params: &SearchSpaceParams, target: Genotype, seed: RandomSeed) -> Result<Self> {
        target.validate(params)?;
        Ok(Self {
            params: *params,
            target,
            seed: seed.0,
        })
    }

    pub fn random(params: &SearchSpaceParams, seed: RandomSeed) -> Self {
        let target = random_genotype(params, &mut seed.derive("target", 0).rng());
        Self {
            params: *params,
            target,
            seed: seed.0,
        }
    }

    fn jitter(&self, x: &Genotype) -> f64 {
        let h = splitmix64(self.seed ^ fnv1a(x.slots()));
        // 53 random bits scaled into [0, 0.5)
        (h >> 11) as f64 * (0.5 / (1u64 << 53) as f64)
    }
}

impl FitnessLandscape for JitteredDistanceLandscape {
    fn params(&self) -> &SearchSpaceParams {
        &self.params
    }

    fn evaluate(&self, x: &Genotype) -> f64 {
        let d = mismatches(x.slots(), self.target.slots());
        (self.params.n() - d) as f64 + self.jitter(x)
    }

    fn optimum(&self) -> &Genotype {
        &self.target
    }

    fn strictly_distance_ordered(&self) -> bool {
        true
    }
}

/// Lookup table of fitness records. Genotypes absent from the table evaluate
/// to [`floor`](TabularLandscape::floor), one below the table minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularLandscape {
    params: SearchSpaceParams,
    records: BTreeMap<Genotype, f64>,
    optimum: Genotype,
    floor: f64,
}

impl TabularLandscape {
    /// Rejects invalid genotypes, non-finite fitness, duplicates, an empty
    /// table and a maximum shared by two records.
    pub fn new<I>(params: &SearchSpaceParams, records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Genotype, f64)>,
    {
        let mut table = BTreeMap::new();
        for (g, f) in records {
            g.validate(params)?;
            if !f.is_finite() {
                return Err(Error::MissingFitness(g.to_string()));
            }
            if table.contains_key(&g) {
                return Err(Error::DuplicateGenotype(g.to_string()));
            }
            table.insert(g, f);
        }
        let mut best: Option<(&Genotype, f64)> = None;
        let mut min = f64::INFINITY;
        for (g, &f) in &table {
            min = min.min(f);
            if best.map_or(true, |(_, bf)| f > bf) {
                best = Some((g, f));
            }
        }
        let (optimum, top) = match best {
            Some((g, f)) => (g.clone(), f),
            None => return Err(Error::Landscape("table has no records".to_string())),
        };
        if let Some((g, _)) = table.iter().find(|(g, &f)| f == top && **g != optimum) {
            return Err(Error::TiedOptimum {
                first: optimum.to_string(),
                second: g.to_string(),
                fitness: top,
            });
        }
        Ok(Self {
            params: *params,
            records: table,
            optimum,
            floor: min - 1.0,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn get(&self, x: &Genotype) -> Option<f64> {
        self.records.get(x).copied()
    }

    /// Records in genotype order.
    pub fn records(&self) -> impl Iterator<Item = (&Genotype, f64)> + '_ {
        self.records.iter().map(|(g, &f)| (g, f))
    }
}

impl FitnessLandscape for TabularLandscape {
    fn params(&self) -> &SearchSpaceParams {
        &self.params
    }

    fn evaluate(&self, x: &Genotype) -> f64 {
        self.get(x).unwrap_or(self.floor)
    }

    fn optimum(&self) -> &Genotype {
        &self.optimum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableShape {
    /// Values of [`JitteredDistanceLandscape`] around a seeded target.
    DistanceCorrelated,
    /// Distinct values `k / |S|`, `k = 1..=|S|`, in seeded random order.
    Random,
}

/// A full table over the space. Fails when `|S|` exceeds
/// [`FULL_TABLE_LIMIT`].
pub fn generate_synthetic_table(
    params: &SearchSpaceParams,
    seed: RandomSeed,
    shape: TableShape,
) -> Result<TabularLandscape> {
    let size = solution_space_size(params);
    if size > FULL_TABLE_LIMIT.into() {
        return Err(Error::Intractable {
            outcomes: u128::try_from(size).unwrap_or(u128::MAX),
            limit: FULL_TABLE_LIMIT as u128,
        });
    }
    let genotypes: Vec<Genotype> = all_genotypes(params).collect();
    match shape {
        TableShape::DistanceCorrelated => {
            let surface = JitteredDistanceLandscape::random(params, seed);
            let records = genotypes.into_iter().map(|g| {
                let f = surface.evaluate(&g);
                (g, f)
            });
            TabularLandscape::new(params, records)
        }
        TableShape::Random => {
            let total = genotypes.len();
            let mut ranks: Vec<usize> = (1..=total).collect();
            ranks.shuffle(&mut seed.derive("ranks", 0).rng());
            let records = genotypes
                .into_iter()
                .zip(ranks)
                .map(|(g, k)| (g, k as f64 / total as f64));
            TabularLandscape::new(params, records)
        }
    }
}
