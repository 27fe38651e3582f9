//! Distance-class distributions and the expected-hitting-time lower bounds.

use alloc::vec;
use alloc::vec::Vec;

use crate::genotype::{ratio_to_f64, PopulationCounts, SearchSpaceParams};
use crate::operators::MutationOp;
use crate::transition::{Probability, TailTable};
use crate::{Error, Result};

/// How π₀ is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialConvention {
    /// `|χ_d| / (|χ| − |χ*|)`, conditioned on a non-optimal start.
    ExcludeOptimal,
    /// `|χ_d| / |χ|`, keeping the optimal class at `d = 0`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    Uniform(InitialConvention),
    GaussianFit { mu: f64, sigma: f64 },
    Empirical,
}

/// Probability over distance classes `d ∈ [0, n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceDistribution {
    masses: Vec<f64>,
    provenance: Provenance,
}

impl DistanceDistribution {
    /// Takes nonnegative weights and normalizes them.
    pub fn from_weights(weights: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::DegenerateDistribution("no distance classes"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::DegenerateDistribution("negative or non-finite mass"));
        }
        let total = f64::sum(&weights);
        if total <= 0.0 {
            return Err(Error::DegenerateDistribution("zero total mass"));
        }
        Ok(Self {
            masses: weights.into_iter().map(|w| w / total).collect(),
            provenance,
        })
    }

    /// All mass on distance `d`.
    pub fn point_mass(n: usize, d: usize) -> Result<Self> {
        if d > n {
            return Err(Error::OutOfRange {
                what: "d",
                value: d,
                min: 0,
                max: n,
            });
        }
        let mut masses = vec![0.0; n + 1];
        masses[d] = 1.0;
        Ok(Self {
            masses,
            provenance: Provenance::Empirical,
        })
    }

    pub fn n(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn mass(&self, d: usize) -> f64 {
        self.masses.get(d).copied().unwrap_or(0.0)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Mass on the optimal class, `π(χ*)`.
    pub fn optimal_mass(&self) -> f64 {
        self.masses[0]
    }

    /// `Σ d π(d)`.
    pub fn mean(&self) -> f64 {
        let terms: Vec<f64> = self
            .masses
            .iter()
            .enumerate()
            .map(|(d, m)| d as f64 * m)
            .collect();
        f64::sum(&terms)
    }

    fn check_len(&self, p: &SearchSpaceParams) -> Result<()> {
        if self.masses.len() != p.n() + 1 {
            return Err(Error::LengthMismatch {
                expected: p.n() + 1,
                found: self.masses.len(),
            });
        }
        Ok(())
    }
}

fn population_class_distribution(
    counts: &PopulationCounts,
    convention: InitialConvention,
) -> Result<DistanceDistribution> {
    let n = counts.params().n();
    let (first, den) = match convention {
        InitialConvention::Full => (0, counts.total().clone()),
        InitialConvention::ExcludeOptimal => (1, counts.total() - counts.subspace(0)),
    };
    let mut masses = vec![0.0; n + 1];
    for (d, m) in masses.iter_mut().enumerate().skip(first) {
        *m = ratio_to_f64(counts.subspace(d), &den);
    }
    Ok(DistanceDistribution {
        masses,
        provenance: Provenance::Uniform(convention),
    })
}

/// π₀ for a uniformly initialized population, conditioned on not containing
/// the optimum: `π₀(χ_d) = |χ_d| / (|χ| − |χ*|)`.
pub fn uniform_initial_distribution(
    p: &SearchSpaceParams,
    lambda: usize,
) -> Result<DistanceDistribution> {
    let counts = PopulationCounts::new(p, lambda)?;
    population_class_distribution(&counts, InitialConvention::ExcludeOptimal)
}

/// π₀ with the unconditioned normalization `|χ_d| / |χ|`.
pub fn case_study_initial_distribution(
    p: &SearchSpaceParams,
    lambda: usize,
) -> Result<DistanceDistribution> {
    let counts = PopulationCounts::new(p, lambda)?;
    population_class_distribution(&counts, InitialConvention::Full)
}

/// Discretized Gaussian on `[1, n]` with the sample mean and sample standard
/// deviation of `samples`; `π(0) = 0`.
pub fn gaussian_fit_distribution(samples: &[usize], n: usize) -> Result<DistanceDistribution> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if samples.len() < 2 {
        return Err(Error::ZeroVariance);
    }
    if let Some(&d) = samples.iter().find(|&&d| d > n) {
        return Err(Error::OutOfRange {
            what: "sample distance",
            value: d,
            min: 0,
            max: n,
        });
    }
    let count = samples.len() as f64;
    let values: Vec<f64> = samples.iter().map(|&d| d as f64).collect();
    let mu = f64::sum(&values) / count;
    let sq: Vec<f64> = values.iter().map(|x| (x - mu) * (x - mu)).collect();
    let sigma = libm::sqrt(f64::sum(&sq) / (count - 1.0));
    if sigma == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut weights = vec![0.0; n + 1];
    for (d, w) in weights.iter_mut().enumerate().skip(1) {
        let z = (d as f64 - mu) / sigma;
        *w = libm::exp(-0.5 * z * z);
    }
    DistanceDistribution::from_weights(weights, Provenance::GaussianFit { mu, sigma })
}

/// Histogram of observed distances.
pub fn empirical_distribution(samples: &[usize], n: usize) -> Result<DistanceDistribution> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut weights = vec![0.0; n + 1];
    for &d in samples {
        if d > n {
            return Err(Error::OutOfRange {
                what: "sample distance",
                value: d,
                min: 0,
                max: n,
            });
        }
        weights[d] += 1.0;
    }
    DistanceDistribution::from_weights(weights, Provenance::Empirical)
}

/// `Σ_{d ≥ 1} d π₀(χ_d)`.
pub fn expected_initial_distance(pi0: &DistanceDistribution) -> f64 {
    pi0.mean()
}

/// Within-class weights `w(d, γ) = |χ_d^γ| / |χ_d|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassGammaWeights {
    lambda: usize,
    // weights[d][γ - 1]; row 0 unused
    weights: Vec<Vec<f64>>,
}

impl ClassGammaWeights {
    pub fn from_counts(counts: &PopulationCounts) -> Self {
        let n = counts.params().n();
        let lambda = counts.lambda();
        let mut weights = vec![Vec::new(); n + 1];
        for (d, row) in weights.iter_mut().enumerate().skip(1) {
            *row = (1..=lambda)
                .map(|g| ratio_to_f64(counts.class(d, g), counts.subspace(d)))
                .collect();
        }
        Self { lambda, weights }
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weight(&self, d: usize, gamma: usize) -> f64 {
        if d == 0 || gamma == 0 || gamma > self.lambda {
            return 0.0;
        }
        self.weights.get(d).map_or(0.0, |row| row[gamma - 1])
    }

    /// `Σ_γ γ w(d, γ)`.
    pub fn mean_gamma(&self, d: usize) -> f64 {
        if d == 0 || d >= self.weights.len() {
            return 0.0;
        }
        let terms: Vec<f64> = self.weights[d]
            .iter()
            .enumerate()
            .map(|(g, w)| (g + 1) as f64 * w)
            .collect();
        f64::sum(&terms)
    }
}

pub fn class_gamma_weights(p: &SearchSpaceParams, lambda: usize) -> Result<ClassGammaWeights> {
    Ok(ClassGammaWeights::from_counts(&PopulationCounts::new(p, lambda)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EhtBoundReport {
    pub operator: MutationOp,
    pub lambda: usize,
    pub expected_initial_distance: f64,
    pub average_drift_upper: f64,
    /// In generations.
    pub eht_lower_bound: f64,
}

fn non_optimal_mass(pi_t: &DistanceDistribution) -> Result<f64> {
    let rest = 1.0 - pi_t.optimal_mass();
    if rest <= 0.0 {
        return Err(Error::DegenerateDistribution("pi_t has all mass on the optimum"));
    }
    Ok(rest)
}

fn report(
    operator: MutationOp,
    lambda: usize,
    pi0: &DistanceDistribution,
    drift_sum: f64,
    scale: f64,
) -> Result<EhtBoundReport> {
    let e0 = expected_initial_distance(pi0);
    if !(drift_sum > 0.0) {
        return Err(Error::DegenerateDistribution("zero drift under pi_t"));
    }
    let average_drift_upper = drift_sum / scale;
    Ok(EhtBoundReport {
        operator,
        lambda,
        expected_initial_distance: e0,
        average_drift_upper,
        eht_lower_bound: e0 / average_drift_upper,
    })
}

fn check_inputs(
    p: &SearchSpaceParams,
    lambda: usize,
    pi_t: &DistanceDistribution,
    pi0: &DistanceDistribution,
) -> Result<()> {
    if lambda == 0 {
        return Err(Error::OutOfRange {
            what: "lambda",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    pi_t.check_len(p)?;
    pi0.check_len(p)
}

fn one_bit_bound(
    p: &SearchSpaceParams,
    op: MutationOp,
    lambda: usize,
    pi_t: &DistanceDistribution,
    pi0: &DistanceDistribution,
    weights: &ClassGammaWeights,
    len: usize,
) -> Result<EhtBoundReport> {
    check_inputs(p, lambda, pi_t, pi0)?;
    if weights.lambda() != lambda || weights.n() != p.n() {
        return Err(Error::InvalidConfig(alloc::format!(
            "class weights built for lambda={} n={}, expected lambda={lambda} n={}",
            weights.lambda(),
            weights.n(),
            p.n()
        )));
    }
    let rest = non_optimal_mass(pi_t)?;
    let terms: Vec<f64> = (1..=p.n())
        .map(|d| d as f64 * pi_t.mass(d) * weights.mean_gamma(d))
        .collect();
    report(op, lambda, pi0, f64::sum(&terms), len as f64 * rest)
}

/// Bit-based fair one-bit mutation:
/// `n (1 − π_t(χ*)) E[d(ξ₀)] / Σ_d d Σ_γ γ π_t(χ_d^γ)`.
pub fn eht_lower_bound_m1(
    p: &SearchSpaceParams,
    lambda: usize,
    pi_t: &DistanceDistribution,
    pi0: &DistanceDistribution,
    weights: &ClassGammaWeights,
) -> Result<EhtBoundReport> {
    one_bit_bound(p, MutationOp::OneBitBitFair, lambda, pi_t, pi0, weights, p.n())
}

/// Offspring-based fair one-bit mutation; as [`eht_lower_bound_m1`] with
/// `Q = n1 + L n2` in place of `n`.
pub fn eht_lower_bound_m2(
    p: &SearchSpaceParams,
    lambda: usize,
    pi_t: &DistanceDistribution,
    pi0: &DistanceDistribution,
    weights: &ClassGammaWeights,
) -> Result<EhtBoundReport> {
    one_bit_bound(
        p,
        MutationOp::OneBitOffspringFair,
        lambda,
        pi_t,
        pi0,
        weights,
        p.weighted_len(),
    )
}

/// `q`-slot mutation:
/// `(1 − π_t(χ*)) E[d(ξ₀)] / Σ_d (q − Σ_{j<q} tail(d, d − j)^λ) π_t(χ_d)`.
pub fn eht_lower_bound_m3(
    p: &SearchSpaceParams,
    lambda: usize,
    q: usize,
    pi_t: &DistanceDistribution,
    pi0: &DistanceDistribution,
) -> Result<EhtBoundReport> {
    let table = TailTable::new(p, MutationOp::QBit(q))?;
    eht_lower_bound_with_table(p, lambda, &table, pi_t, pi0)
}

/// Bitwise mutation:
/// `(1 − π_t(χ*)) E[d(ξ₀)] / Σ_d (d − Σ_{D=1}^{d} tail(d, D)^λ) π_t(χ_d)`.
pub fn eht_lower_bound_m4(
    p: &SearchSpaceParams,
    lambda: usize,
    pi_t: &DistanceDistribution,
    pi0: &DistanceDistribution,
) -> Result<EhtBoundReport> {
    let table = TailTable::new(p, MutationOp::Bitwise)?;
    eht_lower_bound_with_table(p, lambda, &table, pi_t, pi0)
}

/// Multi-slot bound from a prebuilt tail table, so sweeps over λ reuse it.
pub fn eht_lower_bound_with_table(
    p: &SearchSpaceParams,
    lambda: usize,
    table: &TailTable,
    pi_t: &DistanceDistribution,
    pi0: &DistanceDistribution,
) -> Result<EhtBoundReport> {
    check_inputs(p, lambda, pi_t, pi0)?;
    if table.n() != p.n() {
        return Err(Error::LengthMismatch {
            expected: p.n(),
            found: table.n(),
        });
    }
    let rest = non_optimal_mass(pi_t)?;
    let exp = lambda as f64;
    let op = table.op();
    let terms: Vec<f64> = (1..=p.n())
        .map(|d| {
            let per_class = match op {
                MutationOp::QBit(q) => {
                    let stay: Vec<f64> = (0..q)
                        .map(|j| libm::pow(table.min_tail(d, d as isize - j as isize), exp))
                        .collect();
                    q as f64 - f64::sum(&stay)
                }
                _ => {
                    let stay: Vec<f64> = (1..=d)
                        .map(|big_d| libm::pow(table.min_tail(d, big_d as isize), exp))
                        .collect();
                    d as f64 - f64::sum(&stay)
                }
            };
            per_class * pi_t.mass(d)
        })
        .collect();
    report(op, lambda, pi0, f64::sum(&terms), rest)
}

/// Case-study evaluation: π₀ = `|χ_d| / |χ|`, within-class weights from the
/// counts, and tail tables shared across λ.
#[derive(Debug, Clone)]
pub struct CaseStudy {
    params: SearchSpaceParams,
    tables: Vec<TailTable>,
}

impl CaseStudy {
    /// `qs` selects the q-slot operators to evaluate besides M1, M2, M4.
    pub fn new(p: &SearchSpaceParams, qs: &[usize]) -> Result<Self> {
        let mut tables = Vec::with_capacity(qs.len() + 1);
        for &q in qs {
            tables.push(TailTable::new(p, MutationOp::QBit(q))?);
        }
        tables.push(TailTable::new(p, MutationOp::Bitwise)?);
        Ok(Self {
            params: p.clone(),
            tables,
        })
    }

    pub fn params(&self) -> &SearchSpaceParams {
        &self.params
    }

    /// Reports for M1, M2, each M3(q) in construction order, then M4.
    pub fn bounds(&self, lambda: usize, pi_t: &DistanceDistribution) -> Result<Vec<EhtBoundReport>> {
        let p = &self.params;
        let counts = PopulationCounts::new(p, lambda)?;
        let pi0 = population_class_distribution(&counts, InitialConvention::Full)?;
        let weights = ClassGammaWeights::from_counts(&counts);
        let mut out = Vec::with_capacity(self.tables.len() + 2);
        out.push(eht_lower_bound_m1(p, lambda, pi_t, &pi0, &weights)?);
        out.push(eht_lower_bound_m2(p, lambda, pi_t, &pi0, &weights)?);
        for table in &self.tables {
            out.push(eht_lower_bound_with_table(p, lambda, table, pi_t, &pi0)?);
        }
        Ok(out)
    }

    /// Report for a single operator.
    pub fn bound(
        &self,
        op: MutationOp,
        lambda: usize,
        pi_t: &DistanceDistribution,
    ) -> Result<EhtBoundReport> {
        let p = &self.params;
        let counts = PopulationCounts::new(p, lambda)?;
        let pi0 = population_class_distribution(&counts, InitialConvention::Full)?;
        match op {
            MutationOp::OneBitBitFair | MutationOp::OneBitOffspringFair => {
                let weights = ClassGammaWeights::from_counts(&counts);
                if op == MutationOp::OneBitBitFair {
                    eht_lower_bound_m1(p, lambda, pi_t, &pi0, &weights)
                } else {
                    eht_lower_bound_m2(p, lambda, pi_t, &pi0, &weights)
                }
            }
            _ => match self.tables.iter().find(|t| t.op() == op) {
                Some(table) => eht_lower_bound_with_table(p, lambda, table, pi_t, &pi0),
                None => eht_lower_bound_with_table(p, lambda, &TailTable::new(p, op)?, pi_t, &pi0),
            },
        }
    }
}

/// M1, M2, M3(q) and M4 bounds at one λ under the case-study conventions.
pub fn case_study_bounds(
    p: &SearchSpaceParams,
    lambda: usize,
    q: usize,
    pi_t: &DistanceDistribution,
) -> Result<[EhtBoundReport; 4]> {
    let reports = CaseStudy::new(p, &[q])?.bounds(lambda, pi_t)?;
    let mut it = reports.into_iter();
    let mut next = || it.next().expect("four reports");
    Ok([next(), next(), next(), next()])
}
