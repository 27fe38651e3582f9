//! Offspring-distance distributions of the mutation operators.
//!
//! Every closed form here maps a parent's distance profile `(d1, d2)` to the
//! distribution of the offspring's total distance `d_y`. The functions are
//! generic over [`Probability`] so the same code runs in exact rational
//! arithmetic (for validation and small spaces) and in `f64`.
//! [`exact_enumeration_oracle`] enumerates concrete mutation outcomes and is
//! independent of the closed forms.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::genotype::{self, DistanceProfile, Genotype, SearchSpaceParams};
use crate::operators::MutationOp;
use crate::{Error, Result};

/// Largest genotype length evaluated in rational arithmetic by
/// [`step_distribution`].
pub const EXACT_MODE_MAX_N: usize = 12;

/// Largest number of outcomes [`exact_enumeration_oracle`] will enumerate.
pub const ORACLE_LIMIT: u128 = 10_000_000;

/// Number type for transition masses.
pub trait Probability:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn ratio(num: u128, den: u128) -> Self;
    fn binomial(n: usize, k: usize) -> Self;
    fn sum(terms: &[Self]) -> Self;
    fn to_f64(&self) -> f64;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn powi(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Probability for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn binomial(n: usize, k: usize) -> Self {
        if k > n {
            return 0.0;
        }
        match binomial_u128(n, k) {
            Some(b) => b as f64,
            None => {
                let k = k.min(n - k);
                (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
            }
        }
    }

    /// Neumaier-compensated summation.
    fn sum(terms: &[Self]) -> Self {
        let mut s = 0.0f64;
        let mut c = 0.0f64;
        for &x in terms {
            let t = s + x;
            if libm::fabs(s) >= libm::fabs(x) {
                c += (s - t) + x;
            } else {
                c += (x - t) + s;
            }
            s = t;
        }
        s + c
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Probability for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn binomial(n: usize, k: usize) -> Self {
        let b = genotype::binomial(&BigUint::from(n), k as u64);
        BigRational::from_integer(BigInt::from(b))
    }

    fn sum(terms: &[Self]) -> Self {
        terms.iter().fold(Zero::zero(), |acc: BigRational, t| acc + t)
    }

    fn to_f64(&self) -> f64 {
        let (num, den) = (self.numer(), self.denom());
        let mag = genotype::ratio_to_f64(num.magnitude(), den.magnitude());
        if (num.sign() == num_bigint::Sign::Minus) != (den.sign() == num_bigint::Sign::Minus) {
            -mag
        } else {
            mag
        }
    }
}

fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Probability mass over offspring distances `0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceStepDistribution<T = f64> {
    masses: Vec<T>,
}

impl<T: Probability> DistanceStepDistribution<T> {
    pub fn from_masses(masses: Vec<T>) -> Self {
        Self { masses }
    }

    fn empty(n: usize) -> Self {
        Self {
            masses: vec![T::zero(); n + 1],
        }
    }

    /// Largest representable distance.
    pub fn n(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn mass(&self, d_y: usize) -> T {
        self.masses.get(d_y).cloned().unwrap_or_else(T::zero)
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    pub fn total(&self) -> T {
        T::sum(&self.masses)
    }

    /// `Σ_{d_y ≥ threshold}` mass.
    pub fn tail(&self, threshold: usize) -> T {
        if threshold >= self.masses.len() {
            return T::zero();
        }
        T::sum(&self.masses[threshold..])
    }

    /// Distances carrying nonzero mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(d, _)| d)
    }

    pub fn to_f64(&self) -> DistanceStepDistribution<f64> {
        DistanceStepDistribution {
            masses: self.masses.iter().map(Probability::to_f64).collect(),
        }
    }
}

fn check_profile(p: &SearchSpaceParams, prof: DistanceProfile) -> Result<()> {
    p.profile(prof.d1, prof.d2).map(|_| ())
}

fn check_q(n: usize, q: usize) -> Result<()> {
    if q == 0 || q > n {
        return Err(Error::OutOfRange {
            what: "q",
            value: q,
            min: 1,
            max: n,
        });
    }
    Ok(())
}

/// Binary strings of length `n`: flipping `q` distinct bits of a parent at
/// distance `d_x` gives `d_y = d_x - q + 2i` with probability
/// `binom(d_x, q-i) binom(n-d_x, i) / binom(n, q)`.
pub fn p_binary_qbit<T: Probability>(
    n: usize,
    d_x: usize,
    q: usize,
) -> Result<DistanceStepDistribution<T>> {
    if d_x > n {
        return Err(Error::OutOfRange {
            what: "d_x",
            value: d_x,
            min: 0,
            max: n,
        });
    }
    check_q(n, q)?;
    let mut dist = DistanceStepDistribution::empty(n);
    let total = T::binomial(n, q);
    for i in 0..=q {
        let w = T::binomial(d_x, q - i) * T::binomial(n - d_x, i);
        if w.is_zero() {
            continue;
        }
        dist.masses[d_x + 2 * i - q] = w / total.clone();
    }
    Ok(dist)
}

/// Mutation#1 (one slot, uniform over slots).
pub fn p_m1<T: Probability>(
    p: &SearchSpaceParams,
    prof: DistanceProfile,
) -> Result<DistanceStepDistribution<T>> {
    check_profile(p, prof)?;
    let (n, l) = (p.n() as u128, p.l() as u128);
    let (d1, d2, d) = (prof.d1 as u128, prof.d2 as u128, prof.d() as u128);
    let mut dist = DistanceStepDistribution::empty(p.n());
    if d > 0 {
        dist.masses[prof.d() - 1] = T::ratio(d1 * l + d2, n * l);
    }
    dist.masses[prof.d()] = T::ratio(d2 * (l - 1), n * l);
    if d < n {
        dist.masses[prof.d() + 1] = T::ratio(n - d, n);
    }
    Ok(dist)
}

/// Mutation#2 (one of the `Q = n1 + L n2` one-slot offspring, uniformly).
pub fn p_m2<T: Probability>(
    p: &SearchSpaceParams,
    prof: DistanceProfile,
) -> Result<DistanceStepDistribution<T>> {
    check_profile(p, prof)?;
    let (q, l) = (p.weighted_len() as u128, p.l() as u128);
    let (d1, d2, d) = (prof.d1 as u128, prof.d2 as u128, prof.d() as u128);
    let mut dist = DistanceStepDistribution::empty(p.n());
    if d > 0 {
        dist.masses[prof.d() - 1] = T::ratio(d, q);
    }
    dist.masses[prof.d()] = T::ratio(d2 * (l - 1), q);
    if prof.d() < p.n() {
        dist.masses[prof.d() + 1] = T::ratio(q - d1 - l * d2, q);
    }
    Ok(dist)
}

/// Mutation#3 (`q` distinct slots, each changed as in Mutation#1).
///
/// Sums over `z` chosen operation slots, `a` chosen mismatched edges, `b`
/// chosen mismatched operations of which `c` land on the optimal value; the
/// offspring distance is `d_x + q - (2a + b + c)`.
pub fn p_m3<T: Probability>(
    p: &SearchSpaceParams,
    prof: DistanceProfile,
    q: usize,
) -> Result<DistanceStepDistribution<T>> {
    check_profile(p, prof)?;
    check_q(p.n(), q)?;
    let (n, n1, n2, l) = (p.n(), p.n1(), p.n2(), p.l() as u128);
    let (d1, d2) = (prof.d1, prof.d2);
    let d = prof.d();
    let hit = T::ratio(1, l);
    let miss = T::ratio(l - 1, l);
    let total = T::binomial(n, q);

    let mut terms: Vec<Vec<T>> = vec![Vec::new(); n + 1];
    for z in 0..=q.min(n2) {
        for a in 0..=(q - z).min(d1) {
            let edge_w = T::binomial(d1, a) * T::binomial(n1 - d1, q - z - a);
            if edge_w.is_zero() {
                continue;
            }
            for b in 0..=z.min(d2) {
                let op_w = T::binomial(d2, b) * T::binomial(n2 - d2, z - b);
                if op_w.is_zero() {
                    continue;
                }
                let base = edge_w.clone() * op_w;
                for c in 0..=b {
                    let w = base.clone()
                        * T::binomial(b, c)
                        * hit.powi(c)
                        * miss.powi(b - c);
                    if w.is_zero() {
                        continue;
                    }
                    let d_y = d + q - (2 * a + b + c);
                    terms[d_y].push(w);
                }
            }
        }
    }
    Ok(DistanceStepDistribution {
        masses: terms.iter().map(|t| T::sum(t) / total.clone()).collect(),
    })
}

/// Mutation#4 (each slot independently with probability `1/n`): the
/// Mutation#3 distributions mixed over `q ~ Binomial(n, 1/n)`, with the
/// `q = 0` term leaving the distance unchanged.
pub fn p_m4<T: Probability>(
    p: &SearchSpaceParams,
    prof: DistanceProfile,
) -> Result<DistanceStepDistribution<T>> {
    check_profile(p, prof)?;
    let n = p.n();
    let rate = T::ratio(1, n as u128);
    let keep = T::ratio(n as u128 - 1, n as u128);
    let mut terms: Vec<Vec<T>> = vec![Vec::new(); n + 1];
    terms[prof.d()].push(keep.powi(n));
    for q in 1..=n {
        let w = T::binomial(n, q) * rate.powi(q) * keep.powi(n - q);
        let step = p_m3::<T>(p, prof, q)?;
        for (d_y, m) in step.masses.into_iter().enumerate() {
            if !m.is_zero() {
                terms[d_y].push(w.clone() * m);
            }
        }
    }
    Ok(DistanceStepDistribution {
        masses: terms.iter().map(|t| T::sum(t)).collect(),
    })
}

/// Closed-form distribution for `op`, in the caller's number type.
pub fn analytic<T: Probability>(
    p: &SearchSpaceParams,
    op: MutationOp,
    prof: DistanceProfile,
) -> Result<DistanceStepDistribution<T>> {
    match op {
        MutationOp::OneBitBitFair => p_m1(p, prof),
        MutationOp::OneBitOffspringFair => p_m2(p, prof),
        MutationOp::QBit(q) => p_m3(p, prof, q),
        MutationOp::Bitwise => p_m4(p, prof),
    }
}

/// Closed-form distribution as `f64`: evaluated exactly and rounded once when
/// `n ≤ EXACT_MODE_MAX_N`, otherwise in compensated floating point.
pub fn step_distribution(
    p: &SearchSpaceParams,
    op: MutationOp,
    prof: DistanceProfile,
) -> Result<DistanceStepDistribution<f64>> {
    if p.n() <= EXACT_MODE_MAX_N {
        Ok(analytic::<BigRational>(p, op, prof)?.to_f64())
    } else {
        analytic::<f64>(p, op, prof)
    }
}

/// For each `d ∈ [1, n]` and threshold `t`, the minimum over every parent
/// profile with `d_x ∈ [d, n]` of the tail mass `P(d_y ≥ t)`.
#[derive(Debug, Clone)]
pub struct TailTable {
    op: MutationOp,
    n: usize,
    // min_tail[d][t], d in 0..=n, t in 0..=n+1
    min_tail: Vec<Vec<f64>>,
}

impl TailTable {
    pub fn new(p: &SearchSpaceParams, op: MutationOp) -> Result<Self> {
        match op {
            MutationOp::QBit(_) | MutationOp::Bitwise => op.validate(p)?,
            _ => return Err(Error::UnsupportedOperator(alloc::format!("{op}"))),
        }
        let n = p.n();
        let mut by_distance = vec![vec![1.0f64; n + 2]; n + 1];
        for prof in p.profiles() {
            let dist = step_distribution(p, op, prof)?;
            let row = &mut by_distance[prof.d()];
            // suffix sums give every tail at once
            let mut acc = 0.0;
            let mut tails = vec![0.0; n + 2];
            for t in (0..=n).rev() {
                acc += dist.masses[t];
                tails[t] = acc;
            }
            tails[0] = 1.0;
            for t in 0..=n + 1 {
                row[t] = row[t].min(tails[t]);
            }
        }
        let mut min_tail = by_distance;
        for d in (0..n).rev() {
            for t in 0..=n + 1 {
                min_tail[d][t] = min_tail[d][t].min(min_tail[d + 1][t]);
            }
        }
        Ok(Self { op, n, min_tail })
    }

    pub fn op(&self) -> MutationOp {
        self.op
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Thresholds at or below zero give the full tail, `1`.
    pub fn min_tail(&self, d: usize, threshold: isize) -> f64 {
        if threshold <= 0 {
            return 1.0;
        }
        let t = (threshold as usize).min(self.n + 1);
        self.min_tail[d.min(self.n)][t]
    }
}

/// `min_{d_x ∈ [d, n], (d1, d2)} P(d_y ≥ threshold)` for the q-bit and bitwise
/// operators.
pub fn min_tail_probability(
    p: &SearchSpaceParams,
    op: MutationOp,
    d: usize,
    threshold: usize,
) -> Result<f64> {
    if d == 0 || d > p.n() {
        return Err(Error::OutOfRange {
            what: "d",
            value: d,
            min: 1,
            max: p.n(),
        });
    }
    if threshold > p.n() {
        return Err(Error::OutOfRange {
            what: "threshold",
            value: threshold,
            min: 0,
            max: p.n(),
        });
    }
    Ok(TailTable::new(p, op)?.min_tail(d, threshold as isize))
}

/// Exact distribution of `hamming(mutate(x), opt)`, obtained by enumerating
/// every mutation outcome of the concrete parent `x` with its weight.
pub fn exact_enumeration_oracle(
    p: &SearchSpaceParams,
    x: &Genotype,
    op: MutationOp,
    opt: &Genotype,
) -> Result<DistanceStepDistribution<BigRational>> {
    x.validate(p)?;
    opt.validate(p)?;
    op.validate(p)?;
    let n = p.n();
    let l = p.l() as u128;
    match op {
        MutationOp::OneBitBitFair => {
            // tally[k][d_y]: outcomes with k operation slots changed
            let tally = enumerate_subsets(p, x, opt, 1);
            let mut dist = DistanceStepDistribution::<BigRational>::empty(n);
            for d_y in 0..=n {
                let edge = BigRational::ratio(tally[0][d_y], n as u128);
                let ops = BigRational::ratio(tally[1][d_y], n as u128 * l);
                dist.masses[d_y] = edge + ops;
            }
            Ok(dist)
        }
        MutationOp::OneBitOffspringFair => {
            let tally = enumerate_subsets(p, x, opt, 1);
            let q = p.weighted_len() as u128;
            let mut dist = DistanceStepDistribution::<BigRational>::empty(n);
            for d_y in 0..=n {
                dist.masses[d_y] = BigRational::ratio(tally[0][d_y] + tally[1][d_y], q);
            }
            Ok(dist)
        }
        MutationOp::QBit(q) => {
            check_tractable(p, q..=q)?;
            Ok(q_bit_oracle(p, x, opt, q))
        }
        MutationOp::Bitwise => {
            check_tractable(p, 1..=n)?;
            let rate = BigRational::ratio(1, n as u128);
            let keep = BigRational::ratio(n as u128 - 1, n as u128);
            let d_x = genotype::hamming(x, opt)?;
            let mut dist = DistanceStepDistribution::<BigRational>::empty(n);
            dist.masses[d_x] = keep.powi(n);
            for q in 1..=n {
                let w = BigRational::binomial(n, q) * rate.powi(q) * keep.powi(n - q);
                let step = q_bit_oracle(p, x, opt, q);
                for (d_y, m) in step.masses.into_iter().enumerate() {
                    dist.masses[d_y] = dist.masses[d_y].clone() + w.clone() * m;
                }
            }
            Ok(dist)
        }
    }
}

fn outcome_count(p: &SearchSpaceParams, q: usize) -> u128 {
    // Σ_z binom(n1, q-z) binom(n2, z) L^z
    (0..=q.min(p.n2()))
        .filter(|&z| q - z <= p.n1())
        .map(|z| {
            binomial_u128(p.n1(), q - z).unwrap_or(u128::MAX)
                .saturating_mul(binomial_u128(p.n2(), z).unwrap_or(u128::MAX))
                .saturating_mul((p.l() as u128).saturating_pow(z as u32))
        })
        .fold(0u128, |a, b| a.saturating_add(b))
}

fn check_tractable(p: &SearchSpaceParams, qs: core::ops::RangeInclusive<usize>) -> Result<()> {
    let outcomes = qs
        .map(|q| outcome_count(p, q))
        .fold(0u128, |a, b| a.saturating_add(b));
    if outcomes > ORACLE_LIMIT {
        return Err(Error::Intractable {
            outcomes,
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

fn q_bit_oracle(
    p: &SearchSpaceParams,
    x: &Genotype,
    opt: &Genotype,
    q: usize,
) -> DistanceStepDistribution<BigRational> {
    let n = p.n();
    let tally = enumerate_subsets(p, x, opt, q);
    let subsets = binomial_u128(n, q).expect("tractable sizes fit");
    let l = p.l() as u128;
    let mut dist = DistanceStepDistribution::<BigRational>::empty(n);
    for (k, row) in tally.iter().enumerate() {
        let den = subsets * l.pow(k as u32);
        for (d_y, &count) in row.iter().enumerate() {
            if count > 0 {
                dist.masses[d_y] = dist.masses[d_y].clone() + BigRational::ratio(count, den);
            }
        }
    }
    dist
}

/// For every `q`-subset of slots and every way of changing those slots,
/// counts the offspring by (number of operation slots in the subset, d_y).
fn enumerate_subsets(
    p: &SearchSpaceParams,
    x: &Genotype,
    opt: &Genotype,
    q: usize,
) -> Vec<Vec<u128>> {
    let n = p.n();
    let mut tally = vec![vec![0u128; n + 1]; q + 1];
    let mut subset: Vec<usize> = (0..q).collect();
    let mut child = x.clone();
    loop {
        let op_slots = subset.iter().filter(|&&s| s >= p.n1()).count();
        // mixed-radix walk over the alternatives of each chosen slot
        let radix: Vec<usize> = subset.iter().map(|&s| p.arity(s) - 1).collect();
        let mut digit = vec![0usize; q];
        loop {
            let slots = child.slots_mut();
            slots.copy_from_slice(x.slots());
            for (&s, &k) in subset.iter().zip(&digit) {
                let cur = slots[s];
                slots[s] = if (k as u8) >= cur { k as u8 + 1 } else { k as u8 };
            }
            let d_y = genotype::mismatches(child.slots(), opt.slots());
            tally[op_slots][d_y] += 1;

            let mut pos = 0;
            while pos < q {
                digit[pos] += 1;
                if digit[pos] < radix[pos] {
                    break;
                }
                digit[pos] = 0;
                pos += 1;
            }
            if pos == q {
                break;
            }
        }

        // next combination in lexicographic order
        let mut i = q;
        while i > 0 && subset[i - 1] == n - q + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        subset[i - 1] += 1;
        for j in i..q {
            subset[j] = subset[j - 1] + 1;
        }
    }
    tally
}
