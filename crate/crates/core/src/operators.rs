//! Initialization, the four mutation operators and truncation selection.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::genotype::{Genotype, SearchSpaceParams};
use crate::{Error, Result};

/// A population: an unordered multiset of λ genotypes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub members: Vec<Genotype>,
}

impl Population {
    pub fn new(members: Vec<Genotype>) -> Self {
        Self { members }
    }

    pub fn lambda(&self) -> usize {
        self.members.len()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Genotype> {
        self.members.iter()
    }
}

/// The four mutation operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationOp {
    /// One slot chosen uniformly from `n`; operation slots move to a uniform
    /// other value.
    OneBitBitFair,
    /// One of the `n1 + L n2` distinct one-slot offspring, uniformly.
    OneBitOffspringFair,
    /// A uniform `q`-subset of slots, each changed as in the bit-fair rule.
    QBit(usize),
    /// Every slot independently with probability `1/n`.
    Bitwise,
}

impl MutationOp {
    pub fn validate(&self, p: &SearchSpaceParams) -> Result<()> {
        match *self {
            MutationOp::QBit(q) if q == 0 || q > p.n() => Err(Error::OutOfRange {
                what: "q",
                value: q,
                min: 1,
                max: p.n(),
            }),
            _ => Ok(()),
        }
    }

    /// Short name used in CSV output: `m1`..`m4`.
    pub fn name(&self) -> &'static str {
        match self {
            MutationOp::OneBitBitFair => "m1",
            MutationOp::OneBitOffspringFair => "m2",
            MutationOp::QBit(_) => "m3",
            MutationOp::Bitwise => "m4",
        }
    }

    pub fn q(&self) -> Option<usize> {
        match *self {
            MutationOp::QBit(q) => Some(q),
            _ => None,
        }
    }

    pub fn from_name(name: &str, q: Option<usize>) -> Result<Self> {
        match (name, q) {
            ("m1", _) => Ok(MutationOp::OneBitBitFair),
            ("m2", _) => Ok(MutationOp::OneBitOffspringFair),
            ("m3", Some(q)) => Ok(MutationOp::QBit(q)),
            ("m3", None) => Err(Error::InvalidConfig(String::from("m3 needs q"))),
            ("m4", _) => Ok(MutationOp::Bitwise),
            _ => Err(Error::InvalidConfig(format!("unknown operator {name:?}"))),
        }
    }

    pub fn apply<R: Rng + ?Sized>(
        &self,
        p: &SearchSpaceParams,
        x: &Genotype,
        rng: &mut R,
    ) -> Genotype {
        match *self {
            MutationOp::OneBitBitFair => mutate_one_bit(p, x, rng),
            MutationOp::OneBitOffspringFair => mutate_offspring_fair(p, x, rng),
            MutationOp::QBit(q) => mutate_q_bits(p, x, q, rng),
            MutationOp::Bitwise => mutate_bitwise(p, x, rng),
        }
    }
}

/// `m1`, `m2`, `m3:q`, `m4`.
impl fmt::Display for MutationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MutationOp::QBit(q) => write!(f, "m3:{q}"),
            op => f.write_str(op.name()),
        }
    }
}

impl FromStr for MutationOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((name, q)) => {
                let q = q
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad q in {s:?}")))?;
                MutationOp::from_name(name, Some(q))
            }
            None => MutationOp::from_name(s, None),
        }
    }
}

/// λ genotypes drawn uniformly and independently from the solution space.
pub fn init_population<R: Rng + ?Sized>(
    p: &SearchSpaceParams,
    lambda: usize,
    rng: &mut R,
) -> Result<Population> {
    if lambda == 0 {
        return Err(Error::OutOfRange {
            what: "lambda",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    Ok(Population::new(
        (0..lambda).map(|_| random_genotype(p, rng)).collect(),
    ))
}

pub fn random_genotype<R: Rng + ?Sized>(p: &SearchSpaceParams, rng: &mut R) -> Genotype {
    let mut g = Genotype::zeros(p);
    for (i, s) in g.slots_mut().iter_mut().enumerate() {
        *s = rng.gen_range(0..p.arity(i)) as u8;
    }
    g
}

/// Changes slot `slot` to a uniformly chosen different value.
#[inline]
fn change_slot<R: Rng + ?Sized>(p: &SearchSpaceParams, g: &mut Genotype, slot: usize, rng: &mut R) {
    let s = &mut g.slots_mut()[slot];
    if slot < p.n1() {
        *s ^= 1;
    } else {
        *s = other_value(*s, rng.gen_range(0..p.l()));
    }
}

/// The `k`-th value of `[0, L]` skipping `current`.
#[inline]
fn other_value(current: u8, k: usize) -> u8 {
    let k = k as u8;
    if k >= current {
        k + 1
    } else {
        k
    }
}

/// Mutation#1: one slot uniform on `[0, n)`.
pub fn mutate_one_bit<R: Rng + ?Sized>(p: &SearchSpaceParams, x: &Genotype, rng: &mut R) -> Genotype {
    let mut y = x.clone();
    let r = rng.gen_range(0..p.n());
    change_slot(p, &mut y, r, rng);
    y
}

/// Mutation#2: index uniform on `[0, n1 + L n2)`; each distinct one-slot
/// offspring is produced with probability `1 / (n1 + L n2)`.
pub fn mutate_offspring_fair<R: Rng + ?Sized>(
    p: &SearchSpaceParams,
    x: &Genotype,
    rng: &mut R,
) -> Genotype {
    let mut y = x.clone();
    let r = rng.gen_range(0..p.weighted_len());
    if r < p.n1() {
        y.slots_mut()[r] ^= 1;
    } else {
        let slot = p.n1() + (r - p.n1()) / p.l();
        let k = (r - p.n1()) % p.l();
        let s = &mut y.slots_mut()[slot];
        *s = other_value(*s, k);
    }
    y
}

/// Mutation#3: a uniform `q`-subset of slots, every chosen slot changes.
pub fn mutate_q_bits<R: Rng + ?Sized>(
    p: &SearchSpaceParams,
    x: &Genotype,
    q: usize,
    rng: &mut R,
) -> Genotype {
    assert!(q >= 1 && q <= p.n(), "q = {q} outside [1, {}]", p.n());
    let mut y = x.clone();
    for slot in index::sample(rng, p.n(), q) {
        change_slot(p, &mut y, slot, rng);
    }
    y
}

/// Mutation#4: each slot independently with probability `1/n`. The offspring
/// may equal the parent.
pub fn mutate_bitwise<R: Rng + ?Sized>(p: &SearchSpaceParams, x: &Genotype, rng: &mut R) -> Genotype {
    let mut y = x.clone();
    let rate = 1.0 / p.n() as f64;
    for slot in 0..p.n() {
        if rng.gen::<f64>() < rate {
            change_slot(p, &mut y, slot, rng);
        }
    }
    y
}

/// Keeps the λ fittest of the `2λ` parents and offspring. Ties at the λ-th
/// rank are broken uniformly at random among all tied members.
///
/// Returns the survivors together with their fitness values.
pub fn truncation_select<R: Rng + ?Sized>(
    parents: &Population,
    parent_fitness: &[f64],
    offspring: &Population,
    offspring_fitness: &[f64],
    rng: &mut R,
) -> Result<(Population, Vec<f64>)> {
    let lambda = parents.lambda();
    if offspring.lambda() != lambda {
        return Err(Error::LengthMismatch {
            expected: lambda,
            found: offspring.lambda(),
        });
    }
    for (pop, fit, label) in [
        (parents, parent_fitness, "parent"),
        (offspring, offspring_fitness, "offspring"),
    ] {
        if fit.len() != pop.lambda() {
            return Err(Error::MissingFitness(format!(
                "{} of {} {label}s",
                pop.lambda().saturating_sub(fit.len()).max(1),
                pop.lambda()
            )));
        }
        if let Some(i) = fit.iter().position(|f| f.is_nan()) {
            return Err(Error::MissingFitness(format!("{label} {i}")));
        }
    }

    let pool: Vec<(&Genotype, f64)> = parents
        .iter()
        .zip(parent_fitness.iter().copied())
        .chain(offspring.iter().zip(offspring_fitness.iter().copied()))
        .collect();
    let (survivors, fitness) = select_top(&pool, lambda, rng);
    Ok((Population::new(survivors), fitness))
}

pub(crate) fn select_top<R: Rng + ?Sized>(
    pool: &[(&Genotype, f64)],
    lambda: usize,
    rng: &mut R,
) -> (Vec<Genotype>, Vec<f64>) {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| pool[b].1.total_cmp(&pool[a].1));
    let cut = pool[order[lambda - 1]].1;

    let mut chosen: Vec<usize> = order
        .iter()
        .copied()
        .take_while(|&i| pool[i].1.total_cmp(&cut) == Ordering::Greater)
        .collect();
    let tied: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| pool[i].1.total_cmp(&cut) == Ordering::Equal)
        .collect();
    let need = lambda - chosen.len();
    if need == tied.len() {
        chosen.extend_from_slice(&tied);
    } else {
        chosen.extend(index::sample(rng, tied.len(), need).into_iter().map(|k| tied[k]));
    }

    chosen
        .into_iter()
        .map(|i| (pool[i].0.clone(), pool[i].1))
        .unzip()
}
