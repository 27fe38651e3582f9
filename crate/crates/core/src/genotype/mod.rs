//! Combination encoding of architectures.
//!
//! A genotype is `n1 = v(v-1)/2` binary edge slots (the strict upper triangle
//! of the adjacency matrix, row-major) followed by `n2 = v - 2` operation
//! slots with values in `[0, L]`, one per internal node.

mod count;
mod graph;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{Error, Result};

pub use count::{
    binomial, count_population_class, count_population_subspace, count_solutions_at_distance,
    multichoose, population_space_size, ratio_to_f64, solution_space_size, BigCount,
    PopulationCounts,
};
pub use graph::ArchitectureGraph;

/// Geometry of the architecture space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchSpaceParams {
    v: usize,
    l: usize,
    n1: usize,
    n2: usize,
}

impl SearchSpaceParams {
    /// Derives the encoding lengths for `v` nodes and operation indices `0..=l`.
    pub fn new(v: usize, l: usize) -> Result<Self> {
        if v < 3 || l < 1 {
            return Err(Error::InvalidParams { v, l });
        }
        Ok(Self {
            v,
            l,
            n1: v * (v - 1) / 2,
            n2: v - 2,
        })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    /// Largest operation index; there are `L + 1` operation types.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of edge slots.
    pub fn n1(&self) -> usize {
        self.n1
    }

    /// Number of operation slots.
    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Genotype length `n1 + n2`.
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    /// Number of distinct one-slot offspring, `n1 + L * n2`.
    pub fn weighted_len(&self) -> usize {
        self.n1 + self.l * self.n2
    }

    /// Number of values slot `slot` can take.
    #[inline]
    pub fn arity(&self, slot: usize) -> usize {
        if slot < self.n1 {
            2
        } else {
            self.l + 1
        }
    }

    /// Whether `(d1, d2)` is a reachable distance profile.
    pub fn profile(&self, d1: usize, d2: usize) -> Result<DistanceProfile> {
        if d1 > self.n1 || d2 > self.n2 {
            return Err(Error::InfeasibleProfile {
                d1,
                d2,
                n1: self.n1,
                n2: self.n2,
            });
        }
        Ok(DistanceProfile { d1, d2 })
    }

    /// All feasible profiles with total distance `d`.
    pub fn splits(&self, d: usize) -> impl Iterator<Item = DistanceProfile> + '_ {
        let lo = d.saturating_sub(self.n2);
        let hi = d.min(self.n1);
        (lo..=hi)
            .filter(move |_| d <= self.n())
            .map(move |d1| DistanceProfile { d1, d2: d - d1 })
    }

    /// Every feasible profile, ordered by `(d1, d2)`.
    pub fn profiles(&self) -> impl Iterator<Item = DistanceProfile> + '_ {
        (0..=self.n1).flat_map(move |d1| (0..=self.n2).map(move |d2| DistanceProfile { d1, d2 }))
    }
}

/// One architecture: edge bits followed by operation values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    slots: Vec<u8>,
    n1: usize,
}

impl Genotype {
    /// Builds a genotype, checking part lengths and value ranges against `params`.
    pub fn new(params: &SearchSpaceParams, edges: &[u8], ops: &[u8]) -> Result<Self> {
        let mut slots = Vec::with_capacity(edges.len() + ops.len());
        slots.extend_from_slice(edges);
        slots.extend_from_slice(ops);
        let g = Self {
            slots,
            n1: edges.len(),
        };
        g.validate(params)?;
        Ok(g)
    }

    /// Builds a genotype from a flat slot vector.
    pub fn from_slots(params: &SearchSpaceParams, slots: Vec<u8>) -> Result<Self> {
        let g = Self {
            slots,
            n1: params.n1(),
        };
        g.validate(params)?;
        Ok(g)
    }

    /// The all-zero genotype (empty graph, operation 0 everywhere).
    pub fn zeros(params: &SearchSpaceParams) -> Self {
        Self {
            slots: alloc::vec![0; params.n()],
            n1: params.n1(),
        }
    }

    pub fn validate(&self, params: &SearchSpaceParams) -> Result<()> {
        if self.n1 != params.n1() {
            return Err(Error::LengthMismatch {
                expected: params.n1(),
                found: self.n1,
            });
        }
        if self.slots.len() != params.n() {
            return Err(Error::LengthMismatch {
                expected: params.n(),
                found: self.slots.len(),
            });
        }
        if let Some(slot) = self
            .slots
            .iter()
            .enumerate()
            .position(|(i, &s)| usize::from(s) >= params.arity(i))
        {
            return Err(Error::InvalidGenotype(alloc::format!(
                "slot {slot} holds {} but only {} values are allowed",
                self.slots[slot],
                params.arity(slot)
            )));
        }
        Ok(())
    }

    pub fn edges(&self) -> &[u8] {
        &self.slots[..self.n1]
    }

    pub fn ops(&self) -> &[u8] {
        &self.slots[self.n1..]
    }

    pub fn slots(&self) -> &[u8] {
        &self.slots
    }

    pub(crate) fn slots_mut(&mut self) -> &mut [u8] {
        &mut self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Parses the text form and validates it against `params`.
    pub fn parse(params: &SearchSpaceParams, text: &str) -> Result<Self> {
        let g: Genotype = text.parse()?;
        g.validate(params)?;
        Ok(g)
    }
}

/// `<edge-bits>:<op-digits>`, e.g. `110011000101000100101:12012`.
impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.edges() {
            write!(f, "{b}")?;
        }
        f.write_str(":")?;
        for &o in self.ops() {
            write!(f, "{o}")?;
        }
        Ok(())
    }
}

impl FromStr for Genotype {
    type Err = Error;

    /// Parses the text form without range checks beyond single decimal digits;
    /// use [`Genotype::parse`] to validate against a search space.
    fn from_str(s: &str) -> Result<Self> {
        let (edges, ops) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::InvalidGenotype(String::from("missing ':' separator")))?;
        let digit = |c: char| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::InvalidGenotype(alloc::format!("unexpected character {c:?}")))
        };
        let mut slots = Vec::with_capacity(edges.len() + ops.len());
        for c in edges.chars() {
            let b = digit(c)?;
            if b > 1 {
                return Err(Error::InvalidGenotype(alloc::format!(
                    "edge slot must be 0 or 1, found {c}"
                )));
            }
            slots.push(b);
        }
        let n1 = slots.len();
        for c in ops.chars() {
            slots.push(digit(c)?);
        }
        Ok(Self { slots, n1 })
    }
}

/// Hamming decomposition of a genotype against the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DistanceProfile {
    /// Edge-part mismatches.
    pub d1: usize,
    /// Operation-part mismatches.
    pub d2: usize,
}

impl DistanceProfile {
    pub fn d(&self) -> usize {
        self.d1 + self.d2
    }
}

impl fmt::Display for DistanceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d1={}, d2={})", self.d1, self.d2)
    }
}

fn check_shape(a: &Genotype, b: &Genotype) -> Result<()> {
    if a.n1 != b.n1 {
        return Err(Error::LengthMismatch {
            expected: a.n1,
            found: b.n1,
        });
    }
    if a.slots.len() != b.slots.len() {
        return Err(Error::LengthMismatch {
            expected: a.slots.len(),
            found: b.slots.len(),
        });
    }
    Ok(())
}

/// Number of positions at which `a` and `b` differ.
pub fn hamming(a: &Genotype, b: &Genotype) -> Result<usize> {
    check_shape(a, b)?;
    Ok(mismatches(&a.slots, &b.slots))
}

#[inline]
pub(crate) fn mismatches(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Edge/operation mismatch counts of `x` against `opt`.
pub fn distance_profile(x: &Genotype, opt: &Genotype) -> Result<DistanceProfile> {
    check_shape(x, opt)?;
    Ok(DistanceProfile {
        d1: mismatches(x.edges(), opt.edges()),
        d2: mismatches(x.ops(), opt.ops()),
    })
}

/// A genotype with the given profile relative to `opt`: the first `d1` edge
/// slots are flipped and the first `d2` operation slots are shifted by one.
pub fn genotype_with_profile(
    params: &SearchSpaceParams,
    opt: &Genotype,
    prof: DistanceProfile,
) -> Result<Genotype> {
    params.profile(prof.d1, prof.d2)?;
    opt.validate(params)?;
    let mut x = opt.clone();
    let n1 = params.n1();
    let base = (params.l() + 1) as u8;
    for s in &mut x.slots[..prof.d1] {
        *s ^= 1;
    }
    for s in &mut x.slots[n1..n1 + prof.d2] {
        *s = (*s + 1) % base;
    }
    Ok(x)
}

/// Every genotype of the space in lexicographic slot order.
pub fn all_genotypes(params: &SearchSpaceParams) -> impl Iterator<Item = Genotype> + '_ {
    let n = params.n();
    let mut next = Some(Genotype::zeros(params));
    core::iter::from_fn(move || {
        let cur = next.take()?;
        let mut succ = cur.clone();
        let mut pos = n;
        while pos > 0 {
            pos -= 1;
            let s = &mut succ.slots[pos];
            if (*s as usize) + 1 < params.arity(pos) {
                *s += 1;
                next = Some(succ);
                break;
            }
            *s = 0;
        }
        Some(cur)
    })
}

impl fmt::Display for SearchSpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v={},L={}", self.v, self.l)
    }
}
