//! Exact sizes of distance classes in the solution and population spaces.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::SearchSpaceParams;
use crate::{Error, Result};

/// Arbitrary-precision nonnegative count.
pub type BigCount = BigUint;

/// `binom(n, k)`; zero when `k > n`.
pub fn binomial(n: &BigUint, k: u64) -> BigUint {
    if BigUint::from(k) > *n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of `k`-element multisets over `m` items, `binom(m + k - 1, k)`,
/// with `multichoose(0, 0) = 1`.
pub fn multichoose(m: &BigUint, k: u64) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    if m.is_zero() {
        return BigUint::zero();
    }
    binomial(&(m + k - 1u32), k)
}

fn small_binomial(n: usize, k: usize) -> BigUint {
    binomial(&BigUint::from(n), k as u64)
}

/// `C(d)`: number of genotypes at Hamming distance `d` from a fixed optimum.
pub fn count_solutions_at_distance(p: &SearchSpaceParams, d: usize) -> Result<BigCount> {
    if d > p.n() {
        return Err(Error::OutOfRange {
            what: "distance",
            value: d,
            min: 0,
            max: p.n(),
        });
    }
    let l = BigUint::from(p.l());
    let total = p
        .splits(d)
        .map(|s| {
            l.pow(s.d2 as u32) * small_binomial(p.n1(), s.d1) * small_binomial(p.n2(), s.d2)
        })
        .sum();
    Ok(total)
}

/// `|S| = 2^n1 (L+1)^n2`.
pub fn solution_space_size(p: &SearchSpaceParams) -> BigCount {
    (BigUint::one() << p.n1()) * BigUint::from(p.l() + 1).pow(p.n2() as u32)
}

/// `|χ| = binom(λ + |S| - 1, λ)`: populations are multisets of size λ.
pub fn population_space_size(p: &SearchSpaceParams, lambda: usize) -> BigCount {
    multichoose(&solution_space_size(p), lambda as u64)
}

fn check_lambda(lambda: usize) -> Result<()> {
    if lambda == 0 {
        return Err(Error::OutOfRange {
            what: "lambda",
            value: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    Ok(())
}

/// `|χ_i^γ|`: populations whose minimum member distance is `i`, attained by
/// exactly `γ` members. `i = 0` is accepted and counts optimal populations by
/// how many copies of the optimum they hold.
pub fn count_population_class(
    p: &SearchSpaceParams,
    lambda: usize,
    i: usize,
    gamma: usize,
) -> Result<BigCount> {
    check_lambda(lambda)?;
    if gamma == 0 || gamma > lambda {
        return Err(Error::OutOfRange {
            what: "gamma",
            value: gamma,
            min: 1,
            max: lambda,
        });
    }
    let at = count_solutions_at_distance(p, i)?;
    let beyond: BigUint = ((i + 1)..=p.n())
        .map(|j| count_solutions_at_distance(p, j))
        .sum::<Result<BigUint>>()?;
    Ok(multichoose(&at, gamma as u64) * multichoose(&beyond, (lambda - gamma) as u64))
}

/// `|χ_i|`. For `i = 0` this is `|χ| - Σ_{i≥1} |χ_i|`.
pub fn count_population_subspace(
    p: &SearchSpaceParams,
    lambda: usize,
    i: usize,
) -> Result<BigCount> {
    Ok(PopulationCounts::new(p, lambda)?.subspace(i).clone())
}

/// All class sizes for one `(params, λ)` pair, computed once.
#[derive(Debug, Clone)]
pub struct PopulationCounts {
    params: SearchSpaceParams,
    lambda: usize,
    solutions: Vec<BigUint>,
    // classes[i][γ - 1] = |χ_i^γ|
    classes: Vec<Vec<BigUint>>,
    subspaces: Vec<BigUint>,
    total: BigUint,
}

impl PopulationCounts {
    pub fn new(p: &SearchSpaceParams, lambda: usize) -> Result<Self> {
        check_lambda(lambda)?;
        let n = p.n();
        let solutions = (0..=n)
            .map(|d| count_solutions_at_distance(p, d))
            .collect::<Result<Vec<_>>>()?;
        let mut beyond = vec![BigUint::zero(); n + 1];
        for i in (0..n).rev() {
            beyond[i] = &beyond[i + 1] + &solutions[i + 1];
        }

        let lam = lambda as u64;
        let mut classes = Vec::with_capacity(n + 1);
        for i in 0..=n {
            // incremental multiset coefficients: mc(m, k) = mc(m, k-1) (m + k - 1) / k
            let series = |m: &BigUint| {
                let mut out = Vec::with_capacity(lambda + 1);
                let mut cur = BigUint::one();
                out.push(cur.clone());
                for k in 1..=lam {
                    cur = cur * (m + (k - 1)) / k;
                    out.push(cur.clone());
                }
                out
            };
            let at = series(&solutions[i]);
            let rest = series(&beyond[i]);
            let row = (1..=lambda)
                .map(|g| &at[g] * &rest[lambda - g])
                .collect::<Vec<_>>();
            classes.push(row);
        }

        let total = population_space_size(p, lambda);
        let mut subspaces: Vec<BigUint> = classes
            .iter()
            .map(|row| row.iter().sum::<BigUint>())
            .collect();
        let nonoptimal: BigUint = subspaces[1..].iter().sum();
        subspaces[0] = &total - nonoptimal;

        Ok(Self {
            params: *p,
            lambda,
            solutions,
            classes,
            subspaces,
            total,
        })
    }

    pub fn params(&self) -> &SearchSpaceParams {
        &self.params
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// `C(d)`.
    pub fn solutions(&self, d: usize) -> &BigUint {
        &self.solutions[d]
    }

    /// `|χ_i^γ|` for `γ ∈ [1, λ]`.
    pub fn class(&self, i: usize, gamma: usize) -> &BigUint {
        &self.classes[i][gamma - 1]
    }

    /// `|χ_i|`.
    pub fn subspace(&self, i: usize) -> &BigUint {
        &self.subspaces[i]
    }

    /// `|χ|`.
    pub fn total(&self) -> &BigUint {
        &self.total
    }
}

/// `num / den` as a correctly scaled `f64` with relative error near one ulp,
/// even when both operands are far outside the `f64` range.
pub fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "ratio with zero denominator");
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let q = q.to_u128().expect("scaled quotient fits in 66 bits") as f64;
    libm::ldexp(q, -shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial(&big(5), 2), big(10));
        assert_eq!(binomial(&big(5), 0), big(1));
        assert_eq!(binomial(&big(5), 6), big(0));
        assert_eq!(binomial(&big(52), 5), big(2_598_960));
        assert_eq!(multichoose(&big(0), 0), big(1));
        assert_eq!(multichoose(&big(0), 3), big(0));
        assert_eq!(multichoose(&big(24), 2), big(300));
    }

    #[test]
    fn solution_counts_small_space() {
        let p = SearchSpaceParams::new(3, 2).unwrap();
        assert_eq!(count_solutions_at_distance(&p, 0).unwrap(), big(1));
        assert_eq!(count_solutions_at_distance(&p, 1).unwrap(), big(5));
        let sum: BigUint = (0..=4)
            .map(|d| count_solutions_at_distance(&p, d).unwrap())
            .sum();
        assert_eq!(sum, big(24));
        assert!(count_solutions_at_distance(&p, 5).is_err());
    }

    #[test]
    fn solution_space_sizes() {
        let s = |v, l| solution_space_size(&SearchSpaceParams::new(v, l).unwrap());
        assert_eq!(s(3, 2), big(24));
        assert_eq!(s(3, 1), big(16));
        assert_eq!(s(7, 2), big(509_607_936));
    }

    #[test]
    fn population_class_examples() {
        let p = SearchSpaceParams::new(3, 2).unwrap();
        assert_eq!(count_population_class(&p, 1, 1, 1).unwrap(), big(5));
        // one member at distance 1 (5 choices), one at distance >= 2 (18 choices)
        assert_eq!(count_population_class(&p, 2, 1, 1).unwrap(), big(90));
        let cn = count_solutions_at_distance(&p, 4).unwrap();
        assert_eq!(
            count_population_class(&p, 3, 4, 3).unwrap(),
            multichoose(&cn, 3)
        );
        assert!(count_population_class(&p, 2, 1, 0).is_err());
        assert!(count_population_class(&p, 2, 1, 3).is_err());
        assert!(count_population_class(&p, 2, 5, 1).is_err());
    }

    #[test]
    fn population_space_partition() {
        let p = SearchSpaceParams::new(3, 2).unwrap();
        assert_eq!(population_space_size(&p, 1), big(24));
        assert_eq!(population_space_size(&p, 2), big(300));
        let counts = PopulationCounts::new(&p, 2).unwrap();
        let sum: BigUint = (0..=4).map(|i| counts.subspace(i).clone()).sum();
        assert_eq!(sum, big(300));
        // the class formula at i = 0 agrees with the complement rule
        let direct: BigUint = (1..=2).map(|g| counts.class(0, g).clone()).sum();
        assert_eq!(&direct, counts.subspace(0));
        assert_eq!(
            count_population_subspace(&p, 2, 0).unwrap(),
            counts.subspace(0).clone()
        );
    }

    #[test]
    fn ratio_is_accurate_for_huge_operands() {
        assert_eq!(ratio_to_f64(&big(3), &big(8)), 0.375);
        assert_eq!(ratio_to_f64(&big(0), &big(8)), 0.0);
        let a = BigUint::from(7u32).pow(400);
        let b = BigUint::from(7u32).pow(401);
        let r = ratio_to_f64(&a, &b);
        assert!((r - 1.0 / 7.0).abs() < 1e-16);
        let r = ratio_to_f64(&b, &a);
        assert!((r - 7.0).abs() < 1e-14);
    }
}
