use enas_runtime_core::genotype::{all_genotypes, distance_profile, genotype_with_profile};
use enas_runtime_core::transition::{
    analytic, exact_enumeration_oracle, min_tail_probability, p_binary_qbit, p_m1, p_m2, p_m3,
    p_m4, step_distribution, DistanceStepDistribution, Probability, TailTable,
};
use enas_runtime_core::{DistanceProfile, Genotype, MutationOp, RandomSeed, SearchSpaceParams};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn one() -> BigRational {
    ratio(1, 1)
}

#[test]
fn binary_anchor() {
    let dist = p_binary_qbit::<BigRational>(5, 2, 1).unwrap();
    assert_eq!(dist.mass(1), ratio(2, 5));
    assert_eq!(dist.mass(3), ratio(3, 5));
    assert_eq!(dist.support().collect::<Vec<_>>(), [1, 3]);
}

/// Every profile at (v=4, L=2), tested from a fixed optimum and from one
/// other optimum, so the closed forms are checked against concrete parents.
fn profiles_with_parents() -> Vec<(SearchSpaceParams, DistanceProfile, Genotype, Genotype)> {
    let p = SearchSpaceParams::new(4, 2).unwrap();
    let opts = [
        Genotype::zeros(&p),
        Genotype::parse(&p, "101101:21").unwrap(),
    ];
    let mut out = Vec::new();
    for opt in &opts {
        for prof in p.profiles() {
            let x = genotype_with_profile(&p, opt, prof).unwrap();
            out.push((p, prof, x, opt.clone()));
        }
    }
    out
}

#[test]
fn one_slot_rules_equal_the_oracle_exactly() {
    for (p, prof, x, opt) in profiles_with_parents() {
        assert_eq!(
            p_m1::<BigRational>(&p, prof).unwrap(),
            exact_enumeration_oracle(&p, &x, MutationOp::OneBitBitFair, &opt).unwrap(),
            "m1 {prof}"
        );
        assert_eq!(
            p_m2::<BigRational>(&p, prof).unwrap(),
            exact_enumeration_oracle(&p, &x, MutationOp::OneBitOffspringFair, &opt).unwrap(),
            "m2 {prof}"
        );
    }
}

#[test]
fn q_slot_rule_equals_the_oracle_exactly() {
    for (p, prof, x, opt) in profiles_with_parents() {
        for q in 1..=3 {
            assert_eq!(
                p_m3::<BigRational>(&p, prof, q).unwrap(),
                exact_enumeration_oracle(&p, &x, MutationOp::QBit(q), &opt).unwrap(),
                "m3:{q} {prof}"
            );
        }
    }
}

#[test]
fn bitwise_rule_matches_weighted_oracle_sum() {
    for (p, prof, x, opt) in profiles_with_parents() {
        let n = p.n();
        // independent mixture: Σ_q binom(n,q) n^-q (1-1/n)^(n-q) · oracle_q
        let mut mix = vec![0.0f64; n + 1];
        let stay = (1.0 - 1.0 / n as f64).powi(n as i32);
        mix[prof.d()] += stay;
        for q in 1..=n {
            let w = f64::binomial(n, q)
                * (1.0 / n as f64).powi(q as i32)
                * (1.0 - 1.0 / n as f64).powi((n - q) as i32);
            let o = exact_enumeration_oracle(&p, &x, MutationOp::QBit(q), &opt).unwrap();
            for (d, m) in o.masses().iter().enumerate() {
                mix[d] += w * m.to_f64();
            }
        }
        let closed = p_m4::<f64>(&p, prof).unwrap();
        let exact = exact_enumeration_oracle(&p, &x, MutationOp::Bitwise, &opt).unwrap();
        for d in 0..=n {
            assert!((closed.mass(d) - mix[d]).abs() < 1e-10, "{prof} d={d}");
            assert!((closed.mass(d) - exact.mass(d).to_f64()).abs() < 1e-12);
        }
    }
}

#[test]
fn binary_encoding_reduces_to_the_binary_rule() {
    // with L = 1 every slot is binary
    let p = SearchSpaceParams::new(5, 1).unwrap();
    for prof in p.profiles() {
        for q in 1..=p.n() {
            assert_eq!(
                p_m3::<BigRational>(&p, prof, q).unwrap(),
                p_binary_qbit::<BigRational>(p.n(), prof.d(), q).unwrap()
            );
        }
    }
}

#[test]
fn exact_and_float_modes_agree() {
    let p = SearchSpaceParams::new(5, 3).unwrap();
    for prof in p.profiles() {
        for op in [MutationOp::QBit(3), MutationOp::Bitwise] {
            let exact = analytic::<BigRational>(&p, op, prof).unwrap();
            let float = analytic::<f64>(&p, op, prof).unwrap();
            for d in 0..=p.n() {
                let e = exact.mass(d).to_f64();
                assert!((e - float.mass(d)).abs() <= 1e-14, "{op} {prof} d={d}");
            }
            let stepped = step_distribution(&p, op, prof).unwrap();
            for d in 0..=p.n() {
                assert!((stepped.mass(d) - exact.mass(d).to_f64()).abs() <= 1e-14);
            }
        }
    }
}

/// Minimum tail recomputed from the oracle over every genotype at distance
/// at least `d`.
fn oracle_min_tail(p: &SearchSpaceParams, op: MutationOp, opt: &Genotype, d: usize, t: usize) -> f64 {
    all_genotypes(p)
        .filter(|x| distance_profile(x, opt).unwrap().d() >= d)
        .map(|x| exact_enumeration_oracle(p, &x, op, opt).unwrap().tail(t).to_f64())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn minimum_tails_match_oracle_scan() {
    let p = SearchSpaceParams::new(3, 2).unwrap();
    let opt = Genotype::parse(&p, "110:1").unwrap();
    for op in [MutationOp::QBit(2), MutationOp::Bitwise] {
        let table = TailTable::new(&p, op).unwrap();
        for d in 1..=p.n() {
            for t in 0..=p.n() {
                let want = oracle_min_tail(&p, op, &opt, d, t);
                assert!((table.min_tail(d, t as isize) - want).abs() < 1e-12, "{op} d={d} t={t}");
                assert!((min_tail_probability(&p, op, d, t).unwrap() - want).abs() < 1e-12);
            }
        }
    }
}

fn profile_strategy() -> impl Strategy<Value = (SearchSpaceParams, DistanceProfile)> {
    (3usize..8, 1usize..4).prop_flat_map(|(v, l)| {
        let p = SearchSpaceParams::new(v, l).unwrap();
        (0..=p.n1(), 0..=p.n2()).prop_map(move |(d1, d2)| (p, DistanceProfile { d1, d2 }))
    })
}

fn assert_normalized(dist: &DistanceStepDistribution<BigRational>) {
    assert_eq!(dist.total(), one());
    assert!(dist.masses().iter().all(|m| *m >= ratio(0, 1)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_are_distributions((p, prof) in profile_strategy(), q_seed in 0usize..1000) {
        let q = 1 + q_seed % p.n();
        assert_normalized(&p_m1::<BigRational>(&p, prof).unwrap());
        assert_normalized(&p_m2::<BigRational>(&p, prof).unwrap());
        assert_normalized(&p_m3::<BigRational>(&p, prof, q).unwrap());
        let m4 = p_m4::<f64>(&p, prof).unwrap();
        prop_assert!((m4.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn support_laws((p, prof) in profile_strategy(), q_seed in 0usize..1000) {
        let d = prof.d();
        let q = 1 + q_seed % p.n();
        for op in [MutationOp::OneBitBitFair, MutationOp::OneBitOffspringFair] {
            let dist = analytic::<BigRational>(&p, op, prof).unwrap();
            prop_assert!(dist.support().all(|y| y + 1 >= d && y <= d + 1));
        }
        let dist = p_m3::<BigRational>(&p, prof, q).unwrap();
        prop_assert!(dist.support().all(|y| y + q >= d && y <= d + q));
        // the optimum is reachable in one q-slot step only from distance q
        prop_assert_eq!(dist.mass(0) != ratio(0, 1), d == q);
    }

    #[test]
    fn one_slot_rules_coincide_on_binary_ops((p, prof) in profile_strategy()) {
        let p1 = SearchSpaceParams::new(p.v(), 1).unwrap();
        let prof1 = DistanceProfile { d1: prof.d1, d2: prof.d2.min(p1.n2()) };
        prop_assert_eq!(
            p_m1::<BigRational>(&p1, prof1).unwrap(),
            p_m2::<BigRational>(&p1, prof1).unwrap()
        );
    }

    #[test]
    fn q_slot_oracle_on_random_parents(seed in any::<u64>(), q in 1usize..4) {
        let p = SearchSpaceParams::new(4, 2).unwrap();
        let mut rng = RandomSeed(seed).rng();
        let x = enas_runtime_core::operators::random_genotype(&p, &mut rng);
        let opt = enas_runtime_core::operators::random_genotype(&p, &mut rng);
        let prof = distance_profile(&x, &opt).unwrap();
        prop_assert_eq!(
            exact_enumeration_oracle(&p, &x, MutationOp::QBit(q), &opt).unwrap(),
            p_m3::<BigRational>(&p, prof, q).unwrap()
        );
    }
}
