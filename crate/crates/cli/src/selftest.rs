//! Seeded property harness runnable from the command line.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultraprod::fol::{eval_finite, los_verdict, EvalOptions};
use ultraprod::gen::{random_sentence, SentenceConfig};
use ultraprod::index_filters::{classify, DefinableSet, FilterSpec};
use ultraprod::structures::{materialize, StructureFamily};
use ultraprod::ultra::{ForcedOrdering, UltraElement, UltraNat, ValueRule};
use ultraprod::Result;

use crate::report::{SelftestReport, SelftestSuite, SCHEMA};

pub fn run(seed: u64, window: u64) -> Result<SelftestReport> {
    let suites = vec![
        set_algebra_suite(seed, window)?,
        principal_oracle_suite(seed)?,
        field_law_suite(seed)?,
        order_suite(seed)?,
    ];
    let all_passed = suites.iter().all(|s| s.passed);
    Ok(SelftestReport {
        schema: SCHEMA,
        command: "selftest",
        seed,
        window,
        suites,
        all_passed,
    })
}

fn random_set(rng: &mut impl Rng) -> DefinableSet {
    let modulus = rng.gen_range(1u64..=24);
    let count = rng.gen_range(0usize..4);
    let residues: Vec<u64> = (0..count).map(|_| rng.gen_range(0..modulus)).collect();
    let primes = [2u64, 3, 5, 7, 11, 13];
    let inc: Vec<u64> = primes
        .iter()
        .filter(|_| rng.gen_bool(0.2))
        .copied()
        .collect();
    let exc: Vec<u64> = primes
        .iter()
        .filter(|p| rng.gen_bool(0.2) && !inc.contains(p))
        .copied()
        .collect();
    DefinableSet::from_parts(modulus, &residues, &inc, &exc).expect("valid parts")
}

fn set_algebra_suite(seed: u64, window: u64) -> Result<SelftestSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e7a);
    let primes = ultraprod::arith::primes_upto(window.min(2000));
    let cases = 100;
    let mut passed = true;
    for _ in 0..cases {
        let a = random_set(&mut rng);
        let b = random_set(&mut rng);
        let inter = a.intersect(&b);
        let uni = a.union(&b);
        passed &= a.intersect(&b).complement() == a.complement().union(&b.complement());
        passed &= a.complement().complement() == a;
        for &p in &primes {
            passed &= inter.contains(p) == (a.contains(p) && b.contains(p));
            passed &= uni.contains(p) == (a.contains(p) || b.contains(p));
        }
        let v = classify(&a, &FilterSpec::Principal(13))?;
        passed &= v.is_forced_true() == a.contains(13);
    }
    Ok(SelftestSuite {
        name: "set-algebra",
        cases,
        passed,
    })
}

fn principal_oracle_suite(seed: u64) -> Result<SelftestSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x105);
    let cfg = SentenceConfig::default();
    let fam = StructureFamily::PrimeField;
    let opts = EvalOptions::default();
    let empty = std::collections::HashMap::new();
    let cases = 50;
    let mut passed = true;
    for _ in 0..cases {
        let sentence = random_sentence(&mut rng, &cfg);
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19] {
            let direct = eval_finite(&materialize(&fam, p)?, &sentence, &empty, &opts)?;
            let verdict = los_verdict(&fam, &sentence, &FilterSpec::Principal(p), 50, &opts)?;
            passed &= verdict.is_forced_true() == direct;
        }
    }
    Ok(SelftestSuite {
        name: "los-principal-oracle",
        cases,
        passed,
    })
}

fn random_rule(rng: &mut impl Rng) -> ValueRule {
    let degree = rng.gen_range(0..=2);
    let coeffs: Vec<BigRational> = (0..=degree)
        .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-6i64..=6))))
        .collect();
    ValueRule::new(coeffs, BTreeMap::new()).expect("integer polynomial")
}

fn field_law_suite(seed: u64) -> Result<SelftestSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf1e1d);
    let f = FilterSpec::Generic;
    let fam = StructureFamily::PrimeField;
    let zero = UltraElement::from_int(fam.clone(), 0);
    let cases = 50;
    let mut passed = true;
    for _ in 0..cases {
        let a = UltraElement::new(fam.clone(), random_rule(&mut rng));
        let b = UltraElement::new(fam.clone(), random_rule(&mut rng));
        let c = UltraElement::new(fam.clone(), random_rule(&mut rng));
        passed &= a
            .mul(&b.add(&c)?)?
            .eq(&a.mul(&b)?.add(&a.mul(&c)?)?, &f)?
            .is_forced_true();
        passed &= a.mul(&b)?.eq(&b.mul(&a)?, &f)?.is_forced_true();
        if a.eq(&zero, &f)?.is_forced_false() {
            passed &= a.is_invertible(&f)?.verdict.is_forced_true();
        }
    }
    Ok(SelftestSuite {
        name: "definable-field-laws",
        cases,
        passed,
    })
}

fn order_suite(seed: u64) -> Result<SelftestSuite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0d3);
    let cases = 20;
    let mut passed = true;
    let mut rules = Vec::new();
    for _ in 0..cases {
        let degree = rng.gen_range(0..=2);
        let mut coeffs: Vec<BigRational> = (0..=degree)
            .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-4i64..=4))))
            .collect();
        let lead = rng.gen_range(1i64..=4);
        *coeffs.last_mut().unwrap() = BigRational::from_integer(BigInt::from(lead));
        rules.push(UltraNat::new(ValueRule::new(coeffs, BTreeMap::new()).unwrap()).unwrap());
    }
    for a in &rules {
        for b in &rules {
            let ab = a.compare(b);
            let ba = b.compare(a);
            passed &= matches!(
                (ab, ba),
                (ForcedOrdering::Equal, ForcedOrdering::Equal)
                    | (ForcedOrdering::Less, ForcedOrdering::Greater)
                    | (ForcedOrdering::Greater, ForcedOrdering::Less)
            );
        }
    }
    Ok(SelftestSuite {
        name: "ultra-nat-order",
        cases,
        passed,
    })
}
