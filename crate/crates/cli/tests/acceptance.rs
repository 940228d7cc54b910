//! Acceptance suite. One test per criterion; each prints a PASS line on
//! success (run with `-- --nocapture` to see them all), and a failing
//! criterion fails its test.

use std::collections::{BTreeMap, HashMap};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ultraprod::arith::primes_upto;
use ultraprod::fol::{eval_finite, los_verdict, parse, truth_set, EvalOptions};
use ultraprod::gen::{random_sentence, SentenceConfig};
use ultraprod::index_filters::{
    classify, partition_verdicts, DefinableSet, FilterSpec, Provenance,
};
use ultraprod::proto::{BoundedPolySequence, FiltrationDescriptor, Membership};
use ultraprod::structures::{materialize, RingTable, StructureFamily};
use ultraprod::ultra::{ForcedOrdering, UltraElement, UltraNat, ValueRule};

fn opts() -> EvalOptions {
    EvalOptions::default()
}

/// Criterion 1: On 500 random sentences of quantifier depth <= 3 over the prime-field
/// family, the principal-filter verdict equals direct brute-force evaluation
/// at every prime p <= 50, with the whole sweep under 60 seconds.
#[test]
fn acceptance_1_los_principal_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let cfg = SentenceConfig::default();
    let fam = StructureFamily::PrimeField;
    let primes: Vec<u64> = primes_upto(50);
    let empty = HashMap::new();
    let mut checked = 0usize;
    for _ in 0..500 {
        let sentence = random_sentence(&mut rng, &cfg);
        for &p in &primes {
            let direct =
                eval_finite(&materialize(&fam, p).unwrap(), &sentence, &empty, &opts()).unwrap();
            let verdict =
                los_verdict(&fam, &sentence, &FilterSpec::Principal(p), 50, &opts()).unwrap();
            assert_eq!(
                verdict.is_forced_true(),
                direct,
                "disagreement for `{sentence}` at p = {p}"
            );
            assert!(verdict.is_forced_true() || verdict.is_forced_false());
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "oracle sweep took {elapsed:?}, budget is 60 s"
    );
    println!(
        "ACCEPTANCE 1 (Los principal oracle): PASS - {checked} verdict/evaluation pairs agree, {:.1?}",
        elapsed
    );
}

/// Criterion 2: For every constant c in [-10, 10] except 0, the exact truth set of
/// `exists x. x*x = c` matches brute force at every prime in [2, 10^4]; in
/// particular c = -1 yields (1 mod 4) + {2}.
#[test]
fn acceptance_2_quadratic_classifier_exactness() {
    let fam = StructureFamily::PrimeField;
    let mut checked_primes = 0usize;
    for c in -10i64..=10 {
        if c == 0 {
            continue;
        }
        let sentence = parse(&format!("exists x. x*x = {c}")).unwrap();
        let ts = truth_set(&fam, &sentence, 10_000, &opts()).unwrap();
        let exact = ts
            .exact
            .unwrap_or_else(|| panic!("classifier must fire for c = {c}"));
        // truth_set already hard-fails on mismatch; assert again explicitly
        for (p, truth) in &ts.samples {
            assert_eq!(exact.contains(*p), *truth, "c = {c}, p = {p}");
            checked_primes += 1;
        }
        if c == -1 {
            assert_eq!(
                exact,
                DefinableSet::congruence(&[1], 4).unwrap().plus(&[2]).unwrap()
            );
        }
    }
    println!(
        "ACCEPTANCE 2 (quadratic classifier exactness): PASS - 20 constants, {checked_primes} prime checks, c = -1 gives (1 mod 4) + {{2}}"
    );
}

/// Criterion 3: For n in [1, 50], `n*1 = 0` over the prime fields is forced false
/// generically and forced true at principal p exactly when p divides n.
#[test]
fn acceptance_3_characteristic_zero() {
    let fam = StructureFamily::PrimeField;
    let primes: Vec<u64> = primes_upto(50);
    for n in 1u64..=50 {
        let sentence = parse(&format!("{n}*1 = 0")).unwrap();
        let generic = los_verdict(&fam, &sentence, &FilterSpec::Generic, 1000, &opts()).unwrap();
        assert!(generic.is_forced_false(), "n = {n}");
        assert_eq!(generic.provenance, Provenance::Exact);
        for &p in &primes {
            let v = los_verdict(&fam, &sentence, &FilterSpec::Principal(p), 100, &opts()).unwrap();
            assert_eq!(v.is_forced_true(), n % p == 0, "n = {n}, p = {p}");
        }
    }
    println!("ACCEPTANCE 3 (characteristic zero): PASS - 50 constants x 15 principal filters");
}

/// Criterion 4: Over a constant family on a 3-element ring, every sentence verdict
/// under every filter specification equals direct truth in the single
/// structure; 200 random sentences.
#[test]
fn acceptance_4_finite_structure_collapse() {
    let fam = StructureFamily::ConstantFinite(Arc::new(RingTable::cyclic(3)));
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC4);
    let cfg = SentenceConfig::default();
    let empty = HashMap::new();
    let filters = [
        FilterSpec::Generic,
        FilterSpec::Principal(2),
        FilterSpec::Principal(97),
        FilterSpec::Constrained(vec![DefinableSet::congruence(&[1], 4).unwrap()]),
        FilterSpec::Constrained(vec![
            DefinableSet::congruence(&[1], 3).unwrap(),
            DefinableSet::congruence(&[1], 4).unwrap(),
        ]),
    ];
    for _ in 0..200 {
        let sentence = random_sentence(&mut rng, &cfg);
        let direct =
            eval_finite(&materialize(&fam, 2).unwrap(), &sentence, &empty, &opts()).unwrap();
        for filter in &filters {
            let v = los_verdict(&fam, &sentence, filter, 200, &opts()).unwrap();
            assert_eq!(
                v.is_forced_true(),
                direct,
                "`{sentence}` under {filter}"
            );
            assert_eq!(v.provenance, Provenance::Exact);
        }
    }
    println!("ACCEPTANCE 4 (finite-structure collapse): PASS - 200 sentences x 5 filters");
}

fn random_rule(rng: &mut impl Rng) -> ValueRule {
    let degree = rng.gen_range(0..=3);
    let coeffs: Vec<BigRational> = (0..=degree)
        .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-9i64..=9))))
        .collect();
    let base = ValueRule::new(coeffs, BTreeMap::new()).unwrap();
    if rng.gen_bool(0.4) {
        let denom = [2i64, 3, 6][rng.gen_range(0..3)];
        let numer = rng.gen_range(-9i64..=9);
        let q = ValueRule::from_rational(
            &BigRational::new(BigInt::from(numer), BigInt::from(denom)),
            1,
        )
        .unwrap();
        base.add(&q).unwrap()
    } else {
        base
    }
}

/// Criterion 5: 200 random rule triples satisfy the ring axioms as forced-true
/// equalities; every element forced-nonzero is invertible; perturbing at up
/// to 5 exceptional primes never changes an eq verdict.
#[test]
fn acceptance_5_definable_field_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC5);
    let fam = StructureFamily::PrimeField;
    let f = FilterSpec::Generic;
    let zero = UltraElement::from_int(fam.clone(), 0);
    let one = UltraElement::from_int(fam.clone(), 1);
    let perturb_primes = [2u64, 3, 5, 7, 11];
    for _ in 0..200 {
        let a = UltraElement::new(fam.clone(), random_rule(&mut rng));
        let b = UltraElement::new(fam.clone(), random_rule(&mut rng));
        let c = UltraElement::new(fam.clone(), random_rule(&mut rng));
        // ring axioms
        for (lhs, rhs) in [
            (a.add(&b).unwrap(), b.add(&a).unwrap()),
            (a.mul(&b).unwrap(), b.mul(&a).unwrap()),
            (
                a.add(&b).unwrap().add(&c).unwrap(),
                a.add(&b.add(&c).unwrap()).unwrap(),
            ),
            (
                a.mul(&b).unwrap().mul(&c).unwrap(),
                a.mul(&b.mul(&c).unwrap()).unwrap(),
            ),
            (
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap(),
            ),
            (a.add(&a.neg()).unwrap(), zero.clone()),
            (a.mul(&one).unwrap(), a.clone()),
        ] {
            assert!(lhs.eq(&rhs, &f).unwrap().is_forced_true());
        }
        // nonzero means invertible
        if a.eq(&zero, &f).unwrap().is_forced_false() {
            let inv = a.is_invertible(&f).unwrap();
            assert!(inv.verdict.is_forced_true());
            let w = inv.witness.expect("inverse witness");
            assert!(a.mul(&w).unwrap().eq(&one, &f).unwrap().is_forced_true());
        }
        // finite perturbation never changes eq verdicts
        let n = rng.gen_range(1..=5);
        let mut table = BTreeMap::new();
        for &p in perturb_primes.iter().take(n) {
            table.insert(p, BigInt::from(rng.gen_range(0i64..100)));
        }
        let perturbed = UltraElement::new(fam.clone(), a.rule().with_exceptions(table).unwrap());
        assert!(a.eq(&perturbed, &f).unwrap().is_forced_true());
        for other in [&b, &c, &zero, &one] {
            assert_eq!(
                a.eq(other, &f).unwrap().value,
                perturbed.eq(other, &f).unwrap().value
            );
        }
    }
    println!("ACCEPTANCE 5 (definable-field laws): PASS - 200 rule triples");
}

fn random_set(rng: &mut impl Rng) -> DefinableSet {
    let modulus = rng.gen_range(1u64..=30);
    let count = rng.gen_range(0usize..4);
    let residues: Vec<u64> = (0..count).map(|_| rng.gen_range(0..modulus)).collect();
    let pool = [2u64, 3, 5, 7, 11, 13, 17, 19];
    let inc: Vec<u64> = pool.iter().filter(|_| rng.gen_bool(0.15)).copied().collect();
    let exc: Vec<u64> = pool
        .iter()
        .filter(|p| rng.gen_bool(0.15) && !inc.contains(p))
        .copied()
        .collect();
    DefinableSet::from_parts(modulus, &residues, &inc, &exc).unwrap()
}

/// Criterion 6: 1000 random set pairs satisfy De Morgan, verdict complement-swap, the
/// upward laws, and finite-partition uniqueness under principal filters,
/// with zero extensional mismatches at primes <= 10^4.
#[test]
fn acceptance_6_filter_algebra_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC6);
    let window: Vec<u64> = primes_upto(10_000);
    let mut mismatches = 0usize;
    for round in 0..1000 {
        let a = random_set(&mut rng);
        let b = random_set(&mut rng);
        // De Morgan, symbolically
        assert_eq!(
            a.intersect(&b).complement(),
            a.complement().union(&b.complement())
        );
        assert_eq!(
            a.union(&b).complement(),
            a.complement().intersect(&b.complement())
        );
        // extensional window check
        let inter = a.intersect(&b);
        let uni = a.union(&b);
        let comp = a.complement();
        for &p in &window {
            let (ra, rb) = (a.contains(p), b.contains(p));
            if inter.contains(p) != (ra && rb)
                || uni.contains(p) != (ra || rb)
                || comp.contains(p) != !ra
            {
                mismatches += 1;
            }
        }
        // verdict laws
        let filter = match round % 3 {
            0 => FilterSpec::Generic,
            1 => FilterSpec::Principal([2u64, 7, 13, 29][round % 4]),
            _ => FilterSpec::Constrained(vec![DefinableSet::congruence(&[1], 4).unwrap()]),
        };
        let va = classify(&a, &filter).unwrap();
        let vc = classify(&a.complement(), &filter).unwrap();
        assert_eq!(va.is_forced_true(), vc.is_forced_false());
        assert_eq!(va.is_forced_false(), vc.is_forced_true());
        let vb = classify(&b, &filter).unwrap();
        if va.is_forced_true() && vb.is_forced_true() {
            assert!(classify(&a.intersect(&b), &filter).unwrap().is_forced_true());
        }
        if va.is_forced_true() {
            // a is contained in a union b
            assert!(classify(&a.union(&b), &filter).unwrap().is_forced_true());
        }
        // finite-partition uniqueness under principal filters
        if round % 10 == 0 {
            let m = rng.gen_range(2u64..10);
            let parts: Vec<DefinableSet> = (0..m)
                .map(|r| DefinableSet::congruence(&[r], m).unwrap())
                .collect();
            let p = [2u64, 13, 41, 97][round % 4];
            let vs = partition_verdicts(&parts, &FilterSpec::Principal(p)).unwrap();
            assert_eq!(vs.iter().filter(|v| v.is_forced_true()).count(), 1);
            assert!(vs.iter().all(|v| !v.is_contingent()));
        }
    }
    assert_eq!(mismatches, 0);
    println!(
        "ACCEPTANCE 6 (filter algebra suite): PASS - 1000 pairs, 0 extensional mismatches <= 10^4"
    );
}

fn random_bounded_sequence(rng: &mut impl Rng) -> BoundedPolySequence {
    let mut terms = Vec::new();
    for e in 0..=rng.gen_range(0..=3u64) {
        let c0 = rng.gen_range(-4i64..=4);
        let c1 = rng.gen_range(-2i64..=2);
        let coeff = ValueRule::new(
            vec![
                BigRational::from_integer(BigInt::from(c0)),
                BigRational::from_integer(BigInt::from(c1)),
            ],
            BTreeMap::new(),
        )
        .unwrap();
        if coeff.is_zero() {
            continue;
        }
        terms.push((coeff, ValueRule::constant(BigInt::from(e))));
    }
    BoundedPolySequence::from_terms(terms).unwrap()
}

/// Criterion 7: 100 random degree-bounded sequences: collapse-then-multiply equals
/// multiply-then-collapse as forced-true coefficient identities, pointwise
/// cross-checked at 50 primes; the geometric sum is rejected by both
/// filtrations.
#[test]
fn acceptance_7_protoproduct_collapse_commutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC7);
    let fam = StructureFamily::PrimeField;
    let f = FilterSpec::Generic;
    let cross_primes: Vec<u64> = primes_upto(400).into_iter().rev().take(50).collect();
    for _ in 0..100 {
        let a = random_bounded_sequence(&mut rng);
        let b = random_bounded_sequence(&mut rng);
        let prod = a.pointwise_mul(&b).unwrap();
        let collapsed_product = prod.degree_collapse().unwrap();
        let product_of_collapses = a
            .degree_collapse()
            .unwrap()
            .mul(&b.degree_collapse().unwrap());
        // coefficient-wise forced-true equality
        let n = collapsed_product
            .coefficient_count()
            .max(product_of_collapses.coefficient_count());
        for i in 0..n {
            let lhs = collapsed_product.coefficient(i).unwrap();
            let rhs = product_of_collapses.coefficient(i).unwrap();
            assert!(lhs.eq(&rhs, &f).unwrap().is_forced_true(), "coefficient {i}");
            assert_eq!(lhs.family(), &fam);
        }
        // pointwise cross-check at 50 primes
        for &p in &cross_primes {
            assert_eq!(
                prod.poly_at(p).unwrap(),
                collapsed_product.eval_at_prime(p).unwrap(),
                "p = {p}"
            );
        }
    }
    let geometric = BoundedPolySequence::geometric_sum();
    assert!(matches!(
        geometric.membership_check(&FiltrationDescriptor::degree()),
        Membership::Rejected { .. }
    ));
    assert!(matches!(
        geometric.membership_check(&FiltrationDescriptor::monomial_count()),
        Membership::Rejected { .. }
    ));
    println!(
        "ACCEPTANCE 7 (protoproduct collapse commutation): PASS - 100 sequences x 50 primes; geometric sum rejected by both filtrations"
    );
}

/// Criterion 8: 50 distinct random polynomial rules are totally ordered with all
/// comparisons forced; constant detection returns Some exactly for the
/// degree-0 rules.
#[test]
fn acceptance_8_ultranat_order_totality() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC8);
    let mut rules: Vec<UltraNat> = Vec::new();
    while rules.len() < 50 {
        let degree = rng.gen_range(0usize..=3);
        let mut coeffs: Vec<BigRational> = (0..=degree)
            .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-6i64..=6))))
            .collect();
        *coeffs.last_mut().unwrap() =
            BigRational::from_integer(BigInt::from(rng.gen_range(1i64..=6)));
        let nat = UltraNat::new(ValueRule::new(coeffs, BTreeMap::new()).unwrap()).unwrap();
        if rules.iter().all(|r| r.compare(&nat) != ForcedOrdering::Equal) {
            rules.push(nat);
        }
    }
    for (i, a) in rules.iter().enumerate() {
        assert_eq!(
            a.constant_detect().is_some(),
            a.rule().degree() == 0,
            "constant detection must mirror degree 0"
        );
        for (j, b) in rules.iter().enumerate() {
            let ab = a.compare(b);
            let ba = b.compare(a);
            match (i == j, ab, ba) {
                (true, ForcedOrdering::Equal, ForcedOrdering::Equal) => {}
                (false, ForcedOrdering::Less, ForcedOrdering::Greater) => {}
                (false, ForcedOrdering::Greater, ForcedOrdering::Less) => {}
                other => panic!("ordering not total/antisymmetric: {other:?}"),
            }
        }
    }
    // transitivity: sorting by compare yields a strictly increasing chain
    let mut sorted = rules.clone();
    sorted.sort_by(|a, b| match a.compare(b) {
        ForcedOrdering::Less => std::cmp::Ordering::Less,
        ForcedOrdering::Equal => std::cmp::Ordering::Equal,
        ForcedOrdering::Greater => std::cmp::Ordering::Greater,
    });
    for w in sorted.windows(2) {
        assert_eq!(w[0].compare(&w[1]), ForcedOrdering::Less);
    }
    println!("ACCEPTANCE 8 (ultra-natural order totality): PASS - 50 rules, all comparisons forced");
}

/// Criterion 9: Repeating any CLI acceptance run yields byte-identical JSON.
#[test]
fn acceptance_9_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_ultraprod");
    let invocations: Vec<Vec<&str>> = vec![
        vec!["eval", "Fp", "exists x. x*x = -1", "generic", "--json", "--bitmap", "--window", "2000"],
        vec!["eval", "Fp", "forall x. exists y. y*y=x", "generic", "--json", "--window", "300"],
        vec!["classify", "(1 mod 4) + {2} - {5}", "generic", "--json"],
        vec!["elem", "inv (6) @Zp^2 generic", "--json"],
        vec!["elem", "residue (p) mod 4", "--json"],
        vec!["proto", "collapse", "x + (p - 1) / deg<=1", "--json"],
        vec!["transfer", "Fp", "Zp^2", "exists x. x*x = -1", "--json", "--window", "300"],
        vec!["selftest", "--seed", "42", "--json", "--window", "300"],
    ];
    for args in &invocations {
        let run = || {
            let out = Command::new(bin)
                .args(args)
                .env_remove("ULTRAPROD_WINDOW")
                .output()
                .expect("binary runs");
            assert!(
                out.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            out.stdout
        };
        let first = run();
        let second = run();
        assert_eq!(first, second, "non-deterministic output for {args:?}");
        let v: serde_json::Value = serde_json::from_slice(&first).expect("valid JSON");
        assert_eq!(v["schema"], "ultraprod/1");
    }
    println!(
        "ACCEPTANCE 9 (CLI determinism): PASS - {} invocations byte-identical across runs",
        invocations.len()
    );
}
