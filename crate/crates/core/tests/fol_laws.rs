//! Law suite for the formula pipeline: the principal-filter oracle, boolean
//! coherence of verdicts, classifier soundness, and window stability.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ultraprod::fol::{
    eval_finite, los_verdict, parse, truth_set, EvalOptions, Formula,
};
use ultraprod::gen::{random_sentence, SentenceConfig};
use ultraprod::index_filters::{FilterSpec, Provenance, VerdictValue};
use ultraprod::structures::{materialize, StructureFamily};

fn opts() -> EvalOptions {
    EvalOptions::default()
}

/// Principal verdicts must equal direct brute-force truth at the point, for
/// every sentence: the fundamental transfer at principal filters.
#[test]
fn principal_oracle_random_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = SentenceConfig::default();
    let fam = StructureFamily::PrimeField;
    let empty = HashMap::new();
    for _ in 0..120 {
        let sentence = random_sentence(&mut rng, &cfg);
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            let direct = eval_finite(
                &materialize(&fam, p).unwrap(),
                &sentence,
                &empty,
                &opts(),
            )
            .unwrap();
            let verdict =
                los_verdict(&fam, &sentence, &FilterSpec::Principal(p), 100, &opts()).unwrap();
            assert_eq!(
                verdict.is_forced_true(),
                direct,
                "sentence {sentence} at p = {p}"
            );
        }
    }
}

/// Negating the sentence negates the verdict at the forced level, and
/// contingent decompositions are complementary.
#[test]
fn boolean_coherence_of_verdicts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let cfg = SentenceConfig::default();
    let fam = StructureFamily::PrimeField;
    for _ in 0..40 {
        let sentence = random_sentence(&mut rng, &cfg);
        let negated = Formula::not(sentence.clone());
        let v = los_verdict(&fam, &sentence, &FilterSpec::Generic, 150, &opts()).unwrap();
        let vn = los_verdict(&fam, &negated, &FilterSpec::Generic, 150, &opts()).unwrap();
        assert_eq!(v.is_forced_true(), vn.is_forced_false(), "{sentence}");
        assert_eq!(v.is_forced_false(), vn.is_forced_true(), "{sentence}");
        assert_eq!(v.is_contingent(), vn.is_contingent(), "{sentence}");
        if v.provenance == Provenance::Exact && vn.provenance == Provenance::Exact {
            if let (Some(d), Some(dn)) = (&v.decomposition, &vn.decomposition) {
                assert!(d.intersect(dn).is_empty(), "{sentence}");
                assert!(d.union(dn).is_all(), "{sentence}");
            }
        }
    }
}

/// Whenever the classifier attaches an exact set it matches brute force on
/// the whole window (`truth_set` hard-fails internally otherwise; this test
/// additionally pins a spread of classifier-covered shapes).
#[test]
fn classifier_soundness_on_window() {
    let fam = StructureFamily::PrimeField;
    let texts = [
        "exists x. x*x = -1",
        "exists x. x*x = 2",
        "exists x. x*x = -3",
        "exists x. x*x = 6",
        "exists x. 2*x = 1",
        "exists x. 6*x = 3",
        "12*1 = 0",
        "1+1+1 = 0",
        "!(exists x. x*x = 5)",
        "(exists x. x*x = -1) & (exists x. x*x = 2)",
        "(exists x. x*x = -1) | (exists x. x*x = 2)",
        "(exists x. x*x = -1) -> (exists x. x*x = -4)",
    ];
    for text in texts {
        let ts = truth_set(&fam, &parse(text).unwrap(), 2000, &opts()).unwrap();
        let exact = ts.exact.expect(text);
        for (p, truth) in ts.samples {
            assert_eq!(exact.contains(p), truth, "{text} at p = {p}");
        }
    }
}

/// Enlarging the window never changes an exact verdict and never flips a
/// stabilized empirical verdict's pattern on the old window.
#[test]
fn monotone_window_stability() {
    let fam = StructureFamily::PrimeField;
    // exact: identical at every window
    let quad = parse("exists x. x*x = -1").unwrap();
    let v1 = los_verdict(&fam, &quad, &FilterSpec::Generic, 300, &opts()).unwrap();
    let v2 = los_verdict(&fam, &quad, &FilterSpec::Generic, 3000, &opts()).unwrap();
    assert_eq!(v1, v2);

    // empirical: the square-surjectivity sentence stabilizes to forced false
    let surj = parse("forall x. exists y. y*y = x").unwrap();
    let e1 = los_verdict(&fam, &surj, &FilterSpec::Generic, 200, &opts()).unwrap();
    let e2 = los_verdict(&fam, &surj, &FilterSpec::Generic, 800, &opts()).unwrap();
    assert_eq!(e1.value, VerdictValue::ForcedFalse);
    assert_eq!(e2.value, VerdictValue::ForcedFalse);
    assert_eq!(e1.provenance, Provenance::Empirical { window: 200 });
    assert_eq!(e2.provenance, Provenance::Empirical { window: 800 });
}

/// The evaluation cap aborts rather than truncating, and the error carries
/// the offending size.
#[test]
fn cap_errors_are_loud() {
    let fam = StructureFamily::PrimeField;
    let small = EvalOptions {
        quantifier_cap: 50,
        ..EvalOptions::default()
    };
    let err = los_verdict(
        &fam,
        &parse("exists x. x = 0").unwrap(),
        &FilterSpec::Principal(97),
        100,
        &small,
    )
    .unwrap_err();
    assert!(matches!(err, ultraprod::Error::CapExceeded { size: 97, cap: 50 }));
}

/// Verdicts under constrained filters refine generic ones: a generic forced
/// verdict stays forced under any consistent base.
#[test]
fn constrained_refines_generic() {
    let fam = StructureFamily::PrimeField;
    let base = FilterSpec::Constrained(vec![
        ultraprod::index_filters::DefinableSet::congruence(&[1], 12).unwrap(),
    ]);
    for text in ["exists x. 2*x = 1", "6*1 = 0", "exists x. x*x = -1"] {
        let sentence = parse(text).unwrap();
        let generic = los_verdict(&fam, &sentence, &FilterSpec::Generic, 500, &opts()).unwrap();
        let constrained = los_verdict(&fam, &sentence, &base, 500, &opts()).unwrap();
        if generic.is_forced_true() {
            assert!(constrained.is_forced_true(), "{text}");
        }
        if generic.is_forced_false() {
            assert!(constrained.is_forced_false(), "{text}");
        }
    }
    // and the base actually decides the quadratic example
    let v = los_verdict(
        &fam,
        &parse("exists x. x*x = -1").unwrap(),
        &base,
        500,
        &opts(),
    )
    .unwrap();
    assert!(v.is_forced_true());
}
