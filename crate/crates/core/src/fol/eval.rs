//! Brute-force Tarskian evaluation, per-prime truth sets, and verdicts under
//! ultrafilter specifications.
//!
//! Evaluation is exhaustive with a hard per-quantifier cap and no randomized
//! or symmetry-reduced search, so results are reproducible bit for bit.

use std::collections::HashMap;

use super::classify::classify_sentence;
use super::{Formula, Term};
use crate::arith::primes_upto;
use crate::error::{Error, Result};
use crate::index_filters::{classify, DefinableSet, FilterSpec, Provenance, Verdict};
use crate::structures::{materialize, Structure, StructureFamily};

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Maximum number of element tuples a single quantifier may explore.
    pub quantifier_cap: u64,
    /// Modulus used to read an eventual congruence pattern out of a sampled
    /// bitmap when no exact classifier fires.
    pub empirical_modulus: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            quantifier_cap: 100_000,
            empirical_modulus: 24,
        }
    }
}

/// Evaluate a term under an assignment of structure elements.
pub fn eval_term(s: &Structure, t: &Term, env: &HashMap<String, u64>) -> Result<u64> {
    Ok(match t {
        Term::Var(v) => *env.get(v).ok_or_else(|| Error::UnboundVariable {
            var: v.clone(),
        })?,
        Term::Zero => s.zero(),
        Term::One => s.one(),
        Term::IntLit(n) => s.from_int(*n),
        Term::Neg(a) => s.neg(eval_term(s, a, env)?),
        Term::Add(a, b) => s.add(eval_term(s, a, env)?, eval_term(s, b, env)?),
        Term::Mul(a, b) => s.mul(eval_term(s, a, env)?, eval_term(s, b, env)?),
    })
}

/// Standard truth by exhaustive quantifier enumeration.
pub fn eval_finite(
    s: &Structure,
    formula: &Formula,
    env: &HashMap<String, u64>,
    opts: &EvalOptions,
) -> Result<bool> {
    let mut env = env.clone();
    eval_rec(s, formula, &mut env, opts)
}

fn eval_rec(
    s: &Structure,
    formula: &Formula,
    env: &mut HashMap<String, u64>,
    opts: &EvalOptions,
) -> Result<bool> {
    match formula {
        Formula::Eq(a, b) => Ok(eval_term(s, a, env)? == eval_term(s, b, env)?),
        Formula::Not(f) => Ok(!eval_rec(s, f, env, opts)?),
        Formula::And(a, b) => Ok(eval_rec(s, a, env, opts)? && eval_rec(s, b, env, opts)?),
        Formula::Or(a, b) => Ok(eval_rec(s, a, env, opts)? || eval_rec(s, b, env, opts)?),
        Formula::Implies(a, b) => Ok(!eval_rec(s, a, env, opts)? || eval_rec(s, b, env, opts)?),
        Formula::Exists(v, body) => {
            check_cap(s, opts)?;
            // a free variable elsewhere may share the name; restore it
            let saved = env.get(v).copied();
            let mut found = false;
            for x in 0..s.size() {
                env.insert(v.clone(), x);
                if eval_rec(s, body, env, opts)? {
                    found = true;
                    break;
                }
            }
            restore(env, v, saved);
            Ok(found)
        }
        Formula::Forall(v, body) => {
            check_cap(s, opts)?;
            let saved = env.get(v).copied();
            let mut holds = true;
            for x in 0..s.size() {
                env.insert(v.clone(), x);
                if !eval_rec(s, body, env, opts)? {
                    holds = false;
                    break;
                }
            }
            restore(env, v, saved);
            Ok(holds)
        }
    }
}

fn restore(env: &mut HashMap<String, u64>, v: &str, saved: Option<u64>) {
    match saved {
        Some(old) => env.insert(v.to_string(), old),
        None => env.remove(v),
    };
}

fn check_cap(s: &Structure, opts: &EvalOptions) -> Result<()> {
    if s.size() > opts.quantifier_cap {
        Err(Error::CapExceeded {
            size: s.size(),
            cap: opts.quantifier_cap,
        })
    } else {
        Ok(())
    }
}

/// Per-prime truth of a sentence on a window, with the exact definable truth
/// set attached when a registered classifier recognizes the sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTruthSet {
    pub window: u64,
    /// `(p, truth in the structure at p)` for every prime `p <= window`.
    pub samples: Vec<(u64, bool)>,
    pub exact: Option<DefinableSet>,
}

impl SampledTruthSet {
    pub fn truth_at(&self, p: u64) -> Option<bool> {
        self.samples
            .iter()
            .find(|(q, _)| *q == p)
            .map(|(_, b)| *b)
    }
}

/// Compute the truth set `{p : sentence holds at p}` sampled on a window.
///
/// When an exact classifier fires, the bitmap is cross-checked against the
/// exact set at every window prime; a mismatch is an engine bug and panics.
pub fn truth_set(
    family: &StructureFamily,
    sentence: &Formula,
    window: u64,
    opts: &EvalOptions,
) -> Result<SampledTruthSet> {
    if let Some(var) = sentence.free_vars().into_iter().next() {
        return Err(Error::UnboundVariable { var });
    }
    let empty = HashMap::new();
    let mut samples = Vec::new();
    for p in primes_upto(window) {
        let s = materialize(family, p)?;
        samples.push((p, eval_finite(&s, sentence, &empty, opts)?));
    }
    let exact = classify_sentence(family, sentence, opts);
    if let Some(set) = &exact {
        for &(p, truth) in &samples {
            assert_eq!(
                set.contains(p),
                truth,
                "classifier soundness failure for `{sentence}` over {family} at p = {p}: \
                 exact set {set} disagrees with brute force"
            );
        }
    }
    Ok(SampledTruthSet {
        window,
        samples,
        exact,
    })
}

/// Verdict for a sentence over a family under a filter specification.
///
/// Principal filters reduce to direct truth at the point, which is exactly
/// decidable. Otherwise an exact classifier yields an exact verdict via
/// `classify`, and failing that the sampled bitmap is read for an eventual
/// congruence pattern and reported as evidence, never as proof.
pub fn los_verdict(
    family: &StructureFamily,
    sentence: &Formula,
    filter: &FilterSpec,
    window: u64,
    opts: &EvalOptions,
) -> Result<Verdict> {
    if let Some(var) = sentence.free_vars().into_iter().next() {
        return Err(Error::UnboundVariable { var });
    }
    if let FilterSpec::Principal(p) = filter {
        let s = materialize(family, *p)?;
        let truth = eval_finite(&s, sentence, &HashMap::new(), opts)?;
        return Ok(Verdict::forced(truth, Provenance::Exact));
    }
    // validate the base before doing any window work
    let _ = filter.base_intersection()?;
    let ts = truth_set(family, sentence, window, opts)?;
    match &ts.exact {
        Some(set) => classify(set, filter),
        None => empirical_verdict(&ts, filter, opts),
    }
}

/// Read the bitmap's eventual pattern: on the top half of the window the
/// truth values must be constant on each congruence class mod the configured
/// modulus; a class with mixed values makes the verdict contingent with the
/// observed pattern attached. Classes with no sample in the top half carry
/// no evidence, so the classification is relative to the evidenced classes:
/// with base `B` (from the filter) and evidenced universe `P`, the verdict
/// is forced true when `(B ∩ P) \ T` is finite, forced false when
/// `B ∩ P ∩ T` is finite, contingent on `T` otherwise, `T` being the union
/// of all-true classes.
pub(crate) fn empirical_verdict(
    ts: &SampledTruthSet,
    filter: &FilterSpec,
    opts: &EvalOptions,
) -> Result<Verdict> {
    let m = opts.empirical_modulus.max(1);
    let half = ts.window / 2;
    let mut class_truth: HashMap<u64, (bool, bool)> = HashMap::new(); // class -> (seen true, seen false)
    for &(p, truth) in ts.samples.iter().filter(|(p, _)| *p > half) {
        let e = class_truth.entry(p % m).or_insert((false, false));
        if truth {
            e.0 = true;
        } else {
            e.1 = true;
        }
    }
    let provenance = Provenance::Empirical { window: ts.window };
    let mixed = class_truth.values().any(|&(t, f)| t && f);
    let mut true_classes: Vec<u64> = Vec::new();
    let mut present_classes: Vec<u64> = Vec::new();
    for (&c, &(t, f)) in &class_truth {
        present_classes.push(c);
        if t && !f {
            true_classes.push(c);
        }
    }
    true_classes.sort_unstable();
    present_classes.sort_unstable();
    let observed =
        DefinableSet::congruence(&true_classes, m).expect("empirical modulus is positive");
    if mixed {
        return Ok(Verdict::contingent(observed, provenance));
    }
    let evidenced =
        DefinableSet::congruence(&present_classes, m).expect("empirical modulus is positive");
    let base = filter.base_intersection()?.intersect(&evidenced);
    if !base.is_finite() {
        if base.difference(&observed).is_finite() {
            return Ok(Verdict::forced(true, provenance));
        }
        if base.intersect(&observed).is_finite() {
            return Ok(Verdict::forced(false, provenance));
        }
    }
    Ok(Verdict::contingent(observed, provenance))
}

/// Side-by-side comparison of one sentence over two families.
#[derive(Debug, Clone)]
pub struct TransferReport {
    pub window: u64,
    pub truth_a: SampledTruthSet,
    pub truth_b: SampledTruthSet,
    pub verdict_a: Verdict,
    pub verdict_b: Verdict,
    /// Window primes where the two families disagree.
    pub exceptions: Vec<u64>,
    /// Exact conclusion, available when both truth sets are exact: the
    /// families agree on the sentence up to finitely many primes.
    pub asymptotically_equivalent: Option<bool>,
    /// Evidence-level agreement: no disagreements on the top half.
    pub agree_on_top_half: bool,
}

/// Compare two families on one sentence: paired truth sets, paired generic
/// verdicts, exceptional primes, and the asymptotic-equivalence conclusion
/// when both sides admit exact classification.
pub fn transfer_report(
    family_a: &StructureFamily,
    family_b: &StructureFamily,
    sentence: &Formula,
    window: u64,
    opts: &EvalOptions,
) -> Result<TransferReport> {
    let truth_a = truth_set(family_a, sentence, window, opts)?;
    let truth_b = truth_set(family_b, sentence, window, opts)?;
    let verdict_a = verdict_from_truth_set(&truth_a, opts)?;
    let verdict_b = verdict_from_truth_set(&truth_b, opts)?;
    let exceptions: Vec<u64> = truth_a
        .samples
        .iter()
        .zip(&truth_b.samples)
        .filter_map(|(&(p, a), &(q, b))| {
            debug_assert_eq!(p, q);
            if a != b {
                Some(p)
            } else {
                None
            }
        })
        .collect();
    let asymptotically_equivalent = match (&truth_a.exact, &truth_b.exact) {
        (Some(a), Some(b)) => {
            let sym_diff = a.difference(b).union(&b.difference(a));
            Some(sym_diff.is_finite())
        }
        _ => None,
    };
    let half = window / 2;
    let agree_on_top_half = exceptions.iter().all(|&p| p <= half);
    Ok(TransferReport {
        window,
        truth_a,
        truth_b,
        verdict_a,
        verdict_b,
        exceptions,
        asymptotically_equivalent,
        agree_on_top_half,
    })
}

fn verdict_from_truth_set(ts: &SampledTruthSet, opts: &EvalOptions) -> Result<Verdict> {
    match &ts.exact {
        Some(set) => classify(set, &FilterSpec::Generic),
        None => empirical_verdict(ts, &FilterSpec::Generic, opts),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse;
    use crate::index_filters::VerdictValue;

    fn fp() -> StructureFamily {
        StructureFamily::PrimeField
    }

    fn eval_at(family: &StructureFamily, p: u64, text: &str) -> bool {
        let s = materialize(family, p).unwrap();
        eval_finite(
            &s,
            &parse(text).unwrap(),
            &HashMap::new(),
            &EvalOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn minus_one_square_small_fields() {
        // 2*2 = 4 = -1 in F_5; exhaustive search in F_7 fails
        assert!(eval_at(&fp(), 5, "exists x. x*x = -1"));
        assert!(!eval_at(&fp(), 7, "exists x. x*x = -1"));
        assert!(eval_at(&fp(), 2, "1 + 1 = 0"));
    }

    #[test]
    fn cap_is_an_error_not_truncation() {
        let opts = EvalOptions {
            quantifier_cap: 10,
            ..EvalOptions::default()
        };
        let s = materialize(&fp(), 13).unwrap();
        let err = eval_finite(&s, &parse("exists x. x = 0").unwrap(), &HashMap::new(), &opts)
            .unwrap_err();
        assert_eq!(err, Error::CapExceeded { size: 13, cap: 10 });
    }

    #[test]
    fn sibling_binder_does_not_clobber_free_variable() {
        // x is free in the right conjunct and bound only in the left one
        let s = materialize(&fp(), 5).unwrap();
        let f = parse("(exists x. x = 1) & x = 0").unwrap();
        let env = HashMap::from([("x".to_string(), 0u64)]);
        assert!(eval_finite(&s, &f, &env, &EvalOptions::default()).unwrap());
        let env = HashMap::from([("x".to_string(), 2u64)]);
        assert!(!eval_finite(&s, &f, &env, &EvalOptions::default()).unwrap());
    }

    #[test]
    fn unassigned_free_variable_is_an_error() {
        let s = materialize(&fp(), 5).unwrap();
        assert!(matches!(
            eval_finite(&s, &parse("x = 0").unwrap(), &HashMap::new(), &EvalOptions::default()),
            Err(Error::UnboundVariable { .. })
        ));
    }

    #[test]
    fn truth_set_minus_one_square() {
        let ts = truth_set(
            &fp(),
            &parse("exists x. x*x = -1").unwrap(),
            200,
            &EvalOptions::default(),
        )
        .unwrap();
        let exact = ts.exact.expect("quadratic classifier fires");
        let expected = DefinableSet::congruence(&[1], 4)
            .unwrap()
            .plus(&[2])
            .unwrap();
        assert_eq!(exact, expected);
    }

    #[test]
    fn truth_set_characteristic_three() {
        let ts = truth_set(
            &fp(),
            &parse("1+1+1 = 0").unwrap(),
            100,
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(ts.exact, Some(DefinableSet::finite(&[3]).unwrap()));
    }

    #[test]
    fn truth_set_every_square_only_at_two() {
        let ts = truth_set(
            &fp(),
            &parse("forall x. exists y. y*y = x").unwrap(),
            100,
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(ts.exact.is_none());
        for (p, truth) in ts.samples {
            assert_eq!(truth, p == 2, "p = {p}");
        }
    }

    #[test]
    fn los_verdict_spec_examples() {
        let opts = EvalOptions::default();
        // contingent on (1 mod 4), exact
        let v = los_verdict(
            &fp(),
            &parse("exists x. x*x = -1").unwrap(),
            &FilterSpec::Generic,
            1000,
            &opts,
        )
        .unwrap();
        assert_eq!(v.value, VerdictValue::Contingent);
        assert_eq!(v.provenance, Provenance::Exact);
        assert_eq!(
            v.decomposition.unwrap(),
            DefinableSet::congruence(&[1], 4).unwrap().plus(&[2]).unwrap()
        );

        // characteristic zero: 6 = 0 is forced false generically
        let v = los_verdict(
            &fp(),
            &parse("6*1 = 0").unwrap(),
            &FilterSpec::Generic,
            1000,
            &opts,
        )
        .unwrap();
        assert_eq!(v.value, VerdictValue::ForcedFalse);
        assert_eq!(v.provenance, Provenance::Exact);

        // 2 becomes invertible generically
        let v = los_verdict(
            &fp(),
            &parse("exists x. 2*x = 1").unwrap(),
            &FilterSpec::Generic,
            1000,
            &opts,
        )
        .unwrap();
        assert_eq!(v.value, VerdictValue::ForcedTrue);
        assert_eq!(v.provenance, Provenance::Exact);
    }

    #[test]
    fn constant_family_collapses_to_single_truth() {
        let fam = StructureFamily::parse("const:Z/3").unwrap();
        let opts = EvalOptions::default();
        for (text, expected) in [
            ("1+1+1 = 0", true),
            ("1+1 = 0", false),
            ("exists x. x*x = -1", true), // -1 = 2 has no square root mod 3... check below
        ] {
            let s = materialize(&fam, 5).unwrap();
            let direct = eval_finite(&s, &parse(text).unwrap(), &HashMap::new(), &opts).unwrap();
            if text == "exists x. x*x = -1" {
                // squares mod 3 are {0, 1}; -1 = 2 is not among them
                assert!(!direct);
            } else {
                assert_eq!(direct, expected);
            }
            for filter in [
                FilterSpec::Generic,
                FilterSpec::Principal(2),
                FilterSpec::Principal(13),
            ] {
                let v = los_verdict(&fam, &parse(text).unwrap(), &filter, 300, &opts).unwrap();
                assert_eq!(v.is_forced_true(), direct, "{text} under {filter}");
            }
        }
    }

    #[test]
    fn empirical_verdict_forced_false() {
        // no exact classifier; bitmap is false on every odd prime
        let v = los_verdict(
            &fp(),
            &parse("forall x. exists y. y*y = x").unwrap(),
            &FilterSpec::Generic,
            200,
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(v.value, VerdictValue::ForcedFalse);
        assert_eq!(v.provenance, Provenance::Empirical { window: 200 });
    }

    #[test]
    fn principal_verdict_matches_direct_truth() {
        let sentence = parse("exists x. x*x = -1").unwrap();
        for p in [2u64, 3, 5, 7, 13, 17] {
            let v = los_verdict(
                &fp(),
                &sentence,
                &FilterSpec::Principal(p),
                100,
                &EvalOptions::default(),
            )
            .unwrap();
            assert_eq!(v.is_forced_true(), eval_at(&fp(), p, "exists x. x*x = -1"));
        }
    }

    #[test]
    fn transfer_hensel_lifting() {
        // squares of -1 transfer from F_p to Z/p^2 away from p = 2
        let report = transfer_report(
            &fp(),
            &StructureFamily::TruncatedPadic(2),
            &parse("exists x. x*x = -1").unwrap(),
            100,
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.asymptotically_equivalent, Some(true));
        assert_eq!(report.exceptions, vec![2]);
    }

    #[test]
    fn transfer_same_family_trivially_equivalent() {
        for text in ["exists x. x*x = -1", "1+1 = 0", "forall x. x = x"] {
            let report = transfer_report(
                &fp(),
                &fp(),
                &parse(text).unwrap(),
                60,
                &EvalOptions::default(),
            )
            .unwrap();
            assert!(report.exceptions.is_empty());
            if report.asymptotically_equivalent.is_some() {
                assert_eq!(report.asymptotically_equivalent, Some(true));
            }
        }
    }

    #[test]
    fn transfer_without_classifiers_reports_evidence_only() {
        let report = transfer_report(
            &fp(),
            &StructureFamily::TruncatedPadic(2),
            &parse("forall x. exists y. y*y = x").unwrap(),
            60,
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.asymptotically_equivalent, None);
        // false at every odd prime in both families; 2 is the only candidate
        assert!(report.agree_on_top_half);
    }

    #[test]
    fn transfer_characteristic_detects_difference() {
        let report = transfer_report(
            &fp(),
            &StructureFamily::parse("const:Z/3").unwrap(),
            &parse("1+1+1 = 0").unwrap(),
            100,
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(report.asymptotically_equivalent, Some(false));
        assert!(report.exceptions.len() > 10);
    }
}
