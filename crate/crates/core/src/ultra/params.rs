//! Formulas with free variables valued in ultraproduct elements.

use std::collections::{BTreeMap, HashMap};

use num_traits::{ToPrimitive, Zero};

use super::element::UltraElement;
use super::integers::UltraInt;
use super::rule::ValueRule;
use crate::arith::primes_upto;
use crate::error::{Error, Result};
use crate::fol::{eval_finite, los_verdict, EvalOptions, Formula, SampledTruthSet, Term};
use crate::index_filters::{FilterSpec, Provenance, Verdict};
use crate::structures::{materialize, StructureFamily};

/// Evaluate a formula whose free variables are bound to ultraproduct
/// elements.
///
/// Under a principal filter the truth at the point is computed directly.
/// Otherwise, when every parameter is equivalent to an integer constant in
/// the family, the constants are substituted and the sentence goes through
/// the exact classifier pipeline; failing that, truth is sampled per index
/// and the verdict is empirical.
pub fn eval_with_params(
    family: &StructureFamily,
    formula: &Formula,
    env: &BTreeMap<String, UltraElement>,
    filter: &FilterSpec,
    window: u64,
    opts: &EvalOptions,
) -> Result<Verdict> {
    for (name, elem) in env {
        if elem.family() != family {
            return Err(Error::FamilyMismatch {
                left: family.to_string(),
                right: format!("{} (parameter {name})", elem.family()),
            });
        }
    }
    let free = formula.free_vars();
    for var in &free {
        if !env.contains_key(var) {
            return Err(Error::UnboundVariable { var: var.clone() });
        }
    }

    if let FilterSpec::Principal(p) = filter {
        let s = materialize(family, *p)?;
        let mut point_env = HashMap::new();
        for (name, elem) in env {
            point_env.insert(name.clone(), elem.value_in(*p)?);
        }
        let truth = eval_finite(&s, formula, &point_env, opts)?;
        return Ok(Verdict::forced(truth, Provenance::Exact));
    }
    let _ = filter.base_intersection()?;

    // try exact substitution by integer constants
    let mut substituted = formula.clone();
    let mut all_constant = true;
    for var in &free {
        match constant_equivalent(family, env[var].rule()) {
            Some(c) => substituted = substituted.substitute(var, &Term::int(c)),
            None => {
                all_constant = false;
                break;
            }
        }
    }
    if all_constant {
        return los_verdict(family, &substituted, filter, window, opts);
    }

    // per-index sampling
    let mut samples = Vec::new();
    for p in primes_upto(window) {
        let s = materialize(family, p)?;
        let mut point_env = HashMap::new();
        for (name, elem) in env {
            point_env.insert(name.clone(), elem.value_in(p)?);
        }
        samples.push((p, eval_finite(&s, formula, &point_env, opts)?));
    }
    let ts = SampledTruthSet {
        window,
        samples,
        exact: None,
    };
    crate::fol::eval::empirical_verdict(&ts, filter, opts)
}

/// An integer `c` such that the rule denotes the same element as the
/// constant `c` in the given family, if one exists.
fn constant_equivalent(family: &StructureFamily, rule: &ValueRule) -> Option<i64> {
    match family {
        StructureFamily::PrimeField | StructureFamily::TruncatedPadic(_) => {
            let k = family.prime_power_precision().expect("prime-power family");
            // equal to the constant c mod p^k iff the constant term is the
            // integer c and the coefficients of p^1 .. p^(k-1) vanish
            let c = rule.constant_term();
            if !c.is_integer() {
                return None;
            }
            if !rule
                .coeffs()
                .iter()
                .take(k as usize)
                .skip(1)
                .all(Zero::is_zero)
            {
                return None;
            }
            c.to_integer().to_i64()
        }
        StructureFamily::ModRing(_) | StructureFamily::ConstantFinite(_) => {
            let order = materialize(family, 2).ok()?.char_order();
            let report = UltraInt::new(rule.clone()).residue(order.max(2)).ok()?;
            report.forced.and_then(|r| i64::try_from(r).ok())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::parse;
    use crate::index_filters::{DefinableSet, VerdictValue};

    fn env(pairs: &[(&str, UltraElement)]) -> BTreeMap<String, UltraElement> {
        pairs
            .iter()
            .map(|(n, e)| (n.to_string(), e.clone()))
            .collect()
    }

    #[test]
    fn closed_square_with_params() {
        let fam = StructureFamily::PrimeField;
        let v = eval_with_params(
            &fam,
            &parse("x*x = y").unwrap(),
            &env(&[
                ("x", UltraElement::from_int(fam.clone(), 2)),
                ("y", UltraElement::from_int(fam.clone(), 4)),
            ]),
            &FilterSpec::Generic,
            200,
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(v.is_forced_true());
        assert_eq!(v.provenance, Provenance::Exact);
    }

    #[test]
    fn quadratic_with_minus_one_parameter() {
        let fam = StructureFamily::PrimeField;
        let v = eval_with_params(
            &fam,
            &parse("exists z. z*z = x").unwrap(),
            &env(&[("x", UltraElement::from_int(fam.clone(), -1))]),
            &FilterSpec::Generic,
            500,
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(v.value, VerdictValue::Contingent);
        assert_eq!(v.provenance, Provenance::Exact);
        assert_eq!(
            v.decomposition.unwrap(),
            DefinableSet::congruence(&[1], 4).unwrap().plus(&[2]).unwrap()
        );
    }

    #[test]
    fn p_is_zero_in_prime_fields() {
        let fam = StructureFamily::PrimeField;
        let v = eval_with_params(
            &fam,
            &parse("x = 0").unwrap(),
            &env(&[(
                "x",
                UltraElement::new(fam.clone(), ValueRule::var_p()),
            )]),
            &FilterSpec::Generic,
            200,
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(v.is_forced_true());
        assert_eq!(v.provenance, Provenance::Exact);
    }

    #[test]
    fn nonconstant_padic_parameter_is_empirical() {
        // [p] in Z/p^2 is not constant-equivalent; sampling reports evidence
        let fam = StructureFamily::TruncatedPadic(2);
        let v = eval_with_params(
            &fam,
            &parse("x = 0").unwrap(),
            &env(&[(
                "x",
                UltraElement::new(fam.clone(), ValueRule::var_p()),
            )]),
            &FilterSpec::Generic,
            100,
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(v.is_forced_false());
        assert_eq!(v.provenance, Provenance::Empirical { window: 100 });
    }

    #[test]
    fn constrained_base_decides_parametrized_quadratic() {
        let fam = StructureFamily::PrimeField;
        let base = FilterSpec::Constrained(vec![
            DefinableSet::congruence(&[1], 4).unwrap(),
        ]);
        let v = eval_with_params(
            &fam,
            &parse("exists z. z*z = x").unwrap(),
            &env(&[("x", UltraElement::from_int(fam.clone(), -1))]),
            &base,
            500,
            &EvalOptions::default(),
        )
        .unwrap();
        assert!(v.is_forced_true());
    }

    #[test]
    fn missing_parameter_is_an_error() {
        let fam = StructureFamily::PrimeField;
        assert!(matches!(
            eval_with_params(
                &fam,
                &parse("x = 0").unwrap(),
                &BTreeMap::new(),
                &FilterSpec::Generic,
                100,
                &EvalOptions::default(),
            ),
            Err(Error::UnboundVariable { .. })
        ));
    }
}
