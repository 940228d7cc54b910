//! Exact truth-set recognizers.
//!
//! A classifier maps a sentence to the definable set of primes where it
//! holds, with a symbolic justification. The registry covers:
//!
//! * any sentence over a constant family (one evaluation decides all
//!   indices),
//! * variable-free formulas (each closed equation reduces to divisibility of
//!   an integer difference),
//! * linear solvability `exists x. a*x + c = a'*x + c'`,
//! * quadratic solvability `exists x. x*x = c` for closed nonzero `c`, with
//!   the congruence classes mod `4|c|` decided by exhaustive residue search
//!   at witness primes rather than by a trusted reciprocity formula,
//!
//! closed under the boolean connectives by set algebra. Everything else is
//! left to empirical sampling. Every exact set is additionally cross-checked
//! against the brute-force bitmap by `truth_set`, so a defect here cannot
//! silently corrupt verdicts.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::eval::{eval_finite, EvalOptions};
use super::{Formula, Term};
use crate::arith::{dirichlet_witness, dirichlet_witness_bound, factor_bigint, units};
use crate::index_filters::DefinableSet;
use crate::structures::{materialize, StructureFamily};

/// Largest `4|c|` the quadratic recognizer will expand into classes.
const QUADRATIC_MODULUS_CAP: u64 = 1_000_000;
/// Largest `p^k` searched exhaustively for a square root.
const EXHAUSTIVE_SEARCH_CAP: u64 = 10_000_000;

/// Try to compute the exact truth set of a sentence over a family.
pub fn classify_sentence(
    family: &StructureFamily,
    sentence: &Formula,
    opts: &EvalOptions,
) -> Option<DefinableSet> {
    if family.is_constant() {
        // the structure does not depend on the index: one evaluation decides
        let s = materialize(family, 2).ok()?;
        let truth = eval_finite(&s, sentence, &HashMap::new(), opts).ok()?;
        return Some(if truth {
            DefinableSet::all()
        } else {
            DefinableSet::empty()
        });
    }
    let k = family.prime_power_precision()?;
    classify_rec(k, sentence)
}

fn classify_rec(k: u32, f: &Formula) -> Option<DefinableSet> {
    match f {
        Formula::Not(g) => Some(classify_rec(k, g)?.complement()),
        Formula::And(a, b) => Some(classify_rec(k, a)?.intersect(&classify_rec(k, b)?)),
        Formula::Or(a, b) => Some(classify_rec(k, a)?.union(&classify_rec(k, b)?)),
        Formula::Implies(a, b) => {
            Some(classify_rec(k, a)?.complement().union(&classify_rec(k, b)?))
        }
        Formula::Eq(l, r) => {
            let l = term_int(l)?;
            let r = term_int(r)?;
            closed_equation_set(k, &(l - r))
        }
        Formula::Exists(v, body) => {
            if !body.free_vars().contains(v) {
                return classify_rec(k, body);
            }
            exists_set(k, v, body)
        }
        Formula::Forall(v, body) => {
            if !body.free_vars().contains(v) {
                return classify_rec(k, body);
            }
            None
        }
    }
}

/// Closed-term evaluation over the integers.
pub(crate) fn term_int(t: &Term) -> Option<BigInt> {
    Some(match t {
        Term::Var(_) => return None,
        Term::Zero => BigInt::zero(),
        Term::One => BigInt::from(1),
        Term::IntLit(n) => BigInt::from(*n),
        Term::Neg(a) => -term_int(a)?,
        Term::Add(a, b) => term_int(a)? + term_int(b)?,
        Term::Mul(a, b) => term_int(a)? * term_int(b)?,
    })
}

/// Decompose `t` as `a*var + c` with closed integer coefficients.
fn linear_in(t: &Term, var: &str) -> Option<(BigInt, BigInt)> {
    match t {
        Term::Var(v) if v == var => Some((BigInt::from(1), BigInt::zero())),
        Term::Var(_) => None,
        Term::Zero | Term::One | Term::IntLit(_) => Some((BigInt::zero(), term_int(t)?)),
        Term::Neg(a) => {
            let (x, c) = linear_in(a, var)?;
            Some((-x, -c))
        }
        Term::Add(a, b) => {
            let (xa, ca) = linear_in(a, var)?;
            let (xb, cb) = linear_in(b, var)?;
            Some((xa + xb, ca + cb))
        }
        Term::Mul(a, b) => {
            if let Some(s) = term_int(a) {
                let (x, c) = linear_in(b, var)?;
                Some((&s * x, s * c))
            } else if let Some(s) = term_int(b) {
                let (x, c) = linear_in(a, var)?;
                Some((&s * x, s * c))
            } else {
                None
            }
        }
    }
}

fn is_square_of(t: &Term, var: &str) -> bool {
    matches!(t, Term::Mul(a, b)
        if matches!(&**a, Term::Var(v) if v == var) && matches!(&**b, Term::Var(v) if v == var))
}

fn exists_set(k: u32, var: &str, body: &Formula) -> Option<DefinableSet> {
    let Formula::Eq(l, r) = body else {
        return None;
    };
    // quadratic: x*x = c or c = x*x, closed nonzero c
    let quadratic_c = if is_square_of(l, var) {
        term_int(r)
    } else if is_square_of(r, var) {
        term_int(l)
    } else {
        None
    };
    if let Some(c) = quadratic_c {
        if !c.is_zero() {
            return quadratic_set(k, &c);
        }
        return None;
    }
    // linear: a*x + c = a'*x + c'
    let (al, cl) = linear_in(l, var)?;
    let (ar, cr) = linear_in(r, var)?;
    linear_set(k, &(al - ar), &(cr - cl))
}

/// Truth set of the closed equation `d = 0`, i.e. primes with `p^k | d`.
fn closed_equation_set(k: u32, d: &BigInt) -> Option<DefinableSet> {
    if d.is_zero() {
        return Some(DefinableSet::all());
    }
    let factors = factor_bigint(d)?;
    let members: Vec<u64> = factors
        .into_iter()
        .filter_map(|(p, e)| if e >= k { Some(p) } else { None })
        .collect();
    DefinableSet::finite(&members).ok()
}

/// Truth set of `exists x. a*x = b` in Z/p^k: solvable iff
/// `gcd(a, p^k) | b`, which holds at every prime not dividing `a`.
fn linear_set(k: u32, a: &BigInt, b: &BigInt) -> Option<DefinableSet> {
    if a.is_zero() {
        return closed_equation_set(k, b);
    }
    let mut unsolvable = Vec::new();
    for (p, e) in factor_bigint(a)? {
        let v = e.min(k);
        let pv = BigInt::from(p).pow(v);
        if !(b % &pv).is_zero() {
            unsolvable.push(p);
        }
    }
    DefinableSet::all().minus(&unsolvable).ok()
}

/// Truth set of `exists x. x*x = c` for closed `c != 0`.
///
/// For `p` odd and coprime to `c`, solvability mod `p^k` depends only on
/// `p mod 4|c|`; each unit class is decided by exhaustive search at a witness
/// prime. The finitely many primes dividing `2c` are decided individually.
fn quadratic_set(k: u32, c: &BigInt) -> Option<DefinableSet> {
    let abs_c = c.abs().to_u64().filter(|&v| v <= QUADRATIC_MODULUS_CAP / 4)?;
    let m = 4 * abs_c;
    let bound = dirichlet_witness_bound();
    let mut classes = Vec::new();
    for a in units(m) {
        let witness = dirichlet_witness(a, m, bound)?;
        if square_exists_mod_prime_power(c, witness, k)? {
            classes.push(a);
        }
    }
    let two_c = BigInt::from(2) * c;
    let mut include = Vec::new();
    for (p, _) in factor_bigint(&two_c)? {
        if square_exists_mod_prime_power(c, p, k)? {
            include.push(p);
        }
    }
    DefinableSet::from_parts(m, &classes, &include, &[]).ok()
}

/// Exhaustive check of `exists x. x^2 = c (mod p^k)`.
fn square_exists_mod_prime_power(c: &BigInt, p: u64, k: u32) -> Option<bool> {
    let q = (p as u128).checked_pow(k)?;
    if q > EXHAUSTIVE_SEARCH_CAP as u128 {
        return None;
    }
    let q = q as u64;
    let target = num_integer::Integer::mod_floor(c, &BigInt::from(q)).to_u64()?;
    Some((0..q).any(|x| (x as u128 * x as u128 % q as u128) as u64 == target))
}
