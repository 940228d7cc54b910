//! Elements of ultraproduct rings, given by a family descriptor and a value
//! rule. Equality is agreement on a filter set, not identity of rules.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::rule::ValueRule;
use crate::arith::{carmichael_lambda, factor, units};
use crate::error::{Error, Result};
use crate::index_filters::{classify, DefinableSet, FilterSpec, Provenance, Verdict};
use crate::structures::{materialize, StructureFamily};

/// Class-analysis modulus cap for constant-size families.
const CLASS_MODULUS_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct UltraElement {
    family: StructureFamily,
    rule: ValueRule,
}

/// Result of an invertibility query: the verdict, plus a witness inverse
/// element when one is constructible in the rule fragment.
#[derive(Debug, Clone)]
pub struct Invertibility {
    pub verdict: Verdict,
    pub witness: Option<UltraElement>,
}

impl UltraElement {
    pub fn new(family: StructureFamily, rule: ValueRule) -> Self {
        UltraElement { family, rule }
    }

    pub fn from_int(family: StructureFamily, n: i64) -> Self {
        UltraElement::new(family, ValueRule::constant(n))
    }

    /// The image of a rational number, via an integer-valued representative
    /// at the family's precision.
    pub fn from_rational(family: StructureFamily, q: &BigRational) -> Result<Self> {
        let precision = family.prime_power_precision().unwrap_or(1);
        let rule = ValueRule::from_rational(q, precision)?;
        Ok(UltraElement::new(family, rule))
    }

    pub fn family(&self) -> &StructureFamily {
        &self.family
    }

    pub fn rule(&self) -> &ValueRule {
        &self.rule
    }

    /// The canonical residue this element takes in the structure at `p`.
    pub fn value_in(&self, p: u64) -> Result<u64> {
        let s = materialize(&self.family, p)?;
        Ok(s.from_bigint(&self.rule.value_at(p)))
    }

    fn check_family(&self, other: &Self) -> Result<()> {
        if self.family != other.family {
            return Err(Error::FamilyMismatch {
                left: self.family.to_string(),
                right: other.family.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_family(other)?;
        Ok(UltraElement::new(
            self.family.clone(),
            self.rule.add(&other.rule)?,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_family(other)?;
        Ok(UltraElement::new(
            self.family.clone(),
            self.rule.sub(&other.rule)?,
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_family(other)?;
        Ok(UltraElement::new(
            self.family.clone(),
            self.rule.mul(&other.rule)?,
        ))
    }

    pub fn neg(&self) -> Self {
        UltraElement::new(self.family.clone(), self.rule.neg())
    }

    /// The exact set of index primes where the two sequences agree in the
    /// structure at that index.
    pub fn agreement_set(&self, other: &Self) -> Result<DefinableSet> {
        self.check_family(other)?;
        let diff = self.rule.sub(&other.rule)?;
        match &self.family {
            StructureFamily::PrimeField | StructureFamily::TruncatedPadic(_) => {
                let k = self
                    .family
                    .prime_power_precision()
                    .expect("prime-power family");
                // cofinite iff the low-order coefficients all vanish: for
                // any integer polynomial u, u(p) = u(0) + u'(0) p + ...
                // (mod p^k) and a nonzero low part survives at large p
                let cofinite = diff.low_coeffs_vanish(k);
                let mut candidates: Vec<u64> =
                    diff.exceptions().keys().copied().collect();
                for (q, _) in factor(diff.denom()) {
                    candidates.push(q);
                }
                if !cofinite {
                    // agreement is confined to small primes: every prime of
                    // agreement divides the scaled low part or is exceptional
                    let low = scaled_low_part(&diff, k);
                    match crate::arith::factor_bigint(&low) {
                        Some(fs) => candidates.extend(fs.into_iter().map(|(q, _)| q)),
                        None => {
                            return Err(Error::Unsupported {
                                msg: "agreement set requires factoring a value out of range"
                                    .into(),
                            })
                        }
                    }
                }
                candidates.sort_unstable();
                candidates.dedup();
                let mut inc = Vec::new();
                let mut exc = Vec::new();
                for q in candidates {
                    if self.values_agree_at(other, q)? {
                        inc.push(q);
                    } else {
                        exc.push(q);
                    }
                }
                if cofinite {
                    DefinableSet::all().minus(&exc)?.plus(&inc)
                } else {
                    DefinableSet::finite(&inc)
                }
            }
            StructureFamily::ModRing(_) | StructureFamily::ConstantFinite(_) => {
                let order = materialize(&self.family, 2)?.char_order();
                class_set(&diff, order, |v| v.is_zero())
            }
        }
    }

    fn values_agree_at(&self, other: &Self, p: u64) -> Result<bool> {
        Ok(self.value_in(p)? == other.value_in(p)?)
    }

    /// Equality as ultraproduct elements under a filter specification.
    ///
    /// For the prime-field family with rules of common denominator `d` and
    /// scaled difference `u`, the agreement set is governed by `u(0)`:
    /// forced true iff `u(0) = 0` under any non-principal specification,
    /// forced false otherwise.
    pub fn eq(&self, other: &Self, filter: &FilterSpec) -> Result<Verdict> {
        self.check_family(other)?;
        if let FilterSpec::Principal(p) = filter {
            return Ok(Verdict::forced(
                self.values_agree_at(other, *p)?,
                Provenance::Exact,
            ));
        }
        let _ = filter.base_intersection()?;
        match &self.family {
            StructureFamily::PrimeField | StructureFamily::TruncatedPadic(_) => {
                let k = self
                    .family
                    .prime_power_precision()
                    .expect("prime-power family");
                let diff = self.rule.sub(&other.rule)?;
                Ok(Verdict::forced(
                    diff.low_coeffs_vanish(k),
                    Provenance::Exact,
                ))
            }
            _ => classify(&self.agreement_set(other)?, filter),
        }
    }

    /// Whether this element is zero in its ring, under `filter`.
    pub fn is_zero(&self, filter: &FilterSpec) -> Result<Verdict> {
        self.eq(&UltraElement::from_int(self.family.clone(), 0), filter)
    }

    /// Invertibility of the element in its ring, with a witness inverse rule
    /// when constructible.
    pub fn is_invertible(&self, filter: &FilterSpec) -> Result<Invertibility> {
        if let FilterSpec::Principal(p) = filter {
            let s = materialize(&self.family, *p)?;
            let v = s.from_bigint(&self.rule.value_at(*p));
            return Ok(match s.inverse(v) {
                Some(inv) => Invertibility {
                    verdict: Verdict::forced(true, Provenance::Exact),
                    witness: exception_constant(&self.family, *p, inv),
                },
                None => Invertibility {
                    verdict: Verdict::forced(false, Provenance::Exact),
                    witness: None,
                },
            });
        }
        let _ = filter.base_intersection()?;
        match &self.family {
            StructureFamily::PrimeField | StructureFamily::TruncatedPadic(_) => {
                let k = self
                    .family
                    .prime_power_precision()
                    .expect("prime-power family");
                // invertible in Z/p^k iff the value is a unit mod p, which
                // eventually holds iff the scaled constant term is nonzero
                if self.rule.scaled_constant_term().is_zero() {
                    return Ok(Invertibility {
                        verdict: Verdict::forced(false, Provenance::Exact),
                        witness: None,
                    });
                }
                let witness = invert_rule(&self.rule, k)
                    .map(|r| UltraElement::new(self.family.clone(), r));
                Ok(Invertibility {
                    verdict: Verdict::forced(true, Provenance::Exact),
                    witness,
                })
            }
            StructureFamily::ModRing(_) | StructureFamily::ConstantFinite(_) => {
                let s = materialize(&self.family, 2)?;
                let order = s.char_order();
                let set = class_set(&self.rule, order, |v| {
                    let r = v.mod_floor(&BigInt::from(order)).to_u64().unwrap_or(0);
                    s.inverse(s.from_bigint(&BigInt::from(r))).is_some()
                })?;
                let verdict = classify(&set, filter)?;
                let witness = if verdict.is_forced_true() {
                    constant_inverse_witness(&self.family, &self.rule, &s, order)
                } else {
                    None
                };
                Ok(Invertibility { verdict, witness })
            }
        }
    }
}

/// A nonzero integer every agreement prime must divide when the low part of
/// the scaled difference is nonzero: the product of the nonzero scaled
/// coefficients below `p^k` (any prime where the values agree mod `p^k`
/// divides the lowest nonzero one).
fn scaled_low_part(rule: &ValueRule, k: u32) -> BigInt {
    let u = rule.scaled_int_coeffs();
    let mut acc = BigInt::one();
    for c in u.iter().take(k as usize) {
        if !c.is_zero() {
            acc *= c;
        }
    }
    acc
}

fn exception_constant(family: &StructureFamily, p: u64, value: u64) -> Option<UltraElement> {
    let rule = ValueRule::new(
        Vec::new(),
        BTreeMap::from([(p, BigInt::from(value))]),
    )
    .ok()?;
    Some(UltraElement::new(family.clone(), rule))
}

/// Invert a rule with nonzero constant term modulo p^k, as a power-series
/// inverse made integer-valued: if the series inverse has denominator `d`,
/// multiplying by `1 - p^E` with `E` a multiple of Carmichael(d) at least `k`
/// preserves the value mod p^k and clears the integrality obstruction.
fn invert_rule(rule: &ValueRule, k: u32) -> Option<ValueRule> {
    let g: Vec<BigRational> = rule.coeffs().to_vec();
    let g0 = rule.constant_term();
    if g0.is_zero() {
        return None;
    }
    let mut h = vec![BigRational::zero(); k as usize];
    h[0] = g0.recip();
    for i in 1..k as usize {
        let mut acc = BigRational::zero();
        for (j, hj) in h.iter().enumerate().take(i) {
            if let Some(gc) = g.get(i - j) {
                acc += hj * gc;
            }
        }
        h[i] = -acc / &g0;
    }
    // integralize
    let mut denom = BigInt::one();
    for c in &h {
        denom = denom.lcm(c.denom());
    }
    let d = denom.to_u64()?;
    if d == 1 {
        return ValueRule::new(h, BTreeMap::new()).ok();
    }
    let lam = carmichael_lambda(d);
    let e = (lam * (u64::from(k)).div_ceil(lam).max(1)) as usize;
    // h * (1 - p^E)
    let mut coeffs = vec![BigRational::zero(); h.len() + e];
    for (i, c) in h.iter().enumerate() {
        coeffs[i] += c;
        coeffs[i + e] -= c;
    }
    ValueRule::new(coeffs, BTreeMap::new()).ok()
}

/// For constant-size families: the set of primes where a predicate on the
/// rule value holds. The value mod `order` is determined by `p` mod
/// `order * denom`, so the set is a union of classes plus corrections.
fn class_set(
    rule: &ValueRule,
    order: u64,
    pred: impl Fn(&BigInt) -> bool,
) -> Result<DefinableSet> {
    let d = rule.denom();
    let m = order.checked_mul(d).filter(|&m| m <= CLASS_MODULUS_CAP).ok_or_else(|| {
        Error::Unsupported {
            msg: format!("class modulus {order}*{d} exceeds the engine limit"),
        }
    })?;
    let u = rule.scaled_int_coeffs();
    let md = BigInt::from(m) * BigInt::from(d);
    let mut classes = Vec::new();
    for b in units(m) {
        // u(b)/d mod order is the eventual value mod order on this class
        let mut val = BigInt::zero();
        for c in u.iter().rev() {
            val = (val * BigInt::from(b) + c).mod_floor(&md);
        }
        let val = val / BigInt::from(d);
        let val = val.mod_floor(&BigInt::from(order));
        if pred(&val) {
            classes.push(b);
        }
    }
    let mut candidates: Vec<u64> = rule.exceptions().keys().copied().collect();
    for (q, _) in factor(m) {
        candidates.push(q);
    }
    candidates.sort_unstable();
    candidates.dedup();
    let mut inc = Vec::new();
    let mut exc = Vec::new();
    for q in candidates {
        let v = rule.value_at(q).mod_floor(&BigInt::from(order));
        if pred(&v) {
            inc.push(q);
        } else {
            exc.push(q);
        }
    }
    DefinableSet::from_parts(m, &classes, &inc, &exc)
}

fn constant_inverse_witness(
    family: &StructureFamily,
    rule: &ValueRule,
    s: &crate::structures::Structure,
    order: u64,
) -> Option<UltraElement> {
    // a single witness rule exists when the value is constant mod the order
    let c = rule.constant_value()?;
    let r = c.mod_floor(&BigInt::from(order)).to_u64()?;
    let elem = s.from_bigint(&BigInt::from(r));
    let inv = s.inverse(elem)?;
    // express the inverse as an integer multiple of 1, if it is one
    let j = (0..order).find(|&j| s.from_bigint(&BigInt::from(j)) == inv)?;
    Some(UltraElement::new(
        family.clone(),
        ValueRule::constant(BigInt::from(j)),
    ))
}

impl fmt::Display for UltraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]@{}", self.rule, self.family)
    }
}
