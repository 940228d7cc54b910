//! The definable fragments of the integer and natural-number ultrapowers.
//!
//! An `UltraInt` is an integer sequence given by a value rule; the reduction
//! maps to Z/n are evaluated one finite level at a time. An `UltraNat` is an
//! eventually non-negative rule; distinct polynomials agree at only finitely
//! many primes and have eventually constant sign, so the ordering is total
//! and every comparison verdict is forced.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::rule::ValueRule;
use crate::arith::{is_prime, primes_upto, units};
use crate::error::{Error, Result};

/// An element of the ultrapower of the integers.
#[derive(Debug, Clone, PartialEq)]
pub struct UltraInt {
    rule: ValueRule,
}

/// Verdict-valued reduction mod `n`: the residue is constant on each unit
/// congruence class of indices, tabulated per class.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueReport {
    pub modulus: u64,
    /// Unit class of the index prime -> eventual value mod `modulus`.
    pub table: BTreeMap<u64, u64>,
    /// Present when all classes agree, i.e. the residue is forced.
    pub forced: Option<u64>,
}

impl UltraInt {
    pub fn new(rule: ValueRule) -> Self {
        UltraInt { rule }
    }

    pub fn rule(&self) -> &ValueRule {
        &self.rule
    }

    /// Reduce mod `n >= 2`. For each unit class `a mod n` of index primes the
    /// rule value mod `n` is eventually constant (it is determined by the
    /// index mod `n * denom`); if the refined classes disagree within a
    /// class, the rule leaves the fragment where the reduction is defined
    /// classwise and an error names the offending class.
    pub fn residue(&self, n: u64) -> Result<ResidueReport> {
        if n < 2 {
            return Err(Error::Unsupported {
                msg: "residue modulus must be at least 2".into(),
            });
        }
        let d = self.rule.denom();
        let m = n.checked_mul(d).filter(|&m| m <= 10_000_000).ok_or_else(|| {
            Error::Unsupported {
                msg: format!("refined modulus {n}*{d} exceeds the engine limit"),
            }
        })?;
        let u = self.rule.scaled_int_coeffs();
        let big_m = BigInt::from(m);
        let big_n = BigInt::from(n);
        let big_d = BigInt::from(d);
        let mut table: BTreeMap<u64, u64> = BTreeMap::new();
        for b in units(m) {
            let mut val = BigInt::zero();
            for c in u.iter().rev() {
                val = (val * BigInt::from(b) + c).mod_floor(&big_m);
            }
            // b is a unit mod d, so the scaled value is divisible by d
            let val = (val / &big_d).mod_floor(&big_n);
            let val = val.to_u64().expect("residue fits u64");
            let class = b % n;
            match table.get(&class) {
                Some(&prev) if prev != val => {
                    return Err(Error::NotClassConstant {
                        modulus: n,
                        class,
                    })
                }
                _ => {
                    table.insert(class, val);
                }
            }
        }
        let mut values = table.values();
        let first = values.next().copied();
        let forced = if values.all(|&v| Some(v) == first) {
            first
        } else {
            None
        };
        Ok(ResidueReport {
            modulus: n,
            table,
            forced,
        })
    }
}

impl fmt::Display for UltraInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]@Z", self.rule)
    }
}

impl fmt::Display for ResidueReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.forced {
            Some(v) => write!(f, "ForcedValue({v} mod {})", self.modulus),
            None => {
                let entries: Vec<String> = self
                    .table
                    .iter()
                    .map(|(c, v)| format!("{c} mod {} -> {v}", self.modulus))
                    .collect();
                write!(f, "Contingent{{{}}}", entries.join(", "))
            }
        }
    }
}

/// Outcome of comparing two ultra-naturals; always forced for rule-backed
/// elements since polynomial differences have eventually constant sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForcedOrdering {
    Less,
    Equal,
    Greater,
}

impl fmt::Display for ForcedOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcedOrdering::Less => write!(f, "ForcedLess"),
            ForcedOrdering::Equal => write!(f, "ForcedEqual"),
            ForcedOrdering::Greater => write!(f, "ForcedGreater"),
        }
    }
}

/// An element of the ultrapower of the natural numbers: a rule with
/// eventually non-negative values. The finitely many small indices where the
/// polynomial dips negative are completed with exceptions reading 0.
#[derive(Debug, Clone, PartialEq)]
pub struct UltraNat {
    rule: ValueRule,
}

impl UltraNat {
    pub fn new(rule: ValueRule) -> Result<Self> {
        let eventually_nonneg = match rule.leading_coeff() {
            None => true,
            Some(c) if rule.degree() == 0 => !c.is_negative(),
            Some(c) => c.is_positive(),
        };
        if !eventually_nonneg {
            return Err(Error::NotEventuallyNonnegative {
                rule: rule.to_string(),
            });
        }
        if rule.exceptions().values().any(|v| v.is_negative()) {
            return Err(Error::NotEventuallyNonnegative {
                rule: rule.to_string(),
            });
        }
        // clamp the finitely many negative small-prime values to 0
        let mut clamps = BTreeMap::new();
        if rule.degree() > 0 {
            let bound = negativity_bound(&rule)?;
            for p in primes_upto(bound) {
                if rule.value_at(p).is_negative() {
                    clamps.insert(p, BigInt::zero());
                }
            }
        }
        let rule = if clamps.is_empty() {
            rule
        } else {
            rule.with_exceptions(clamps)?
        };
        Ok(UltraNat { rule })
    }

    pub fn constant(n: u64) -> Self {
        UltraNat {
            rule: ValueRule::constant(BigInt::from(n)),
        }
    }

    /// The rule `p -> p`.
    pub fn index() -> Self {
        UltraNat {
            rule: ValueRule::var_p(),
        }
    }

    pub fn rule(&self) -> &ValueRule {
        &self.rule
    }

    pub fn value_at(&self, p: u64) -> BigInt {
        debug_assert!(is_prime(p));
        self.rule.value_at(p)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(UltraNat {
            rule: self.rule.add(&other.rule)?,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(UltraNat {
            rule: self.rule.mul(&other.rule)?,
        })
    }

    /// Total order by eventual sign of the difference. Exceptions are
    /// irrelevant: finitely many indices never decide an ultrapower
    /// comparison. Equal iff the polynomial parts are identical.
    pub fn compare(&self, other: &Self) -> ForcedOrdering {
        if self.rule.coeffs() == other.rule.coeffs() {
            return ForcedOrdering::Equal;
        }
        // leading coefficient of the difference decides
        let n = self.rule.coeffs().len().max(other.rule.coeffs().len());
        for i in (0..n).rev() {
            let a = self.rule.coeffs().get(i);
            let b = other.rule.coeffs().get(i);
            let diff = match (a, b) {
                (Some(a), Some(b)) => a - b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => -b.clone(),
                (None, None) => continue,
            };
            if diff.is_positive() {
                return ForcedOrdering::Greater;
            }
            if diff.is_negative() {
                return ForcedOrdering::Less;
            }
        }
        ForcedOrdering::Equal
    }

    /// `Some(c)` iff the element is constant: a sequence bounded on a filter
    /// set is constant, and for polynomial rules bounded means degree 0.
    pub fn constant_detect(&self) -> Option<BigInt> {
        self.rule.constant_value()
    }
}

/// A bound past which a polynomial with positive leading coefficient is
/// positive (Cauchy root bound).
fn negativity_bound(rule: &ValueRule) -> Result<u64> {
    let coeffs = rule.coeffs();
    let lead = coeffs.last().expect("degree > 0").abs();
    let mut max_ratio = num_rational::BigRational::zero();
    for c in &coeffs[..coeffs.len() - 1] {
        let r = c.abs() / lead.clone();
        if r > max_ratio {
            max_ratio = r;
        }
    }
    let bound = (max_ratio + num_rational::BigRational::from_integer(BigInt::from(2)))
        .to_integer()
        .to_u64()
        .filter(|&b| b <= 1_000_000)
        .ok_or_else(|| Error::NotEventuallyNonnegative {
            rule: rule.to_string(),
        })?;
    Ok(bound)
}

impl fmt::Display for UltraNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.rule)
    }
}
