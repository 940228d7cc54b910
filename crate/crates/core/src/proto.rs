//! Protoproducts of filtered polynomial rings over the prime-field family.
//!
//! The plain ultraproduct of the rings `F_p[x]` contains exotic elements such
//! as the class of `(sum_{i<=p} x^i)_p`, whose degree and monomial count both
//! grow without bound. Restricting to sequences bounded in a filtration fixes
//! this: the degree filtration collapses to a genuine polynomial ring over
//! the ultraproduct field, and the monomial-count filtration yields sums of
//! monomials `x^[e]` graded by ultra-naturals rather than naturals.
//!
//! Boundedness is decided from declared rules, never inferred from samples: a
//! [`BoundedPolySequence`] carries explicit degree and monomial-count rules,
//! and membership in a filtration step is exactly constancy of the governing
//! rule. Products land in step `alpha(k)`: `2k` for the degree filtration,
//! `k^2` for the monomial count.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::structures::StructureFamily;
use crate::ultra::{ForcedOrdering, UltraElement, UltraNat, ValueRule};

/// The two filtrations supported on polynomial-ring families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiltrationKind {
    DegreeAtMost,
    MonomialCountAtMost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiltrationDescriptor {
    pub kind: FiltrationKind,
}

impl FiltrationDescriptor {
    pub fn degree() -> Self {
        FiltrationDescriptor {
            kind: FiltrationKind::DegreeAtMost,
        }
    }

    pub fn monomial_count() -> Self {
        FiltrationDescriptor {
            kind: FiltrationKind::MonomialCountAtMost,
        }
    }

    /// Growth function: a product of two step-`k` members lies in step
    /// `growth(k)`.
    pub fn growth(&self, k: u64) -> u64 {
        match self.kind {
            FiltrationKind::DegreeAtMost => 2 * k,
            FiltrationKind::MonomialCountAtMost => k * k,
        }
    }
}

impl fmt::Display for FiltrationDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FiltrationKind::DegreeAtMost => write!(f, "deg"),
            FiltrationKind::MonomialCountAtMost => write!(f, "count"),
        }
    }
}

/// Outcome of a filtration membership check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Least filtration step containing the sequence.
    Accepted { step: u64 },
    /// The named rule is unbounded.
    Rejected { reason: String },
}

impl Membership {
    pub fn step(&self) -> Option<u64> {
        match self {
            Membership::Accepted { step } => Some(*step),
            Membership::Rejected { .. } => None,
        }
    }
}

/// A polynomial over the ultraproduct of the prime fields, with a filtration
/// step bound. Coefficients are stored in reduced form: each coefficient
/// rule is replaced by the rational constant it equals as an element (every
/// rule is congruent to its constant term mod p), so structural equality is
/// element equality.
#[derive(Debug, Clone)]
pub struct UltraPolynomial {
    coeffs: Vec<BigRational>,
    bound: u64,
}

impl UltraPolynomial {
    /// Build from coefficient elements over the prime-field family,
    /// `coeffs[i]` the coefficient of `x^i`.
    pub fn new(coeffs: Vec<UltraElement>, bound: u64) -> Result<Self> {
        let mut scalars = Vec::with_capacity(coeffs.len());
        for c in &coeffs {
            if c.family() != &StructureFamily::PrimeField {
                return Err(Error::FamilyMismatch {
                    left: StructureFamily::PrimeField.to_string(),
                    right: c.family().to_string(),
                });
            }
            scalars.push(c.rule().constant_term());
        }
        Self::from_scalars(scalars, bound)
    }

    /// Build from the rational scalars the coefficients reduce to.
    pub fn from_scalars(mut coeffs: Vec<BigRational>, bound: u64) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() as u64 > bound + 1 {
            return Err(Error::Unsupported {
                msg: format!(
                    "degree {} exceeds the declared bound {bound}",
                    coeffs.len() - 1
                ),
            });
        }
        Ok(UltraPolynomial { coeffs, bound })
    }

    pub fn zero() -> Self {
        UltraPolynomial {
            coeffs: Vec::new(),
            bound: 0,
        }
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.coeffs.len().checked_sub(1).map(|d| d as u64)
    }

    /// Declared filtration step.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn scalar(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient as an ultraproduct element.
    pub fn coefficient(&self, i: usize) -> Result<UltraElement> {
        UltraElement::from_rational(StructureFamily::PrimeField, &self.scalar(i))
    }

    pub fn coefficient_count(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len().max(other.coeffs.len())];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UltraPolynomial {
            coeffs,
            bound: self.bound.max(other.bound),
        }
    }

    pub fn neg(&self) -> Self {
        UltraPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            bound: self.bound,
        }
    }

    /// Product; the result step is within the growth bound `2 * max(k, k')`
    /// of the degree filtration.
    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UltraPolynomial {
                coeffs: Vec::new(),
                bound: self.bound + other.bound,
            };
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UltraPolynomial {
            coeffs,
            bound: self.bound + other.bound,
        }
    }

    /// The polynomial this element reduces to over `F_p`, as residues.
    pub fn eval_at_prime(&self, p: u64) -> Result<Vec<u64>> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for q in &self.coeffs {
            let elem = UltraElement::from_rational(StructureFamily::PrimeField, q)?;
            out.push(elem.value_in(p)?);
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        Ok(out)
    }
}

impl PartialEq for UltraPolynomial {
    /// Equality as ring elements; the step bound is bookkeeping.
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl fmt::Display for UltraPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let sign = c.is_negative();
            if first {
                if sign {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let var = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if i == 0 {
                write!(f, "{}", fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{}{var}", fmt_rational_coeff(&mag))?;
            }
        }
        Ok(())
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_rational_coeff(q: &BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("({}/{})", q.numer(), q.denom())
    }
}

/// A sum of monomials `c * x^[e]` with ultra-natural exponents: an element of
/// the monomial-count protoproduct. Terms are kept sorted by exponent with
/// pairwise distinct exponent rules and nonzero coefficients.
#[derive(Debug, Clone)]
pub struct UltraMonomialSum {
    terms: Vec<(BigRational, UltraNat)>,
    bound: u64,
}

impl UltraMonomialSum {
    pub fn new(terms: Vec<(UltraElement, UltraNat)>, bound: u64) -> Result<Self> {
        let mut scalars = Vec::with_capacity(terms.len());
        for (c, e) in terms {
            if c.family() != &StructureFamily::PrimeField {
                return Err(Error::FamilyMismatch {
                    left: StructureFamily::PrimeField.to_string(),
                    right: c.family().to_string(),
                });
            }
            scalars.push((c.rule().constant_term(), e));
        }
        Self::from_scalars(scalars, bound)
    }

    pub fn from_scalars(terms: Vec<(BigRational, UltraNat)>, bound: u64) -> Result<Self> {
        let mut merged: Vec<(BigRational, UltraNat)> = Vec::new();
        for (c, e) in terms {
            match merged
                .iter_mut()
                .find(|(_, f)| f.compare(&e) == ForcedOrdering::Equal)
            {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, e)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        merged.sort_by(|(_, a), (_, b)| match a.compare(b) {
            ForcedOrdering::Less => std::cmp::Ordering::Less,
            ForcedOrdering::Equal => std::cmp::Ordering::Equal,
            ForcedOrdering::Greater => std::cmp::Ordering::Greater,
        });
        if merged.len() as u64 > bound {
            return Err(Error::Unsupported {
                msg: format!(
                    "{} monomials exceed the declared count bound {bound}",
                    merged.len()
                ),
            });
        }
        Ok(UltraMonomialSum {
            terms: merged,
            bound,
        })
    }

    /// The monomial `x^[e]`.
    pub fn monomial(exponent: UltraNat) -> Self {
        UltraMonomialSum {
            terms: vec![(BigRational::one(), exponent)],
            bound: 1,
        }
    }

    pub fn constant(c: &BigRational) -> Self {
        if c.is_zero() {
            return UltraMonomialSum {
                terms: Vec::new(),
                bound: 0,
            };
        }
        UltraMonomialSum {
            terms: vec![(c.clone(), UltraNat::constant(0))],
            bound: 1,
        }
    }

    pub fn terms(&self) -> &[(BigRational, UltraNat)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_scalars(terms, self.bound + other.bound)
    }

    pub fn neg(&self) -> Self {
        UltraMonomialSum {
            terms: self.terms.iter().map(|(c, e)| (-c, e.clone())).collect(),
            bound: self.bound,
        }
    }

    /// Product: pairwise coefficient products with exponent addition in the
    /// ultra-naturals; terms whose exponents are forced equal merge, so the
    /// count lands within the growth bound `k * k'`. Merging on a contingent
    /// comparison never arises: comparisons of rule-backed exponents are
    /// always forced.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = Vec::new();
        for (c1, e1) in &self.terms {
            for (c2, e2) in &other.terms {
                terms.push((c1 * c2, e1.add(e2)?));
            }
        }
        Self::from_scalars(terms, self.bound.saturating_mul(other.bound).max(1))
    }

    /// The grade of a single monomial: its exponent in the ultra-naturals.
    pub fn grade(&self) -> Result<UltraNat> {
        if self.terms.len() != 1 {
            return Err(Error::NotSingleTerm {
                terms: self.terms.len(),
            });
        }
        Ok(self.terms[0].1.clone())
    }

    /// Embed into the polynomial ring, when every exponent is constant.
    pub fn to_polynomial(&self) -> Result<UltraPolynomial> {
        let mut max_deg = 0u64;
        let mut pairs = Vec::new();
        for (c, e) in &self.terms {
            let deg = e
                .constant_detect()
                .and_then(|d| d.to_u64())
                .ok_or_else(|| Error::Unsupported {
                    msg: format!("exponent {e} is not a constant; no polynomial image"),
                })?;
            max_deg = max_deg.max(deg);
            pairs.push((deg, c.clone()));
        }
        let mut coeffs = vec![BigRational::zero(); (max_deg + 1) as usize];
        for (deg, c) in pairs {
            coeffs[deg as usize] += c;
        }
        UltraPolynomial::from_scalars(coeffs, max_deg)
    }

    /// Embed a polynomial as a monomial sum with constant exponents.
    pub fn from_polynomial(poly: &UltraPolynomial) -> Self {
        let terms: Vec<(BigRational, UltraNat)> = (0..poly.coefficient_count())
            .filter_map(|i| {
                let c = poly.scalar(i);
                if c.is_zero() {
                    None
                } else {
                    Some((c, UltraNat::constant(i as u64)))
                }
            })
            .collect();
        let bound = (terms.len() as u64).max(1);
        UltraMonomialSum {
            terms,
            bound,
        }
    }
}

impl PartialEq for UltraMonomialSum {
    fn eq(&self, other: &Self) -> bool {
        self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((c1, e1), (c2, e2))| {
                    c1 == c2 && e1.compare(e2) == ForcedOrdering::Equal
                })
    }
}

impl fmt::Display for UltraMonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "[0]");
        }
        // descending exponent order
        for (i, (c, e)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match e.constant_detect() {
                Some(d) if d.is_zero() => write!(f, "[{}]", fmt_rational(c))?,
                _ => write!(f, "[{}]x^[{}]", fmt_rational(c), e.rule())?,
            }
        }
        Ok(())
    }
}

/// A per-index sequence of polynomials with declared degree and
/// monomial-count rules and, when expressible, an explicit finite list of
/// term rules `(coefficient rule, exponent rule)`.
///
/// Sequences like `sum_{i<=p} x^i` have no finite term list; they are
/// declared by their rules alone, which is enough for membership checks (and
/// they are rejected by both filtrations anyway).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedPolySequence {
    terms: Option<Vec<(ValueRule, ValueRule)>>,
    degree_rule: UltraNat,
    count_rule: UltraNat,
}

impl BoundedPolySequence {
    /// Build from explicit term rules. Terms with identical exponent rules
    /// are merged; the degree and count rules are derived from the terms
    /// whose coefficients are eventually nonzero.
    pub fn from_terms(terms: Vec<(ValueRule, ValueRule)>) -> Result<Self> {
        // merge equal exponents
        let mut merged: Vec<(ValueRule, ValueRule)> = Vec::new();
        for (c, e) in terms {
            let _ = UltraNat::new(e.clone())?; // exponents must be naturals
            match merged.iter_mut().find(|(_, f)| f.coeffs() == e.coeffs()) {
                Some((acc, _)) => *acc = acc.add(&c)?,
                None => merged.push((c, e)),
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        // eventual degree: max exponent among eventually nonzero coefficients
        let mut degree_rule = UltraNat::constant(0);
        let mut live = 0u64;
        for (c, e) in &merged {
            if c.scaled_constant_term().is_zero() {
                continue; // coefficient vanishes mod p at cofinitely many p
            }
            live += 1;
            let e = UltraNat::new(e.clone())?;
            if degree_rule.compare(&e) == ForcedOrdering::Less {
                degree_rule = e;
            }
        }
        Ok(BoundedPolySequence {
            terms: Some(merged),
            degree_rule,
            count_rule: UltraNat::constant(live),
        })
    }

    /// Declare a sequence by its rules alone.
    pub fn declared(degree_rule: ValueRule, count_rule: ValueRule) -> Result<Self> {
        Ok(BoundedPolySequence {
            terms: None,
            degree_rule: UltraNat::new(degree_rule)?,
            count_rule: UltraNat::new(count_rule)?,
        })
    }

    /// The sequence `p -> sum_{i=0}^{p} x^i`, whose degree and monomial
    /// count both grow without bound.
    pub fn geometric_sum() -> Self {
        Self::declared(
            ValueRule::var_p(),
            ValueRule::var_p().add(&ValueRule::constant(1)).expect("p + 1"),
        )
        .expect("rules are valid naturals")
    }

    pub fn degree_rule(&self) -> &UltraNat {
        &self.degree_rule
    }

    pub fn count_rule(&self) -> &UltraNat {
        &self.count_rule
    }

    pub fn term_rules(&self) -> Option<&[(ValueRule, ValueRule)]> {
        self.terms.as_deref()
    }

    /// Least filtration step containing the sequence, iff the governing rule
    /// is constant; a rejection names the unbounded rule.
    pub fn membership_check(&self, filtration: &FiltrationDescriptor) -> Membership {
        let (name, rule) = match filtration.kind {
            FiltrationKind::DegreeAtMost => ("degree", &self.degree_rule),
            FiltrationKind::MonomialCountAtMost => ("monomial count", &self.count_rule),
        };
        match rule.constant_detect().and_then(|c| c.to_u64()) {
            Some(step) => Membership::Accepted { step },
            None => Membership::Rejected {
                reason: format!("{name} rule {} is unbounded", rule.rule()),
            },
        }
    }

    /// Collapse along the degree filtration: the coefficient-wise
    /// ultraproduct, a polynomial over the ultraproduct field.
    pub fn degree_collapse(&self) -> Result<UltraPolynomial> {
        let step = match self.membership_check(&FiltrationDescriptor::degree()) {
            Membership::Accepted { step } => step,
            Membership::Rejected { reason } => {
                return Err(Error::RejectedSequence { reason })
            }
        };
        let terms = self.terms.as_ref().ok_or_else(|| Error::RejectedSequence {
            reason: "sequence carries no explicit term rules to collapse".into(),
        })?;
        let mut coeffs = vec![BigRational::zero(); (step + 1) as usize];
        for (c, e) in terms {
            if c.scaled_constant_term().is_zero() {
                continue; // vanishes as an ultraproduct coefficient
            }
            let deg = UltraNat::new(e.clone())?
                .constant_detect()
                .and_then(|d| d.to_u64())
                .expect("bounded degree forces constant exponents on live terms");
            coeffs[deg as usize] += c.constant_term();
        }
        UltraPolynomial::from_scalars(coeffs, step)
    }

    /// Collapse along the monomial-count filtration: a sum of monomials with
    /// ultra-natural exponents.
    pub fn monomial_collapse(&self) -> Result<UltraMonomialSum> {
        let step = match self.membership_check(&FiltrationDescriptor::monomial_count()) {
            Membership::Accepted { step } => step,
            Membership::Rejected { reason } => {
                return Err(Error::RejectedSequence { reason })
            }
        };
        let terms = self.terms.as_ref().ok_or_else(|| Error::RejectedSequence {
            reason: "sequence carries no explicit term rules to collapse".into(),
        })?;
        let mut scalars = Vec::new();
        for (c, e) in terms {
            let q = c.constant_term();
            if q.is_zero() {
                continue;
            }
            scalars.push((q, UltraNat::new(e.clone())?));
        }
        UltraMonomialSum::from_scalars(scalars, step.max(1))
    }

    /// Index-wise product of two sequences.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = match (&self.terms, &other.terms) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::RejectedSequence {
                    reason: "pointwise arithmetic needs explicit term rules".into(),
                })
            }
        };
        let mut terms = Vec::new();
        for (c1, e1) in a {
            for (c2, e2) in b {
                terms.push((c1.mul(c2)?, e1.add(e2)?));
            }
        }
        Self::from_terms(terms)
    }

    /// Index-wise sum of two sequences.
    pub fn pointwise_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = match (&self.terms, &other.terms) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::RejectedSequence {
                    reason: "pointwise arithmetic needs explicit term rules".into(),
                })
            }
        };
        let mut terms = a.clone();
        terms.extend(b.iter().cloned());
        Self::from_terms(terms)
    }

    /// The actual polynomial at index `p`, as coefficients mod `p`.
    pub fn poly_at(&self, p: u64) -> Result<Vec<u64>> {
        let terms = self.terms.as_ref().ok_or_else(|| Error::RejectedSequence {
            reason: "sequence carries no explicit term rules".into(),
        })?;
        let mut coeffs: Vec<u64> = Vec::new();
        for (c, e) in terms {
            let deg = UltraNat::new(e.clone())?
                .value_at(p)
                .to_usize()
                .filter(|&d| d <= 1_000_000)
                .ok_or_else(|| Error::Unsupported {
                    msg: "exponent too large for pointwise evaluation".into(),
                })?;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, 0);
            }
            let v = num_integer::Integer::mod_floor(&c.value_at(p), &BigInt::from(p))
                .to_u64()
                .expect("residue fits");
            coeffs[deg] = ((coeffs[deg] as u128 + v as u128) % p as u128) as u64;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rule(text: &str) -> ValueRule {
        ValueRule::parse(text).unwrap()
    }

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn growth_functions() {
        assert_eq!(FiltrationDescriptor::degree().growth(3), 6);
        assert_eq!(FiltrationDescriptor::monomial_count().growth(3), 9);
    }

    #[test]
    fn membership_constant_degree() {
        // x^3 + 1: degree rule 3
        let seq = BoundedPolySequence::from_terms(vec![
            (rule("1"), rule("3")),
            (rule("1"), rule("0")),
        ])
        .unwrap();
        assert_eq!(
            seq.membership_check(&FiltrationDescriptor::degree()),
            Membership::Accepted { step: 3 }
        );
        assert_eq!(
            seq.membership_check(&FiltrationDescriptor::monomial_count()),
            Membership::Accepted { step: 2 }
        );
    }

    #[test]
    fn geometric_sum_rejected_by_both() {
        let seq = BoundedPolySequence::geometric_sum();
        assert!(matches!(
            seq.membership_check(&FiltrationDescriptor::degree()),
            Membership::Rejected { .. }
        ));
        assert!(matches!(
            seq.membership_check(&FiltrationDescriptor::monomial_count()),
            Membership::Rejected { .. }
        ));
        assert!(seq.degree_collapse().is_err());
    }

    #[test]
    fn x_to_the_p_accepted_by_count_only() {
        let seq =
            BoundedPolySequence::from_terms(vec![(rule("1"), rule("p"))]).unwrap();
        assert!(matches!(
            seq.membership_check(&FiltrationDescriptor::degree()),
            Membership::Rejected { .. }
        ));
        assert_eq!(
            seq.membership_check(&FiltrationDescriptor::monomial_count()),
            Membership::Accepted { step: 1 }
        );
        let mono = seq.monomial_collapse().unwrap();
        assert_eq!(mono.term_count(), 1);
        assert_eq!(
            mono.grade().unwrap().compare(&UltraNat::index()),
            ForcedOrdering::Equal
        );
    }

    #[test]
    fn collapse_of_x_plus_p_minus_one() {
        // x + (p - 1) collapses to x - 1
        let seq = BoundedPolySequence::from_terms(vec![
            (rule("1"), rule("1")),
            (rule("p - 1"), rule("0")),
        ])
        .unwrap();
        let poly = seq.degree_collapse().unwrap();
        assert_eq!(poly.to_string(), "x - 1");
        assert_eq!(poly.scalar(0), rat(-1));
        assert_eq!(poly.scalar(1), rat(1));
    }

    #[test]
    fn collapse_constant_sequence() {
        let seq = BoundedPolySequence::from_terms(vec![
            (rule("1"), rule("2")),
            (rule("1"), rule("0")),
        ])
        .unwrap();
        let poly = seq.degree_collapse().unwrap();
        assert_eq!(poly.to_string(), "x^2 + 1");
    }

    #[test]
    fn collapse_commutes_with_product() {
        // (x + 1)(x + p) collapses to x(x + 1) = x^2 + x
        let a = BoundedPolySequence::from_terms(vec![
            (rule("1"), rule("1")),
            (rule("1"), rule("0")),
        ])
        .unwrap();
        let b = BoundedPolySequence::from_terms(vec![
            (rule("1"), rule("1")),
            (rule("p"), rule("0")),
        ])
        .unwrap();
        let collapsed_product = a.pointwise_mul(&b).unwrap().degree_collapse().unwrap();
        let product_of_collapses = a
            .degree_collapse()
            .unwrap()
            .mul(&b.degree_collapse().unwrap());
        assert_eq!(collapsed_product, product_of_collapses);
        assert_eq!(collapsed_product.to_string(), "x^2 + x");
        // pointwise cross-check at a few primes
        for p in [5u64, 7, 11, 13, 101] {
            let lhs = a.pointwise_mul(&b).unwrap().poly_at(p).unwrap();
            let rhs = collapsed_product.eval_at_prime(p).unwrap();
            assert_eq!(lhs, rhs, "p = {p}");
        }
    }

    #[test]
    fn poly_arithmetic() {
        let x_minus_1 = UltraPolynomial::from_scalars(vec![rat(-1), rat(1)], 1).unwrap();
        let x_plus_1 = UltraPolynomial::from_scalars(vec![rat(1), rat(1)], 1).unwrap();
        let prod = x_minus_1.mul(&x_plus_1);
        assert_eq!(prod.to_string(), "x^2 - 1");
        assert_eq!(prod.bound(), 2);
        let sum = x_minus_1.add(&x_minus_1.neg());
        assert_eq!(sum, UltraPolynomial::zero());
        // ([2]x) * ([(p+1)/2]x) = x^2
        let two_x = UltraPolynomial::from_scalars(vec![rat(0), rat(2)], 1).unwrap();
        let half_x = UltraPolynomial::new(
            vec![
                UltraElement::from_int(StructureFamily::PrimeField, 0),
                UltraElement::new(StructureFamily::PrimeField, rule("(p + 1)/2")),
            ],
            1,
        )
        .unwrap();
        assert_eq!(two_x.mul(&half_x).to_string(), "x^2");
    }

    #[test]
    fn monomial_product_merges_cancelling_terms() {
        // (x^[p] + 1)(x^[p] - 1) = x^[2p] - 1
        let xp = UltraMonomialSum::monomial(UltraNat::index());
        let one = UltraMonomialSum::constant(&rat(1));
        let a = xp.add(&one).unwrap();
        let b = xp.add(&one.neg()).unwrap();
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.term_count(), 2);
        let expected = UltraMonomialSum::monomial(
            UltraNat::new(rule("2*p")).unwrap(),
        )
        .add(&one.neg())
        .unwrap();
        assert_eq!(prod, expected);
    }

    #[test]
    fn exponent_addition() {
        // x^[p] * x^[p^2 - p] = x^[p^2]
        let a = UltraMonomialSum::monomial(UltraNat::index());
        let b = UltraMonomialSum::monomial(UltraNat::new(rule("p^2 - p")).unwrap());
        let prod = a.mul(&b).unwrap();
        assert_eq!(
            prod.grade()
                .unwrap()
                .compare(&UltraNat::new(rule("p^2")).unwrap()),
            ForcedOrdering::Equal
        );
        // ordinary polynomials embed
        let c = UltraMonomialSum::monomial(UltraNat::constant(3));
        let d = UltraMonomialSum::monomial(UltraNat::constant(4));
        assert_eq!(
            c.mul(&d).unwrap().grade().unwrap().constant_detect(),
            Some(BigInt::from(7))
        );
    }

    #[test]
    fn grade_laws() {
        let xp = UltraMonomialSum::monomial(UltraNat::index());
        assert_eq!(
            xp.grade().unwrap().compare(&UltraNat::index()),
            ForcedOrdering::Equal
        );
        let x5 = UltraMonomialSum::monomial(UltraNat::constant(5));
        assert_eq!(x5.grade().unwrap().constant_detect(), Some(BigInt::from(5)));
        // multi-term input is an error
        let sum = xp.add(&x5).unwrap();
        assert!(matches!(sum.grade(), Err(Error::NotSingleTerm { terms: 2 })));
    }

    #[test]
    fn polynomial_embedding_roundtrip() {
        let poly = UltraPolynomial::from_scalars(vec![rat(2), rat(0), rat(-3)], 2).unwrap();
        let mono = UltraMonomialSum::from_polynomial(&poly);
        assert_eq!(mono.to_polynomial().unwrap(), poly);
        // and products agree through the embedding
        let q = UltraPolynomial::from_scalars(vec![rat(1), rat(1)], 1).unwrap();
        let via_mono = UltraMonomialSum::from_polynomial(&poly)
            .mul(&UltraMonomialSum::from_polynomial(&q))
            .unwrap();
        assert_eq!(via_mono.to_polynomial().unwrap(), poly.mul(&q));
    }

    #[test]
    fn declared_bounds_are_enforced() {
        // a degree-2 polynomial cannot claim filtration step 1
        assert!(UltraPolynomial::from_scalars(vec![rat(1), rat(0), rat(1)], 1).is_err());
        // three monomials cannot claim count step 2
        let terms = vec![
            (rat(1), UltraNat::constant(0)),
            (rat(1), UltraNat::constant(1)),
            (rat(1), UltraNat::index()),
        ];
        assert!(UltraMonomialSum::from_scalars(terms, 2).is_err());
    }

    #[test]
    fn growth_law_for_products() {
        let a = BoundedPolySequence::from_terms(vec![
            (rule("1"), rule("2")),
            (rule("3"), rule("0")),
        ])
        .unwrap();
        let b = BoundedPolySequence::from_terms(vec![
            (rule("1"), rule("3")),
            (rule("p"), rule("1")),
        ])
        .unwrap();
        let prod = a.pointwise_mul(&b).unwrap();
        let step_a = a
            .membership_check(&FiltrationDescriptor::degree())
            .step()
            .unwrap();
        let step_b = b
            .membership_check(&FiltrationDescriptor::degree())
            .step()
            .unwrap();
        let step_prod = prod
            .membership_check(&FiltrationDescriptor::degree())
            .step()
            .unwrap();
        assert!(step_prod <= FiltrationDescriptor::degree().growth(step_a.max(step_b)));
    }
}
