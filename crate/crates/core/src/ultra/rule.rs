//! Value rules: integer-valued rational polynomials in the index prime with
//! finite exception tables.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{carmichael_lambda, factor, is_prime, lcm_checked, units};
use crate::error::{Error, Result};

/// Cap on the common denominator; integer-valuedness is checked by a scan of
/// the unit residues mod the denominator, so it must stay enumerable.
const DENOM_CAP: u64 = 10_000_000;

/// An exact rule `p -> f(p)` for the value of a sequence at the index prime
/// `p`: a polynomial `f` with rational coefficients that takes integer values
/// at every prime not dividing its common denominator, plus a finite map of
/// explicit exceptions.
///
/// Construction normalizes: trailing zero coefficients are trimmed,
/// exceptions equal to the polynomial value are dropped, and primes dividing
/// the denominator where the polynomial value is not an integer receive a
/// default exception of 0, so `value_at` is total on the primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueRule {
    coeffs: Vec<BigRational>,
    exceptions: BTreeMap<u64, BigInt>,
    denom: u64,
}

impl ValueRule {
    pub fn new(coeffs: Vec<BigRational>, exceptions: BTreeMap<u64, BigInt>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        // common denominator
        let mut denom_big = BigInt::one();
        for c in &coeffs {
            denom_big = denom_big.lcm(c.denom());
        }
        let denom = denom_big.to_u64().filter(|&d| d <= DENOM_CAP).ok_or_else(|| {
            Error::InvalidRule {
                reason: format!("common denominator {denom_big} exceeds the cap {DENOM_CAP}"),
            }
        })?;
        // integer-valuedness at primes not dividing the denominator: the
        // scaled polynomial u = denom * f must vanish mod denom on every
        // unit residue (those are exactly the residues primes can take)
        let u: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * BigInt::from(denom)).to_integer())
            .collect();
        if denom > 1 {
            let d = BigInt::from(denom);
            for r in units(denom) {
                let val = eval_int_poly(&u, &BigInt::from(r));
                if !val.mod_floor(&d).is_zero() {
                    return Err(Error::InvalidRule {
                        reason: format!(
                            "polynomial is not integer-valued: value at residues {r} mod {denom} \
                             is not divisible by {denom}"
                        ),
                    });
                }
            }
        }
        let mut exceptions = exceptions;
        for &p in exceptions.keys() {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
        }
        // complete at primes dividing the denominator, prune redundant entries
        for (p, _) in factor(denom) {
            let integral = poly_value_at(&coeffs, p).is_integer();
            if !exceptions.contains_key(&p) && !integral {
                exceptions.insert(p, BigInt::zero());
            }
        }
        exceptions.retain(|&p, v| {
            poly_value_at(&coeffs, p) != BigRational::from_integer(v.clone())
        });
        Ok(ValueRule {
            coeffs,
            exceptions,
            denom,
        })
    }

    pub fn constant(n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        ValueRule::new(vec![BigRational::from_integer(n)], BTreeMap::new())
            .expect("integer constants are valid rules")
    }

    /// The rule `p -> p`.
    pub fn var_p() -> Self {
        ValueRule::new(
            vec![BigRational::zero(), BigRational::one()],
            BTreeMap::new(),
        )
        .expect("p is a valid rule")
    }

    /// An integer-valued representative of the rational constant `q`: for
    /// `q = s/t` in lowest terms the rule is `s (1 - p^E) / t` with `E` a
    /// multiple of the Carmichael exponent of `t` chosen at least
    /// `min_exponent`, so that `t * f(p) = s (mod p^min_exponent)` for every
    /// prime not dividing `t`.
    pub fn from_rational(q: &BigRational, min_exponent: u32) -> Result<Self> {
        let t = q.denom().to_u64().filter(|&t| t <= DENOM_CAP).ok_or_else(|| {
            Error::InvalidRule {
                reason: "denominator too large".into(),
            }
        })?;
        if t == 1 {
            return Ok(ValueRule::new(vec![q.clone()], BTreeMap::new())
                .expect("integer constant"));
        }
        let lam = carmichael_lambda(t);
        let reps = (u64::from(min_exponent.max(1))).div_ceil(lam);
        let e = (lam * reps.max(1)) as usize;
        let mut coeffs = vec![BigRational::zero(); e + 1];
        coeffs[0] = q.clone();
        coeffs[e] = -q.clone();
        ValueRule::new(coeffs, BTreeMap::new())
    }

    pub fn with_exceptions(&self, exceptions: BTreeMap<u64, BigInt>) -> Result<Self> {
        let mut merged = self.exceptions.clone();
        merged.extend(exceptions);
        ValueRule::new(self.coeffs.clone(), merged)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, BigInt> {
        &self.exceptions
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    /// Degree of the polynomial part; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero_poly(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Identical zero rule: zero polynomial and no exceptions.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.exceptions.is_empty()
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    /// Constant term of the polynomial part.
    pub fn constant_term(&self) -> BigRational {
        self.coeffs.first().cloned().unwrap_or_else(BigRational::zero)
    }

    /// True when the coefficients of `p^0 .. p^(k-1)` all vanish; for the
    /// family Z/p^k this is exactly "the polynomial part is 0 mod p^k at
    /// cofinitely many p".
    pub fn low_coeffs_vanish(&self, k: u32) -> bool {
        self.coeffs.iter().take(k as usize).all(Zero::is_zero)
    }

    /// Polynomial value as a rational, ignoring exceptions.
    pub fn poly_value(&self, p: u64) -> BigRational {
        poly_value_at(&self.coeffs, p)
    }

    fn poly_value_int(&self, p: u64) -> Option<BigInt> {
        let v = self.poly_value(p);
        if v.is_integer() {
            Some(v.to_integer())
        } else {
            None
        }
    }

    /// The value of the sequence at the index prime `p`. Total: exceptions
    /// first, the polynomial otherwise (integer by construction).
    pub fn value_at(&self, p: u64) -> BigInt {
        debug_assert!(is_prime(p), "value rules are indexed by primes");
        if let Some(v) = self.exceptions.get(&p) {
            return v.clone();
        }
        self.poly_value_int(p)
            .expect("rule is integer-valued away from completed exceptions")
    }

    /// Scaled integer polynomial `u = denom * f`.
    pub fn scaled_int_coeffs(&self) -> Vec<BigInt> {
        self.coeffs
            .iter()
            .map(|c| (c * BigInt::from(self.denom)).to_integer())
            .collect()
    }

    /// `u(0) = denom * f(0)`: the quantity whose vanishing decides equality
    /// with 0 in the prime-field family.
    pub fn scaled_constant_term(&self) -> BigInt {
        (self.constant_term() * BigInt::from(self.denom)).to_integer()
    }

    /// `Some(c)` iff the polynomial part is the constant `c` (degree 0);
    /// exceptions are irrelevant, finitely many indices never move an
    /// ultraproduct element.
    pub fn constant_value(&self) -> Option<BigInt> {
        match self.coeffs.len() {
            0 => Some(BigInt::zero()),
            1 => Some(self.coeffs[0].to_integer()),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigRational::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        ValueRule::new(coeffs, self.merge_exceptions(other, |a, b| a + b))
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c).collect();
        let exceptions = self.exceptions.iter().map(|(&p, v)| (p, -v)).collect();
        ValueRule::new(coeffs, exceptions).expect("negation stays integer-valued")
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if lcm_checked(self.denom, other.denom).is_none_or(|d| d > DENOM_CAP) {
            return Err(Error::InvalidRule {
                reason: "product denominator exceeds the cap".into(),
            });
        }
        let mut coeffs =
            vec![BigRational::zero(); (self.coeffs.len() + other.coeffs.len()).saturating_sub(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ValueRule::new(coeffs, self.merge_exceptions(other, |a, b| a * b))
    }

    fn merge_exceptions(
        &self,
        other: &Self,
        op: impl Fn(&BigInt, &BigInt) -> BigInt,
    ) -> BTreeMap<u64, BigInt> {
        let mut out = BTreeMap::new();
        for &p in self.exceptions.keys().chain(other.exceptions.keys()) {
            out.insert(p, op(&self.value_at(p), &other.value_at(p)));
        }
        out
    }

    /// Parse the rule literal syntax, e.g. `(p^2 - 1)/2 ; except {2: 7}`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_rule(text)
    }
}

fn poly_value_at(coeffs: &[BigRational], p: u64) -> BigRational {
    let x = BigRational::from_integer(BigInt::from(p));
    let mut acc = BigRational::zero();
    for c in coeffs.iter().rev() {
        acc = acc * &x + c;
    }
    acc
}

fn eval_int_poly(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

impl fmt::Display for ValueRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            let u = self.scaled_int_coeffs();
            let body = fmt_int_poly(&u);
            if self.denom == 1 {
                write!(f, "{body}")?;
            } else {
                write!(f, "({body})/{}", self.denom)?;
            }
        }
        if !self.exceptions.is_empty() {
            let entries: Vec<String> = self
                .exceptions
                .iter()
                .map(|(p, v)| format!("{p}: {v}"))
                .collect();
            write!(f, " ; except {{{}}}", entries.join(", "))?;
        }
        Ok(())
    }
}

fn fmt_int_poly(coeffs: &[BigInt]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let var = match i {
            0 => String::new(),
            1 => "p".to_string(),
            _ => format!("p^{i}"),
        };
        let body = if i == 0 {
            mag.to_string()
        } else if mag.is_one() {
            var
        } else {
            format!("{mag}*{var}")
        };
        if parts.is_empty() {
            parts.push(if c.is_negative() {
                format!("-{body}")
            } else {
                body
            });
        } else {
            parts.push(format!("{} {body}", if c.is_negative() { "-" } else { "+" }));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" ")
    }
}

// ---- rule literal parser ----

struct RuleParser<'a> {
    text: &'a str,
    pos: usize,
}

/// Polynomials over the rationals in the single indeterminate `p`.
type Poly = Vec<BigRational>;

impl<'a> RuleParser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        self.text[start..self.pos].parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: "bad number".into(),
        })
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('+') {
                acc = poly_add(&acc, &self.factor()?);
            } else if self.eat('-') {
                acc = poly_sub(&acc, &self.factor()?);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = poly_mul(&acc, &self.power()?);
            } else if self.eat('/') {
                let divisor = self.power()?;
                if divisor.len() > 1 {
                    return self.err("can only divide by a constant");
                }
                let c = divisor.first().cloned().unwrap_or_else(BigRational::zero);
                if c.is_zero() {
                    return self.err("division by zero");
                }
                acc = acc.into_iter().map(|x| x / &c).collect();
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.unary()?;
        if self.eat('^') {
            let e = self.number()?;
            let e = e.to_u32().filter(|&e| e <= 64).ok_or(Error::Syntax {
                pos: self.pos,
                msg: "exponent out of range".into(),
            })?;
            let mut acc = vec![BigRational::one()];
            for _ in 0..e {
                acc = poly_mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Poly> {
        if self.eat('-') {
            let inner = self.unary()?;
            return Ok(inner.into_iter().map(|c| -c).collect());
        }
        match self.peek() {
            Some('(') => {
                self.eat('(');
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(inner)
            }
            Some('p') => {
                self.eat('p');
                Ok(vec![BigRational::zero(), BigRational::one()])
            }
            Some(c) if c.is_ascii_digit() => Ok(vec![BigRational::from_integer(self.number()?)]),
            _ => self.err("expected a rule term"),
        }
    }

    fn exceptions(&mut self) -> Result<BTreeMap<u64, BigInt>> {
        let mut out = BTreeMap::new();
        self.skip_ws();
        if !self.text[self.pos..].starts_with("except") {
            return self.err("expected `except`");
        }
        self.pos += "except".len();
        if !self.eat('{') {
            return self.err("expected `{`");
        }
        if self.eat('}') {
            return Ok(out);
        }
        loop {
            let p = self.number()?.to_u64().ok_or(Error::Syntax {
                pos: self.pos,
                msg: "prime out of range".into(),
            })?;
            if !self.eat(':') {
                return self.err("expected `:`");
            }
            let neg = self.eat('-');
            let mut v = self.number()?;
            if neg {
                v = -v;
            }
            out.insert(p, v);
            if self.eat('}') {
                return Ok(out);
            }
            if !self.eat(',') {
                return self.err("expected `,` or `}`");
            }
        }
    }
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    out
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    poly_add(a, &b.iter().map(|c| -c).collect::<Poly>())
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn parse_rule(text: &str) -> Result<ValueRule> {
    let (poly_text, except_text) = match text.split_once(';') {
        Some((a, b)) => (a, Some(b)),
        None => (text, None),
    };
    let poly_text = poly_text
        .trim()
        .strip_prefix("poly(p):")
        .unwrap_or(poly_text)
        .trim();
    let mut parser = RuleParser {
        text: poly_text,
        pos: 0,
    };
    let coeffs = parser.expr()?;
    parser.skip_ws();
    if parser.pos != poly_text.len() {
        return parser.err("trailing input in rule");
    }
    let exceptions = match except_text {
        Some(t) => RuleParser { text: t, pos: 0 }.exceptions()?,
        None => BTreeMap::new(),
    };
    ValueRule::new(coeffs, exceptions)
}
