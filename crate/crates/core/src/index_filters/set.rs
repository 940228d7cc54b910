//! Definable subsets of the prime index set.
//!
//! A [`DefinableSet`] denotes a set of primes of the form "a union of
//! congruence classes, plus finitely many primes added, minus finitely many
//! removed". The representation kept here is a normal form:
//!
//! * `classes` holds only residues coprime to the modulus (a class `a mod M`
//!   with `gcd(a, M) > 1` contains at most one prime, which is folded into
//!   the correction sets),
//! * the modulus is the conductor: the least `M` such that the retained
//!   classes are unions of full classes mod `M`,
//! * `include` holds only primes outside the class part, `exclude` only
//!   primes inside it, and the two are disjoint.
//!
//! With those constraints the normal form is unique, so structural equality
//! coincides with extensional equality of prime sets. Infinitude of each
//! retained class is Dirichlet's theorem; the engine treats it as an axiom
//! but insists on one witness prime per class at construction time and
//! aborts with a diagnostic if the search bound is exceeded.

use std::collections::BTreeSet;
use std::fmt;

use crate::arith::{
    dirichlet_witness, dirichlet_witness_bound, divisors, factor, gcd, is_prime, lcm_checked,
    units,
};
use crate::error::{Error, Result};

/// Largest modulus the normalizer will handle; boolean operations that would
/// exceed it indicate runaway inputs, not legitimate use.
const MAX_MODULUS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefinableSet {
    modulus: u64,
    classes: BTreeSet<u64>,
    include: BTreeSet<u64>,
    exclude: BTreeSet<u64>,
}

impl DefinableSet {
    /// The set of all primes.
    pub fn all() -> Self {
        DefinableSet {
            modulus: 1,
            classes: BTreeSet::from([0]),
            include: BTreeSet::new(),
            exclude: BTreeSet::new(),
        }
    }

    /// The empty set.
    pub fn empty() -> Self {
        DefinableSet {
            modulus: 1,
            classes: BTreeSet::new(),
            include: BTreeSet::new(),
            exclude: BTreeSet::new(),
        }
    }

    /// Primes congruent to one of `residues` mod `modulus`.
    pub fn congruence(residues: &[u64], modulus: u64) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Unsupported {
                msg: "modulus must be positive".into(),
            });
        }
        let classes: BTreeSet<u64> = residues.iter().map(|r| r % modulus).collect();
        Ok(Self::build(
            modulus,
            &classes,
            &BTreeSet::new(),
            &BTreeSet::new(),
        ))
    }

    /// A finite set of primes.
    pub fn finite(primes: &[u64]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &p in primes {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            set.insert(p);
        }
        Ok(Self::build(1, &BTreeSet::new(), &set, &BTreeSet::new()))
    }

    /// General constructor from raw parts. `include` takes precedence over
    /// `exclude`, which takes precedence over the class part; the result is
    /// normalized.
    pub fn from_parts(
        modulus: u64,
        residues: &[u64],
        include: &[u64],
        exclude: &[u64],
    ) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Unsupported {
                msg: "modulus must be positive".into(),
            });
        }
        let mut inc = BTreeSet::new();
        for &p in include {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            inc.insert(p);
        }
        let mut exc = BTreeSet::new();
        for &p in exclude {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            exc.insert(p);
        }
        let classes: BTreeSet<u64> = residues.iter().map(|r| r % modulus).collect();
        Ok(Self::build(modulus, &classes, &inc, &exc))
    }

    /// Add finitely many primes.
    pub fn plus(&self, primes: &[u64]) -> Result<Self> {
        Ok(self.union(&Self::finite(primes)?))
    }

    /// Remove finitely many primes.
    pub fn minus(&self, primes: &[u64]) -> Result<Self> {
        Ok(self.intersect(&Self::finite(primes)?.complement()))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn classes(&self) -> &BTreeSet<u64> {
        &self.classes
    }

    pub fn included(&self) -> &BTreeSet<u64> {
        &self.include
    }

    pub fn excluded(&self) -> &BTreeSet<u64> {
        &self.exclude
    }

    /// Membership. Non-primes are never members.
    pub fn contains(&self, p: u64) -> bool {
        if !is_prime(p) {
            return false;
        }
        if self.include.contains(&p) {
            return true;
        }
        if self.exclude.contains(&p) {
            return false;
        }
        self.classes.contains(&(p % self.modulus))
    }

    /// True iff the set contains finitely many primes. Sound because every
    /// retained class is coprime to the modulus and therefore infinite by
    /// Dirichlet (witness-checked at construction).
    pub fn is_finite(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.include.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.modulus == 1 && self.classes.contains(&0)
    }

    pub fn is_all(&self) -> bool {
        self.is_cofinite() && self.exclude.is_empty()
    }

    /// The finitely many members, when the set is finite.
    pub fn finite_members(&self) -> Option<Vec<u64>> {
        if self.is_finite() {
            Some(self.include.iter().copied().collect())
        } else {
            None
        }
    }

    /// Members up to `bound`, ascending.
    pub fn members_upto(&self, bound: u64) -> Vec<u64> {
        crate::arith::primes_upto(bound)
            .into_iter()
            .filter(|&p| self.contains(p))
            .collect()
    }

    pub fn complement(&self) -> Self {
        let comp_classes: BTreeSet<u64> = units(self.modulus)
            .into_iter()
            .filter(|a| !self.classes.contains(a))
            .collect();
        let mut inc = BTreeSet::new();
        let mut exc = BTreeSet::new();
        for q in self.candidate_primes() {
            if self.contains(q) {
                exc.insert(q);
            } else {
                inc.insert(q);
            }
        }
        Self::build(self.modulus, &comp_classes, &inc, &exc)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    /// Set difference `self \ other`.
    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let l = lcm_checked(self.modulus, other.modulus)
            .filter(|&l| l <= MAX_MODULUS)
            .unwrap_or_else(|| {
                panic!(
                    "combined modulus lcm({}, {}) exceeds the engine limit {MAX_MODULUS}",
                    self.modulus, other.modulus
                )
            });
        let lifted: BTreeSet<u64> = units(l)
            .into_iter()
            .filter(|&u| {
                op(
                    self.classes.contains(&(u % self.modulus)),
                    other.classes.contains(&(u % other.modulus)),
                )
            })
            .collect();
        let mut inc = BTreeSet::new();
        let mut exc = BTreeSet::new();
        for q in self
            .candidate_primes()
            .union(&other.candidate_primes())
            .copied()
            .collect::<BTreeSet<u64>>()
        {
            if op(self.contains(q), other.contains(q)) {
                inc.insert(q);
            } else {
                exc.insert(q);
            }
        }
        Self::build(l, &lifted, &inc, &exc)
    }

    /// Primes where membership may deviate from the pure class rule.
    fn candidate_primes(&self) -> BTreeSet<u64> {
        let mut out: BTreeSet<u64> = self.include.union(&self.exclude).copied().collect();
        for (p, _) in factor(self.modulus) {
            out.insert(p);
        }
        out
    }

    /// Normalization. `raw_classes` may contain residues not coprime to the
    /// modulus; `include` wins over `exclude` wins over the class rule.
    fn build(
        modulus: u64,
        raw_classes: &BTreeSet<u64>,
        include: &BTreeSet<u64>,
        exclude: &BTreeSet<u64>,
    ) -> Self {
        assert!(
            (1..=MAX_MODULUS).contains(&modulus),
            "modulus {modulus} out of range"
        );
        let mem_raw = |p: u64| {
            if include.contains(&p) {
                true
            } else if exclude.contains(&p) {
                false
            } else {
                raw_classes.contains(&(p % modulus))
            }
        };

        let unit_classes: BTreeSet<u64> = raw_classes
            .iter()
            .copied()
            .filter(|&a| gcd(a, modulus) == 1 || modulus == 1)
            .collect();
        let (conductor, classes) = reduce_conductor(modulus, &unit_classes);

        // Dirichlet sanity check: every retained class must exhibit a prime.
        let bound = dirichlet_witness_bound();
        for &a in &classes {
            if dirichlet_witness(a, conductor, bound).is_none() {
                panic!(
                    "Dirichlet witness check failed: no prime = {a} (mod {conductor}) \
                     below {bound}; raise ULTRAPROD_DIRICHLET_BOUND or reduce the modulus"
                );
            }
        }

        // Candidate primes where the raw membership can differ from the
        // reduced class rule: explicit corrections, divisors of the modulus
        // (covers primes hiding in non-unit classes), divisors of the
        // conductor are among them.
        let mut candidates: BTreeSet<u64> = include.union(exclude).copied().collect();
        for (p, _) in factor(modulus) {
            candidates.insert(p);
        }

        let mut inc = BTreeSet::new();
        let mut exc = BTreeSet::new();
        for &q in &candidates {
            debug_assert!(is_prime(q));
            let class_mem = (gcd(q, conductor) == 1 || conductor == 1)
                && classes.contains(&(q % conductor));
            match (mem_raw(q), class_mem) {
                (true, false) => {
                    inc.insert(q);
                }
                (false, true) => {
                    exc.insert(q);
                }
                _ => {}
            }
        }

        DefinableSet {
            modulus: conductor,
            classes,
            include: inc,
            exclude: exc,
        }
    }

    /// Parse the canonical text form, e.g. `(1 mod 4) + {2} - {5}`,
    /// `{2, 3}`, `all - {7}`, `{}`.
    pub fn parse(text: &str) -> Result<Self> {
        parse_set(text)
    }
}

/// Reduce `classes` (unit residues mod `modulus`) to the least modulus
/// realizing the same union of classes.
fn reduce_conductor(modulus: u64, classes: &BTreeSet<u64>) -> (u64, BTreeSet<u64>) {
    let all_units = units(modulus);
    for m in divisors(modulus) {
        let mut verdict: std::collections::HashMap<u64, bool> = std::collections::HashMap::new();
        let mut ok = true;
        for &u in &all_units {
            let key = u % m;
            let inside = classes.contains(&u);
            match verdict.get(&key) {
                Some(&v) if v != inside => {
                    ok = false;
                    break;
                }
                Some(_) => {}
                None => {
                    verdict.insert(key, inside);
                }
            }
        }
        if ok {
            let reduced: BTreeSet<u64> = verdict
                .into_iter()
                .filter_map(|(k, v)| if v { Some(k) } else { None })
                .collect();
            return (m, reduced);
        }
    }
    unreachable!("the modulus itself always realizes its class set")
}

impl fmt::Display for DefinableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn braces(set: &BTreeSet<u64>) -> String {
            let inner: Vec<String> = set.iter().map(|p| p.to_string()).collect();
            format!("{{{}}}", inner.join(", "))
        }
        if self.classes.is_empty() {
            return write!(f, "{}", braces(&self.include));
        }
        if self.modulus == 1 {
            write!(f, "all")?;
        } else {
            let rs: Vec<String> = self.classes.iter().map(|a| a.to_string()).collect();
            write!(f, "({} mod {})", rs.join(", "), self.modulus)?;
        }
        if !self.include.is_empty() {
            write!(f, " + {}", braces(&self.include))?;
        }
        if !self.exclude.is_empty() {
            write!(f, " - {}", braces(&self.exclude))?;
        }
        Ok(())
    }
}

// ---- text form parser ----

struct SetParser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> SetParser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.text.len()
            && self.text.as_bytes()[self.pos].is_ascii_whitespace()
        {
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

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text.as_bytes()[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::Syntax {
                pos: start,
                msg: "number out of range".into(),
            })
    }

    fn keyword(&mut self, word: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(word) {
            let end = self.pos + word.len();
            let boundary = self.text[end..]
                .chars()
                .next()
                .is_none_or(|c| !c.is_alphanumeric());
            if boundary {
                self.pos = end;
                return true;
            }
        }
        false
    }

    fn prime_list(&mut self) -> Result<Vec<u64>> {
        if !self.eat('{') {
            return self.err("expected `{`");
        }
        let mut out = Vec::new();
        if self.eat('}') {
            return Ok(out);
        }
        loop {
            out.push(self.number()?);
            if self.eat('}') {
                return Ok(out);
            }
            if !self.eat(',') {
                return self.err("expected `,` or `}`");
            }
        }
    }

    fn base(&mut self) -> Result<DefinableSet> {
        if self.keyword("all") {
            return Ok(DefinableSet::all());
        }
        if self.keyword("none") {
            return Ok(DefinableSet::empty());
        }
        match self.peek() {
            Some('{') => {
                let primes = self.prime_list()?;
                DefinableSet::finite(&primes)
            }
            Some('(') => {
                self.eat('(');
                let mut residues = vec![self.number()?];
                while self.eat(',') {
                    residues.push(self.number()?);
                }
                if !self.keyword("mod") {
                    return self.err("expected `mod`");
                }
                let modulus = self.number()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                DefinableSet::congruence(&residues, modulus)
            }
            _ => self.err("expected `all`, `none`, `{...}`, or `(... mod M)`"),
        }
    }

    fn set(&mut self) -> Result<DefinableSet> {
        let mut acc = self.base()?;
        loop {
            if self.eat('+') {
                let primes = self.prime_list()?;
                acc = acc.plus(&primes)?;
            } else if self.eat('-') {
                let primes = self.prime_list()?;
                acc = acc.minus(&primes)?;
            } else {
                break;
            }
        }
        self.skip_ws();
        if self.pos != self.text.len() {
            return self.err("trailing input");
        }
        Ok(acc)
    }
}

fn parse_set(text: &str) -> Result<DefinableSet> {
    SetParser { text, pos: 0 }.set()
}
