//! Families of finite commutative rings indexed by the primes, and their
//! materialization at a given index.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Hard limit on the size of an on-demand modular structure.
const SIZE_CAP: u64 = 1 << 40;

/// Explicit operation tables for a small ring. Tables are row-major with
/// `size * size` entries; no axioms are assumed at construction, so corrupted
/// tables can be built deliberately and caught by [`ring_selfcheck`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingTable {
    pub size: u64,
    pub add: Vec<u64>,
    pub mul: Vec<u64>,
    pub zero: u64,
    pub one: u64,
}

impl RingTable {
    pub fn new(size: u64, add: Vec<u64>, mul: Vec<u64>, zero: u64, one: u64) -> Result<Self> {
        let n = size as usize;
        if size == 0 || add.len() != n * n || mul.len() != n * n {
            return Err(Error::Unsupported {
                msg: "ring table shape mismatch".into(),
            });
        }
        if add.iter().chain(mul.iter()).any(|&x| x >= size) || zero >= size || one >= size {
            return Err(Error::Unsupported {
                msg: "ring table entry out of range".into(),
            });
        }
        Ok(RingTable {
            size,
            add,
            mul,
            zero,
            one,
        })
    }

    /// The cyclic ring Z/n with canonical residue encoding.
    pub fn cyclic(n: u64) -> Self {
        let size = n.max(1);
        let mut add = Vec::with_capacity((size * size) as usize);
        let mut mul = Vec::with_capacity((size * size) as usize);
        for x in 0..size {
            for y in 0..size {
                add.push((x + y) % size);
                mul.push((x * y) % size);
            }
        }
        RingTable {
            size,
            add,
            mul,
            zero: 0,
            one: if size == 1 { 0 } else { 1 },
        }
    }

    fn idx(&self, x: u64, y: u64) -> usize {
        (x * self.size + y) as usize
    }
}

/// Descriptor of an indexed family of finite rings.
#[derive(Debug, Clone, PartialEq)]
pub enum StructureFamily {
    /// p -> F_p.
    PrimeField,
    /// p -> Z/n for a fixed n.
    ModRing(u64),
    /// p -> Z/p^k; stands in for the p-adic integers at finite precision.
    TruncatedPadic(u32),
    /// p -> a fixed finite ring given by tables.
    ConstantFinite(Arc<RingTable>),
}

impl StructureFamily {
    /// Precision exponent: residues live mod p^k. `None` when the size does
    /// not depend on p.
    pub fn prime_power_precision(&self) -> Option<u32> {
        match self {
            StructureFamily::PrimeField => Some(1),
            StructureFamily::TruncatedPadic(k) => Some(*k),
            _ => None,
        }
    }

    /// True when every index materializes the same structure.
    pub fn is_constant(&self) -> bool {
        matches!(
            self,
            StructureFamily::ModRing(_) | StructureFamily::ConstantFinite(_)
        )
    }

    /// Parse the compact descriptor form: `Fp`, `Z/12`, `Zp^2`, `const:Z/3`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "Fp" {
            return Ok(StructureFamily::PrimeField);
        }
        if let Some(rest) = t.strip_prefix("Zp^") {
            let k: u32 = rest.parse().map_err(|_| Error::Syntax {
                pos: 0,
                msg: format!("bad precision in `{t}`"),
            })?;
            if k == 0 {
                return Err(Error::Syntax {
                    pos: 0,
                    msg: "precision must be at least 1".into(),
                });
            }
            return Ok(StructureFamily::TruncatedPadic(k));
        }
        if t == "Zp" {
            return Ok(StructureFamily::TruncatedPadic(1));
        }
        if let Some(rest) = t.strip_prefix("Z/") {
            let n: u64 = rest.parse().map_err(|_| Error::Syntax {
                pos: 0,
                msg: format!("bad modulus in `{t}`"),
            })?;
            if n == 0 {
                return Err(Error::Syntax {
                    pos: 0,
                    msg: "ring modulus must be positive".into(),
                });
            }
            return Ok(StructureFamily::ModRing(n));
        }
        if let Some(rest) = t.strip_prefix("const:") {
            if let Some(n) = rest.strip_prefix("Z/") {
                let n: u64 = n.parse().map_err(|_| Error::Syntax {
                    pos: 0,
                    msg: format!("bad modulus in `{t}`"),
                })?;
                return Ok(StructureFamily::ConstantFinite(Arc::new(RingTable::cyclic(
                    n,
                ))));
            }
            return Err(Error::Syntax {
                pos: 0,
                msg: "const families take the form `const:Z/n`".into(),
            });
        }
        Err(Error::Syntax {
            pos: 0,
            msg: format!("unknown family `{t}` (expected Fp, Z/n, Zp^k, const:Z/n)"),
        })
    }
}

impl fmt::Display for StructureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructureFamily::PrimeField => write!(f, "Fp"),
            StructureFamily::ModRing(n) => write!(f, "Z/{n}"),
            StructureFamily::TruncatedPadic(k) => write!(f, "Zp^{k}"),
            StructureFamily::ConstantFinite(t) => write!(f, "const[{}]", t.size),
        }
    }
}

#[derive(Debug)]
enum StructureKind {
    Modular(u64),
    Table(Arc<RingTable>),
}

/// A materialized finite commutative ring. Elements are canonical residues
/// `0..size`; arithmetic is on demand for modular kinds and table lookup for
/// explicit ones.
#[derive(Debug)]
pub struct Structure {
    kind: StructureKind,
    size: u64,
}

impl Structure {
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn zero(&self) -> u64 {
        match &self.kind {
            StructureKind::Modular(_) => 0,
            StructureKind::Table(t) => t.zero,
        }
    }

    pub fn one(&self) -> u64 {
        match &self.kind {
            StructureKind::Modular(m) => {
                if *m == 1 {
                    0
                } else {
                    1
                }
            }
            StructureKind::Table(t) => t.one,
        }
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        match &self.kind {
            StructureKind::Modular(m) => {
                let s = (x as u128 + y as u128) % *m as u128;
                s as u64
            }
            StructureKind::Table(t) => t.add[t.idx(x, y)],
        }
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        match &self.kind {
            StructureKind::Modular(m) => ((x as u128 * y as u128) % *m as u128) as u64,
            StructureKind::Table(t) => t.mul[t.idx(x, y)],
        }
    }

    pub fn neg(&self, x: u64) -> u64 {
        match &self.kind {
            StructureKind::Modular(m) => (*m - x % *m) % *m,
            StructureKind::Table(t) => {
                // search is fine: tables are capped small
                (0..t.size)
                    .find(|&y| t.add[t.idx(x, y)] == t.zero)
                    .unwrap_or(t.zero)
            }
        }
    }

    /// Additive order of 1; the image of the integers in this ring is Z/ord.
    pub fn char_order(&self) -> u64 {
        match &self.kind {
            StructureKind::Modular(m) => *m,
            StructureKind::Table(t) => {
                let mut acc = t.one;
                let mut ord = 1;
                while acc != t.zero {
                    acc = t.add[t.idx(acc, t.one)];
                    ord += 1;
                    if ord > t.size + 1 {
                        // 1 does not generate a finite cyclic group under
                        // addition; only possible for corrupted tables
                        return t.size;
                    }
                }
                ord
            }
        }
    }

    /// Image of an arbitrary integer under the canonical map from Z.
    pub fn from_bigint(&self, v: &BigInt) -> u64 {
        match &self.kind {
            StructureKind::Modular(m) => {
                let m_big = BigInt::from(*m);
                v.mod_floor(&m_big).to_u64().expect("residue fits u64")
            }
            StructureKind::Table(t) => {
                let ord = self.char_order();
                let r = v
                    .mod_floor(&BigInt::from(ord))
                    .to_u64()
                    .expect("residue fits u64");
                let mut acc = t.zero;
                for _ in 0..r {
                    acc = t.add[t.idx(acc, t.one)];
                }
                acc
            }
        }
    }

    pub fn from_int(&self, v: i64) -> u64 {
        self.from_bigint(&BigInt::from(v))
    }

    /// Multiplicative inverse by exhaustive search, if one exists.
    pub fn inverse(&self, x: u64) -> Option<u64> {
        match &self.kind {
            StructureKind::Modular(m) => crate::arith::mod_inv(x, *m),
            StructureKind::Table(t) => (0..t.size).find(|&y| {
                t.mul[t.idx(x, y)] == t.one && t.mul[t.idx(y, x)] == t.one
            }),
        }
    }
}

/// Build the structure a family assigns to the prime `p`.
pub fn materialize(family: &StructureFamily, p: u64) -> Result<Structure> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    match family {
        StructureFamily::PrimeField => Ok(Structure {
            kind: StructureKind::Modular(p),
            size: p,
        }),
        StructureFamily::ModRing(n) => Ok(Structure {
            kind: StructureKind::Modular(*n),
            size: *n,
        }),
        StructureFamily::TruncatedPadic(k) => {
            let size = (p as u128).checked_pow(*k).filter(|&s| s <= SIZE_CAP as u128);
            match size {
                Some(s) => Ok(Structure {
                    kind: StructureKind::Modular(s as u64),
                    size: s as u64,
                }),
                None => Err(Error::StructureTooLarge {
                    size: (p as u128).pow(*k),
                    cap: SIZE_CAP,
                }),
            }
        }
        StructureFamily::ConstantFinite(t) => Ok(Structure {
            kind: StructureKind::Table(t.clone()),
            size: t.size,
        }),
    }
}

/// A ring-axiom violation found by exhaustive checking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingViolation {
    pub law: &'static str,
    pub witness: Vec<u64>,
}

impl fmt::Display for RingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated at {:?}", self.law, self.witness)
    }
}

/// Verify the commutative-ring axioms exhaustively. Only structures of size
/// at most 512 are accepted.
pub fn ring_selfcheck(s: &Structure) -> std::result::Result<(), RingViolation> {
    assert!(s.size <= 512, "selfcheck is exhaustive; size cap is 512");
    let n = s.size;
    let zero = s.zero();
    let one = s.one();
    for x in 0..n {
        if s.add(x, zero) != x {
            return Err(RingViolation {
                law: "additive identity",
                witness: vec![x],
            });
        }
        if s.mul(x, one) != x {
            return Err(RingViolation {
                law: "multiplicative identity",
                witness: vec![x],
            });
        }
        if s.add(x, s.neg(x)) != zero {
            return Err(RingViolation {
                law: "additive inverse",
                witness: vec![x],
            });
        }
        for y in 0..n {
            if s.add(x, y) != s.add(y, x) {
                return Err(RingViolation {
                    law: "additive commutativity",
                    witness: vec![x, y],
                });
            }
            if s.mul(x, y) != s.mul(y, x) {
                return Err(RingViolation {
                    law: "multiplicative commutativity",
                    witness: vec![x, y],
                });
            }
            for z in 0..n {
                if s.add(s.add(x, y), z) != s.add(x, s.add(y, z)) {
                    return Err(RingViolation {
                        law: "additive associativity",
                        witness: vec![x, y, z],
                    });
                }
                if s.mul(s.mul(x, y), z) != s.mul(x, s.mul(y, z)) {
                    return Err(RingViolation {
                        law: "multiplicative associativity",
                        witness: vec![x, y, z],
                    });
                }
                if s.mul(x, s.add(y, z)) != s.add(s.mul(x, y), s.mul(x, z)) {
                    return Err(RingViolation {
                        law: "distributivity",
                        witness: vec![x, y, z],
                    });
                }
            }
        }
    }
    Ok(())
}
