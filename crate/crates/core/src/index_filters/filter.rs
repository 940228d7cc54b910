//! Ultrafilter specifications and verdict semantics.
//!
//! Principal ultrafilters are the only ones that can be materialized; a
//! non-principal ultrafilter is described by what we are willing to assume
//! about it: a finite base of definable sets it must contain (every
//! non-principal ultrafilter already contains all cofinite sets). A verdict
//! classifies a definable set against such a specification: forced in, forced
//! out, or contingent on how the base extends to a full ultrafilter.

use std::fmt;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::index_filters::DefinableSet;

/// Specification of an ultrafilter on the primes.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterSpec {
    /// The sets containing a fixed prime.
    Principal(u64),
    /// Any non-principal ultrafilter, nothing further assumed.
    Generic,
    /// Any non-principal ultrafilter containing every listed set.
    Constrained(Vec<DefinableSet>),
}

impl FilterSpec {
    pub fn principal(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(FilterSpec::Principal(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// The assumption base, `Generic` being the empty-base case.
    pub fn assumptions(&self) -> &[DefinableSet] {
        match self {
            FilterSpec::Constrained(sets) => sets,
            _ => &[],
        }
    }

    /// Intersection of the assumption base, checked infinite.
    pub fn base_intersection(&self) -> Result<DefinableSet> {
        let mut base = DefinableSet::all();
        for s in self.assumptions() {
            base = base.intersect(s);
        }
        if base.is_finite() {
            return Err(Error::InconsistentBase { witness: base });
        }
        Ok(base)
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterSpec::Principal(p) => write!(f, "principal:{p}"),
            FilterSpec::Generic => write!(f, "generic"),
            FilterSpec::Constrained(sets) => {
                write!(f, "constrained[")?;
                for (i, s) in sets.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictValue {
    ForcedTrue,
    ForcedFalse,
    Contingent,
}

/// Where a verdict came from: an exact symbolic argument, or window evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Exact,
    Empirical { window: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub value: VerdictValue,
    /// When contingent: the definable set on which the statement holds
    /// (within the assumption base).
    pub decomposition: Option<DefinableSet>,
    pub provenance: Provenance,
}

impl Verdict {
    pub fn forced(truth: bool, provenance: Provenance) -> Self {
        Verdict {
            value: if truth {
                VerdictValue::ForcedTrue
            } else {
                VerdictValue::ForcedFalse
            },
            decomposition: None,
            provenance,
        }
    }

    pub fn contingent(on: DefinableSet, provenance: Provenance) -> Self {
        Verdict {
            value: VerdictValue::Contingent,
            decomposition: Some(on),
            provenance,
        }
    }

    pub fn is_forced_true(&self) -> bool {
        self.value == VerdictValue::ForcedTrue
    }

    pub fn is_forced_false(&self) -> bool {
        self.value == VerdictValue::ForcedFalse
    }

    pub fn is_contingent(&self) -> bool {
        self.value == VerdictValue::Contingent
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            VerdictValue::ForcedTrue => write!(f, "ForcedTrue")?,
            VerdictValue::ForcedFalse => write!(f, "ForcedFalse")?,
            VerdictValue::Contingent => {
                write!(f, "Contingent")?;
                if let Some(d) = &self.decomposition {
                    write!(f, " on {d}")?;
                }
            }
        }
        match self.provenance {
            Provenance::Exact => write!(f, " [exact]"),
            Provenance::Empirical { window } => write!(f, " [empirical <= {window}]"),
        }
    }
}

/// Outcome of [`check_filter_base`].
#[derive(Debug, Clone, PartialEq)]
pub enum BaseCheck {
    Consistent,
    /// The finite intersection witnessing inconsistency.
    Inconsistent { witness: DefinableSet },
}

/// A list of assumptions is usable as a filter base iff their intersection is
/// infinite; completion to an actual ultrafilter is non-constructive and
/// never attempted. The empty list is consistent.
pub fn check_filter_base(assumptions: &[DefinableSet]) -> BaseCheck {
    let mut base = DefinableSet::all();
    for s in assumptions {
        base = base.intersect(s);
    }
    if base.is_finite() {
        BaseCheck::Inconsistent { witness: base }
    } else {
        BaseCheck::Consistent
    }
}

/// Classify membership of `set` in an ultrafilter matching `filter`.
///
/// Principal: forced by membership of the point. Otherwise, with base
/// intersection `B` (all primes for `Generic`): forced true when `B \ set` is
/// finite, forced false when `B ∩ set` is finite, contingent on `B ∩ set`
/// otherwise.
pub fn classify(set: &DefinableSet, filter: &FilterSpec) -> Result<Verdict> {
    match filter {
        FilterSpec::Principal(p) => {
            if !is_prime(*p) {
                return Err(Error::NotPrime(*p));
            }
            Ok(Verdict::forced(set.contains(*p), Provenance::Exact))
        }
        FilterSpec::Generic | FilterSpec::Constrained(_) => {
            let base = filter.base_intersection()?;
            if base.difference(set).is_finite() {
                return Ok(Verdict::forced(true, Provenance::Exact));
            }
            let inside = base.intersect(set);
            if inside.is_finite() {
                return Ok(Verdict::forced(false, Provenance::Exact));
            }
            Ok(Verdict::contingent(inside, Provenance::Exact))
        }
    }
}

/// Classify every part of a finite partition of the primes. Under a principal
/// filter exactly one part is forced true; under any specification at most
/// one is.
pub fn partition_verdicts(parts: &[DefinableSet], filter: &FilterSpec) -> Result<Vec<Verdict>> {
    let mut union = DefinableSet::empty();
    for (i, part) in parts.iter().enumerate() {
        for (j, other) in parts.iter().enumerate().skip(i + 1) {
            if !part.intersect(other).is_empty() {
                return Err(Error::NotPartition {
                    reason: format!("parts {i} and {j} overlap"),
                });
            }
        }
        union = union.union(part);
    }
    if !union.is_all() {
        return Err(Error::NotPartition {
            reason: "parts do not cover all primes".into(),
        });
    }
    parts.iter().map(|part| classify(part, filter)).collect()
}
