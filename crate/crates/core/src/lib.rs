//! An exact engine for ultraproducts of finite algebraic structures indexed
//! by the primes.
//!
//! The engine evaluates first-order sentences over indexed families of finite
//! rings, classifies their truth under principal and non-principal
//! ultrafilters, performs exact arithmetic in the definable fragments of the
//! resulting ultraproduct rings, and constructs protoproducts of filtered
//! polynomial rings.
//!
//! Non-principal ultrafilters cannot be materialized (their existence is
//! independent of ZF), so they are represented by what one assumes about
//! them: a finite base of definable prime sets. Truth values are therefore
//! three-valued [`index_filters::Verdict`]s — forced true, forced false, or
//! contingent on the choice of ultrafilter — together with a provenance tag
//! saying whether the answer is an exact symbolic fact or window evidence.
//!
//! Module map:
//!
//! * [`index_filters`] — the decidable boolean algebra of definable prime
//!   sets (congruence classes plus finite corrections) and verdict semantics.
//! * [`structures`] — descriptors and materialization of the ring families
//!   `F_p`, `Z/n`, `Z/p^k`, and explicit constant rings.
//! * [`fol`] — formula language, parser, brute-force evaluator, truth sets,
//!   and verdicts via the transfer between per-index truth and ultraproduct
//!   truth.
//! * [`ultra`] — exact arithmetic on ultraproduct elements given by
//!   integer-valued polynomial value rules with finite exception tables.
//! * [`proto`] — protoproducts of filtered polynomial rings: the degree
//!   filtration and the monomial-count filtration with its ultra-natural
//!   grading.
//! * [`gen`] — deterministic random sentence generation for the property
//!   harnesses.

pub mod arith;
mod error;
pub mod fol;
pub mod gen;
pub mod index_filters;
pub mod proto;
pub mod structures;
pub mod ultra;

pub use error::{Error, Result};

#[cfg(test)]
mod thread_safety {
    // all engine values are immutable after construction and safe to share
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_sync() {
        assert_send_sync::<crate::index_filters::DefinableSet>();
        assert_send_sync::<crate::index_filters::FilterSpec>();
        assert_send_sync::<crate::index_filters::Verdict>();
        assert_send_sync::<crate::structures::StructureFamily>();
        assert_send_sync::<crate::structures::Structure>();
        assert_send_sync::<crate::fol::Formula>();
        assert_send_sync::<crate::fol::SampledTruthSet>();
        assert_send_sync::<crate::ultra::ValueRule>();
        assert_send_sync::<crate::ultra::UltraElement>();
        assert_send_sync::<crate::ultra::UltraNat>();
        assert_send_sync::<crate::proto::UltraPolynomial>();
        assert_send_sync::<crate::proto::UltraMonomialSum>();
        assert_send_sync::<crate::proto::BoundedPolySequence>();
    }
}
