//! Exact arithmetic in the definable fragments of ultraproduct rings.
//!
//! An element of an ultraproduct over the primes is an equivalence class of
//! sequences. The decidable fragment implemented here consists of sequences
//! given by a *value rule*: an integer-valued polynomial in the index prime
//! plus a finite table of exceptions. The class is closed under the ring
//! operations, realizes every rational number (via representatives such as
//! `(p+1)/2` for `1/2`), and admits exact equality testing: two rules agree
//! at cofinitely many primes or at finitely many, never in between, because
//! `u(p) = u(0) (mod p)` for any integer polynomial `u`.
//!
//! The full ultraproducts have cardinality continuum and are not
//! representable; requests that leave the fragment are reported as errors
//! rather than approximated.

mod element;
mod integers;
mod params;
mod rule;

pub use element::{Invertibility, UltraElement};
pub use integers::{ForcedOrdering, ResidueReport, UltraInt, UltraNat};
pub use params::eval_with_params;
pub use rule::ValueRule;
