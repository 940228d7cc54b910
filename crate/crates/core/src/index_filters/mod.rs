//! Decidable algebra of definable prime sets, ultrafilter specifications,
//! and the three-valued verdict semantics built on them.

mod filter;
mod set;

pub use filter::{
    check_filter_base, classify, partition_verdicts, BaseCheck, FilterSpec, Provenance, Verdict,
    VerdictValue,
};
pub use set::DefinableSet;
