//! Parameterized model checking of threshold automata.
//!
//! The crate checks existential temporal formulas (counterexamples to safety
//! and liveness) against a threshold automaton for all admissible parameter
//! values. Candidate counterexamples are lasso shaped; their shapes come from
//! the formula's cut graph merged with the guard order of the automaton, and
//! each shape is discharged as a linear integer arithmetic query.
//!
//! An explicit-state oracle for fixed parameters and a schedule-reduction
//! engine are exposed for independent cross-checking.

pub mod counter;
pub mod eltl;
pub mod guards;
mod lex;
pub mod oracle;
pub mod reduction;
pub mod smt;
pub mod ta;
pub mod verifier;

pub use lex::Pos;
