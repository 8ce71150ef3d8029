//! Short representative schedules.
//!
//! A steady schedule can be replaced by a bounded-length accelerated one
//! ([`srep`]) that reaches the same configuration. The `repr_*` functions
//! additionally keep a propositional invariant true in every visited
//! configuration. They work by splitting the schedule into threads (the
//! moves of a single process), moving a well-chosen thread to the front, and
//! taking representatives of the pieces.

mod repr;
mod srep;
mod threads;

use thiserror::Error;

use crate::counter::{Configuration, CounterError, Transition};
use crate::ta::ThresholdAutomaton;

pub use repr::{
    all_zero_holds, disjunction_holds, repr_all_zero, repr_conj_disj, repr_disjunction, Repr, ReprCase, ScaledRepr,
};
pub use srep::srep;
pub use threads::{classify_thread, decompose, is_thread, move_thread_front, validate_naming, Naming, ThreadType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error(transparent)]
    Counter(#[from] CounterError),
    #[error("schedule is not steady")]
    NotSteady,
    #[error("schedule has a transition with factor other than one")]
    NotConventional,
    #[error("{0} is not a thread of the decomposition")]
    NotAThread(usize),
    #[error("invalid naming: {0}")]
    InvalidNaming(String),
    #[error("invariant fails after {prefix} transitions")]
    InvariantViolated { prefix: usize },
    #[error("the automaton has no multiplier")]
    NoMultiplier,
    #[error("representative does not reach the final configuration (is every cycle simple?)")]
    Unsupported,
}

/// Configurations visited by `tau` from `s`, checking applicability.
pub(crate) fn visited(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
) -> Result<Vec<Configuration>, ReductionError> {
    let path = crate::counter::apply_schedule(ta, s, tau)?;
    Ok(path.configs().cloned().collect())
}

/// Checks that `tau` is applicable to `s`, steady, and (if asked)
/// conventional.
pub(crate) fn check_steady(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    conventional: bool,
) -> Result<Vec<Configuration>, ReductionError> {
    if conventional && !crate::counter::is_conventional(tau) {
        return Err(ReductionError::NotConventional);
    }
    let configs = visited(ta, s, tau)?;
    let guards = ta.guards();
    let first = crate::guards::context_with(&guards, s);
    if configs.iter().any(|c| crate::guards::context_with(&guards, c) != first) {
        return Err(ReductionError::NotSteady);
    }
    Ok(configs)
}
