//! Linear integer arithmetic encoding of lasso-shaped schedules, an
//! SMT-LIB2 solver driver, and decoding of models back into counter-system
//! paths.
//!
//! Symbols: `p_<param>`, `k_<frame>_<location>`, `g_<frame>_<shared>` and
//! `d_<step>` for the factor of the step entering frame `<step>`.

mod decode;
mod encode;
mod sexp;
mod solver;

pub use decode::DecodedModel;
pub use encode::{
    encode_guard_frame, encode_init, encode_invariant_frames, encode_loop_closure, encode_step, prop_smt, push_segment,
    segment_rules, SmtQuery, Symbols,
};
pub use sexp::{parse_sexps, Sexp};
pub use solver::{SatResult, Solver};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmtError {
    #[error("cannot start solver: {0}")]
    Spawn(String),
    #[error("solver i/o: {0}")]
    Io(String),
    #[error("solver reported {0}")]
    Solver(String),
    #[error("unexpected solver output: {0}")]
    Protocol(String),
    #[error("model lacks a value for {0}")]
    MissingValue(String),
    #[error("model does not re-simulate at frame {frame}: {detail}")]
    Mismatch { frame: usize, detail: String },
}

/// Outcome of solving one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryResult {
    Sat(DecodedModel),
    Unsat,
    Unknown,
}

impl QueryResult {
    pub fn status(&self) -> &'static str {
        match self {
            QueryResult::Sat(_) => "sat",
            QueryResult::Unsat => "unsat",
            QueryResult::Unknown => "unknown",
        }
    }
}

/// Solves `query`; a satisfying model is decoded and re-simulated.
pub fn run_solver(query: &SmtQuery, solver: &Solver) -> Result<QueryResult, SmtError> {
    match solver.check(&query.script(), &query.symbols())? {
        SatResult::Sat(values) => {
            let model = DecodedModel::from_values(query, &values)?;
            model.resimulate(query.ta())?;
            Ok(QueryResult::Sat(model))
        }
        SatResult::Unsat => Ok(QueryResult::Unsat),
        SatResult::Unknown => Ok(QueryResult::Unknown),
    }
}

#[cfg(test)]
mod tests;
