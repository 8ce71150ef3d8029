//! The specification logic: existential formulas built from propositions
//! over counters and guards with `F`, `G` and conjunction.
//!
//! Formulas are brought into canonical form, turned into syntax trees and cut
//! graphs, and evaluated or witnessed on lasso-shaped paths.

mod ast;
mod canon;
mod cut;
mod lasso;
mod parse;

pub use ast::{eval_prop, show, CForm, Formula, GForm, GuardAtom, PForm, Prop, Show};
pub use canon::{
    canonicalize, syntax_tree, Canonical, CanonicalFormula, NodeId, NodeKind, RootKind, SyntaxTree, TreeNode,
};
pub use cut::{cut_graph, topological_orderings, CutGraph, CutVertex, Orderings};
pub use lasso::{check_witness, eval_on_lasso, unwinding, CutError, CutFunction, Lasso, LassoError, WitnessViolation};
pub use parse::{parse_formula, parse_spec, SpecError, SpecFile};

#[cfg(test)]
mod tests;
