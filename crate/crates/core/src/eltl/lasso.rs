//! Lassos `τ·ρ^ω`, formula evaluation on them, cut functions and witnesses.

use thiserror::Error;

use super::ast::{eval_prop, Formula, Prop};
use super::canon::{Canonical, CanonicalFormula, NodeId, RootKind, SyntaxTree};
use super::cut::{CutGraph, CutVertex};
use crate::counter::{apply_schedule, Configuration, CounterError, Transition};
use crate::ta::ThresholdAutomaton;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LassoError {
    #[error("schedule not applicable: {0}")]
    Blocked(#[from] CounterError),
    #[error("loop does not return to its start configuration")]
    NotClosed,
}

/// A finite representation of `path(start, prefix · cycle^ω)`.
///
/// Positions `0..len()` index configurations; position `len()` would equal
/// position `loop_start()`. An empty cycle denotes stuttering in the final
/// configuration of the prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<Transition>,
    pub cycle: Vec<Transition>,
    states: Vec<Configuration>,
}

impl Lasso {
    pub fn new(
        ta: &ThresholdAutomaton,
        start: &Configuration,
        prefix: Vec<Transition>,
        cycle: Vec<Transition>,
    ) -> Result<Lasso, LassoError> {
        let all: Vec<Transition> = prefix.iter().chain(&cycle).copied().collect();
        let path = apply_schedule(ta, start, &all)?;
        let mut states: Vec<Configuration> = path.configs().cloned().collect();
        let end = states.pop().expect("path has a start");
        if !cycle.is_empty() {
            if end != states[prefix.len()] {
                return Err(LassoError::NotClosed);
            }
        } else {
            states.push(end);
        }
        Ok(Lasso { prefix, cycle, states })
    }

    pub fn start(&self) -> &Configuration {
        &self.states[0]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn loop_start(&self) -> usize {
        self.prefix.len()
    }

    pub fn state(&self, i: usize) -> &Configuration {
        &self.states[i]
    }

    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    /// The same path with the loop unrolled `k` more times into the prefix
    /// and the loop itself repeated `m ≥ 1` times.
    pub fn unrolled(&self, k: usize, m: usize) -> Lasso {
        if self.cycle.is_empty() {
            return self.clone();
        }
        let mut prefix = self.prefix.clone();
        let mut states = self.states.clone();
        let loop_states: Vec<Configuration> = self.states[self.loop_start()..].to_vec();
        for _ in 0..k {
            prefix.extend(&self.cycle);
            states.extend(loop_states.iter().cloned());
        }
        let mut cycle = Vec::new();
        for _ in 0..m.max(1) {
            cycle.extend(&self.cycle);
        }
        for _ in 1..m.max(1) {
            states.extend(loop_states.iter().cloned());
        }
        Lasso { prefix, cycle, states }
    }

    /// Positions reachable from `i` (including `i`).
    fn future(&self, i: usize) -> std::ops::Range<usize> {
        i.min(self.loop_start())..self.len()
    }

    /// Truth value of `phi` at every position.
    pub fn truth(&self, phi: &Formula) -> Vec<bool> {
        match phi {
            Formula::Prop(p) => self.states.iter().map(|c| eval_prop(p, c)).collect(),
            Formula::And(xs) => {
                let mut acc = vec![true; self.len()];
                for x in xs {
                    for (a, b) in acc.iter_mut().zip(self.truth(x)) {
                        *a &= b;
                    }
                }
                acc
            }
            Formula::F(x) => {
                let t = self.truth(x);
                (0..self.len()).map(|i| self.future(i).any(|j| t[j])).collect()
            }
            Formula::G(x) => {
                let t = self.truth(x);
                (0..self.len()).map(|i| self.future(i).all(|j| t[j])).collect()
            }
        }
    }
}

/// Truth of `phi` at position 0 of the lasso.
pub fn eval_on_lasso(lasso: &Lasso, phi: &Formula) -> bool {
    lasso.truth(phi)[0]
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutError {
    #[error("cut function must assign every vertex")]
    Arity,
    #[error("loop_start must be cut at {expected}, got {got}")]
    LoopStart { expected: usize, got: usize },
    #[error("loop_end must be cut at {expected}, got {got}")]
    LoopEnd { expected: usize, got: usize },
    #[error("edge {from} -> {to} violated")]
    Edge { from: String, to: String },
    #[error("cut point {0} lies outside the lasso")]
    Range(usize),
}

/// Assignment of cut-graph vertices to lasso positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutFunction {
    values: Vec<usize>,
}

impl CutFunction {
    pub fn new(graph: &CutGraph, lasso: &Lasso, values: Vec<usize>) -> Result<Self, CutError> {
        if values.len() != graph.vertices.len() {
            return Err(CutError::Arity);
        }
        if let Some(&v) = values.iter().find(|&&v| v >= lasso.len()) {
            return Err(CutError::Range(v));
        }
        let ls = values[graph.loop_start()];
        if ls != lasso.loop_start() {
            return Err(CutError::LoopStart { expected: lasso.loop_start(), got: ls });
        }
        let le = values[graph.loop_end()];
        if le != lasso.len() - 1 {
            return Err(CutError::LoopEnd { expected: lasso.len() - 1, got: le });
        }
        for &(a, b) in &graph.edges {
            if values[a] > values[b] {
                return Err(CutError::Edge { from: graph.vertices[a].to_string(), to: graph.vertices[b].to_string() });
            }
        }
        Ok(CutFunction { values })
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn at(&self, graph: &CutGraph, v: &CutVertex) -> Option<usize> {
        graph.index(v).map(|i| self.values[i])
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WitnessViolation {
    #[error("root proposition false at the initial configuration")]
    RootProp,
    #[error("root invariant false at position {0}")]
    RootInvariant(usize),
    #[error("node {node}: proposition false at its cut point {at}")]
    NodeProp { node: String, at: usize },
    #[error("node {node}: invariant false at position {at}")]
    NodeInvariant { node: String, at: usize },
    #[error("cut graph vertex {0} is not a tree node")]
    UnknownNode(String),
}

fn body_of<'a>(tree: &'a SyntaxTree, id: &NodeId) -> Option<&'a Canonical> {
    tree.node(id).and_then(|n| n.body.as_ref())
}

fn check_inv(lasso: &Lasso, inv: &Prop, range: std::ops::Range<usize>) -> Result<(), usize> {
    for i in range {
        if !eval_prop(inv, lasso.state(i)) {
            return Err(i);
        }
    }
    Ok(())
}

/// Checks that `zeta` witnesses the canonical formula on the lasso.
///
/// Root: its proposition holds initially and its invariant everywhere (plain
/// roots only). Each F-node: its proposition holds at its cut point and its
/// invariant holds from the cut point to the end (prefix cut) or on the whole
/// loop (loop cut).
pub fn check_witness(
    lasso: &Lasso,
    c: &CanonicalFormula,
    tree: &SyntaxTree,
    graph: &CutGraph,
    zeta: &CutFunction,
) -> Result<(), WitnessViolation> {
    if c.kind == RootKind::Plain {
        if !eval_prop(&c.body.prop, lasso.start()) {
            return Err(WitnessViolation::RootProp);
        }
        check_inv(lasso, &c.body.g_prop(), 0..lasso.len()).map_err(WitnessViolation::RootInvariant)?;
    }
    for (i, v) in graph.vertices.iter().enumerate() {
        let CutVertex::Node(id) = v else { continue };
        let body = body_of(tree, id).ok_or_else(|| WitnessViolation::UnknownNode(id.to_string()))?;
        let at = zeta.values()[i];
        if !eval_prop(&body.prop, lasso.state(at)) {
            return Err(WitnessViolation::NodeProp { node: id.to_string(), at });
        }
        let range = if at < lasso.loop_start() { at..lasso.len() } else { lasso.loop_start()..lasso.len() };
        check_inv(lasso, &body.g_prop(), range)
            .map_err(|at| WitnessViolation::NodeInvariant { node: id.to_string(), at })?;
    }
    Ok(())
}

/// Builds a witness by extreme appearances: the loop is unrolled into the
/// prefix once per uncovered F-node and repeated once per covered F-node;
/// then each F-node, taken in reverse topological order, is cut at the
/// rightmost position not after its successors where its formula holds.
///
/// Returns `None` when the lasso does not satisfy the formula.
pub fn unwinding(
    lasso: &Lasso,
    c: &CanonicalFormula,
    tree: &SyntaxTree,
    graph: &CutGraph,
) -> Option<(Lasso, CutFunction)> {
    if !eval_on_lasso(lasso, &c.to_formula()) {
        return None;
    }
    let n = graph.vertices.len();
    let ncov = graph.covered.iter().filter(|&&b| b).count();
    let nun = (0..n).filter(|&i| matches!(graph.vertices[i], CutVertex::Node(_)) && !graph.covered[i]).count();
    let lasso = lasso.unrolled(nun, ncov.max(1));
    let ls = graph.loop_start();
    let le = graph.loop_end();

    let mut values = vec![usize::MAX; n];
    values[ls] = lasso.loop_start();
    values[le] = lasso.len() - 1;
    let order = graph.orderings().next()?;
    for &v in order.iter().rev() {
        let CutVertex::Node(id) = &graph.vertices[v] else { continue };
        let body = body_of(tree, id)?;
        let holds = lasso.truth(&body.to_formula());
        let hi = graph.edges.iter().filter(|&&(a, _)| a == v).map(|&(_, b)| values[b]).min().unwrap_or(lasso.len() - 1);
        let lo = if graph.covered[v] { lasso.loop_start() } else { 0 };
        values[v] = (lo..=hi).rev().find(|&j| holds[j])?;
    }
    let zeta = CutFunction::new(graph, &lasso, values).ok()?;
    Some((lasso, zeta))
}
