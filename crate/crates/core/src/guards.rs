//! Contexts, the threshold graph over guards, merged shape graphs, and
//! multipliers.
//!
//! Guards are referred to by their index in [`ThresholdAutomaton::guards`].
//! A context records which lower guards have risen and which upper guards
//! have fallen; along any path it only grows.

use std::collections::BTreeSet;
use std::fmt;

use crate::counter::{apply_schedule, Configuration, CounterError, Transition};
use crate::eltl::{CutGraph, CutVertex, Orderings};
use crate::smt::{SatResult, SmtError, SmtQuery, Solver, Symbols};
use crate::ta::{Guard, GuardKind, Rule, ThresholdAutomaton};

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Context {
    /// Lower guards that hold.
    pub risen: BTreeSet<usize>,
    /// Upper guards that no longer hold.
    pub fallen: BTreeSet<usize>,
}

impl Context {
    pub fn is_subset(&self, other: &Context) -> bool {
        self.risen.is_subset(&other.risen) && self.fallen.is_subset(&other.fallen)
    }

    pub fn len(&self) -> usize {
        self.risen.len() + self.fallen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records guard `i` as toggled.
    pub fn toggle(&mut self, i: usize, guards: &[Guard]) {
        match guards[i].kind {
            GuardKind::Lower => self.risen.insert(i),
            GuardKind::Upper => self.fallen.insert(i),
        };
    }

    /// Whether a configuration in this context satisfies the rule's guards:
    /// every lower guard has risen and no upper guard has fallen.
    pub fn unlocks(&self, rule: &Rule, guards: &[Guard]) -> bool {
        let idx = |g: &Guard| guards.iter().position(|x| x == g);
        rule.lower.iter().all(|g| idx(g).is_some_and(|i| self.risen.contains(&i)))
            && rule.upper.iter().all(|g| idx(g).is_some_and(|i| !self.fallen.contains(&i)))
    }

    /// Lower guards that have not risen and upper guards that have not
    /// fallen.
    pub fn untoggled(&self, guards: &[Guard]) -> (Vec<Guard>, Vec<Guard>) {
        let mut low = Vec::new();
        let mut up = Vec::new();
        for (i, g) in guards.iter().enumerate() {
            match g.kind {
                GuardKind::Lower if !self.risen.contains(&i) => low.push(g.clone()),
                GuardKind::Upper if !self.fallen.contains(&i) => up.push(g.clone()),
                _ => {}
            }
        }
        (low, up)
    }
}

pub fn context_of(ta: &ThresholdAutomaton, s: &Configuration) -> Context {
    context_with(&ta.guards(), s)
}

pub(crate) fn context_with(guards: &[Guard], s: &Configuration) -> Context {
    let mut ctx = Context::default();
    for (i, g) in guards.iter().enumerate() {
        let holds = g.holds(&s.g, &s.p);
        match g.kind {
            GuardKind::Lower if holds => {
                ctx.risen.insert(i);
            }
            GuardKind::Upper if !holds => {
                ctx.fallen.insert(i);
            }
            _ => {}
        }
    }
    ctx
}

/// Whether every configuration along `path(s, tau)` has the same context.
pub fn is_steady(ta: &ThresholdAutomaton, s: &Configuration, tau: &[Transition]) -> Result<bool, CounterError> {
    let guards = ta.guards();
    let path = apply_schedule(ta, s, tau)?;
    let first = context_with(&guards, s);
    let steady = path.configs().all(|c| context_with(&guards, c) == first);
    Ok(steady)
}

/// Guard precedence: vertices are classes of equivalent guards, and an edge
/// `(a, b)` says that `a` necessarily toggles no later than `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdGraph {
    /// Guards of the automaton, as indexed by the classes.
    pub guards: Vec<Guard>,
    /// Each vertex is a set of mutually equivalent guard indices.
    pub vertices: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl ThresholdGraph {
    /// Vertex holding guard `g`.
    pub fn vertex_of(&self, g: usize) -> Option<usize> {
        self.vertices.iter().position(|v| v.contains(&g))
    }

    pub fn render(&self, ta: &ThresholdAutomaton, v: usize) -> String {
        self.vertices[v].iter().map(|&i| self.guards[i].render(ta)).collect::<Vec<_>>().join(" == ")
    }
}

fn undecided(what: &str) -> SmtError {
    SmtError::Solver(format!("unknown while checking {what}"))
}

/// Whether `premise ∧ ¬conclusion` is unsatisfiable for admissible
/// parameters and non-negative shared variables.
fn entails(ta: &ThresholdAutomaton, solver: &Solver, premise: &Guard, conclusion: &Guard) -> Result<bool, SmtError> {
    let s = Symbols::new(ta);
    let mut q = SmtQuery::bare(ta);
    q.assert(ta.resilience.smt(&|i| s.param(i)));
    q.assert(format!("(>= {} 0)", ta.size.smt(|i| s.param(i))));
    q.assert(s.guard(0, premise));
    q.assert(format!("(not {})", s.guard(0, conclusion)));
    match solver.check(&q.script(), &[])? {
        SatResult::Unsat => Ok(true),
        SatResult::Sat(_) => Ok(false),
        SatResult::Unknown => Err(undecided("guard entailment")),
    }
}

/// Builds the threshold graph with one entailment query per ordered pair of
/// same-kind guards. A lower guard implied by another rises first; an upper
/// guard implying another falls first.
#[allow(clippy::needless_range_loop)]
pub fn threshold_graph(ta: &ThresholdAutomaton, solver: &Solver) -> Result<ThresholdGraph, SmtError> {
    let guards = ta.guards();
    let n = guards.len();
    // before[a][b]: guard a toggles no later than guard b
    let mut before = vec![vec![false; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b || guards[a].kind != guards[b].kind {
                continue;
            }
            before[a][b] = match guards[a].kind {
                GuardKind::Lower => entails(ta, solver, &guards[b], &guards[a])?,
                GuardKind::Upper => entails(ta, solver, &guards[a], &guards[b])?,
            };
        }
    }
    let mut vertices: Vec<Vec<usize>> = Vec::new();
    for g in 0..n {
        match vertices.iter_mut().find(|v| before[v[0]][g] && before[g][v[0]]) {
            Some(v) => v.push(g),
            None => vertices.push(vec![g]),
        }
    }
    let mut edges = Vec::new();
    for (i, a) in vertices.iter().enumerate() {
        for (j, b) in vertices.iter().enumerate() {
            if i != j && before[a[0]][b[0]] {
                edges.push((i, j));
            }
        }
    }
    Ok(ThresholdGraph { guards, vertices, edges })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShapeVertex {
    Cut(CutVertex),
    /// Vertex of the threshold graph.
    Guard(usize),
}

impl fmt::Display for ShapeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeVertex::Cut(v) => write!(f, "{v}"),
            ShapeVertex::Guard(i) => write!(f, "guard#{i}"),
        }
    }
}

/// Union of a cut graph and a threshold graph sharing `loop_start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedGraph {
    pub vertices: Vec<ShapeVertex>,
    pub edges: Vec<(usize, usize)>,
    pub loop_start: usize,
}

impl MergedGraph {
    /// Orderings in which guards placed after `loop_start` are dropped, so
    /// each ordering lists exactly the guards that toggle before the loop.
    pub fn orderings(&self) -> Orderings {
        let droppable = self.vertices.iter().map(|v| matches!(v, ShapeVertex::Guard(_))).collect();
        Orderings::new(self.vertices.len(), &self.edges).with_drop_after(self.loop_start, droppable)
    }
}

pub fn merge_graphs(cut: &CutGraph, th: &ThresholdGraph) -> MergedGraph {
    let mut vertices: Vec<ShapeVertex> = cut.vertices.iter().cloned().map(ShapeVertex::Cut).collect();
    let off = vertices.len();
    vertices.extend((0..th.vertices.len()).map(ShapeVertex::Guard));
    let mut edges = cut.edges.clone();
    edges.extend(th.edges.iter().map(|&(a, b)| (a + off, b + off)));
    MergedGraph { vertices, edges, loop_start: cut.loop_start() }
}

/// Smallest `μ` in `2..=max` such that every guard is preserved by scaling
/// shared variables and parameters by `μ`, and the resilience condition is
/// preserved by scaling parameters.
pub fn find_multiplier(ta: &ThresholdAutomaton, solver: &Solver, max: i64) -> Result<Option<i64>, SmtError> {
    let guards = ta.guards();
    let s = Symbols::new(ta);
    let scaled = |mu: i64| move |i: usize| format!("(* {mu} {})", s.param(i));
    'candidates: for mu in 2..=max {
        for g in &guards {
            let mut q = SmtQuery::bare(ta);
            q.assert(ta.resilience.smt(&|i| s.param(i)));
            q.assert(s.guard(0, g));
            let x = format!("(* {mu} {})", s.shared(0, g.var));
            q.assert(format!("(not {})", g.smt(&x, scaled(mu))));
            match solver.check(&q.script(), &[])? {
                SatResult::Unsat => {}
                SatResult::Sat(_) => continue 'candidates,
                SatResult::Unknown => return Err(undecided("a multiplier")),
            }
        }
        let mut q = SmtQuery::bare(ta);
        q.assert(ta.resilience.smt(&|i| s.param(i)));
        q.assert(format!("(not {})", ta.resilience.smt(&scaled(mu))));
        match solver.check(&q.script(), &[])? {
            SatResult::Unsat => return Ok(Some(mu)),
            SatResult::Sat(_) => {}
            SatResult::Unknown => return Err(undecided("a multiplier")),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::apply;
    use crate::ta::parse_ta;

    fn strb() -> ThresholdAutomaton {
        parse_ta(include_str!("../../../benchmarks/strb.ta")).unwrap()
    }

    #[test]
    fn strb_contexts() {
        let ta = strb();
        let s = Configuration { kappa: vec![0, 3, 0, 0], g: vec![0], p: vec![4, 1, 1] };
        assert!(context_of(&ta, &s).is_empty());
        let r1 = ta.rule("r1").unwrap();
        let s1 = apply(&ta, &s, Transition::new(r1, 1)).unwrap();
        assert_eq!(context_of(&ta, &s1).risen, BTreeSet::from([0]));
        let s2 = apply(&ta, &s, Transition::new(r1, 2)).unwrap();
        assert_eq!(context_of(&ta, &s2).risen, BTreeSet::from([0, 1]));
        assert!(is_steady(&ta, &s, &[Transition::new(r1, 0)]).unwrap());
        assert!(!is_steady(&ta, &s, &[Transition::new(r1, 1)]).unwrap());
    }

    #[test]
    fn unlocks_by_context() {
        let ta = strb();
        let guards = ta.guards();
        let mut ctx = Context::default();
        let r2 = &ta.rules[ta.rule("r2").unwrap()];
        let r4 = &ta.rules[ta.rule("r4").unwrap()];
        assert!(ctx.unlocks(&ta.rules[0], &guards));
        assert!(!ctx.unlocks(r2, &guards));
        ctx.toggle(0, &guards);
        assert!(ctx.unlocks(r2, &guards) && !ctx.unlocks(r4, &guards));
        let (low, up) = ctx.untoggled(&guards);
        assert_eq!((low.len(), up.len()), (1, 0));
    }
}
