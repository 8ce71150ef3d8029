//! Explicit-state exploration for fixed parameters, used as an independent
//! check of the symbolic verifier.
//!
//! Only conventional (factor one) transitions are explored. Three formula
//! patterns are supported: reaching a bad state, staying forever in a region
//! while visiting a fair state infinitely often, and reaching a trigger state
//! after which the same holds.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counter::{apply, initial_configs, Configuration, CounterError, Transition};
use crate::eltl::{eval_prop, Canonical, CanonicalFormula, Lasso, LassoError, Prop, RootKind};
use crate::ta::{tarjan, ThresholdAutomaton};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Counter(#[from] CounterError),
    #[error("state budget of {0} configurations exceeded")]
    Budget(usize),
    #[error("formula does not match a supported pattern")]
    Unsupported,
}

/// Reachable configurations and factor-one transitions between them.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    pub states: Vec<Configuration>,
    /// Outgoing `(rule, target)` pairs per state.
    pub succ: Vec<Vec<(usize, usize)>>,
    /// Indices of the initial configurations.
    pub initial: Vec<usize>,
}

impl ReachGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

type Key = (Vec<i64>, Vec<i64>);

fn key(c: &Configuration) -> Key {
    (c.kappa.clone(), c.g.clone())
}

/// Breadth-first exploration from every initial configuration.
pub fn enumerate_reachable(ta: &ThresholdAutomaton, params: &[i64], budget: usize) -> Result<ReachGraph, OracleError> {
    let init = initial_configs(ta, params)?;
    let mut index: HashMap<Key, usize> = HashMap::new();
    let mut g = ReachGraph { states: Vec::new(), succ: Vec::new(), initial: Vec::new() };
    let mut queue = VecDeque::new();
    let mut intern = |c: Configuration, g: &mut ReachGraph, queue: &mut VecDeque<usize>| {
        if let Some(&i) = index.get(&key(&c)) {
            return Ok(i);
        }
        if g.states.len() >= budget {
            return Err(OracleError::Budget(budget));
        }
        let i = g.states.len();
        index.insert(key(&c), i);
        g.states.push(c);
        g.succ.push(Vec::new());
        queue.push_back(i);
        Ok(i)
    };
    for c in init.iter() {
        let i = intern(c, &mut g, &mut queue)?;
        g.initial.push(i);
    }
    while let Some(i) = queue.pop_front() {
        for r in 0..ta.rules.len() {
            if let Ok(next) = apply(ta, &g.states[i], Transition::new(r, 1)) {
                let j = intern(next, &mut g, &mut queue)?;
                g.succ[i].push((r, j));
            }
        }
    }
    Ok(g)
}

/// The supported shapes of existential formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecPattern {
    /// `init ∧ F target`.
    Unsafety { init: Prop, target: Prop },
    /// `init ∧ G (inv ∧ F fair)`.
    NonTermination { init: Prop, inv: Prop, fair: Prop },
    /// `init ∧ G F fair ∧ F (trigger ∧ G inv)`.
    NonResponse { init: Prop, fair: Prop, trigger: Prop, inv: Prop },
}

fn leaf_prop(c: &Canonical) -> Option<Prop> {
    (c.fs.is_empty() && c.g.is_none()).then(|| c.prop.clone())
}

/// `G (q ∧ F r)` with `r` optional, as `(q, r)`.
fn g_fair(g: &Option<Box<Canonical>>) -> Option<(Prop, Prop)> {
    match g {
        None => Some((Vec::new(), Vec::new())),
        Some(g) => match g.fs.as_slice() {
            [] => Some((g.prop.clone(), Vec::new())),
            [r] => Some((g.prop.clone(), leaf_prop(r)?)),
            _ => None,
        },
    }
}

/// Classifies a canonical formula into one of the supported patterns.
pub fn pattern_of(c: &CanonicalFormula) -> Option<SpecPattern> {
    let body = &c.body;
    if c.kind == RootKind::F {
        return Some(SpecPattern::Unsafety { init: Vec::new(), target: leaf_prop(body)? });
    }
    match body.fs.as_slice() {
        [] => {
            let (inv, fair) = g_fair(&body.g)?;
            Some(SpecPattern::NonTermination { init: body.prop.clone(), inv, fair })
        }
        [f] if body.g.is_none() && f.g.is_none() => {
            Some(SpecPattern::Unsafety { init: body.prop.clone(), target: leaf_prop(f)? })
        }
        [f] => {
            let (root_inv, fair) = g_fair(&body.g)?;
            if !root_inv.is_empty() || !f.fs.is_empty() {
                return None;
            }
            let (inv, nested_fair) = g_fair(&f.g)?;
            if !nested_fair.is_empty() {
                return None;
            }
            Some(SpecPattern::NonResponse { init: body.prop.clone(), fair, trigger: f.prop.clone(), inv })
        }
        _ => None,
    }
}

/// A concrete lasso found by the oracle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessLasso {
    pub params: Vec<i64>,
    pub prefix: Vec<Transition>,
    #[serde(rename = "loop")]
    pub cycle: Vec<Transition>,
    /// Start configuration followed by one configuration per transition.
    pub states: Vec<Configuration>,
}

impl WitnessLasso {
    pub fn lasso(&self, ta: &ThresholdAutomaton) -> Result<Lasso, LassoError> {
        Lasso::new(ta, &self.states[0], self.prefix.clone(), self.cycle.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Verified,
    Witness(WitnessLasso),
}

/// Shortest path (as edge list) from any of `starts` to a state accepted by
/// `goal`, moving only through states accepted by `allowed`.
fn bfs(
    g: &ReachGraph,
    starts: &[usize],
    allowed: impl Fn(usize) -> bool,
    goal: impl Fn(usize) -> bool,
) -> Option<(usize, Vec<(usize, usize)>)> {
    let mut parent: HashMap<usize, Option<(usize, usize)>> = HashMap::new();
    let mut queue = VecDeque::new();
    for &s in starts {
        if allowed(s) && !parent.contains_key(&s) {
            parent.insert(s, None);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut edges = Vec::new();
            let mut cur = v;
            while let Some(Some((p, r))) = parent.get(&cur).copied() {
                edges.push((r, cur));
                cur = p;
            }
            edges.reverse();
            let start = cur;
            // the first entry only carries the start state
            let mut path = vec![(usize::MAX, start)];
            path.extend(edges);
            return Some((start, path));
        }
        for &(r, w) in &g.succ[v] {
            if allowed(w) && !parent.contains_key(&w) {
                parent.insert(w, Some((v, r)));
                queue.push_back(w);
            }
        }
    }
    None
}

/// States of non-trivial SCCs (within `allowed`) that contain a fair state;
/// returns, per state, whether it is such a fair state.
fn fair_cycle_states(g: &ReachGraph, allowed: &[bool], fair: &[bool]) -> Vec<bool> {
    let succ: Vec<Vec<usize>> = (0..g.len())
        .map(|v| {
            if !allowed[v] {
                return Vec::new();
            }
            g.succ[v].iter().map(|&(_, w)| w).filter(|&w| allowed[w]).collect()
        })
        .collect();
    let comp = tarjan(&succ);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut size = vec![0usize; ncomp];
    let mut self_edge = vec![false; ncomp];
    for v in 0..g.len() {
        size[comp[v]] += 1;
        if succ[v].contains(&v) {
            self_edge[comp[v]] = true;
        }
    }
    (0..g.len()).map(|v| allowed[v] && fair[v] && (size[comp[v]] > 1 || self_edge[comp[v]])).collect()
}

/// A cycle from `v` back to itself inside `v`'s component.
fn cycle_through(g: &ReachGraph, allowed: &[bool], v: usize) -> Vec<(usize, usize)> {
    if let Some(&(r, _)) = g.succ[v].iter().find(|&&(_, w)| w == v) {
        return vec![(r, v)];
    }
    for &(r, w) in &g.succ[v] {
        if !allowed[w] {
            continue;
        }
        if let Some((_, path)) = bfs(g, &[w], |x| allowed[x], |x| x == v) {
            let mut out = vec![(r, w)];
            out.extend(path.into_iter().skip(1));
            return out;
        }
    }
    unreachable!("state lies on a non-trivial component")
}

fn witness(g: &ReachGraph, params: &[i64], prefix: &[(usize, usize)], cycle: &[(usize, usize)]) -> WitnessLasso {
    let mut states = vec![g.states[prefix[0].1].clone()];
    let mut pre = Vec::new();
    for &(r, s) in &prefix[1..] {
        pre.push(Transition::new(r, 1));
        states.push(g.states[s].clone());
    }
    let mut cyc = Vec::new();
    for &(r, s) in cycle {
        cyc.push(Transition::new(r, 1));
        states.push(g.states[s].clone());
    }
    WitnessLasso { params: params.to_vec(), prefix: pre, cycle: cyc, states }
}

/// Searches for a lasso satisfying `pattern` at fixed parameters.
pub fn oracle_check(
    ta: &ThresholdAutomaton,
    params: &[i64],
    pattern: &SpecPattern,
    budget: usize,
) -> Result<OracleVerdict, OracleError> {
    let g = enumerate_reachable(ta, params, budget)?;
    let holds = |p: &Prop| -> Vec<bool> { g.states.iter().map(|c| eval_prop(p, c)).collect() };
    let found = match pattern {
        SpecPattern::Unsafety { init, target } => {
            let init = holds(init);
            let target = holds(target);
            let starts: Vec<usize> = g.initial.iter().copied().filter(|&s| init[s]).collect();
            bfs(&g, &starts, |_| true, |v| target[v]).map(|(_, path)| (path, Vec::new()))
        }
        SpecPattern::NonTermination { init, inv, fair } => {
            let (init, inv, fair) = (holds(init), holds(inv), holds(fair));
            let good = fair_cycle_states(&g, &inv, &fair);
            let starts: Vec<usize> = g.initial.iter().copied().filter(|&s| init[s]).collect();
            bfs(&g, &starts, |v| inv[v], |v| good[v]).map(|(_, path)| {
                let end = path.last().unwrap().1;
                (path, cycle_through(&g, &inv, end))
            })
        }
        SpecPattern::NonResponse { init, fair, trigger, inv } => {
            let (init, fair, trigger, inv) = (holds(init), holds(fair), holds(trigger), holds(inv));
            let good = fair_cycle_states(&g, &inv, &fair);
            // states from which a good state is reachable inside `inv`
            let mut can_finish = vec![false; g.len()];
            for v in 0..g.len() {
                if trigger[v] && inv[v] {
                    can_finish[v] = bfs(&g, &[v], |x| inv[x], |x| good[x]).is_some();
                }
            }
            let starts: Vec<usize> = g.initial.iter().copied().filter(|&s| init[s]).collect();
            bfs(&g, &starts, |_| true, |v| can_finish[v]).map(|(_, mut path)| {
                let mid = path.last().unwrap().1;
                let (_, tail) = bfs(&g, &[mid], |x| inv[x], |x| good[x]).expect("checked above");
                path.extend(tail.into_iter().skip(1));
                let end = path.last().unwrap().1;
                (path, cycle_through(&g, &inv, end))
            })
        }
    };
    Ok(match found {
        Some((prefix, cycle)) => OracleVerdict::Witness(witness(&g, params, &prefix, &cycle)),
        None => OracleVerdict::Verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eltl::{canonicalize, parse_formula, CForm, PForm};
    use crate::ta::parse_ta;

    fn strb(rc: Option<&str>) -> ThresholdAutomaton {
        let text = include_str!("../../../benchmarks/strb.ta");
        let text = match rc {
            Some(rc) => text.replace("resilience (n > 3*t) & (t >= f) & (f >= 0)", &format!("resilience {rc}")),
            None => text.to_string(),
        };
        parse_ta(&text).unwrap()
    }

    fn unforg() -> SpecPattern {
        SpecPattern::Unsafety {
            init: vec![PForm::C(CForm::AllZero(vec![1, 2, 3]))],
            target: vec![PForm::C(CForm::AnyNonZero(vec![3]))],
        }
    }

    #[test]
    fn l3_unreachable_from_l0() {
        let ta = strb(None);
        let g = enumerate_reachable(&ta, &[4, 1, 0], DEFAULT_BUDGET).unwrap();
        let all_l0 = g.states.iter().position(|c| c.kappa == vec![4, 0, 0, 0]).unwrap();
        let (_, reach) =
            bfs(&g, &[all_l0], |_| true, |v| g.states[v].kappa[3] > 0).map(|x| (x.0, true)).unwrap_or((0, false));
        assert!(!reach);
        assert_eq!(oracle_check(&ta, &[4, 1, 0], &unforg(), DEFAULT_BUDGET).unwrap(), OracleVerdict::Verified);
    }

    #[test]
    fn weakened_resilience_reaches_l3() {
        let ta = strb(Some("(t + 1 >= f) & (t >= 0) & (f >= 0) & (n >= f)"));
        let OracleVerdict::Witness(w) = oracle_check(&ta, &[4, 1, 2], &unforg(), DEFAULT_BUDGET).unwrap() else {
            panic!("expected a witness")
        };
        let names: Vec<&str> = w.prefix.iter().map(|t| ta.rules[t.rule].name.as_str()).collect();
        // r3 and r4 both reach l3 after r2; the search takes the lower rule
        assert_eq!(names, ["r2", "r3"]);
        let s0 = &w.states[0];
        let via_r4 = [Transition::new(ta.rule("r2").unwrap(), 1), Transition::new(ta.rule("r4").unwrap(), 1)];
        assert_eq!(crate::counter::run(&ta, s0, &via_r4).unwrap().kappa[3], 1);
        assert!(w.cycle.is_empty());
        assert!(w.states.last().unwrap().kappa[3] > 0);
        let json: serde_json::Value = serde_json::from_str(&w.to_json()).unwrap();
        assert!(json.get("loop").is_some() && json.get("params").is_some());
    }

    #[test]
    fn trivial_non_termination_uses_self_loop() {
        let ta = strb(None);
        let pat = SpecPattern::NonTermination { init: Vec::new(), inv: Vec::new(), fair: Vec::new() };
        let OracleVerdict::Witness(w) = oracle_check(&ta, &[4, 1, 1], &pat, DEFAULT_BUDGET).unwrap() else { panic!() };
        assert_eq!(ta.rules[w.cycle[0].rule].name, "r6");
        assert!(w.lasso(&ta).is_ok());
    }

    #[test]
    fn no_rules_graph_is_initial_only() {
        let ta = parse_ta("ta E\nparams n\nsize n\nlocations a b\ninitial a b\n").unwrap();
        let g = enumerate_reachable(&ta, &[3], DEFAULT_BUDGET).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.initial.len(), 4);
        assert!(g.succ.iter().all(Vec::is_empty));
    }

    #[test]
    fn budget_is_enforced() {
        let ta = strb(None);
        assert_eq!(enumerate_reachable(&ta, &[7, 2, 2], 10).unwrap_err(), OracleError::Budget(10));
    }

    #[test]
    fn patterns_from_formulas() {
        let ta = strb(None);
        let pat = |s: &str| pattern_of(&canonicalize(&parse_formula(s, &ta, &[]).unwrap()));
        assert!(matches!(pat("E([l1]=0 & F [l3]!=0)"), Some(SpecPattern::Unsafety { .. })));
        assert!(matches!(pat("E(F [l3]!=0)"), Some(SpecPattern::Unsafety { .. })));
        assert!(matches!(pat("E([l0]=0 & G [l3]=0 & G F [l1]=0)"), Some(SpecPattern::NonTermination { .. })));
        assert!(matches!(pat("E(G F [l1]=0 & F ([l3]!=0 & G [l0]!=0))"), Some(SpecPattern::NonResponse { .. })));
        assert_eq!(pat("E(F [l3]!=0 & F [l2]!=0)"), None);
    }
}
