//! Structural well-formedness checks.

use thiserror::Error;

use super::flow::tarjan;
use super::ThresholdAutomaton;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("rule `{rule}` lies on a cycle but updates shared variables")]
    UpdateOnCycle { rule: String },
    #[error("locations {{{}}} form a cycle that is not simple", locations.join(", "))]
    NonSimpleCycle { locations: Vec<String> },
    #[error("rule `{rule}` has a negative update")]
    NegativeUpdate { rule: String },
    #[error("no initial location")]
    NoInitialLocation,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Location SCC ids, ignoring self-loops.
pub(crate) fn location_sccs(ta: &ThresholdAutomaton) -> Vec<usize> {
    let mut succ = vec![Vec::new(); ta.locations.len()];
    for r in &ta.rules {
        if !r.is_self_loop() && !succ[r.from].contains(&r.to) {
            succ[r.from].push(r.to);
        }
    }
    tarjan(&succ)
}

pub fn validate_ta(ta: &ThresholdAutomaton) -> ValidationReport {
    let mut violations = Vec::new();
    if ta.initial.is_empty() {
        violations.push(Violation::NoInitialLocation);
    }
    let scc = location_sccs(ta);
    for r in &ta.rules {
        if r.update.iter().any(|&u| u < 0) {
            violations.push(Violation::NegativeUpdate { rule: r.name.clone() });
        }
        if scc[r.from] == scc[r.to] && r.update.iter().any(|&u| u != 0) {
            violations.push(Violation::UpdateOnCycle { rule: r.name.clone() });
        }
    }
    let ncomp = scc.iter().copied().max().map_or(0, |m| m + 1);
    for c in 0..ncomp {
        let nodes: Vec<usize> = (0..ta.locations.len()).filter(|&l| scc[l] == c).collect();
        if nodes.len() < 2 {
            continue;
        }
        let inner: Vec<_> =
            ta.rules.iter().filter(|r| !r.is_self_loop() && scc[r.from] == c && scc[r.to] == c).collect();
        let one_out = nodes.iter().all(|&l| inner.iter().filter(|r| r.from == l).count() == 1);
        if inner.len() != nodes.len() || !one_out {
            violations.push(Violation::NonSimpleCycle {
                locations: nodes.iter().map(|&l| ta.locations[l].clone()).collect(),
            });
        }
    }
    ValidationReport { violations }
}
