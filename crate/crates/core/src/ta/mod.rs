//! Threshold automata: locations, guarded rules over shared variables, the
//! resilience condition on parameters, and the system-size expression.
//!
//! A rule `(from, to, lower, upper, u)` may fire while every lower guard
//! `x >= bound` and every upper guard `x < bound` holds; firing adds `u` to
//! the shared variables. Rules on cycles must not update shared variables and
//! all cycles must be simple.

mod expr;
mod flow;
mod parse;
mod validate;

pub use expr::{smt_int, BoolExpr, CmpOp, LinearExpr};
pub(crate) use flow::tarjan;
pub use flow::{flow_classes, FlowClasses};
pub(crate) use parse::parse_guard_line;
pub use parse::{parse_ta, render_ta, ParseError};
pub use validate::{validate_ta, ValidationReport, Violation};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GuardKind {
    /// `x >= bound`; can only switch from false to true.
    Lower,
    /// `x < bound`; can only switch from true to false.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Guard {
    pub var: usize,
    pub kind: GuardKind,
    pub bound: LinearExpr,
}

impl Guard {
    pub fn holds(&self, g: &[i64], params: &[i64]) -> bool {
        self.holds_at(g[self.var], params)
    }

    pub fn holds_at(&self, x: i64, params: &[i64]) -> bool {
        let b = self.bound.eval(params);
        match self.kind {
            GuardKind::Lower => x >= b,
            GuardKind::Upper => x < b,
        }
    }

    pub fn render(&self, ta: &ThresholdAutomaton) -> String {
        let op = match self.kind {
            GuardKind::Lower => ">=",
            GuardKind::Upper => "<",
        };
        format!("{} {} {}", ta.shared[self.var], op, self.bound.render(&ta.params))
    }

    /// SMT term for the guard given symbols for the variable and parameters.
    pub fn smt(&self, var: &str, param: impl Fn(usize) -> String) -> String {
        let b = self.bound.smt(param);
        match self.kind {
            GuardKind::Lower => format!("(>= {var} {b})"),
            GuardKind::Upper => format!("(< {var} {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub lower: Vec<Guard>,
    pub upper: Vec<Guard>,
    /// Increment per shared variable.
    pub update: Vec<i64>,
}

impl Rule {
    pub fn is_self_loop(&self) -> bool {
        self.from == self.to
    }

    pub fn guards(&self) -> impl Iterator<Item = &Guard> {
        self.lower.iter().chain(self.upper.iter())
    }

    /// Whether all guards hold at shared values `g` under `params`.
    pub fn guards_hold(&self, g: &[i64], params: &[i64]) -> bool {
        self.guards().all(|gd| gd.holds(g, params))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdAutomaton {
    pub name: String,
    pub params: Vec<String>,
    pub shared: Vec<String>,
    pub locations: Vec<String>,
    pub initial: Vec<usize>,
    pub rules: Vec<Rule>,
    pub resilience: BoolExpr,
    pub size: LinearExpr,
}

impl ThresholdAutomaton {
    pub fn location(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn param(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p == name)
    }

    pub fn shared_var(&self, name: &str) -> Option<usize> {
        self.shared.iter().position(|p| p == name)
    }

    pub fn rule(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    pub fn is_initial(&self, loc: usize) -> bool {
        self.initial.contains(&loc)
    }

    pub fn admissible(&self, params: &[i64]) -> bool {
        params.len() == self.params.len()
            && params.iter().all(|&p| p >= 0)
            && self.resilience.eval(params)
            && self.size.eval(params) >= 0
    }

    /// Distinct guards appearing in rules, in order of first appearance.
    pub fn guards(&self) -> Vec<Guard> {
        let mut out: Vec<Guard> = Vec::new();
        for r in &self.rules {
            for g in r.guards() {
                if !out.contains(g) {
                    out.push(g.clone());
                }
            }
        }
        out
    }

    /// Replaces the resilience condition, keeping everything else.
    pub fn with_resilience(&self, rc: BoolExpr) -> Self {
        ThresholdAutomaton { resilience: rc, ..self.clone() }
    }
}
