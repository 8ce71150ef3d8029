//! Abstract syntax of the specification logic.
//!
//! Propositions are conjunctions of [`PForm`]s. A counter form either tests a
//! set of locations for being all empty or for containing some process; a
//! guard form is a boolean combination of threshold guards. Disjunction is
//! only available as `guard | counters`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::counter::Configuration;
use crate::ta::{Guard, ThresholdAutomaton};

/// A named threshold guard usable in specifications.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuardAtom {
    pub name: String,
    pub guard: Guard,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GForm {
    Lit(GuardAtom),
    Not(Box<GForm>),
    And(Vec<GForm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CForm {
    /// Every listed counter is zero (true when empty).
    AllZero(Vec<usize>),
    /// Some listed counter is non-zero (false when empty).
    AnyNonZero(Vec<usize>),
    And(Vec<CForm>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PForm {
    C(CForm),
    GOr(GForm, CForm),
}

/// Conjunction of pforms; empty means `true`.
pub type Prop = Vec<PForm>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    Prop(Prop),
    F(Box<Formula>),
    G(Box<Formula>),
    And(Vec<Formula>),
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::Prop(Vec::new())
    }

    pub fn f(inner: Formula) -> Formula {
        Formula::F(Box::new(inner))
    }

    pub fn g(inner: Formula) -> Formula {
        Formula::G(Box::new(inner))
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::Prop(_) => true,
            Formula::F(_) | Formula::G(_) => false,
            Formula::And(xs) => xs.iter().all(Formula::is_propositional),
        }
    }
}

impl GForm {
    pub fn eval(&self, c: &Configuration) -> bool {
        match self {
            GForm::Lit(a) => a.guard.holds(&c.g, &c.p),
            GForm::Not(x) => !x.eval(c),
            GForm::And(xs) => xs.iter().all(|x| x.eval(c)),
        }
    }
}

impl CForm {
    pub fn eval(&self, c: &Configuration) -> bool {
        match self {
            CForm::AllZero(ls) => ls.iter().all(|&l| c.kappa[l] == 0),
            CForm::AnyNonZero(ls) => ls.iter().any(|&l| c.kappa[l] != 0),
            CForm::And(xs) => xs.iter().all(|x| x.eval(c)),
        }
    }
}

impl PForm {
    pub fn eval(&self, c: &Configuration) -> bool {
        match self {
            PForm::C(x) => x.eval(c),
            PForm::GOr(g, x) => g.eval(c) || x.eval(c),
        }
    }
}

pub fn eval_prop(p: &[PForm], c: &Configuration) -> bool {
    p.iter().all(|x| x.eval(c))
}

/// Renders formulas with location names from an automaton.
pub struct Show<'a, T: ?Sized> {
    pub ta: &'a ThresholdAutomaton,
    pub item: &'a T,
}

pub fn show<'a, T: ?Sized>(ta: &'a ThresholdAutomaton, item: &'a T) -> Show<'a, T> {
    Show { ta, item }
}

fn locs(ta: &ThresholdAutomaton, ls: &[usize], test: &str, sep: &str) -> String {
    ls.iter().map(|&l| format!("[{}]{}", ta.locations[l], test)).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for Show<'_, GForm> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item {
            GForm::Lit(a) => write!(f, "{}", a.name),
            GForm::Not(x) => write!(f, "!({})", show(self.ta, &**x)),
            GForm::And(xs) if xs.is_empty() => write!(f, "true"),
            GForm::And(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| format!("({})", show(self.ta, x))).collect();
                write!(f, "{}", parts.join(" & "))
            }
        }
    }
}

impl fmt::Display for Show<'_, CForm> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item {
            CForm::AllZero(ls) if ls.is_empty() => write!(f, "true"),
            CForm::AllZero(ls) => write!(f, "{}", locs(self.ta, ls, "=0", " & ")),
            CForm::AnyNonZero(ls) if ls.is_empty() => write!(f, "false"),
            CForm::AnyNonZero(ls) => write!(f, "({})", locs(self.ta, ls, "!=0", " | ")),
            CForm::And(xs) if xs.is_empty() => write!(f, "true"),
            CForm::And(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| format!("({})", show(self.ta, x))).collect();
                write!(f, "{}", parts.join(" & "))
            }
        }
    }
}

impl fmt::Display for Show<'_, PForm> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item {
            PForm::C(c) => write!(f, "{}", show(self.ta, c)),
            PForm::GOr(g, c) => write!(f, "(({}) | ({}))", show(self.ta, g), show(self.ta, c)),
        }
    }
}

impl fmt::Display for Show<'_, [PForm]> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.item.is_empty() {
            return write!(f, "true");
        }
        let parts: Vec<String> = self.item.iter().map(|p| show(self.ta, p).to_string()).collect();
        write!(f, "{}", parts.join(" & "))
    }
}

impl fmt::Display for Show<'_, Formula> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.item {
            Formula::Prop(p) => write!(f, "{}", show(self.ta, p.as_slice())),
            Formula::F(x) => write!(f, "F ({})", show(self.ta, &**x)),
            Formula::G(x) => write!(f, "G ({})", show(self.ta, &**x)),
            Formula::And(xs) if xs.is_empty() => write!(f, "true"),
            Formula::And(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| format!("({})", show(self.ta, x))).collect();
                write!(f, "{}", parts.join(" & "))
            }
        }
    }
}
