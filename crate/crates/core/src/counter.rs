//! Counter-system semantics: configurations, accelerated transitions,
//! schedules and paths.
//!
//! A configuration records how many processes sit in each location (`kappa`),
//! the shared variables (`g`) and the parameters (`p`). A transition fires a
//! rule `factor` times at once.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ta::ThresholdAutomaton;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub kappa: Vec<i64>,
    pub g: Vec<i64>,
    pub p: Vec<i64>,
}

impl Configuration {
    pub fn total(&self) -> i64 {
        self.kappa.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub rule: usize,
    pub factor: i64,
}

impl Transition {
    pub fn new(rule: usize, factor: i64) -> Self {
        Transition { rule, factor }
    }
}

pub type Schedule = Vec<Transition>;

/// Whether every transition of the schedule has factor one.
pub fn is_conventional(tau: &[Transition]) -> bool {
    tau.iter().all(|t| t.factor == 1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub start: Configuration,
    pub steps: Vec<(Transition, Configuration)>,
}

impl Path {
    pub fn last(&self) -> &Configuration {
        self.steps.last().map_or(&self.start, |(_, c)| c)
    }

    /// All visited configurations, starting with `start`.
    pub fn configs(&self) -> impl Iterator<Item = &Configuration> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, c)| c))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CounterError {
    #[error("parameters {0:?} violate the resilience condition")]
    Inadmissible(Vec<i64>),
    #[error("transition ({rule}, {factor}) is not applicable", rule = .0.rule, factor = .0.factor)]
    NotApplicable(Transition),
    #[error("transition {index} of the schedule is not applicable")]
    ScheduleBlocked { index: usize },
}

/// Initial configurations for fixed parameters: shared variables are zero and
/// the `N(p)` processes are spread over the initial locations.
#[derive(Debug, Clone)]
pub struct InitialConfigs<'a> {
    ta: &'a ThresholdAutomaton,
    pub params: Vec<i64>,
    pub size: i64,
}

pub fn initial_configs<'a>(ta: &'a ThresholdAutomaton, params: &[i64]) -> Result<InitialConfigs<'a>, CounterError> {
    if !ta.admissible(params) {
        return Err(CounterError::Inadmissible(params.to_vec()));
    }
    Ok(InitialConfigs { ta, params: params.to_vec(), size: ta.size.eval(params) })
}

impl InitialConfigs<'_> {
    /// Constraints characterising the set, one per line.
    pub fn constraints(&self) -> Vec<String> {
        let ta = self.ta;
        let init: Vec<String> = ta.initial.iter().map(|&l| format!("k[{}]", ta.locations[l])).collect();
        let mut out = vec![format!("{} = {}", init.join(" + "), self.size)];
        for (l, name) in ta.locations.iter().enumerate() {
            if !ta.is_initial(l) {
                out.push(format!("k[{name}] = 0"));
            }
        }
        for v in &ta.shared {
            out.push(format!("{v} = 0"));
        }
        out
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        c.p == self.params
            && c.g.iter().all(|&x| x == 0)
            && c.kappa.iter().all(|&k| k >= 0)
            && c.kappa.iter().enumerate().all(|(l, &k)| k == 0 || self.ta.is_initial(l))
            && c.total() == self.size
    }

    /// Every initial configuration, in lexicographic order of the counters
    /// of the initial locations.
    pub fn iter(&self) -> impl Iterator<Item = Configuration> + '_ {
        let mut splits = Vec::new();
        if !self.ta.initial.is_empty() && self.size >= 0 {
            compositions(self.size, self.ta.initial.len(), &mut Vec::new(), &mut splits);
        }
        splits.into_iter().map(move |split| {
            let mut kappa = vec![0; self.ta.locations.len()];
            for (&l, k) in self.ta.initial.iter().zip(split) {
                kappa[l] = k;
            }
            Configuration { kappa, g: vec![0; self.ta.shared.len()], p: self.params.clone() }
        })
    }
}

/// Ordered splits of `total` into `parts` non-negative summands.
fn compositions(total: i64, parts: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if parts == 1 {
        let mut v = prefix.clone();
        v.push(total);
        out.push(v);
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// All guards of the rule hold at `g + k·u` for every `k < factor`.
pub fn is_unlocked(ta: &ThresholdAutomaton, s: &Configuration, t: Transition) -> bool {
    if t.factor <= 0 {
        return true;
    }
    let r = &ta.rules[t.rule];
    // Updates are non-negative, so lower guards are weakest at k = 0 and
    // upper guards at k = factor - 1.
    let last: Vec<i64> = s.g.iter().zip(&r.update).map(|(x, u)| x + (t.factor - 1) * u).collect();
    r.lower.iter().all(|gd| gd.holds(&s.g, &s.p)) && r.upper.iter().all(|gd| gd.holds(&last, &s.p))
}

pub fn is_applicable(ta: &ThresholdAutomaton, s: &Configuration, t: Transition) -> bool {
    if t.factor < 0 {
        return false;
    }
    t.factor == 0 || (is_unlocked(ta, s, t) && s.kappa[ta.rules[t.rule].from] >= t.factor)
}

/// Applies `t` without checking applicability.
pub fn apply_unchecked(ta: &ThresholdAutomaton, s: &Configuration, t: Transition) -> Configuration {
    let r = &ta.rules[t.rule];
    let mut next = s.clone();
    next.kappa[r.from] -= t.factor;
    next.kappa[r.to] += t.factor;
    for (x, u) in next.g.iter_mut().zip(&r.update) {
        *x += t.factor * u;
    }
    next
}

pub fn apply(ta: &ThresholdAutomaton, s: &Configuration, t: Transition) -> Result<Configuration, CounterError> {
    if !is_applicable(ta, s, t) {
        return Err(CounterError::NotApplicable(t));
    }
    Ok(apply_unchecked(ta, s, t))
}

pub fn apply_schedule(ta: &ThresholdAutomaton, s: &Configuration, tau: &[Transition]) -> Result<Path, CounterError> {
    let mut steps = Vec::with_capacity(tau.len());
    let mut cur = s.clone();
    for (index, &t) in tau.iter().enumerate() {
        cur = apply(ta, &cur, t).map_err(|_| CounterError::ScheduleBlocked { index })?;
        steps.push((t, cur.clone()));
    }
    Ok(Path { start: s.clone(), steps })
}

/// Final configuration of `tau` from `s`, if every prefix is applicable.
pub fn run(ta: &ThresholdAutomaton, s: &Configuration, tau: &[Transition]) -> Option<Configuration> {
    let mut cur = s.clone();
    for &t in tau {
        cur = apply(ta, &cur, t).ok()?;
    }
    Some(cur)
}
