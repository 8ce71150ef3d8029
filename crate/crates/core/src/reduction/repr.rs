//! Representatives that preserve a propositional invariant.

use serde::Serialize;

use super::threads::{classify_thread, decompose, Naming, ThreadType};
use super::{check_steady, srep, ReductionError};
use crate::counter::{run, Configuration, Schedule, Transition};
use crate::ta::ThresholdAutomaton;

/// Some location of `locs` is occupied.
pub fn disjunction_holds(c: &Configuration, locs: &[usize]) -> bool {
    locs.iter().any(|&l| c.kappa[l] != 0)
}

/// Every location of `locs` is empty.
pub fn all_zero_holds(c: &Configuration, locs: &[usize]) -> bool {
    locs.iter().all(|&l| c.kappa[l] == 0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ReprCase {
    /// One location of the set stays occupied throughout.
    Occupied(usize),
    /// A thread that never leaves the set goes first.
    Inside { thread: usize },
    /// A thread entering the set goes first while another waits in it.
    Enter { first: usize, waiting: usize },
    /// A thread passing through the set is split around one that leaves and
    /// re-enters it.
    Split { through: usize, detour: usize },
    /// No rule of the schedule touches the set.
    Untouched,
    /// Representative of a scaled schedule.
    Scaled { mu: i64 },
}

/// A representative together with the certificate of how it was built:
/// `schedule` is the concatenation of the representatives of `parts`, and
/// `parts` concatenated is a reordering of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Repr {
    pub schedule: Schedule,
    pub parts: Vec<Schedule>,
    pub case: ReprCase,
}

/// Representative of a schedule run in the `mu`-scaled system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaledRepr {
    pub start: Configuration,
    pub repr: Repr,
}

fn first_violation(configs: &[Configuration], holds: impl Fn(&Configuration) -> bool) -> Option<usize> {
    configs.iter().position(|c| !holds(c))
}

fn represent(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    parts: Vec<Schedule>,
    case: ReprCase,
) -> Result<Repr, ReductionError> {
    let mut cur = s.clone();
    let mut schedule = Vec::new();
    for part in &parts {
        schedule.extend(srep(ta, &cur, part)?);
        cur = run(ta, &cur, part).ok_or(ReductionError::Unsupported)?;
    }
    Ok(Repr { schedule, parts, case })
}

/// Representative of length at most `6·|R|` keeping some location of
/// `locs` occupied in every visited configuration.
pub fn repr_disjunction(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    locs: &[usize],
) -> Result<Repr, ReductionError> {
    let configs = check_steady(ta, s, tau, true)?;
    if let Some(prefix) = first_violation(&configs, |c| disjunction_holds(c, locs)) {
        return Err(ReductionError::InvariantViolated { prefix });
    }
    let repr = disjunction_parts(ta, s, tau, locs, &configs).and_then(|(parts, case)| represent(ta, s, parts, case))?;
    assert!(repr.schedule.len() <= 6 * ta.rules.len(), "representative longer than 6|R|");
    Ok(repr)
}

fn disjunction_parts(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    locs: &[usize],
    configs: &[Configuration],
) -> Result<(Vec<Schedule>, ReprCase), ReductionError> {
    let naming = decompose(ta, s, tau)?;
    let ids = naming.ids();
    let types: Vec<(usize, ThreadType)> =
        ids.iter().map(|&i| (i, classify_thread(ta, &naming.projection(tau, i), locs))).collect();
    let of = |wanted: &[ThreadType]| -> Vec<usize> {
        types.iter().filter(|(_, ty)| wanted.contains(ty)).map(|&(i, _)| i).collect()
    };

    if let Some(&thread) = of(&[ThreadType::A]).first() {
        let parts = vec![naming.projection(tau, thread), naming.rest(tau, &[thread]).0];
        return Ok((parts, ReprCase::Inside { thread }));
    }
    let leaving = of(&[ThreadType::B, ThreadType::E]);
    for &first in &of(&[ThreadType::C, ThreadType::E]) {
        if let Some(&waiting) = leaving.iter().find(|&&i| i != first) {
            let parts = vec![naming.projection(tau, first), naming.rest(tau, &[first]).0];
            return Ok((parts, ReprCase::Enter { first, waiting }));
        }
    }
    if let (Some(&detour), Some(&through)) = (of(&[ThreadType::E]).first(), of(&[ThreadType::D]).first()) {
        return Ok((split_parts(ta, tau, &naming, locs, through, detour), ReprCase::Split { through, detour }));
    }
    let l = locs
        .iter()
        .copied()
        .find(|&l| configs.iter().all(|c| c.kappa[l] != 0))
        .expect("an invariant-preserving schedule always falls into one of the cases");
    Ok((vec![tau.to_vec()], ReprCase::Occupied(l)))
}

/// `θ¹ · θ_detour · θ² · rest`, where `θ¹θ²` is thread `through` split right
/// after it first enters `locs`.
fn split_parts(
    ta: &ThresholdAutomaton,
    tau: &[Transition],
    naming: &Naming,
    locs: &[usize],
    through: usize,
    detour: usize,
) -> Vec<Schedule> {
    let theta = naming.projection(tau, through);
    let cut = theta
        .iter()
        .position(|t| locs.contains(&ta.rules[t.rule].to))
        .expect("a thread passing through the set enters it")
        + 1;
    let mut third = theta[cut..].to_vec();
    third.extend(naming.rest(tau, &[through, detour]).0);
    vec![theta[..cut].to_vec(), naming.projection(tau, detour), third]
}

/// Representative of length at most `2·|R|` keeping every location of
/// `locs` empty.
pub fn repr_all_zero(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    locs: &[usize],
) -> Result<Repr, ReductionError> {
    let configs = check_steady(ta, s, tau, true)?;
    if let Some(prefix) = first_violation(&configs, |c| all_zero_holds(c, locs)) {
        return Err(ReductionError::InvariantViolated { prefix });
    }
    represent(ta, s, vec![tau.to_vec()], ReprCase::Untouched)
}

/// Representative of `tau` repeated `mu` times from the `mu`-scaled start,
/// of length at most `4·|R|`, keeping every clause of `clauses` (a
/// disjunction of occupied locations each) true throughout.
pub fn repr_conj_disj(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    clauses: &[Vec<usize>],
    mu: Option<i64>,
) -> Result<ScaledRepr, ReductionError> {
    let mu = mu.filter(|&m| m >= 1).ok_or(ReductionError::NoMultiplier)?;
    let configs = check_steady(ta, s, tau, true)?;
    let holds = |c: &Configuration| clauses.iter().all(|locs| disjunction_holds(c, locs));
    if let Some(prefix) = first_violation(&configs, holds) {
        return Err(ReductionError::InvariantViolated { prefix });
    }
    let start = scale(s, mu);
    let rest: Schedule = (1..mu).flat_map(|_| tau.iter().copied()).collect();
    let repr = represent(ta, &start, vec![tau.to_vec(), rest], ReprCase::Scaled { mu })?;
    assert!(repr.schedule.len() <= 4 * ta.rules.len(), "representative longer than 4|R|");
    Ok(ScaledRepr { start, repr })
}

pub(crate) fn scale(s: &Configuration, mu: i64) -> Configuration {
    let m = |v: &[i64]| v.iter().map(|x| x * mu).collect();
    Configuration { kappa: m(&s.kappa), g: m(&s.g), p: m(&s.p) }
}
