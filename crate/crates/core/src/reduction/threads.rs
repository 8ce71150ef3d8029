//! Threads, namings and decompositions.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{check_steady, ReductionError};
use crate::counter::{Configuration, Schedule, Transition};
use crate::ta::ThresholdAutomaton;

/// Assigns a thread id to every position of a schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Naming {
    pub thread_of: Vec<usize>,
}

impl Naming {
    /// Thread ids in use, ascending.
    pub fn ids(&self) -> Vec<usize> {
        self.thread_of.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Transitions named `id`, in schedule order.
    pub fn projection(&self, tau: &[Transition], id: usize) -> Schedule {
        self.select(tau, |i| i == id).0
    }

    /// Transitions not named by any of `ids`, with their names.
    pub fn rest(&self, tau: &[Transition], ids: &[usize]) -> (Schedule, Vec<usize>) {
        self.select(tau, |i| !ids.contains(&i))
    }

    fn select(&self, tau: &[Transition], keep: impl Fn(usize) -> bool) -> (Schedule, Vec<usize>) {
        tau.iter().zip(&self.thread_of).filter(|(_, &i)| keep(i)).map(|(&t, &i)| (t, i)).unzip()
    }
}

/// Factor-one transitions, each starting where the previous one ended.
pub fn is_thread(ta: &ThresholdAutomaton, theta: &[Transition]) -> bool {
    !theta.is_empty()
        && theta.iter().all(|t| t.factor == 1)
        && theta.windows(2).all(|w| ta.rules[w[0].rule].to == ta.rules[w[1].rule].from)
}

fn first_loc(ta: &ThresholdAutomaton, theta: &[Transition]) -> usize {
    ta.rules[theta[0].rule].from
}

fn last_loc(ta: &ThresholdAutomaton, theta: &[Transition]) -> usize {
    ta.rules[theta[theta.len() - 1].rule].to
}

/// Checks that every projection is a thread and that no location starts
/// more threads than it holds processes in `s`.
pub fn validate_naming(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    naming: &Naming,
) -> Result<(), ReductionError> {
    if naming.thread_of.len() != tau.len() {
        return Err(ReductionError::InvalidNaming(format!(
            "{} names for {} transitions",
            naming.thread_of.len(),
            tau.len()
        )));
    }
    let mut starts = vec![0i64; ta.locations.len()];
    for id in naming.ids() {
        let theta = naming.projection(tau, id);
        if !is_thread(ta, &theta) {
            return Err(ReductionError::InvalidNaming(format!("projection {id} is not a thread")));
        }
        starts[first_loc(ta, &theta)] += 1;
    }
    for (l, &n) in starts.iter().enumerate() {
        if n > s.kappa[l] {
            return Err(ReductionError::InvalidNaming(format!(
                "{n} threads start at {} but it holds {}",
                ta.locations[l], s.kappa[l]
            )));
        }
    }
    Ok(())
}

/// Builds a decomposition of a steady conventional schedule, transition by
/// transition. A transition opens a new thread while its source location
/// still has a process not claimed by any thread; otherwise it extends the
/// lowest-numbered thread that ends there.
pub fn decompose(ta: &ThresholdAutomaton, s: &Configuration, tau: &[Transition]) -> Result<Naming, ReductionError> {
    check_steady(ta, s, tau, true)?;
    let mut starts = vec![0i64; ta.locations.len()];
    let mut ends: Vec<usize> = Vec::new();
    let mut thread_of = Vec::with_capacity(tau.len());
    for t in tau {
        let r = &ta.rules[t.rule];
        let id = if starts[r.from] < s.kappa[r.from] {
            starts[r.from] += 1;
            ends.push(r.to);
            ends.len() - 1
        } else {
            let id = ends.iter().position(|&l| l == r.from).expect("an applicable transition has a process to move");
            ends[id] = r.to;
            id
        };
        thread_of.push(id);
    }
    Ok(Naming { thread_of })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ThreadType {
    /// Every visited location is in the set.
    A,
    /// Leaves the set.
    B,
    /// Enters the set.
    C,
    /// Passes through the set.
    D,
    /// Starts and ends in the set but leaves it in between.
    E,
    /// Never touches the set.
    F,
}

impl fmt::Display for ThreadType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub fn classify_thread(ta: &ThresholdAutomaton, theta: &[Transition], locs: &[usize]) -> ThreadType {
    let inside = |l: usize| locs.contains(&l);
    let first = inside(first_loc(ta, theta));
    let last = inside(last_loc(ta, theta));
    let middle: Vec<bool> = theta[..theta.len() - 1].iter().map(|t| inside(ta.rules[t.rule].to)).collect();
    match (first, last) {
        (true, true) if middle.iter().all(|&m| m) => ThreadType::A,
        (true, true) => ThreadType::E,
        (true, false) => ThreadType::B,
        (false, true) => ThreadType::C,
        (false, false) if middle.iter().any(|&m| m) => ThreadType::D,
        (false, false) => ThreadType::F,
    }
}

/// Moves thread `id` to the beginning, keeping the relative order of all
/// other transitions.
pub fn move_thread_front(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    naming: &Naming,
    id: usize,
) -> Result<(Schedule, Naming), ReductionError> {
    validate_naming(ta, s, tau, naming)?;
    if !naming.thread_of.contains(&id) {
        return Err(ReductionError::NotAThread(id));
    }
    let mut out = naming.projection(tau, id);
    let mut names = vec![id; out.len()];
    let (rest, rest_names) = naming.rest(tau, &[id]);
    out.extend(rest);
    names.extend(rest_names);
    Ok((out, Naming { thread_of: names }))
}
