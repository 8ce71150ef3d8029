//! Representative schedules of bounded length.

use super::{check_steady, ReductionError};
use crate::counter::{apply_unchecked, run, Configuration, Schedule, Transition};
use crate::ta::{flow_classes, FlowClasses, ThresholdAutomaton};

/// A steady schedule of length at most `2·|R|` that is applicable to `s`
/// and reaches the same configuration as `tau`.
///
/// Transitions are sorted by rule class, runs of the same rule are merged,
/// and the transitions of each cycle are replaced by at most two accelerated
/// passes around it. Self-loops change nothing and are dropped.
pub fn srep(ta: &ThresholdAutomaton, s: &Configuration, tau: &[Transition]) -> Result<Schedule, ReductionError> {
    let configs = check_steady(ta, s, tau, false)?;
    let target = configs.last().expect("path has a start");
    let classes = flow_classes(ta);

    let mut sorted: Vec<Transition> = tau.iter().copied().filter(|t| t.factor > 0).collect();
    sorted.sort_by_key(|t| classes.linear_index(t.rule));

    let mut out = Vec::new();
    let mut cur = s.clone();
    let mut i = 0;
    while i < sorted.len() {
        let class = classes.class_of[sorted[i].rule];
        let mut j = i;
        while j < sorted.len() && classes.class_of[sorted[j].rule] == class {
            j += 1;
        }
        let block = &sorted[i..j];
        let end = block.iter().fold(cur.clone(), |c, &t| apply_unchecked(ta, &c, t));
        if classes.is_loop[class] {
            out.extend(loop_representative(ta, &classes, class, &cur, &end, block));
        } else {
            let factor = block.iter().map(|t| t.factor).sum();
            out.push(Transition::new(block[0].rule, factor));
        }
        cur = end;
        i = j;
    }

    assert!(out.len() <= 2 * ta.rules.len(), "representative longer than 2|R|");
    if run(ta, s, &out).as_ref() != Some(target) {
        return Err(ReductionError::Unsupported);
    }
    Ok(out)
}

/// Replaces the transitions of one simple cycle, running from `start` to
/// `end`, by at most two passes around the cycle.
fn loop_representative(
    ta: &ThresholdAutomaton,
    classes: &FlowClasses,
    class: usize,
    start: &Configuration,
    end: &Configuration,
    block: &[Transition],
) -> Schedule {
    let cycle = classes.cycle_order(ta, class);
    let j = cycle.len();
    let total = |r: usize| block.iter().filter(|t| t.rule == r).map(|t| t.factor).sum::<i64>();
    let mut factors = vec![0i64; 2 * j];
    match cycle.iter().position(|&r| total(r) == 0) {
        None => {
            let mut cur = start.clone();
            for (k, f) in factors.iter_mut().enumerate() {
                let r = cycle[k % j];
                let from = ta.rules[r].from;
                *f = if k < j {
                    cur.kappa[from] - start.kappa[from].min(end.kappa[from])
                } else {
                    cur.kappa[from] - end.kappa[from]
                };
                cur = apply_unchecked(ta, &cur, Transition::new(r, *f));
            }
        }
        // The cycle is broken at its first missing rule; the rest is a chain
        // that starts right after it.
        Some(missing) => {
            for (k, &r) in cycle.iter().enumerate() {
                let slot = if k > missing { k } else { k + j };
                factors[slot] = total(r);
            }
        }
    }
    (0..2 * j).filter(|&k| factors[k] > 0).map(|k| Transition::new(cycle[k % j], factors[k])).collect()
}
