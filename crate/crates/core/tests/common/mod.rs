//! Random automata, configurations, schedules, lassos and formulas shared by
//! the property tests and the acceptance suite.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tmc::counter::{apply, is_applicable, Configuration, Schedule, Transition};
use tmc::eltl::{CForm, Formula, GForm, GuardAtom, Lasso, PForm};
use tmc::guards::context_of;
use tmc::ta::{flow_classes, parse_ta, validate_ta, ThresholdAutomaton};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn bench_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks").join(name)
}

pub fn bench(name: &str) -> String {
    fs::read_to_string(bench_path(name)).unwrap()
}

pub fn bench_ta(name: &str) -> ThresholdAutomaton {
    parse_ta(&bench(name)).unwrap()
}

/// Guard bounds that scale with the parameters, so that doubling every
/// value preserves the truth of every guard.
const BOUNDS: [&str; 5] = ["t", "2*t", "n - t", "n - 2*t", "n"];

/// A valid automaton with up to `max_locs` locations and `max_rules` rules:
/// forward edges with optional increments and guards, at most one simple
/// cycle and some self-loops. Parameters `n > 2t >= 0`, size `n`.
pub fn random_ta(r: &mut Rng8, max_locs: usize, max_rules: usize) -> ThresholdAutomaton {
    loop {
        if let Some(ta) = try_random_ta(r, max_locs, max_rules) {
            return ta;
        }
    }
}

fn guard_text(r: &mut Rng8) -> String {
    let mut parts = Vec::new();
    if r.gen_bool(0.4) {
        parts.push(format!("x >= {}", BOUNDS.choose(r).unwrap()));
    }
    if r.gen_bool(0.2) {
        parts.push(format!("x < {}", BOUNDS.choose(r).unwrap()));
    }
    if parts.is_empty() {
        "true".into()
    } else {
        parts.join(" & ")
    }
}

fn try_random_ta(r: &mut Rng8, max_locs: usize, max_rules: usize) -> Option<ThresholdAutomaton> {
    let nl = r.gen_range(2..=max_locs);
    let mut rules: Vec<(usize, usize, String, bool)> = Vec::new();
    let mut cycle: Vec<usize> = Vec::new();
    if nl >= 2 && r.gen_bool(0.5) {
        let k = r.gen_range(2..=nl.min(3));
        let mut locs: Vec<usize> = (0..nl).collect();
        locs.shuffle(r);
        cycle = locs[..k].to_vec();
        cycle.sort();
        for i in 0..k {
            let guard = if r.gen_bool(0.3) { guard_text(r) } else { "true".into() };
            rules.push((cycle[i], cycle[(i + 1) % k], guard, false));
        }
    }
    let target = r.gen_range(rules.len().max(1)..=max_rules);
    let mut tries = 0;
    while rules.len() < target && tries < 100 {
        tries += 1;
        let a = r.gen_range(0..nl);
        if r.gen_bool(0.2) {
            if !rules.iter().any(|(f, t, _, _)| *f == a && *t == a) {
                rules.push((a, a, "true".into(), false));
            }
            continue;
        }
        if a + 1 >= nl {
            continue;
        }
        let b = r.gen_range(a + 1..nl);
        if cycle.contains(&a) && cycle.contains(&b) {
            continue;
        }
        rules.push((a, b, guard_text(r), r.gen_bool(0.5)));
    }
    let mut text = String::from("ta Random\nparams n t\nresilience (n > 2*t) & (t >= 0)\nsize n\nshared x\n");
    text.push_str("locations");
    for l in 0..nl {
        text.push_str(&format!(" l{l}"));
    }
    text.push_str("\ninitial l0");
    if nl > 2 && r.gen_bool(0.3) {
        text.push_str(" l1");
    }
    text.push('\n');
    for (i, (a, b, g, inc)) in rules.iter().enumerate() {
        text.push_str(&format!("rule r{i} l{a} -> l{b} when {g}"));
        if *inc {
            text.push_str(" do x+=1");
        }
        text.push('\n');
    }
    let ta = parse_ta(&text).ok()?;
    validate_ta(&ta).is_ok().then_some(ta)
}

/// Admissible parameters and arbitrary counters and shared variable.
pub fn random_config(r: &mut Rng8, ta: &ThresholdAutomaton) -> Configuration {
    let t = r.gen_range(0..=2);
    let n = 2 * t + 1 + r.gen_range(0..=3);
    let p = vec![n, t];
    debug_assert!(ta.admissible(&p));
    let kappa = (0..ta.locations.len()).map(|_| r.gen_range(0..=3)).collect();
    let g = vec![r.gen_range(0..=2 * n)];
    Configuration { kappa, g, p }
}

/// A random conventional schedule applicable to `s` that keeps the context
/// of `s`, of length at most `max_len`.
pub fn random_steady(r: &mut Rng8, ta: &ThresholdAutomaton, s: &Configuration, max_len: usize) -> Schedule {
    let ctx = context_of(ta, s);
    let len = r.gen_range(0..=max_len);
    let mut cur = s.clone();
    let mut tau = Vec::new();
    while tau.len() < len {
        let options: Vec<(Transition, Configuration)> = (0..ta.rules.len())
            .map(|i| Transition::new(i, 1))
            .filter_map(|t| apply(ta, &cur, t).ok().map(|c| (t, c)))
            .filter(|(_, c)| context_of(ta, c) == ctx)
            .collect();
        let Some((t, next)) = options.choose(r).cloned() else { break };
        tau.push(t);
        cur = next;
    }
    tau
}

/// A random applicable transition with a factor up to the source counter.
pub fn random_transition(r: &mut Rng8, ta: &ThresholdAutomaton, s: &Configuration) -> Option<Transition> {
    let options: Vec<usize> = (0..ta.rules.len()).filter(|&i| s.kappa[ta.rules[i].from] > 0).collect();
    let &rule = options.choose(r)?;
    let max = s.kappa[ta.rules[rule].from];
    let t = Transition::new(rule, r.gen_range(0..=max));
    is_applicable(ta, s, t).then_some(t)
}

/// A lasso: a random applicable prefix, then a cycle made of self-loops and
/// single-process trips around a simple cycle of the automaton. `None` when
/// no closed cycle could be formed.
pub fn random_lasso(r: &mut Rng8, ta: &ThresholdAutomaton, start: &Configuration) -> Option<Lasso> {
    let mut prefix = Vec::new();
    let mut cur = start.clone();
    for _ in 0..r.gen_range(0..=6) {
        let Some(t) = random_transition(r, ta, &cur) else { break };
        cur = apply(ta, &cur, t).ok()?;
        prefix.push(t);
    }
    let classes = flow_classes(ta);
    let mut trips: Vec<Vec<usize>> = Vec::new();
    for (c, members) in classes.classes.iter().enumerate() {
        if !classes.is_loop[c] {
            continue;
        }
        for &m in members {
            if ta.rules[m].is_self_loop() {
                trips.push(vec![m]);
            }
        }
        let order = classes.cycle_order(ta, c);
        for k in 0..order.len() {
            trips.push(order[k..].iter().chain(&order[..k]).copied().collect());
        }
    }
    let mut cycle = Vec::new();
    if !trips.is_empty() && r.gen_bool(0.8) {
        for _ in 0..r.gen_range(1..=3) {
            let trip = trips.choose(r).unwrap();
            let mut next = cur.clone();
            let mut ok = true;
            let mut steps = Vec::new();
            for &rule in trip {
                match apply(ta, &next, Transition::new(rule, 1)) {
                    Ok(c) => {
                        next = c;
                        steps.push(Transition::new(rule, 1));
                    }
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                cycle.extend(steps);
                cur = next;
            }
        }
    }
    Lasso::new(ta, start, prefix, cycle).ok()
}

fn random_locs(r: &mut Rng8, ta: &ThresholdAutomaton) -> Vec<usize> {
    let n = ta.locations.len();
    let mut locs: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.4)).collect();
    if locs.is_empty() {
        locs.push(r.gen_range(0..n));
    }
    locs
}

fn random_pform(r: &mut Rng8, ta: &ThresholdAutomaton) -> PForm {
    let c = if r.gen_bool(0.5) { CForm::AllZero(random_locs(r, ta)) } else { CForm::AnyNonZero(random_locs(r, ta)) };
    let guards = ta.guards();
    if !guards.is_empty() && r.gen_bool(0.2) {
        let g = guards.choose(r).unwrap().clone();
        let lit = GForm::Lit(GuardAtom { name: "g".into(), guard: g });
        let lit = if r.gen_bool(0.5) { GForm::Not(Box::new(lit)) } else { lit };
        PForm::GOr(lit, c)
    } else {
        PForm::C(c)
    }
}

/// A random formula of the specification logic with temporal depth at most
/// `depth`.
pub fn random_formula(r: &mut Rng8, ta: &ThresholdAutomaton, depth: usize) -> Formula {
    let choice = if depth == 0 { 0 } else { r.gen_range(0..5) };
    match choice {
        0 => Formula::Prop((0..r.gen_range(1..=2)).map(|_| random_pform(r, ta)).collect()),
        1 => Formula::f(random_formula(r, ta, depth - 1)),
        2 => Formula::g(random_formula(r, ta, depth - 1)),
        _ => Formula::And((0..r.gen_range(2..=3)).map(|_| random_formula(r, ta, depth - 1)).collect()),
    }
}

/// Outcome of checking every reduction on one random steady schedule.
#[derive(Debug, Default, Clone, Copy)]
pub struct ReductionTally {
    pub srep: usize,
    pub disjunction: usize,
    pub all_zero: usize,
    pub conj_disj: usize,
}

fn holds_everywhere(
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    p: impl Fn(&Configuration) -> bool,
) -> bool {
    tmc::counter::apply_schedule(ta, s, tau).map(|path| path.configs().all(&p)).unwrap_or(false)
}

fn random_invariant_set(
    r: &mut Rng8,
    ta: &ThresholdAutomaton,
    s: &Configuration,
    tau: &[Transition],
    p: impl Fn(&Configuration, &[usize]) -> bool,
) -> Option<Vec<usize>> {
    (0..10).map(|_| random_locs(r, ta)).find(|locs| holds_everywhere(ta, s, tau, |c| p(c, locs)))
}

/// Builds one random instance and checks each representative applicable to
/// it: length bound, final configuration and the invariant at every prefix.
pub fn check_reduction_instance(r: &mut Rng8, tally: &mut ReductionTally) -> Result<(), String> {
    use tmc::counter::{apply_schedule, run};
    use tmc::reduction::{all_zero_holds, disjunction_holds, repr_all_zero, repr_conj_disj, repr_disjunction, srep};

    let ta = random_ta(r, 6, 12);
    let nr = ta.rules.len();
    let s = random_config(r, &ta);
    let tau = random_steady(r, &ta, &s, 40);
    let target = run(&ta, &s, &tau).ok_or("generated schedule not applicable")?;
    let show = || format!("{}\nstart {:?}\ntau {:?}", tmc::ta::render_ta(&ta), s, tau);

    let rep = srep(&ta, &s, &tau).map_err(|e| format!("srep: {e}\n{}", show()))?;
    if rep.len() > 2 * nr || run(&ta, &s, &rep).as_ref() != Some(&target) {
        return Err(format!("srep {rep:?}\n{}", show()));
    }
    tally.srep += 1;

    if let Some(locs) = random_invariant_set(r, &ta, &s, &tau, disjunction_holds) {
        let repr =
            repr_disjunction(&ta, &s, &tau, &locs).map_err(|e| format!("disjunction {locs:?}: {e}\n{}", show()))?;
        let path = apply_schedule(&ta, &s, &repr.schedule).map_err(|e| e.to_string())?;
        if repr.schedule.len() > 6 * nr
            || path.last() != &target
            || !path.configs().all(|c| disjunction_holds(c, &locs))
        {
            return Err(format!("disjunction {locs:?} {repr:?}\n{}", show()));
        }
        tally.disjunction += 1;
    }

    if let Some(locs) = random_invariant_set(r, &ta, &s, &tau, all_zero_holds) {
        let repr = repr_all_zero(&ta, &s, &tau, &locs).map_err(|e| format!("all-zero {locs:?}: {e}\n{}", show()))?;
        let path = apply_schedule(&ta, &s, &repr.schedule).map_err(|e| e.to_string())?;
        if repr.schedule.len() > 2 * nr || path.last() != &target || !path.configs().all(|c| all_zero_holds(c, &locs)) {
            return Err(format!("all-zero {locs:?} {repr:?}\n{}", show()));
        }
        tally.all_zero += 1;
    }

    let clauses: Vec<Vec<usize>> =
        (0..r.gen_range(1..=3)).filter_map(|_| random_invariant_set(r, &ta, &s, &tau, disjunction_holds)).collect();
    if !clauses.is_empty() {
        let out = repr_conj_disj(&ta, &s, &tau, &clauses, Some(2))
            .map_err(|e| format!("conj-disj {clauses:?}: {e}\n{}", show()))?;
        let scaled_target = Configuration {
            kappa: target.kappa.iter().map(|k| 2 * k).collect(),
            g: target.g.iter().map(|k| 2 * k).collect(),
            p: target.p.iter().map(|k| 2 * k).collect(),
        };
        let path = apply_schedule(&ta, &out.start, &out.repr.schedule).map_err(|e| e.to_string())?;
        if out.repr.schedule.len() > 4 * nr
            || path.last() != &scaled_target
            || !path.configs().all(|c| clauses.iter().all(|l| disjunction_holds(c, l)))
        {
            return Err(format!("conj-disj {clauses:?} {out:?}\n{}", show()));
        }
        tally.conj_disj += 1;
    }
    Ok(())
}
