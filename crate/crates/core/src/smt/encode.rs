//! Query construction: frames, steps, guard and invariant assertions.

use std::fmt::Write;

use crate::eltl::{CForm, GForm, PForm, Prop};
use crate::guards::Context;
use crate::ta::{smt_int, FlowClasses, Guard, ThresholdAutomaton};

/// Symbol names for one automaton.
#[derive(Debug, Clone, Copy)]
pub struct Symbols<'a> {
    ta: &'a ThresholdAutomaton,
}

impl<'a> Symbols<'a> {
    pub fn new(ta: &'a ThresholdAutomaton) -> Self {
        Symbols { ta }
    }

    pub fn param(&self, i: usize) -> String {
        format!("p_{}", self.ta.params[i])
    }

    pub fn kappa(&self, frame: usize, loc: usize) -> String {
        format!("k_{frame}_{}", self.ta.locations[loc])
    }

    pub fn shared(&self, frame: usize, var: usize) -> String {
        format!("g_{frame}_{}", self.ta.shared[var])
    }

    /// Factor of the step from `step - 1` to `step`.
    pub fn factor(&self, step: usize) -> String {
        format!("d_{step}")
    }

    pub fn guard(&self, frame: usize, g: &Guard) -> String {
        g.smt(&self.shared(frame, g.var), |i| self.param(i))
    }

    fn frame_symbols(&self, frame: usize) -> Vec<String> {
        let mut out: Vec<String> = (0..self.ta.locations.len()).map(|l| self.kappa(frame, l)).collect();
        out.extend((0..self.ta.shared.len()).map(|v| self.shared(frame, v)));
        out
    }
}

fn sum(terms: &[String]) -> String {
    match terms {
        [] => "0".into(),
        [t] => t.clone(),
        _ => format!("(+ {})", terms.join(" ")),
    }
}

fn and(terms: Vec<String>) -> String {
    match terms.len() {
        0 => "true".into(),
        1 => terms.into_iter().next().unwrap(),
        _ => format!("(and {})", terms.join(" ")),
    }
}

/// Initial counters sum to `N(p)` over initial locations, other counters and
/// all shared variables are zero, and the resilience condition holds.
pub fn encode_init(ta: &ThresholdAutomaton) -> Vec<String> {
    let s = Symbols::new(ta);
    let param = |i| s.param(i);
    let init: Vec<String> = ta.initial.iter().map(|&l| s.kappa(0, l)).collect();
    let mut out = vec![format!("(= {} {})", sum(&init), ta.size.smt(param))];
    for l in (0..ta.locations.len()).filter(|&l| !ta.is_initial(l)) {
        out.push(format!("(= {} 0)", s.kappa(0, l)));
    }
    for v in 0..ta.shared.len() {
        out.push(format!("(= {} 0)", s.shared(0, v)));
    }
    out.push(ta.resilience.smt(&param));
    out
}

/// Rule `r` fired with factor `d_{i+1}` from frame `i` to frame `i + 1`.
///
/// Upper guards are checked for the last of the accelerated copies, so the
/// step is unlocked whenever its lower guards hold at frame `i`.
pub fn encode_step(ta: &ThresholdAutomaton, i: usize, r: usize) -> Vec<String> {
    let s = Symbols::new(ta);
    let rule = &ta.rules[r];
    let d = s.factor(i + 1);
    let mut out = Vec::new();
    for l in 0..ta.locations.len() {
        let (a, b) = (s.kappa(i, l), s.kappa(i + 1, l));
        if rule.is_self_loop() || (l != rule.from && l != rule.to) {
            out.push(format!("(= {b} {a})"));
        } else if l == rule.from {
            out.push(format!("(= (- {a} {b}) {d})"));
        } else {
            out.push(format!("(= (- {b} {a}) {d})"));
        }
    }
    if rule.is_self_loop() {
        out.push(format!("(>= {} {d})", s.kappa(i, rule.from)));
    }
    for v in 0..ta.shared.len() {
        let (a, b) = (s.shared(i, v), s.shared(i + 1, v));
        match rule.update[v] {
            0 => out.push(format!("(= {b} {a})")),
            1 => out.push(format!("(= {b} (+ {a} {d}))")),
            u => out.push(format!("(= {b} (+ {a} (* {} {d})))", smt_int(u))),
        }
    }
    for g in &rule.upper {
        let x = s.shared(i, g.var);
        let u = rule.update[g.var];
        let last = if u == 0 { x } else { format!("(+ {x} (* {} (- {d} 1)))", smt_int(u)) };
        let bound = g.bound.smt(|p| s.param(p));
        out.push(format!("(or (= {d} 0) (< {last} {bound}))"));
    }
    out
}

/// Each guard (or its negation) at frame `i`.
pub fn encode_guard_frame(ta: &ThresholdAutomaton, i: usize, guards: &[Guard], holds: bool) -> Vec<String> {
    let s = Symbols::new(ta);
    guards
        .iter()
        .map(|g| {
            let t = s.guard(i, g);
            if holds {
                t
            } else {
                format!("(not {t})")
            }
        })
        .collect()
}

fn gform_smt(s: &Symbols, frame: usize, g: &GForm) -> String {
    match g {
        GForm::Lit(a) => s.guard(frame, &a.guard),
        GForm::Not(x) => format!("(not {})", gform_smt(s, frame, x)),
        GForm::And(xs) => and(xs.iter().map(|x| gform_smt(s, frame, x)).collect()),
    }
}

fn cform_terms(s: &Symbols, frame: usize, c: &CForm, out: &mut Vec<String>) {
    match c {
        CForm::AllZero(ls) => out.extend(ls.iter().map(|&l| format!("(= {} 0)", s.kappa(frame, l)))),
        CForm::AnyNonZero(ls) => {
            let ts: Vec<String> = ls.iter().map(|&l| format!("(> {} 0)", s.kappa(frame, l))).collect();
            out.push(match ts.len() {
                0 => "false".into(),
                1 => ts[0].clone(),
                _ => format!("(or {})", ts.join(" ")),
            });
        }
        CForm::And(xs) => xs.iter().for_each(|x| cform_terms(s, frame, x, out)),
    }
}

/// Assertions for a proposition at one frame; conjunctions are split.
pub fn prop_smt(ta: &ThresholdAutomaton, frame: usize, prop: &Prop) -> Vec<String> {
    let s = Symbols::new(ta);
    let mut out = Vec::new();
    for p in prop {
        match p {
            PForm::C(c) => cform_terms(&s, frame, c, &mut out),
            PForm::GOr(g, c) => {
                let mut cs = Vec::new();
                cform_terms(&s, frame, c, &mut cs);
                out.push(format!("(or {} {})", gform_smt(&s, frame, g), and(cs)));
            }
        }
    }
    out
}

/// A proposition asserted at every listed frame.
pub fn encode_invariant_frames(
    ta: &ThresholdAutomaton,
    frames: impl IntoIterator<Item = usize>,
    prop: &Prop,
) -> Vec<String> {
    frames.into_iter().flat_map(|f| prop_smt(ta, f, prop)).collect()
}

/// Counters and shared variables agree at frames `ls` and `last`.
pub fn encode_loop_closure(ta: &ThresholdAutomaton, ls: usize, last: usize) -> Vec<String> {
    let s = Symbols::new(ta);
    s.frame_symbols(ls).into_iter().zip(s.frame_symbols(last)).map(|(a, b)| format!("(= {a} {b})")).collect()
}

/// A query under construction: frames `0..=last_frame()` joined by steps.
#[derive(Debug, Clone)]
pub struct SmtQuery<'a> {
    ta: &'a ThresholdAutomaton,
    declared: Vec<String>,
    asserts: Vec<String>,
    steps: Vec<usize>,
    invariants: Vec<(usize, Prop)>,
    loop_start: Option<usize>,
}

impl<'a> SmtQuery<'a> {
    /// Frame 0 declared and constrained to be initial.
    pub fn new(ta: &'a ThresholdAutomaton) -> Self {
        let mut q = Self::bare(ta);
        q.assert_all(encode_init(ta));
        q
    }

    /// Frame 0 declared without constraints.
    pub fn bare(ta: &'a ThresholdAutomaton) -> Self {
        let mut q = SmtQuery {
            ta,
            declared: Vec::new(),
            asserts: Vec::new(),
            steps: Vec::new(),
            invariants: Vec::new(),
            loop_start: None,
        };
        let s = Symbols::new(ta);
        for i in 0..ta.params.len() {
            q.declare(s.param(i));
        }
        for x in s.frame_symbols(0) {
            q.declare(x);
        }
        q
    }

    fn declare(&mut self, name: String) {
        self.declared.push(name);
    }

    pub fn ta(&self) -> &'a ThresholdAutomaton {
        self.ta
    }

    pub fn last_frame(&self) -> usize {
        self.steps.len()
    }

    /// Rule of each step.
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn loop_start(&self) -> Option<usize> {
        self.loop_start
    }

    pub fn assert(&mut self, a: String) {
        self.asserts.push(a);
    }

    pub fn assert_all(&mut self, xs: impl IntoIterator<Item = String>) {
        self.asserts.extend(xs);
    }

    /// Appends a step firing `rule`; returns the new frame.
    pub fn push_step(&mut self, rule: usize) -> usize {
        let i = self.last_frame();
        let s = Symbols::new(self.ta);
        for x in s.frame_symbols(i + 1) {
            self.declare(x);
        }
        self.declare(s.factor(i + 1));
        self.asserts.extend(encode_step(self.ta, i, rule));
        self.steps.push(rule);
        i + 1
    }

    pub fn assert_prop(&mut self, frame: usize, prop: &Prop) {
        self.asserts.extend(prop_smt(self.ta, frame, prop));
    }

    pub fn assert_guards(&mut self, frame: usize, guards: &[Guard], holds: bool) {
        self.asserts.extend(encode_guard_frame(self.ta, frame, guards, holds));
    }

    /// `prop` must hold at every frame from `from` on, including frames
    /// appended later.
    pub fn add_invariant(&mut self, from: usize, prop: Prop) {
        if !prop.is_empty() {
            self.invariants.push((from, prop));
        }
    }

    pub fn set_loop_start(&mut self, frame: usize) {
        self.loop_start = Some(frame);
    }

    /// Equates the loop-start frame with the last frame.
    pub fn close_loop(&mut self) {
        let ls = self.loop_start.expect("loop start recorded before closing");
        let last = self.last_frame();
        if ls != last {
            self.asserts.extend(encode_loop_closure(self.ta, ls, last));
        }
    }

    /// Every declared symbol, in declaration order.
    pub fn symbols(&self) -> Vec<String> {
        self.declared.clone()
    }

    /// Declarations and assertions, without `check-sat`.
    pub fn script(&self) -> String {
        let mut out = String::from("(set-logic QF_LIA)\n");
        for d in &self.declared {
            let _ = writeln!(out, "(declare-fun {d} () Int)");
        }
        for d in &self.declared {
            let _ = writeln!(out, "(assert (>= {d} 0))");
        }
        for a in &self.asserts {
            let _ = writeln!(out, "(assert {a})");
        }
        for (from, prop) in &self.invariants {
            for a in encode_invariant_frames(self.ta, *from..=self.last_frame(), prop) {
                let _ = writeln!(out, "(assert {a})");
            }
        }
        out
    }

    /// Stand-alone script for replay.
    pub fn dump(&self) -> String {
        format!("{}(check-sat)\n(exit)\n", self.script())
    }
}

/// One pass of the segment pattern: rules unlocked in `ctx`, class by class
/// in linear order. Loop classes contribute their cycle twice so that any
/// rotation fits; self-loops never change a configuration and are left out.
pub fn segment_rules(ta: &ThresholdAutomaton, classes: &FlowClasses, ctx: &Context, guards: &[Guard]) -> Vec<usize> {
    let mut out = Vec::new();
    for (c, members) in classes.classes.iter().enumerate() {
        let unlocked = |r: &usize| ctx.unlocks(&ta.rules[*r], guards);
        if classes.is_loop[c] {
            let cyc: Vec<usize> = classes.cycle_order(ta, c).into_iter().filter(unlocked).collect();
            out.extend(cyc.iter().chain(&cyc));
        } else {
            out.extend(members.iter().copied().filter(|r| unlocked(r) && !ta.rules[*r].is_self_loop()));
        }
    }
    out
}

/// Appends the segment pattern for `ctx` `repetitions` times, each step with
/// a free factor. Returns the number of steps added.
pub fn push_segment(
    q: &mut SmtQuery,
    classes: &FlowClasses,
    ctx: &Context,
    guards: &[Guard],
    repetitions: usize,
) -> usize {
    let pattern = segment_rules(q.ta(), classes, ctx, guards);
    for _ in 0..repetitions {
        for &r in &pattern {
            q.push_step(r);
        }
    }
    pattern.len() * repetitions
}
