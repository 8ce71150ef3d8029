//! Parameterized model checking: enumerate lasso shapes from the merged cut
//! and threshold graphs, encode each shape as one query, and report the
//! first satisfiable shape as a counterexample.

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde_json::json;
use thiserror::Error;

use crate::counter::Configuration;
use crate::eltl::{
    canonicalize, check_witness, eval_on_lasso, show, syntax_tree, CForm, CanonicalFormula, CutFunction, CutGraph,
    CutVertex, Formula, GForm, GuardAtom, PForm, RootKind, SyntaxTree,
};
use crate::guards::{merge_graphs, threshold_graph, Context, MergedGraph, ShapeVertex, ThresholdGraph};
use crate::smt::{push_segment, run_solver, DecodedModel, QueryResult, SmtError, SmtQuery, Solver};
use crate::ta::{flow_classes, FlowClasses, GuardKind, ThresholdAutomaton};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error("cannot write {path}: {msg}")]
    Dump { path: String, msg: String },
    #[error("model of shape {shape} is not a witness: {msg}")]
    BadModel { shape: usize, msg: String },
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub solver: Solver,
    /// Number of shapes checked concurrently.
    pub jobs: usize,
    /// Directory receiving one `.smt2` file per shape.
    pub dump_smt: Option<PathBuf>,
    /// How often the rule pattern repeats in each segment.
    pub repetitions: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { solver: Solver::default(), jobs: 1, dump_smt: None, repetitions: 3 }
    }
}

/// Everything derived from an automaton and a formula before shapes are
/// enumerated.
#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub ta: &'a ThresholdAutomaton,
    pub formula: Formula,
    pub canonical: CanonicalFormula,
    pub tree: SyntaxTree,
    pub cut: CutGraph,
    pub threshold: ThresholdGraph,
    pub merged: MergedGraph,
    pub classes: FlowClasses,
}

impl<'a> Problem<'a> {
    pub fn new(ta: &'a ThresholdAutomaton, formula: &Formula, solver: &Solver) -> Result<Self, SmtError> {
        let threshold = threshold_graph(ta, solver)?;
        Ok(Self::with_threshold_graph(ta, formula, threshold))
    }

    pub fn with_threshold_graph(ta: &'a ThresholdAutomaton, formula: &Formula, threshold: ThresholdGraph) -> Self {
        let canonical = canonicalize(formula);
        let tree = syntax_tree(&canonical);
        let cut = crate::eltl::cut_graph(&tree);
        let merged = merge_graphs(&cut, &threshold);
        Problem { ta, formula: formula.clone(), canonical, tree, cut, threshold, merged, classes: flow_classes(ta) }
    }

    pub fn vertex_name(&self, v: &ShapeVertex) -> String {
        match v {
            ShapeVertex::Cut(c) => c.to_string(),
            ShapeVertex::Guard(i) => format!("[{}]", self.threshold.render(self.ta, *i)),
        }
    }
}

/// One topological ordering of the merged graph, with the guards placed
/// after `loop_start` removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoShape {
    /// Indices into the merged graph's vertices.
    pub order: Vec<usize>,
    /// Context reached before the loop.
    pub context: Context,
}

impl LassoShape {
    pub fn toggles(&self) -> usize {
        self.context.len()
    }

    pub fn vertices<'p>(&'p self, p: &'p Problem) -> impl Iterator<Item = &'p ShapeVertex> + 'p {
        self.order.iter().map(move |&v| &p.merged.vertices[v])
    }

    pub fn describe(&self, p: &Problem) -> String {
        self.vertices(p).map(|v| p.vertex_name(v)).collect::<Vec<_>>().join(" < ")
    }
}

/// All shapes, fewest guard toggles first (ties keep enumeration order).
pub fn build_shapes(p: &Problem) -> Vec<LassoShape> {
    let mut shapes: Vec<LassoShape> = p
        .merged
        .orderings()
        .map(|order| {
            let mut context = Context::default();
            for &v in &order {
                if let ShapeVertex::Guard(t) = p.merged.vertices[v] {
                    for &g in &p.threshold.vertices[t] {
                        context.toggle(g, &p.threshold.guards);
                    }
                }
            }
            LassoShape { order, context }
        })
        .collect();
    shapes.sort_by_key(LassoShape::toggles);
    shapes
}

/// A shape encoded as a query, with the frame of each cut-graph vertex.
#[derive(Debug, Clone)]
pub struct EncodedShape<'a> {
    pub query: SmtQuery<'a>,
    pub cut_frames: Vec<usize>,
}

/// Walks the shape: F-nodes assert their proposition at the current frame
/// and their invariant from there on (from the loop start when covered);
/// guard vertices append one pass of the current pattern, assert the toggled
/// guards and extend the context; `loop_start` records its frame;
/// `loop_end` closes the loop. A segment follows every vertex but the last.
pub fn encode_shape<'a>(p: &Problem<'a>, shape: &LassoShape, repetitions: usize) -> EncodedShape<'a> {
    let ta = p.ta;
    let guards = &p.threshold.guards;
    let mut q = SmtQuery::new(ta);
    let mut ctx = Context::default();
    let mut cut_frames = vec![0; p.cut.vertices.len()];
    let mut ls_frame = 0;
    if p.canonical.kind == RootKind::Plain {
        q.assert_prop(0, &p.canonical.body.prop);
        q.add_invariant(0, p.canonical.body.g_prop());
    }
    push_segment(&mut q, &p.classes, &ctx, guards, repetitions);
    for &v in &shape.order {
        let here = q.last_frame();
        match &p.merged.vertices[v] {
            ShapeVertex::Cut(CutVertex::Node(id)) => {
                let body = p.tree.node(id).and_then(|n| n.body.as_ref()).expect("cut vertex is a tree node");
                let ci = p.cut.index(&CutVertex::Node(id.clone())).unwrap();
                cut_frames[ci] = here;
                q.assert_prop(here, &body.prop);
                let from = if p.cut.covered[ci] { ls_frame } else { here };
                q.add_invariant(from, body.g_prop());
                push_segment(&mut q, &p.classes, &ctx, guards, repetitions);
            }
            ShapeVertex::Guard(t) => {
                push_segment(&mut q, &p.classes, &ctx, guards, 1);
                let at = q.last_frame();
                for &g in &p.threshold.vertices[*t] {
                    let rises = guards[g].kind == GuardKind::Lower;
                    q.assert_guards(at, &[guards[g].clone()], rises);
                    ctx.toggle(g, guards);
                }
                push_segment(&mut q, &p.classes, &ctx, guards, repetitions);
            }
            ShapeVertex::Cut(CutVertex::LoopStart) => {
                ls_frame = here;
                q.set_loop_start(here);
                cut_frames[p.cut.loop_start()] = here;
                push_segment(&mut q, &p.classes, &ctx, guards, repetitions);
            }
            ShapeVertex::Cut(CutVertex::LoopEnd) => {
                q.close_loop();
                cut_frames[p.cut.loop_end()] = if here > ls_frame { here - 1 } else { here };
            }
        }
    }
    let last = q.last_frame();
    let (low, up) = ctx.untoggled(guards);
    q.assert_guards(last, &low, false);
    q.assert_guards(last, &up, true);
    EncodedShape { query: q, cut_frames }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub shape: usize,
    pub model: DecodedModel,
    /// Lasso position of each cut-graph vertex.
    pub cut_frames: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Counterexample(Box<Counterexample>),
    /// Some shapes were undecided and none was satisfiable.
    Inconclusive(Vec<usize>),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Verified => "verified",
            Verdict::Counterexample(_) => "counterexample",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Counterexample(_) => 1,
            Verdict::Inconclusive(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub verdict: Verdict,
    pub shapes: Vec<LassoShape>,
    /// Solver status per shape; `None` for shapes skipped after a
    /// counterexample was found.
    pub statuses: Vec<Option<&'static str>>,
}

type ShapeOutcome = Result<(QueryResult, Vec<usize>), VerifyError>;

/// Validates a satisfying model as a lasso and a witness for the formula.
fn validate(p: &Problem, shape: usize, model: &DecodedModel, cut_frames: &[usize]) -> Result<(), VerifyError> {
    let bad = |msg: String| VerifyError::BadModel { shape, msg };
    let lasso = model.lasso(p.ta).map_err(|e| bad(e.to_string()))?;
    let zeta = CutFunction::new(&p.cut, &lasso, cut_frames.to_vec()).map_err(|e| bad(e.to_string()))?;
    check_witness(&lasso, &p.canonical, &p.tree, &p.cut, &zeta).map_err(|e| bad(e.to_string()))?;
    if !eval_on_lasso(&lasso, &p.formula) {
        return Err(bad("formula false on the lasso".into()));
    }
    Ok(())
}

/// Checks a single shape.
pub fn check_one_order(
    p: &Problem,
    shapes: &[LassoShape],
    index: usize,
    options: &VerifyOptions,
) -> Result<(QueryResult, Vec<usize>), VerifyError> {
    let enc = encode_shape(p, &shapes[index], options.repetitions);
    let res = run_solver(&enc.query, &options.solver)?;
    if let QueryResult::Sat(m) = &res {
        validate(p, index, m, &enc.cut_frames)?;
    }
    Ok((res, enc.cut_frames))
}

fn dump_file(dir: &std::path::Path, index: usize) -> PathBuf {
    dir.join(format!("shape_{index:03}.smt2"))
}

/// Checks every shape of the formula (a counterexample specification).
pub fn verify(ta: &ThresholdAutomaton, formula: &Formula, options: &VerifyOptions) -> Result<Report, VerifyError> {
    let p = Problem::new(ta, formula, &options.solver)?;
    verify_problem(&p, options)
}

pub fn verify_problem(p: &Problem, options: &VerifyOptions) -> Result<Report, VerifyError> {
    let shapes = build_shapes(p);
    if let Some(dir) = &options.dump_smt {
        let io = |e: std::io::Error, path: &std::path::Path| VerifyError::Dump {
            path: path.display().to_string(),
            msg: e.to_string(),
        };
        fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
        for (i, shape) in shapes.iter().enumerate() {
            let path = dump_file(dir, i);
            let text = encode_shape(p, shape, options.repetitions).query.dump();
            fs::write(&path, text).map_err(|e| io(e, &path))?;
        }
    }

    let n = shapes.len();
    let next = AtomicUsize::new(0);
    let best_sat = AtomicUsize::new(usize::MAX);
    let results: Mutex<Vec<Option<ShapeOutcome>>> = Mutex::new((0..n).map(|_| None).collect());
    thread::scope(|s| {
        for _ in 0..options.jobs.max(1).min(n.max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                if i > best_sat.load(Ordering::SeqCst) {
                    continue;
                }
                let r = check_one_order(p, &shapes, i, options);
                if matches!(r, Ok((QueryResult::Sat(_), _))) {
                    best_sat.fetch_min(i, Ordering::SeqCst);
                }
                results.lock().unwrap()[i] = Some(r);
            });
        }
    });

    let results = results.into_inner().unwrap();
    let mut statuses = Vec::with_capacity(n);
    let mut unknown = Vec::new();
    let mut found = None;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            None => statuses.push(None),
            Some(Err(e)) => {
                if found.is_none() {
                    return Err(e);
                }
                statuses.push(None);
            }
            Some(Ok((res, cut_frames))) => {
                statuses.push(Some(res.status()));
                match res {
                    QueryResult::Sat(model) if found.is_none() => {
                        found = Some(Counterexample { shape: i, model, cut_frames });
                    }
                    QueryResult::Unknown => unknown.push(i),
                    _ => {}
                }
            }
        }
    }
    let verdict = match found {
        Some(c) => Verdict::Counterexample(Box::new(c)),
        None if unknown.is_empty() => Verdict::Verified,
        None => Verdict::Inconclusive(unknown),
    };
    Ok(Report { verdict, shapes, statuses })
}

/// Atomic propositions of a formula: location tests and named guards.
fn atoms(phi: &Formula, locs: &mut Vec<usize>, guards: &mut Vec<GuardAtom>) {
    fn cform(c: &CForm, locs: &mut Vec<usize>) {
        match c {
            CForm::AllZero(ls) | CForm::AnyNonZero(ls) => locs.extend(ls),
            CForm::And(xs) => xs.iter().for_each(|x| cform(x, locs)),
        }
    }
    fn gform(g: &GForm, guards: &mut Vec<GuardAtom>) {
        match g {
            GForm::Lit(a) => {
                if !guards.contains(a) {
                    guards.push(a.clone());
                }
            }
            GForm::Not(x) => gform(x, guards),
            GForm::And(xs) => xs.iter().for_each(|x| gform(x, guards)),
        }
    }
    match phi {
        Formula::Prop(ps) => {
            for p in ps {
                match p {
                    PForm::C(c) => cform(c, locs),
                    PForm::GOr(g, c) => {
                        gform(g, guards);
                        cform(c, locs);
                    }
                }
            }
        }
        Formula::F(x) | Formula::G(x) => atoms(x, locs, guards),
        Formula::And(xs) => xs.iter().for_each(|x| atoms(x, locs, guards)),
    }
}

fn frame_atoms(p: &Problem, c: &Configuration) -> Vec<(String, bool)> {
    let mut locs = Vec::new();
    let mut named = Vec::new();
    atoms(&p.formula, &mut locs, &mut named);
    locs.sort_unstable();
    locs.dedup();
    let mut out: Vec<(String, bool)> =
        locs.iter().map(|&l| (format!("[{}]!=0", p.ta.locations[l]), c.kappa[l] != 0)).collect();
    out.extend(named.iter().map(|a| (a.name.clone(), a.guard.holds(&c.g, &c.p))));
    for g in &p.threshold.guards {
        out.push((g.render(p.ta), g.holds(&c.g, &c.p)));
    }
    out
}

/// Human-readable report and its JSON counterpart. Counterexamples are
/// re-simulated before they are printed.
pub fn explain(p: &Problem, report: &Report) -> Result<(String, serde_json::Value), VerifyError> {
    let ta = p.ta;
    let mut text = format!("formula: {}\nshapes: {}\n", show(ta, &p.formula), report.shapes.len());
    let shapes_json: Vec<_> = report
        .shapes
        .iter()
        .zip(&report.statuses)
        .map(|(s, st)| json!({ "order": s.describe(p), "toggles": s.toggles(), "status": st }))
        .collect();
    let mut out = json!({ "verdict": report.verdict.name(), "shapes": shapes_json });
    match &report.verdict {
        Verdict::Verified => text.push_str("verdict: verified (every shape is unsatisfiable)\n"),
        Verdict::Inconclusive(us) => {
            text.push_str(&format!("verdict: inconclusive (undecided shapes {us:?})\n"));
            out["undecided"] = json!(us);
        }
        Verdict::Counterexample(c) => {
            c.model.resimulate(ta)?;
            validate(p, c.shape, &c.model, &c.cut_frames)?;
            let params: Vec<String> = ta.params.iter().zip(&c.model.params).map(|(n, v)| format!("{n}={v}")).collect();
            text.push_str("verdict: counterexample\n");
            text.push_str(&format!("shape {}: {}\n", c.shape, report.shapes[c.shape].describe(p)));
            text.push_str(&format!("parameters: {}\n", params.join(", ")));
            let ls = c.model.loop_start.unwrap_or(c.model.steps.len());
            let mut frames = Vec::new();
            for (i, f) in c.model.frames.iter().enumerate() {
                let kappa: Vec<String> = ta.locations.iter().zip(&f.kappa).map(|(l, k)| format!("{l}={k}")).collect();
                let shared: Vec<String> = ta.shared.iter().zip(&f.g).map(|(x, v)| format!("{x}={v}")).collect();
                let truth = frame_atoms(p, f);
                let holds: Vec<&str> = truth.iter().filter(|(_, b)| *b).map(|(n, _)| n.as_str()).collect();
                let mark = if i == ls { " <- loop start" } else { "" };
                text.push_str(&format!(
                    "  frame {i}: {} | {} | holds: {}{mark}\n",
                    kappa.join(" "),
                    shared.join(" "),
                    holds.join(", ")
                ));
                if let Some(t) = c.model.steps.get(i) {
                    if t.factor > 0 {
                        text.push_str(&format!("    ({}, {})\n", ta.rules[t.rule].name, t.factor));
                    }
                }
                frames.push(json!({
                    "kappa": f.kappa, "g": f.g,
                    "atoms": truth.iter().map(|(n, b)| json!({"atom": n, "holds": b})).collect::<Vec<_>>(),
                }));
            }
            let steps: Vec<_> =
                c.model.steps.iter().map(|t| json!({"rule": ta.rules[t.rule].name, "factor": t.factor})).collect();
            out["counterexample"] = json!({
                "shape": c.shape,
                "params": c.model.params,
                "loop_start": ls,
                "frames": frames,
                "steps": steps,
            });
        }
    }
    Ok((text, out))
}
