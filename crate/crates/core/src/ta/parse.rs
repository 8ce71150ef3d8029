//! Reader and pretty-printer for the line-oriented `.ta` format.

use std::collections::HashSet;

use thiserror::Error;

use super::expr::{parse_bool, parse_linear, ParseResult};
use super::{Guard, GuardKind, LinearExpr, Rule, ThresholdAutomaton};
use crate::lex::{tokenize_line, Cursor, Pos, Tok};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: undeclared location `{name}`")]
    UndeclaredLocation { pos: Pos, name: String },
    #[error("{pos}: undeclared shared variable `{name}`")]
    UndeclaredVariable { pos: Pos, name: String },
    #[error("{pos}: undeclared parameter `{name}`")]
    UndeclaredParameter { pos: Pos, name: String },
    #[error("{pos}: duplicate name `{name}`")]
    Duplicate { pos: Pos, name: String },
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
}

impl From<(Pos, String)> for ParseError {
    fn from((pos, msg): (Pos, String)) -> Self {
        ParseError::Syntax { pos, msg }
    }
}

#[derive(Default)]
struct Builder {
    name: Option<String>,
    params: Option<Vec<String>>,
    shared: Option<Vec<String>>,
    locations: Option<Vec<String>>,
    initial: Option<Vec<usize>>,
    resilience: Option<super::BoolExpr>,
    size: Option<LinearExpr>,
    rules: Vec<Rule>,
    names: HashSet<String>,
}

impl Builder {
    fn declare(&mut self, name: &str, pos: Pos) -> Result<(), ParseError> {
        if !self.names.insert(name.to_string()) {
            return Err(ParseError::Duplicate { pos, name: name.into() });
        }
        Ok(())
    }

    fn params(&self) -> &[String] {
        self.params.as_deref().unwrap_or(&[])
    }

    fn location(&self, name: &str, pos: Pos) -> Result<usize, ParseError> {
        self.locations
            .as_ref()
            .and_then(|ls| ls.iter().position(|l| l == name))
            .ok_or_else(|| ParseError::UndeclaredLocation { pos, name: name.into() })
    }
}

fn param_lookup(params: &[String]) -> impl Fn(&str, Pos) -> ParseResult<usize> + '_ {
    move |name, pos| params.iter().position(|p| p == name).ok_or((pos, format!("\u{0}param:{name}")))
}

/// Converts the internal "undeclared parameter" marker into a typed error.
fn lift(e: (Pos, String)) -> ParseError {
    match e.1.strip_prefix("\u{0}param:") {
        Some(name) => ParseError::UndeclaredParameter { pos: e.0, name: name.into() },
        None => e.into(),
    }
}

/// Parses the textual automaton format. Rules keep their file order.
pub fn parse_ta(text: &str) -> Result<ThresholdAutomaton, ParseError> {
    let mut b = Builder::default();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let toks = tokenize_line(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, line_no, line.chars().count());
        let (kw, kw_pos) = cur.ident()?;
        match kw.as_str() {
            "ta" => {
                let (name, _) = cur.ident()?;
                b.name = Some(name);
            }
            "params" => {
                let mut ps = Vec::new();
                while !cur.at_end() {
                    let (p, pos) = cur.ident()?;
                    b.declare(&p, pos)?;
                    ps.push(p);
                }
                b.params = Some(ps);
            }
            "shared" => {
                let mut vs = Vec::new();
                while !cur.at_end() {
                    let (v, pos) = cur.ident()?;
                    b.declare(&v, pos)?;
                    vs.push(v);
                }
                b.shared = Some(vs);
            }
            "locations" => {
                let mut ls = Vec::new();
                while !cur.at_end() {
                    let (l, pos) = cur.ident()?;
                    b.declare(&l, pos)?;
                    ls.push(l);
                }
                b.locations = Some(ls);
            }
            "initial" => {
                let mut is = Vec::new();
                while !cur.at_end() {
                    let (l, pos) = cur.ident()?;
                    let idx = b.location(&l, pos)?;
                    if is.contains(&idx) {
                        return Err(ParseError::Duplicate { pos, name: l });
                    }
                    is.push(idx);
                }
                b.initial = Some(is);
            }
            "resilience" => {
                let params = b.params().to_vec();
                let e = parse_bool(&mut cur, params.len(), &param_lookup(&params)).map_err(lift)?;
                b.resilience = Some(e);
            }
            "size" => {
                let params = b.params().to_vec();
                let e = parse_linear(&mut cur, params.len(), &param_lookup(&params)).map_err(lift)?;
                b.size = Some(e);
            }
            "rule" => {
                let r = parse_rule(&mut cur, &mut b)?;
                b.rules.push(r);
            }
            _ => return Err(ParseError::Syntax { pos: kw_pos, msg: format!("unknown declaration `{kw}`") }),
        }
        if !cur.at_end() {
            let pos = cur.pos();
            let t = cur.next().unwrap();
            return Err(ParseError::Syntax { pos, msg: format!("unexpected {}", t.tok) });
        }
    }
    Ok(ThresholdAutomaton {
        name: b.name.ok_or(ParseError::Missing("ta"))?,
        params: b.params.unwrap_or_default(),
        shared: b.shared.unwrap_or_default(),
        locations: b.locations.ok_or(ParseError::Missing("locations"))?,
        initial: b.initial.ok_or(ParseError::Missing("initial"))?,
        rules: b.rules,
        resilience: b.resilience.unwrap_or(super::BoolExpr::True),
        size: b.size.ok_or(ParseError::Missing("size"))?,
    })
}

fn parse_rule(cur: &mut Cursor<'_>, b: &mut Builder) -> Result<Rule, ParseError> {
    let (name, pos) = cur.ident()?;
    b.declare(&name, pos)?;
    let (from, pos) = cur.ident()?;
    let from = b.location(&from, pos)?;
    cur.expect(&Tok::Arrow)?;
    let (to, pos) = cur.ident()?;
    let to = b.location(&to, pos)?;
    let shared = b.shared.clone().unwrap_or_default();
    let params = b.params().to_vec();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    if cur.eat_keyword("when") {
        for g in parse_guard_conj_at(cur, &shared, &params)? {
            match g.kind {
                GuardKind::Lower => lower.push(g),
                GuardKind::Upper => upper.push(g),
            }
        }
    }
    let mut update = vec![0; shared.len()];
    if cur.eat_keyword("do") {
        loop {
            let (v, pos) = cur.ident()?;
            let vi = shared.iter().position(|s| *s == v).ok_or(ParseError::UndeclaredVariable { pos, name: v })?;
            cur.expect(&Tok::PlusEq)?;
            let pos = cur.pos();
            match cur.next().map(|t| &t.tok) {
                Some(Tok::Int(n)) => update[vi] += *n,
                _ => return Err(ParseError::Syntax { pos, msg: "expected non-negative integer increment".into() }),
            }
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    Ok(Rule { name, from, to, lower, upper, update })
}

/// Parses `true` or `guard (& guard)*` with guards `x >= e` / `x < e`.
fn parse_guard_conj_at(cur: &mut Cursor<'_>, shared: &[String], params: &[String]) -> Result<Vec<Guard>, ParseError> {
    if cur.eat_keyword("true") {
        return Ok(Vec::new());
    }
    let mut out = vec![parse_one_guard(cur, shared, params)?];
    while cur.eat(&Tok::Amp) {
        out.push(parse_one_guard(cur, shared, params)?);
    }
    Ok(out)
}

fn parse_one_guard(cur: &mut Cursor<'_>, shared: &[String], params: &[String]) -> Result<Guard, ParseError> {
    let (v, pos) = cur.ident()?;
    let var = shared.iter().position(|s| *s == v).ok_or(ParseError::UndeclaredVariable { pos, name: v })?;
    let pos = cur.pos();
    let kind = match cur.next().map(|t| &t.tok) {
        Some(Tok::Ge) => GuardKind::Lower,
        Some(Tok::Lt) => GuardKind::Upper,
        _ => return Err(ParseError::Syntax { pos, msg: "expected `>=` or `<` in guard".into() }),
    };
    let bound = parse_linear(cur, params.len(), &param_lookup(params)).map_err(lift)?;
    Ok(Guard { var, kind, bound })
}

/// Parses a single guard from a whole line of text (used by spec files).
pub(crate) fn parse_guard_line(cur: &mut Cursor<'_>, ta: &ThresholdAutomaton) -> Result<Guard, ParseError> {
    parse_one_guard(cur, &ta.shared, &ta.params)
}

/// Pretty-prints an automaton in the format accepted by [`parse_ta`].
pub fn render_ta(ta: &ThresholdAutomaton) -> String {
    let mut out = String::new();
    out.push_str(&format!("ta {}\n", ta.name));
    if !ta.params.is_empty() {
        out.push_str(&format!("params {}\n", ta.params.join(" ")));
    }
    out.push_str(&format!("resilience {}\n", ta.resilience.render(&ta.params)));
    out.push_str(&format!("size {}\n", ta.size.render(&ta.params)));
    if !ta.shared.is_empty() {
        out.push_str(&format!("shared {}\n", ta.shared.join(" ")));
    }
    out.push_str(&format!("locations {}\n", ta.locations.join(" ")));
    let init: Vec<&str> = ta.initial.iter().map(|&i| ta.locations[i].as_str()).collect();
    out.push_str(&format!("initial {}\n", init.join(" ")));
    for r in &ta.rules {
        out.push_str(&format!("rule {} {} -> {}", r.name, ta.locations[r.from], ta.locations[r.to]));
        let guards: Vec<String> = r.guards().map(|g| g.render(ta)).collect();
        if !guards.is_empty() {
            out.push_str(&format!(" when {}", guards.join(" & ")));
        }
        let ups: Vec<String> = r
            .update
            .iter()
            .enumerate()
            .filter(|(_, &u)| u != 0)
            .map(|(i, u)| format!("{}+={}", ta.shared[i], u))
            .collect();
        if !ups.is_empty() {
            out.push_str(&format!(" do {}", ups.join(", ")));
        }
        out.push('\n');
    }
    out
}
