//! Reader for `.spec` files.
//!
//! ```text
//! guard g1 := x >= t + 1
//! define fair := [l1]=0 & (!g1 | [l0]=0)
//! spec corr := E(G F fair & [l0]=0 & G [l3]=0)
//! ```
//!
//! Defines are substituted by name. Mixing `&` and `|` at one level requires
//! parentheses.

use std::collections::HashMap;

use thiserror::Error;

use super::ast::{CForm, Formula, GForm, GuardAtom, PForm, Prop};
use crate::lex::{tokenize_line, Cursor, Pos, Tok};
use crate::ta::{parse_guard_line, ParseError, ThresholdAutomaton};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    OutOfGrammar { pos: Pos, msg: String },
    #[error("{pos}: unknown name `{name}`")]
    UnknownName { pos: Pos, name: String },
    #[error("{pos}: duplicate name `{name}`")]
    Duplicate { pos: Pos, name: String },
    #[error("guard: {0}")]
    Guard(#[from] ParseError),
    #[error("no spec named `{0}`")]
    NoSuchSpec(String),
}

impl From<(Pos, String)> for SpecError {
    fn from((pos, msg): (Pos, String)) -> Self {
        SpecError::Syntax { pos, msg }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecFile {
    pub guards: Vec<GuardAtom>,
    pub specs: Vec<(String, Formula)>,
}

impl SpecFile {
    pub fn get(&self, name: &str) -> Result<&Formula, SpecError> {
        self.specs.iter().find(|(n, _)| n == name).map(|(_, f)| f).ok_or_else(|| SpecError::NoSuchSpec(name.into()))
    }
}

/// Untyped expression tree; converted into the grammar afterwards.
#[derive(Debug, Clone)]
enum Expr {
    True,
    False,
    Zero(usize),
    NonZero(usize),
    Guard(GuardAtom),
    Not(Box<Expr>, Pos),
    And(Vec<Expr>),
    Or(Vec<Expr>, Pos),
    F(Box<Expr>),
    G(Box<Expr>),
}

struct Env<'a> {
    ta: &'a ThresholdAutomaton,
    guards: HashMap<String, GuardAtom>,
    defines: HashMap<String, Expr>,
}

pub fn parse_spec(text: &str, ta: &ThresholdAutomaton) -> Result<SpecFile, SpecError> {
    let mut env = Env { ta, guards: HashMap::new(), defines: HashMap::new() };
    let mut out = SpecFile { guards: Vec::new(), specs: Vec::new() };
    for (i, line) in text.lines().enumerate() {
        let toks = tokenize_line(line, i + 1)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&toks, i + 1, line.chars().count());
        let (kw, kw_pos) = cur.ident()?;
        let (name, name_pos) = cur.ident()?;
        let taken = env.guards.contains_key(&name)
            || env.defines.contains_key(&name)
            || out.specs.iter().any(|(n, _)| *n == name);
        if taken || is_reserved(&name) {
            return Err(SpecError::Duplicate { pos: name_pos, name });
        }
        cur.expect(&Tok::Define)?;
        match kw.as_str() {
            "guard" => {
                let guard = parse_guard_line(&mut cur, ta)?;
                let atom = GuardAtom { name: name.clone(), guard };
                env.guards.insert(name, atom.clone());
                out.guards.push(atom);
            }
            "define" => {
                let e = parse_expr(&mut cur, &env)?;
                env.defines.insert(name, e);
            }
            "spec" => {
                let f = parse_top(&mut cur, &env)?;
                out.specs.push((name, f));
            }
            _ => return Err(SpecError::Syntax { pos: kw_pos, msg: format!("unknown statement `{kw}`") }),
        }
        expect_end(&mut cur)?;
    }
    Ok(out)
}

/// Parses a single formula, optionally wrapped in `E(...)`, against the
/// guards declared in `guards`.
pub fn parse_formula(text: &str, ta: &ThresholdAutomaton, guards: &[GuardAtom]) -> Result<Formula, SpecError> {
    let env = Env { ta, guards: guards.iter().map(|g| (g.name.clone(), g.clone())).collect(), defines: HashMap::new() };
    let toks = tokenize_line(text, 1)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count());
    let f = parse_top(&mut cur, &env)?;
    expect_end(&mut cur)?;
    Ok(f)
}

fn is_reserved(name: &str) -> bool {
    matches!(name, "F" | "G" | "E" | "true" | "false")
}

fn expect_end(cur: &mut Cursor<'_>) -> Result<(), SpecError> {
    if cur.at_end() {
        return Ok(());
    }
    let pos = cur.pos();
    let t = cur.next().unwrap();
    Err(SpecError::Syntax { pos, msg: format!("unexpected {}", t.tok) })
}

fn parse_top(cur: &mut Cursor<'_>, env: &Env<'_>) -> Result<Formula, SpecError> {
    let pos = cur.pos();
    let e = if matches!(cur.peek(), Some(Tok::Ident(s)) if s == "E") && cur.peek_at(1) == Some(&Tok::LParen) {
        cur.next();
        cur.next();
        let e = parse_expr(cur, env)?;
        cur.expect(&Tok::RParen)?;
        e
    } else {
        parse_expr(cur, env)?
    };
    to_formula(&e, pos)
}

fn parse_expr(cur: &mut Cursor<'_>, env: &Env<'_>) -> Result<Expr, SpecError> {
    let first = parse_unary(cur, env)?;
    match cur.peek() {
        Some(Tok::Amp) => {
            let mut parts = vec![first];
            while cur.eat(&Tok::Amp) {
                parts.push(parse_unary(cur, env)?);
            }
            if cur.peek() == Some(&Tok::Bar) {
                return Err(mixed(cur.pos()));
            }
            Ok(Expr::And(parts))
        }
        Some(Tok::Bar) => {
            let pos = cur.pos();
            let mut parts = vec![first];
            while cur.eat(&Tok::Bar) {
                parts.push(parse_unary(cur, env)?);
            }
            if cur.peek() == Some(&Tok::Amp) {
                return Err(mixed(cur.pos()));
            }
            Ok(Expr::Or(parts, pos))
        }
        _ => Ok(first),
    }
}

fn mixed(pos: Pos) -> SpecError {
    SpecError::Syntax { pos, msg: "mixing `&` and `|` requires parentheses".into() }
}

fn parse_unary(cur: &mut Cursor<'_>, env: &Env<'_>) -> Result<Expr, SpecError> {
    let pos = cur.pos();
    if cur.eat_keyword("F") {
        return Ok(Expr::F(Box::new(parse_unary(cur, env)?)));
    }
    if cur.eat_keyword("G") {
        return Ok(Expr::G(Box::new(parse_unary(cur, env)?)));
    }
    if cur.eat(&Tok::Bang) {
        return Ok(Expr::Not(Box::new(parse_unary(cur, env)?), pos));
    }
    match cur.next().map(|t| &t.tok) {
        Some(Tok::LParen) => {
            let e = parse_expr(cur, env)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        Some(Tok::LBrack) => {
            let (loc, lpos) = cur.ident()?;
            let l = env.ta.location(&loc).ok_or(SpecError::UnknownName { pos: lpos, name: loc })?;
            cur.expect(&Tok::RBrack)?;
            let op_pos = cur.pos();
            let zero = match cur.next().map(|t| &t.tok) {
                Some(Tok::Eq) => true,
                Some(Tok::Ne) => false,
                _ => return Err(SpecError::Syntax { pos: op_pos, msg: "expected `=0` or `!=0` after counter".into() }),
            };
            let zpos = cur.pos();
            if cur.next().map(|t| &t.tok) != Some(&Tok::Int(0)) {
                return Err(SpecError::OutOfGrammar { pos: zpos, msg: "counters can only be compared with 0".into() });
            }
            Ok(if zero { Expr::Zero(l) } else { Expr::NonZero(l) })
        }
        Some(Tok::Ident(name)) => match name.as_str() {
            "true" => Ok(Expr::True),
            "false" => Ok(Expr::False),
            _ => {
                if let Some(g) = env.guards.get(name) {
                    Ok(Expr::Guard(g.clone()))
                } else if let Some(e) = env.defines.get(name) {
                    Ok(e.clone())
                } else {
                    Err(SpecError::UnknownName { pos, name: name.clone() })
                }
            }
        },
        Some(t) => Err(SpecError::Syntax { pos, msg: format!("unexpected {t}") }),
        None => Err(SpecError::Syntax { pos, msg: "unexpected end of line".into() }),
    }
}

fn is_prop(e: &Expr) -> bool {
    match e {
        Expr::F(_) | Expr::G(_) => false,
        Expr::Not(x, _) => is_prop(x),
        Expr::And(xs) | Expr::Or(xs, _) => xs.iter().all(is_prop),
        _ => true,
    }
}

fn to_formula(e: &Expr, pos: Pos) -> Result<Formula, SpecError> {
    if is_prop(e) {
        return Ok(Formula::Prop(to_prop(e, pos)?));
    }
    match e {
        Expr::F(x) => Ok(Formula::f(to_formula(x, pos)?)),
        Expr::G(x) => Ok(Formula::g(to_formula(x, pos)?)),
        Expr::And(xs) => {
            let mut props = Vec::new();
            let mut rest = Vec::new();
            for x in xs {
                if is_prop(x) {
                    props.extend(to_prop(x, pos)?);
                } else {
                    rest.push(to_formula(x, pos)?);
                }
            }
            if !props.is_empty() {
                rest.insert(0, Formula::Prop(props));
            }
            Ok(Formula::And(rest))
        }
        Expr::Or(_, p) => {
            Err(SpecError::OutOfGrammar { pos: *p, msg: "temporal operators cannot appear under `|`".into() })
        }
        Expr::Not(_, p) => Err(SpecError::OutOfGrammar { pos: *p, msg: "negation only applies to guards".into() }),
        _ => unreachable!("propositional expressions handled above"),
    }
}

fn to_prop(e: &Expr, pos: Pos) -> Result<Prop, SpecError> {
    match e {
        Expr::True => Ok(Vec::new()),
        Expr::And(xs) => {
            let mut out = Vec::new();
            for x in xs {
                out.extend(to_prop(x, pos)?);
            }
            Ok(out)
        }
        Expr::Or(xs, p) => {
            if let Some(ls) = nonzero_list(xs) {
                return Ok(vec![PForm::C(CForm::AnyNonZero(ls))]);
            }
            if let [a, b] = xs.as_slice() {
                for (g, c) in [(a, b), (b, a)] {
                    if let (Some(g), Some(c)) = (as_gform(g), as_cform(c)) {
                        return Ok(vec![PForm::GOr(g, c)]);
                    }
                }
            }
            Err(SpecError::OutOfGrammar {
                pos: *p,
                msg: "disjunctions must be `guard | counters` or of `[l]!=0` terms".into(),
            })
        }
        _ => {
            if let Some(c) = as_cform(e) {
                Ok(vec![PForm::C(c)])
            } else if let Some(g) = as_gform(e) {
                Ok(vec![PForm::GOr(g, CForm::AnyNonZero(Vec::new()))])
            } else {
                let p = match e {
                    Expr::Not(_, p) => *p,
                    _ => pos,
                };
                Err(SpecError::OutOfGrammar {
                    pos: p,
                    msg: "negation only applies to guards; guards and counters mix only via `|`".into(),
                })
            }
        }
    }
}

fn nonzero_list(xs: &[Expr]) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for x in xs {
        match x {
            Expr::NonZero(l) => out.push(*l),
            Expr::False => {}
            Expr::Or(ys, _) => out.extend(nonzero_list(ys)?),
            _ => return None,
        }
    }
    Some(out)
}

fn as_gform(e: &Expr) -> Option<GForm> {
    match e {
        Expr::Guard(a) => Some(GForm::Lit(a.clone())),
        Expr::True => Some(GForm::And(Vec::new())),
        Expr::Not(x, _) => Some(GForm::Not(Box::new(as_gform(x)?))),
        Expr::And(xs) => Some(GForm::And(xs.iter().map(as_gform).collect::<Option<_>>()?)),
        _ => None,
    }
}

fn as_cform(e: &Expr) -> Option<CForm> {
    match e {
        Expr::True => Some(CForm::AllZero(Vec::new())),
        Expr::False => Some(CForm::AnyNonZero(Vec::new())),
        Expr::Zero(l) => Some(CForm::AllZero(vec![*l])),
        Expr::NonZero(l) => Some(CForm::AnyNonZero(vec![*l])),
        Expr::And(xs) => {
            let parts: Vec<CForm> = xs.iter().map(as_cform).collect::<Option<_>>()?;
            // `[a]=0 & [b]=0` collapses into a single all-zero test.
            if parts.iter().all(|p| matches!(p, CForm::AllZero(_))) {
                let ls = parts
                    .into_iter()
                    .flat_map(|p| match p {
                        CForm::AllZero(ls) => ls,
                        _ => unreachable!(),
                    })
                    .collect();
                Some(CForm::AllZero(ls))
            } else {
                Some(CForm::And(parts))
            }
        }
        Expr::Or(xs, _) => nonzero_list(xs).map(CForm::AnyNonZero),
        _ => None,
    }
}
