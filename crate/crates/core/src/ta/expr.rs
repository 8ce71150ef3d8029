//! Linear expressions over parameters and the boolean resilience language.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::lex::{Cursor, Pos, Tok};

/// `a0 + Σ a_i · p_i`, with one coefficient per declared parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearExpr {
    pub constant: i64,
    pub coeffs: Vec<i64>,
}

impl LinearExpr {
    pub fn constant(c: i64, nparams: usize) -> Self {
        LinearExpr { constant: c, coeffs: vec![0; nparams] }
    }

    pub fn param(i: usize, nparams: usize) -> Self {
        let mut e = Self::constant(0, nparams);
        e.coeffs[i] = 1;
        e
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn eval(&self, params: &[i64]) -> i64 {
        self.constant + self.coeffs.iter().zip(params).map(|(a, p)| a * p).sum::<i64>()
    }

    pub fn add(&self, other: &LinearExpr) -> LinearExpr {
        LinearExpr {
            constant: self.constant + other.constant,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> LinearExpr {
        LinearExpr { constant: self.constant * k, coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn sub(&self, other: &LinearExpr) -> LinearExpr {
        self.add(&other.scale(-1))
    }

    /// Renders with the given parameter names, e.g. `t - f + 1`.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            push_term(&mut out, a, Some(&names[i]));
        }
        if self.constant != 0 || out.is_empty() {
            push_term(&mut out, self.constant, None);
        }
        out
    }

    /// SMT-LIB term; `param` maps a parameter index to its symbol.
    pub fn smt(&self, param: impl Fn(usize) -> String) -> String {
        let mut terms = Vec::new();
        for (i, &a) in self.coeffs.iter().enumerate() {
            match a {
                0 => {}
                1 => terms.push(param(i)),
                _ => terms.push(format!("(* {} {})", smt_int(a), param(i))),
            }
        }
        if self.constant != 0 || terms.is_empty() {
            terms.push(smt_int(self.constant));
        }
        if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            format!("(+ {})", terms.join(" "))
        }
    }
}

pub fn smt_int(n: i64) -> String {
    if n < 0 {
        format!("(- {})", n.unsigned_abs())
    } else {
        n.to_string()
    }
}

fn push_term(out: &mut String, a: i64, name: Option<&str>) {
    let first = out.is_empty();
    let mag = a.unsigned_abs();
    if first {
        if a < 0 {
            out.push('-');
        }
    } else if a < 0 {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    match name {
        Some(n) if mag == 1 => out.push_str(n),
        Some(n) => {
            let _ = write!(out, "{mag}*{n}");
        }
        None => {
            let _ = write!(out, "{mag}");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub fn holds(self, l: i64, r: i64) -> bool {
        match self {
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }
}

/// Boolean combination of linear comparisons over parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoolExpr {
    True,
    False,
    Cmp(LinearExpr, CmpOp, LinearExpr),
    Not(Box<BoolExpr>),
    And(Vec<BoolExpr>),
    Or(Vec<BoolExpr>),
}

impl BoolExpr {
    pub fn eval(&self, params: &[i64]) -> bool {
        match self {
            BoolExpr::True => true,
            BoolExpr::False => false,
            BoolExpr::Cmp(l, op, r) => op.holds(l.eval(params), r.eval(params)),
            BoolExpr::Not(e) => !e.eval(params),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(params)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(params)),
        }
    }

    /// Substitutes every parameter `p_i` by `k · p_i`.
    pub fn scale_params(&self, k: i64) -> BoolExpr {
        let sc = |e: &LinearExpr| LinearExpr { constant: e.constant, coeffs: e.coeffs.iter().map(|a| a * k).collect() };
        match self {
            BoolExpr::True => BoolExpr::True,
            BoolExpr::False => BoolExpr::False,
            BoolExpr::Cmp(l, op, r) => BoolExpr::Cmp(sc(l), *op, sc(r)),
            BoolExpr::Not(e) => BoolExpr::Not(Box::new(e.scale_params(k))),
            BoolExpr::And(es) => BoolExpr::And(es.iter().map(|e| e.scale_params(k)).collect()),
            BoolExpr::Or(es) => BoolExpr::Or(es.iter().map(|e| e.scale_params(k)).collect()),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        match self {
            BoolExpr::True => "true".into(),
            BoolExpr::False => "false".into(),
            BoolExpr::Cmp(l, op, r) => {
                format!("{} {} {}", l.render(names), op.symbol(), r.render(names))
            }
            BoolExpr::Not(e) => format!("!({})", e.render(names)),
            BoolExpr::And(es) => join_paren(es, " & ", names),
            BoolExpr::Or(es) => join_paren(es, " | ", names),
        }
    }

    pub fn smt(&self, param: &impl Fn(usize) -> String) -> String {
        match self {
            BoolExpr::True => "true".into(),
            BoolExpr::False => "false".into(),
            BoolExpr::Cmp(l, op, r) => {
                let (l, r) = (l.smt(param), r.smt(param));
                match op {
                    CmpOp::Ne => format!("(not (= {l} {r}))"),
                    CmpOp::Eq => format!("(= {l} {r})"),
                    _ => format!("({} {l} {r})", op.symbol()),
                }
            }
            BoolExpr::Not(e) => format!("(not {})", e.smt(param)),
            BoolExpr::And(es) if es.is_empty() => "true".into(),
            BoolExpr::Or(es) if es.is_empty() => "false".into(),
            BoolExpr::And(es) => {
                format!("(and {})", es.iter().map(|e| e.smt(param)).collect::<Vec<_>>().join(" "))
            }
            BoolExpr::Or(es) => {
                format!("(or {})", es.iter().map(|e| e.smt(param)).collect::<Vec<_>>().join(" "))
            }
        }
    }
}

fn join_paren(es: &[BoolExpr], sep: &str, names: &[String]) -> String {
    if es.is_empty() {
        return if sep.contains('&') { "true".into() } else { "false".into() };
    }
    es.iter().map(|e| format!("({})", e.render(names))).collect::<Vec<_>>().join(sep)
}

pub type ParseResult<T> = Result<T, (Pos, String)>;

/// Parses `term (('+' | '-') term)*` where products need a constant side.
pub fn parse_linear(
    cur: &mut Cursor<'_>,
    nparams: usize,
    lookup: &dyn Fn(&str, Pos) -> ParseResult<usize>,
) -> ParseResult<LinearExpr> {
    let mut acc = parse_product(cur, nparams, lookup)?;
    loop {
        if cur.eat(&Tok::Plus) {
            acc = acc.add(&parse_product(cur, nparams, lookup)?);
        } else if cur.eat(&Tok::Minus) {
            acc = acc.sub(&parse_product(cur, nparams, lookup)?);
        } else {
            return Ok(acc);
        }
    }
}

fn parse_product(
    cur: &mut Cursor<'_>,
    nparams: usize,
    lookup: &dyn Fn(&str, Pos) -> ParseResult<usize>,
) -> ParseResult<LinearExpr> {
    let mut acc = parse_unary(cur, nparams, lookup)?;
    while cur.eat(&Tok::Star) {
        let pos = cur.pos();
        let rhs = parse_unary(cur, nparams, lookup)?;
        acc = if acc.is_constant() {
            rhs.scale(acc.constant)
        } else if rhs.is_constant() {
            acc.scale(rhs.constant)
        } else {
            return Err((pos, "non-linear product of parameters".into()));
        };
    }
    Ok(acc)
}

fn parse_unary(
    cur: &mut Cursor<'_>,
    nparams: usize,
    lookup: &dyn Fn(&str, Pos) -> ParseResult<usize>,
) -> ParseResult<LinearExpr> {
    if cur.eat(&Tok::Minus) {
        return Ok(parse_unary(cur, nparams, lookup)?.scale(-1));
    }
    let pos = cur.pos();
    match cur.next().map(|t| &t.tok) {
        Some(Tok::Int(n)) => Ok(LinearExpr::constant(*n, nparams)),
        Some(Tok::Ident(name)) => Ok(LinearExpr::param(lookup(name, pos)?, nparams)),
        Some(Tok::LParen) => {
            let e = parse_linear(cur, nparams, lookup)?;
            cur.expect(&Tok::RParen)?;
            Ok(e)
        }
        Some(t) => Err((pos, format!("expected expression, found {t}"))),
        None => Err((pos, "expected expression, found end of line".into())),
    }
}

/// Parses a boolean formula over comparisons: `!`, `&`, `|`, parentheses.
pub fn parse_bool(
    cur: &mut Cursor<'_>,
    nparams: usize,
    lookup: &dyn Fn(&str, Pos) -> ParseResult<usize>,
) -> ParseResult<BoolExpr> {
    let mut parts = vec![parse_conj(cur, nparams, lookup)?];
    while cur.eat(&Tok::Bar) {
        parts.push(parse_conj(cur, nparams, lookup)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::Or(parts) })
}

fn parse_conj(
    cur: &mut Cursor<'_>,
    nparams: usize,
    lookup: &dyn Fn(&str, Pos) -> ParseResult<usize>,
) -> ParseResult<BoolExpr> {
    let mut parts = vec![parse_bool_atom(cur, nparams, lookup)?];
    while cur.eat(&Tok::Amp) {
        parts.push(parse_bool_atom(cur, nparams, lookup)?);
    }
    Ok(if parts.len() == 1 { parts.pop().unwrap() } else { BoolExpr::And(parts) })
}

fn parse_bool_atom(
    cur: &mut Cursor<'_>,
    nparams: usize,
    lookup: &dyn Fn(&str, Pos) -> ParseResult<usize>,
) -> ParseResult<BoolExpr> {
    if cur.eat(&Tok::Bang) {
        return Ok(BoolExpr::Not(Box::new(parse_bool_atom(cur, nparams, lookup)?)));
    }
    if cur.eat_keyword("true") {
        return Ok(BoolExpr::True);
    }
    if cur.eat_keyword("false") {
        return Ok(BoolExpr::False);
    }
    let mark = cur.mark();
    match parse_cmp(cur, nparams, lookup) {
        Ok(e) => Ok(e),
        Err(first) => {
            cur.reset(mark);
            if cur.eat(&Tok::LParen) {
                let e = parse_bool(cur, nparams, lookup)?;
                cur.expect(&Tok::RParen)?;
                Ok(e)
            } else {
                Err(first)
            }
        }
    }
}

fn parse_cmp(
    cur: &mut Cursor<'_>,
    nparams: usize,
    lookup: &dyn Fn(&str, Pos) -> ParseResult<usize>,
) -> ParseResult<BoolExpr> {
    let l = parse_linear(cur, nparams, lookup)?;
    let pos = cur.pos();
    let op = match cur.next().map(|t| &t.tok) {
        Some(Tok::Lt) => CmpOp::Lt,
        Some(Tok::Le) => CmpOp::Le,
        Some(Tok::Gt) => CmpOp::Gt,
        Some(Tok::Ge) => CmpOp::Ge,
        Some(Tok::EqEq) => CmpOp::Eq,
        Some(Tok::Ne) => CmpOp::Ne,
        Some(t) => return Err((pos, format!("expected comparison operator, found {t}"))),
        None => return Err((pos, "expected comparison operator".into())),
    };
    let r = parse_linear(cur, nparams, lookup)?;
    Ok(BoolExpr::Cmp(l, op, r))
}
