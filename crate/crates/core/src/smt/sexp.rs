//! Minimal s-expression reader for solver responses.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    /// Integer value of `5` or `(- 5)`.
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Sexp::Atom(a) => a.parse().ok(),
            Sexp::List(xs) => match xs.as_slice() {
                [Sexp::Atom(m), x] if m == "-" => x.as_int().map(|v| -v),
                _ => None,
            },
        }
    }
}

pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>, String> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' => {
                chars.next();
                stack.push(Vec::new());
            }
            ')' => {
                chars.next();
                let done = stack.pop().ok_or("unbalanced `)`")?;
                stack.last_mut().ok_or("unbalanced `)`")?.push(Sexp::List(done));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err("unterminated string".into()),
                    }
                }
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
            '|' => {
                chars.next();
                let s: String = chars.by_ref().take_while(|&c| c != '|').collect();
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err("unbalanced `(`".into());
    }
    Ok(stack.pop().unwrap())
}

/// Net parenthesis depth of `text`, ignoring strings and quoted symbols.
pub fn depth_delta(text: &str) -> i64 {
    let mut d = 0;
    let mut in_str = false;
    let mut in_sym = false;
    for c in text.chars() {
        match c {
            '"' if !in_sym => in_str = !in_str,
            '|' if !in_str => in_sym = !in_sym,
            '(' if !in_str && !in_sym => d += 1,
            ')' if !in_str && !in_sym => d -= 1,
            _ => {}
        }
    }
    d
}
