//! Driver for an external SMT-LIB2 solver running as a child process.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use super::sexp::{depth_delta, parse_sexps, Sexp};
use super::SmtError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// Satisfiable, with the values of the requested symbols.
    Sat(HashMap<String, i64>),
    Unsat,
    Unknown,
}

impl SatResult {
    pub fn status(&self) -> &'static str {
        match self {
            SatResult::Sat(_) => "sat",
            SatResult::Unsat => "unsat",
            SatResult::Unknown => "unknown",
        }
    }
}

/// Solver command line and per-query wall-clock limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solver {
    pub cmd: Vec<String>,
    pub timeout: Duration,
}

impl Default for Solver {
    fn default() -> Self {
        Solver { cmd: vec!["z3".into(), "-in".into()], timeout: Duration::from_secs(60) }
    }
}

struct Session {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    deadline: Instant,
}

impl Session {
    fn start(solver: &Solver) -> Result<Session, SmtError> {
        let (prog, args) = solver.cmd.split_first().ok_or(SmtError::Spawn("empty solver command".into()))?;
        let mut child = Command::new(prog)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| SmtError::Spawn(format!("{prog}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Session { child, stdin, lines: rx, deadline: Instant::now() + solver.timeout })
    }

    fn send(&mut self, text: &str) -> Result<(), SmtError> {
        self.stdin.write_all(text.as_bytes()).and_then(|_| self.stdin.flush()).map_err(|e| SmtError::Io(e.to_string()))
    }

    /// Next output line, or `None` on timeout.
    fn line(&mut self) -> Result<Option<String>, SmtError> {
        let left = self.deadline.saturating_duration_since(Instant::now());
        match self.lines.recv_timeout(left) {
            Ok(l) => Ok(Some(l)),
            Err(RecvTimeoutError::Timeout) => Ok(None),
            Err(RecvTimeoutError::Disconnected) => Err(SmtError::Protocol("solver exited".into())),
        }
    }

    /// Reads lines until one balanced s-expression (or atom) is complete.
    fn response(&mut self) -> Result<Option<String>, SmtError> {
        let mut text = String::new();
        let mut depth = 0;
        loop {
            let Some(l) = self.line()? else { return Ok(None) };
            if l.trim().is_empty() && text.is_empty() {
                continue;
            }
            depth += depth_delta(&l);
            text.push_str(&l);
            text.push('\n');
            if depth <= 0 {
                return Ok(Some(text));
            }
        }
    }

    fn finish(mut self) {
        let _ = self.send("(exit)\n");
        drop(self.stdin);
        let deadline = Instant::now() + Duration::from_millis(500);
        while Instant::now() < deadline {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            thread::sleep(Duration::from_millis(5));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Solver {
    pub fn new(cmd: Vec<String>, timeout: Duration) -> Self {
        Solver { cmd, timeout }
    }

    /// Parses a command line such as `z3 -in` into a solver.
    pub fn from_command_line(cmd: &str, timeout: Duration) -> Self {
        Solver { cmd: cmd.split_whitespace().map(String::from).collect(), timeout }
    }

    /// Runs `script` (declarations and assertions, without `check-sat`) and
    /// on sat fetches the values of `symbols`.
    pub fn check(&self, script: &str, symbols: &[String]) -> Result<SatResult, SmtError> {
        let mut s = Session::start(self)?;
        s.send(script)?;
        s.send("(check-sat)\n")?;
        let status = loop {
            let Some(resp) = s.response()? else {
                s.kill();
                return Ok(SatResult::Unknown);
            };
            let resp = resp.trim().to_string();
            match resp.as_str() {
                "sat" | "unsat" | "unknown" => break resp,
                _ if resp.starts_with("(error") => {
                    s.kill();
                    return Err(SmtError::Solver(resp));
                }
                // diagnostics such as `success` are skipped
                _ => continue,
            }
        };
        let result = match status.as_str() {
            "unsat" => SatResult::Unsat,
            "unknown" => SatResult::Unknown,
            _ if symbols.is_empty() => SatResult::Sat(HashMap::new()),
            _ => {
                s.send(&format!("(get-value ({}))\n", symbols.join(" ")))?;
                let Some(resp) = s.response()? else {
                    s.kill();
                    return Ok(SatResult::Unknown);
                };
                SatResult::Sat(parse_values(&resp)?)
            }
        };
        s.finish();
        Ok(result)
    }

    /// Runs a complete script that issues its own `check-sat` and returns the
    /// first status the solver prints.
    pub fn run_script(&self, script: &str) -> Result<SatResult, SmtError> {
        let mut s = Session::start(self)?;
        s.send(script)?;
        loop {
            let Some(resp) = s.response()? else {
                s.kill();
                return Ok(SatResult::Unknown);
            };
            match resp.trim() {
                "sat" => {
                    s.finish();
                    return Ok(SatResult::Sat(HashMap::new()));
                }
                "unsat" => {
                    s.finish();
                    return Ok(SatResult::Unsat);
                }
                "unknown" => {
                    s.finish();
                    return Ok(SatResult::Unknown);
                }
                r if r.starts_with("(error") => {
                    let r = r.to_string();
                    s.kill();
                    return Err(SmtError::Solver(r));
                }
                _ => {}
            }
        }
    }
}

fn parse_values(text: &str) -> Result<HashMap<String, i64>, SmtError> {
    let sexps = parse_sexps(text).map_err(SmtError::Protocol)?;
    let Some(Sexp::List(pairs)) = sexps.first() else {
        return Err(SmtError::Protocol(format!("unexpected model: {text}")));
    };
    let mut out = HashMap::new();
    for p in pairs {
        match p {
            Sexp::List(kv) if kv.len() == 2 => {
                let Sexp::Atom(name) = &kv[0] else {
                    return Err(SmtError::Protocol(format!("bad model entry {p:?}")));
                };
                let v = kv[1].as_int().ok_or_else(|| SmtError::Protocol(format!("non-integer value for {name}")))?;
                out.insert(name.clone(), v);
            }
            _ => return Err(SmtError::Protocol(format!("bad model entry {p:?}"))),
        }
    }
    Ok(out)
}
