//! `thresholdmc`: verify, inspect shapes, run the explicit-state oracle, or
//! trace the schedule reductions on a threshold automaton.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tmc::counter::{apply_schedule, Configuration, Transition};
use tmc::eltl::{canonicalize, parse_spec, Formula};
use tmc::oracle::{oracle_check, pattern_of, OracleVerdict};
use tmc::reduction::{all_zero_holds, classify_thread, decompose, disjunction_holds, repr_all_zero, repr_disjunction};
use tmc::smt::Solver;
use tmc::ta::{parse_ta, ThresholdAutomaton};
use tmc::verifier::{build_shapes, explain, verify_problem, Problem, VerifyOptions};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "thresholdmc", version, about = "Parameterized model checking of threshold automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a specification for all admissible parameters.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Shapes checked concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Write one SMT-LIB2 script per shape into this directory.
        #[arg(long)]
        dump_smt: Option<PathBuf>,
        /// Write the report as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// List the lasso shapes of a specification.
    Shapes {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Explicit-state check at fixed parameters.
    Oracle {
        #[command(flatten)]
        spec: SpecArgs,
        /// Parameter values, e.g. `n=4,t=1,f=1`.
        #[arg(long)]
        params: String,
        /// Maximal number of explored configurations.
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Write the witness lasso as JSON to this file.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Decompose a steady schedule into threads and build a representative.
    Reduce {
        #[arg(long)]
        ta: PathBuf,
        #[arg(long)]
        params: String,
        /// Location counters, e.g. `1,1,1,0`.
        #[arg(long)]
        kappa: String,
        /// Shared variable values, e.g. `2`.
        #[arg(long, default_value = "")]
        shared: String,
        /// Rule names, each optionally with a factor: `r1,r4*2`.
        #[arg(long)]
        schedule: String,
        /// Locations of the invariant, e.g. `l2,l3`.
        #[arg(long)]
        locs: String,
        #[arg(long, value_enum, default_value_t = Invariant::Occupied)]
        invariant: Invariant,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Invariant {
    /// Some listed location is non-empty.
    Occupied,
    /// Every listed location is empty.
    Empty,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    ta: PathBuf,
    #[arg(long)]
    spec: PathBuf,
    /// Name of the specification in the spec file.
    #[arg(long)]
    name: String,
}

#[derive(Args)]
struct ProblemArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Solver command line.
    #[arg(long, default_value = "z3 -in")]
    solver: String,
    /// Per-query solver timeout in seconds.
    #[arg(long, default_value_t = 60)]
    smt_timeout: u64,
}

impl ProblemArgs {
    fn solver(&self) -> Solver {
        Solver::from_command_line(&self.solver, Duration::from_secs(self.smt_timeout))
    }
}

type CliResult = Result<u8, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_ta(path: &Path) -> Result<ThresholdAutomaton, String> {
    parse_ta(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_spec(args: &SpecArgs) -> Result<(ThresholdAutomaton, Formula), String> {
    let ta = load_ta(&args.ta)?;
    let specs = parse_spec(&read(&args.spec)?, &ta).map_err(|e| format!("{}: {e}", args.spec.display()))?;
    let f = specs.get(&args.name).map_err(|e| e.to_string())?.clone();
    Ok((ta, f))
}

fn parse_params(ta: &ThresholdAutomaton, text: &str) -> Result<Vec<i64>, String> {
    let mut values = vec![None; ta.params.len()];
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (name, value) = item.split_once('=').ok_or(format!("expected name=value, got `{item}`"))?;
        let i = ta.param(name.trim()).ok_or(format!("unknown parameter `{}`", name.trim()))?;
        values[i] = Some(value.trim().parse::<i64>().map_err(|e| format!("{item}: {e}"))?);
    }
    let params: Vec<i64> = values
        .iter()
        .zip(&ta.params)
        .map(|(v, name)| v.ok_or(format!("missing parameter `{name}`")))
        .collect::<Result<_, _>>()?;
    if !ta.admissible(&params) {
        return Err(format!("parameters {text} violate the resilience condition"));
    }
    Ok(params)
}

fn parse_ints(text: &str, len: usize, what: &str) -> Result<Vec<i64>, String> {
    let values: Vec<i64> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<i64>().map_err(|e| format!("{what} `{s}`: {e}")))
        .collect::<Result<_, _>>()?;
    if values.len() != len {
        return Err(format!("{what}: expected {len} values, got {}", values.len()));
    }
    Ok(values)
}

fn parse_schedule(ta: &ThresholdAutomaton, text: &str) -> Result<Vec<Transition>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (name, factor) = match item.split_once('*') {
                Some((n, f)) => (n.trim(), f.trim().parse::<i64>().map_err(|e| format!("{item}: {e}"))?),
                None => (item.trim(), 1),
            };
            let rule = ta.rule(name).ok_or(format!("unknown rule `{name}`"))?;
            Ok(Transition::new(rule, factor))
        })
        .collect()
}

fn parse_locs(ta: &ThresholdAutomaton, text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|l| ta.location(l.trim()).ok_or(format!("unknown location `{}`", l.trim())))
        .collect()
}

fn fmt_schedule(ta: &ThresholdAutomaton, tau: &[Transition]) -> String {
    if tau.is_empty() {
        return "(empty)".into();
    }
    tau.iter()
        .map(|t| {
            if t.factor == 1 {
                ta.rules[t.rule].name.clone()
            } else {
                format!("{}*{}", ta.rules[t.rule].name, t.factor)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    fs::write(path, text + "\n").map_err(|e| format!("{}: {e}", path.display()))
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Verify { problem, jobs, dump_smt, json } => {
            let (ta, f) = load_spec(&problem.spec)?;
            let solver = problem.solver();
            let p = Problem::new(&ta, &f, &solver).map_err(|e| e.to_string())?;
            let options = VerifyOptions { solver, jobs: jobs.max(1), dump_smt, ..VerifyOptions::default() };
            let report = verify_problem(&p, &options).map_err(|e| e.to_string())?;
            let (text, value) = explain(&p, &report).map_err(|e| e.to_string())?;
            print!("{text}");
            if let Some(path) = json {
                write_json(&path, &value)?;
            }
            Ok(report.verdict.exit_code() as u8)
        }
        Command::Shapes { problem } => {
            let (ta, f) = load_spec(&problem.spec)?;
            let p = Problem::new(&ta, &f, &problem.solver()).map_err(|e| e.to_string())?;
            let shapes = build_shapes(&p);
            println!("{} shapes", shapes.len());
            for (i, s) in shapes.iter().enumerate() {
                println!("{i:3}  toggles={}  {}", s.toggles(), s.describe(&p));
            }
            Ok(0)
        }
        Command::Oracle { spec, params, budget, json } => {
            let (ta, f) = load_spec(&spec)?;
            let params = parse_params(&ta, &params)?;
            let pattern = pattern_of(&canonicalize(&f)).ok_or("formula does not match an oracle pattern")?;
            match oracle_check(&ta, &params, &pattern, budget).map_err(|e| e.to_string())? {
                OracleVerdict::Verified => {
                    println!("verified at {params:?}");
                    Ok(0)
                }
                OracleVerdict::Witness(w) => {
                    println!("witness at {params:?}");
                    println!("prefix: {}", fmt_schedule(&ta, &w.prefix));
                    println!("loop:   {}", fmt_schedule(&ta, &w.cycle));
                    for (i, c) in w.states.iter().enumerate() {
                        println!("  {i:3}  kappa={:?}  shared={:?}", c.kappa, c.g);
                    }
                    if let Some(path) = json {
                        write_json(&path, &serde_json::to_value(&w).expect("witness serializes"))?;
                    }
                    Ok(1)
                }
            }
        }
        Command::Reduce { ta, params, kappa, shared, schedule, locs, invariant } => {
            let ta = load_ta(&ta)?;
            let p = parse_params(&ta, &params)?;
            let s = Configuration {
                kappa: parse_ints(&kappa, ta.locations.len(), "kappa")?,
                g: parse_ints(&shared, ta.shared.len(), "shared")?,
                p,
            };
            let tau = parse_schedule(&ta, &schedule)?;
            let locs = parse_locs(&ta, &locs)?;
            reduce(&ta, &s, &tau, &locs, invariant)
        }
    }
}

fn reduce(ta: &ThresholdAutomaton, s: &Configuration, tau: &[Transition], locs: &[usize], inv: Invariant) -> CliResult {
    println!("tau: {}", fmt_schedule(ta, tau));
    let naming = decompose(ta, s, tau).map_err(|e| e.to_string())?;
    println!("decomposition: {:?}", naming.thread_of);
    for id in naming.ids() {
        let theta = naming.projection(tau, id);
        println!("  thread {id}: {}  type {}", fmt_schedule(ta, &theta), classify_thread(ta, &theta, locs));
    }
    let holds = |c: &Configuration| match inv {
        Invariant::Occupied => disjunction_holds(c, locs),
        Invariant::Empty => all_zero_holds(c, locs),
    };
    let repr = match inv {
        Invariant::Occupied => repr_disjunction(ta, s, tau, locs),
        Invariant::Empty => repr_all_zero(ta, s, tau, locs),
    }
    .map_err(|e| e.to_string())?;
    println!("case: {:?}", repr.case);
    for (i, part) in repr.parts.iter().enumerate() {
        println!("  part {i}: {}", fmt_schedule(ta, part));
    }
    println!("repr: {}", fmt_schedule(ta, &repr.schedule));
    let path = apply_schedule(ta, s, &repr.schedule).map_err(|e| e.to_string())?;
    for (i, c) in path.configs().enumerate() {
        println!("  {i:3}  kappa={:?}  shared={:?}  invariant={}", c.kappa, c.g, holds(c));
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
