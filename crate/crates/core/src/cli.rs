//! The `sr` command line: `solve`, `verify`, `oracle`, `crosscheck`, `gen`.
//!
//! Exit codes: 0 when a decision was reached (yes or no alike), 1 when a
//! cross-check found a disagreement, 2 for input or usage errors, 3 when a
//! limit was hit or the solver reported an internal error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::algorithm::{run_with, SolveError, SolveOutcome, SolverConfig, Status, TieBreak};
use crate::generator::random_instance;
use crate::instance::{parse_instance, Instance, Matching};
use crate::oracle::{
    all_strongly_stable, brute_force_classical_exists, brute_force_exists_with, enumerate_instances, OracleConfig,
    OracleError, DEFAULT_MAX_EDGES,
};
use crate::polytope::{PolytopeConfig, PolytopeError, SeparationMode};
use crate::rational::Rat;
use crate::verify::strongly_stable;

pub const EXIT_DECIDED: i32 = 0;
pub const EXIT_DISAGREEMENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sr", version, about = "Strongly stable matchings for roommates instances with ties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide existence with the LP rounding algorithm.
    Solve(SolveArgs),
    /// Check a matching for strong stability.
    Verify(VerifyArgs),
    /// Decide existence by enumerating all matchings.
    Oracle(OracleArgs),
    /// Run solver and oracle side by side on generated instances.
    Crosscheck(CrosscheckArgs),
    /// Print a random instance.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeparationArg {
    PadbergRao,
    Exhaustive,
    Both,
}

#[derive(Debug, Args)]
pub struct SolverFlags {
    /// Seed for randomized choice of f, v and g (default: lowest ids).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Maximum number of odd-set cuts per run.
    #[arg(long)]
    pub limit_cuts: Option<usize>,
    /// Maximum number of simplex pivots per LP.
    #[arg(long)]
    pub limit_pivots: Option<u64>,
    #[arg(long, value_enum, default_value = "padberg-rao")]
    pub separation: SeparationArg,
}

impl SolverFlags {
    pub fn config(&self) -> SolverConfig {
        let mut polytope = PolytopeConfig {
            separation: match self.separation {
                SeparationArg::PadbergRao => SeparationMode::PadbergRao,
                SeparationArg::Exhaustive => SeparationMode::Exhaustive,
                SeparationArg::Both => SeparationMode::Both,
            },
            max_cuts: self.limit_cuts,
            ..PolytopeConfig::default()
        };
        if let Some(p) = self.limit_pivots {
            polytope.simplex.max_pivots = p;
        }
        let tie_break = self.seed.map_or(TieBreak::Lowest, TieBreak::Seeded);
        SolverConfig { polytope, tie_break }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    #[command(flatten)]
    pub solver: SolverFlags,
    #[arg(long)]
    pub json: bool,
    /// Print one line per round and every odd-set cut.
    #[arg(long)]
    pub trace: bool,
    /// Print the final point as `edge=p/q` lines.
    #[arg(long)]
    pub certificate: bool,
    /// Re-verify a yes answer before printing it.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub path: PathBuf,
    /// Matching as `u-v` pairs.
    pub pairs: Vec<String>,
    /// Read the `u-v` pairs from a file instead.
    #[arg(long, conflicts_with = "pairs")]
    pub matching_file: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub path: PathBuf,
    /// List every strongly stable matching.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    pub max_edges: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    /// Every preference profile on four agents.
    #[arg(long)]
    pub exhaustive_n4: bool,
    /// Random batch as `key=value` settings: n, count, seed, tie, edge.
    #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
    pub random: Option<Vec<String>>,
    /// Oracle edge cap (default: edges of the complete graph on n agents).
    #[arg(long)]
    pub max_edges: Option<usize>,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(short = 'n', long = "agents")]
    pub agents: usize,
    #[arg(long, default_value = "1/2")]
    pub edge_prob: Rat,
    #[arg(long, default_value = "1/3")]
    pub tie_prob: Rat,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Limit(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Limit(_) => EXIT_LIMIT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Limit(m) => m,
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Failure {
        Failure::Limit(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Failure {
        Failure::Limit(e.to_string())
    }
}

impl From<PolytopeError> for Failure {
    fn from(e: PolytopeError) -> Failure {
        Failure::Limit(e.to_string())
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Input(e.to_string())
}

type Out<'a> = &'a mut dyn Write;

/// Parses `args` (program name first) and runs the command, returning the
/// exit code.
pub fn run<I, T>(args: I, out: Out<'_>, err: Out<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", text);
                    EXIT_DECIDED
                }
                _ => {
                    let _ = write!(err, "{}", text);
                    EXIT_INPUT
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Crosscheck(a) => cmd_crosscheck(a, out),
        Command::Gen(a) => cmd_gen(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn load(path: &Path) -> Result<Instance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))?;
    parse_instance(&text).map_err(|e| Failure::Input(format!("{}: {}", path.display(), e)))
}

fn edge_names(inst: &Instance, m: &Matching) -> Vec<String> {
    m.edges().iter().map(|&e| inst.edge_name(e)).collect()
}

fn cmd_solve(args: &SolveArgs, out: Out<'_>) -> Result<i32, Failure> {
    let inst = load(&args.path)?;
    let outcome = run_with(&inst, &args.solver.config())?;
    if args.check {
        if let Some(m) = outcome.matching() {
            if let Some(e) = strongly_stable(&inst, m).map_err(|e| Failure::Limit(e.to_string()))? {
                return Err(Failure::Limit(format!("answer failed verification: {} blocks", inst.edge_name(e))));
            }
        }
    }
    if args.json {
        let value = solve_json(&inst, &outcome, args);
        writeln!(out, "{}", value).map_err(io_failure)?;
    } else {
        write_solve_plain(&inst, &outcome, args, out).map_err(io_failure)?;
    }
    Ok(EXIT_DECIDED)
}

fn reason(status: &Status) -> Option<&'static str> {
    match status {
        Status::Yes(_) => None,
        Status::No { .. } => Some("fractional"),
        Status::PolytopeEmpty => Some("polytope-empty"),
    }
}

fn write_solve_plain(inst: &Instance, outcome: &SolveOutcome, args: &SolveArgs, out: Out<'_>) -> std::io::Result<()> {
    match &outcome.status {
        Status::Yes(m) => {
            writeln!(out, "result: yes")?;
            writeln!(out, "matching: {}", m.display(inst))?;
        }
        Status::No { witness } => {
            writeln!(out, "result: no")?;
            writeln!(out, "reason: fractional witness={}", inst.edge_name(*witness))?;
        }
        Status::PolytopeEmpty => {
            writeln!(out, "result: no")?;
            writeln!(out, "reason: polytope-empty")?;
        }
    }
    writeln!(out, "iterations: {}", outcome.iterations())?;
    if args.check && outcome.exists() {
        writeln!(out, "check: strongly-stable")?;
    }
    if args.trace {
        for line in outcome.trace.lines(inst) {
            writeln!(out, "{}", line)?;
        }
        for line in &outcome.cut_log {
            writeln!(out, "{}", line)?;
        }
    }
    if args.certificate {
        if let Some(z) = outcome.final_point() {
            for e in inst.edges() {
                writeln!(out, "{}={}", inst.edge_name(e), z.get(e))?;
            }
        }
    }
    Ok(())
}

fn solve_json(inst: &Instance, outcome: &SolveOutcome, args: &SolveArgs) -> Value {
    let mut obj = Map::new();
    obj.insert("result".into(), json!(if outcome.exists() { "yes" } else { "no" }));
    obj.insert("reason".into(), json!(reason(&outcome.status)));
    obj.insert("matching".into(), json!(outcome.matching().map(|m| edge_names(inst, m))));
    if let Status::No { witness } = outcome.status {
        obj.insert("witness".into(), json!(inst.edge_name(witness)));
    }
    obj.insert("iterations".into(), json!(outcome.iterations()));
    if args.check {
        obj.insert("checked".into(), json!(outcome.exists()));
    }
    if args.trace {
        let rounds: Vec<Value> = outcome
            .trace
            .iterations
            .iter()
            .map(|it| {
                json!({
                    "t": it.t,
                    "f": inst.edge_name(it.f),
                    "v": inst.name(it.v),
                    "g": inst.edge_name(it.g),
                    "branch": it.branch.to_string(),
                    "tier_size": it.tier_size,
                    "max": it.max_value.to_string(),
                    "min": it.min_value.as_ref().map(|r| r.to_string()),
                })
            })
            .collect();
        obj.insert("trace".into(), Value::Array(rounds));
        obj.insert("cuts".into(), json!(outcome.cut_log));
    }
    if args.certificate {
        let cert = outcome
            .final_point()
            .map(|z| inst.edges().map(|e| (inst.edge_name(e), json!(z.get(e).to_string()))).collect::<Map<_, _>>());
        obj.insert("certificate".into(), json!(cert));
    }
    Value::Object(obj)
}

fn cmd_verify(args: &VerifyArgs, out: Out<'_>) -> Result<i32, Failure> {
    let inst = load(&args.path)?;
    let text = match &args.matching_file {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {}", p.display(), e)))?,
        None => args.pairs.join(" "),
    };
    let matching = Matching::parse(&inst, &text).map_err(|e| Failure::Input(e.to_string()))?;
    let blocking = strongly_stable(&inst, &matching).map_err(|e| Failure::Input(e.to_string()))?;
    if args.json {
        let value = json!({
            "strongly_stable": blocking.is_none(),
            "blocking_edge": blocking.map(|e| inst.edge_name(e)),
        });
        writeln!(out, "{}", value).map_err(io_failure)?;
    } else {
        match blocking {
            None => writeln!(out, "strongly-stable: true"),
            Some(e) => writeln!(out, "strongly-stable: false blocking-edge: {}", inst.edge_name(e)),
        }
        .map_err(io_failure)?;
    }
    Ok(EXIT_DECIDED)
}

fn cmd_oracle(args: &OracleArgs, out: Out<'_>) -> Result<i32, Failure> {
    let inst = load(&args.path)?;
    let config = OracleConfig { max_edges: args.max_edges };
    let found = brute_force_exists_with(&inst, &config)?;
    let all = if args.all { Some(all_strongly_stable(&inst, &config)?) } else { None };
    if args.json {
        let value = json!({
            "result": if found.is_some() { "yes" } else { "no" },
            "matching": found.as_ref().map(|m| edge_names(&inst, m)),
            "method": "brute-force",
            "all": all.as_ref().map(|ms| ms.iter().map(|m| edge_names(&inst, m)).collect::<Vec<_>>()),
        });
        writeln!(out, "{}", value).map_err(io_failure)?;
        return Ok(EXIT_DECIDED);
    }
    let mut lines = Vec::new();
    match &found {
        Some(m) => {
            lines.push("result: yes".to_string());
            lines.push(format!("matching: {}", m.display(&inst)));
        }
        None => lines.push("result: no".to_string()),
    }
    lines.push("method: brute-force".to_string());
    for m in all.iter().flatten() {
        lines.push(format!("stable: {}", m.display(&inst)));
    }
    for line in lines {
        writeln!(out, "{}", line).map_err(io_failure)?;
    }
    Ok(EXIT_DECIDED)
}

/// Settings of one `--random` batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomBatch {
    pub n: usize,
    pub count: u64,
    pub seed: u64,
    pub tie: Rat,
    pub edge: Rat,
}

impl Default for RandomBatch {
    fn default() -> Self {
        RandomBatch { n: 8, count: 500, seed: 0, tie: Rat::new(1, 3), edge: Rat::new(1, 2) }
    }
}

impl RandomBatch {
    /// Reads `key=value` settings over the defaults `n=8 count=500 seed=0
    /// tie=1/3 edge=1/2`. Seeds `seed, seed+1, …` are used.
    pub fn parse(settings: &[String]) -> Result<RandomBatch, String> {
        let mut batch = RandomBatch::default();
        for s in settings {
            let (key, value) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {:?}", s))?;
            let bad = |_| format!("bad value for {}: {:?}", key, value);
            match key {
                "n" => batch.n = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                "count" => batch.count = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                "seed" => batch.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                "tie" => batch.tie = value.parse().map_err(|e: crate::rational::ParseRatError| bad(e.to_string()))?,
                "edge" => batch.edge = value.parse().map_err(|e: crate::rational::ParseRatError| bad(e.to_string()))?,
                _ => return Err(format!("unknown setting {:?}", key)),
            }
        }
        if batch.n == 0 {
            return Err("n must be positive".to_string());
        }
        Ok(batch)
    }
}

struct Case {
    label: String,
    inst: Instance,
    /// Also compare against classical stability (strict preferences).
    strict: bool,
    max_edges: usize,
}

#[derive(Debug, Default)]
struct Verdict {
    agree: bool,
    solver_yes: bool,
    empty: bool,
    fractional_no: bool,
    rounds: usize,
    bound_ok: bool,
    verified: bool,
    strict_ok: bool,
    error: Option<String>,
}

fn judge(case: &Case, config: &SolverConfig) -> Verdict {
    let inst = &case.inst;
    let oracle = OracleConfig { max_edges: case.max_edges };
    let outcome = match run_with(inst, config) {
        Ok(o) => o,
        Err(e) => return Verdict { error: Some(e.to_string()), ..Verdict::default() },
    };
    let truth = match brute_force_exists_with(inst, &oracle) {
        Ok(t) => t,
        Err(e) => return Verdict { error: Some(e.to_string()), ..Verdict::default() },
    };
    let verified = outcome.matching().is_none_or(|m| strongly_stable(inst, m).ok() == Some(None));
    let sizes = outcome.trace.tier_sizes(inst);
    let bound_ok = outcome.iterations() <= inst.num_edges() && sizes.windows(2).all(|w| w[1] < w[0]);
    let strict_ok = !case.strict
        || brute_force_classical_exists(inst, &oracle).map(|c| c.is_some() == outcome.exists()).unwrap_or(false);
    Verdict {
        agree: outcome.exists() == truth.is_some(),
        solver_yes: outcome.exists(),
        empty: outcome.status == Status::PolytopeEmpty,
        fractional_no: matches!(outcome.status, Status::No { .. }),
        rounds: outcome.iterations(),
        bound_ok,
        verified,
        strict_ok,
        error: None,
    }
}

fn cmd_crosscheck(args: &CrosscheckArgs, out: Out<'_>) -> Result<i32, Failure> {
    let mut cases = Vec::new();
    if args.exhaustive_n4 {
        let cap = args.max_edges.unwrap_or(6);
        for (i, inst) in enumerate_instances(4)?.enumerate() {
            cases.push(Case { label: format!("n4 #{}", i), inst, strict: false, max_edges: cap });
        }
    }
    if let Some(settings) = &args.random {
        let batch = RandomBatch::parse(settings).map_err(Failure::Input)?;
        let cap = args.max_edges.unwrap_or(batch.n * (batch.n - 1) / 2);
        for k in 0..batch.count {
            let seed = batch.seed.wrapping_add(k);
            let inst =
                random_instance(batch.n, &batch.edge, &batch.tie, seed).map_err(|e| Failure::Input(e.to_string()))?;
            cases.push(Case { label: format!("seed={}", seed), inst, strict: batch.tie.is_zero(), max_edges: cap });
        }
    }
    if cases.is_empty() {
        return Err(Failure::Input("nothing to check: pass --exhaustive-n4 and/or --random".to_string()));
    }
    let config = args.solver.config();
    let verdicts: Vec<Verdict> = cases.par_iter().map(|c| judge(c, &config)).collect();

    let total = cases.len();
    let count = |p: &dyn Fn(&Verdict) -> bool| verdicts.iter().filter(|v| p(v)).count();
    let errors = count(&|v| v.error.is_some());
    let agree = count(&|v| v.error.is_none() && v.agree);
    let strict_cases = cases.iter().filter(|c| c.strict).count();
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{}", s).map_err(io_failure);
    w(out, format!("instances: {}", total))?;
    w(out, format!("agreement: {}/{}", agree, total))?;
    w(out, format!("yes: {}", count(&|v| v.solver_yes)))?;
    w(out, format!("polytope-empty: {}", count(&|v| v.empty)))?;
    w(out, format!("fractional-no: {}", count(&|v| v.fractional_no)))?;
    w(out, format!("max-iterations: {}", verdicts.iter().map(|v| v.rounds).max().unwrap_or(0)))?;
    w(out, format!("iteration-bound-violations: {}", count(&|v| v.error.is_none() && !v.bound_ok)))?;
    w(out, format!("unverified-yes: {}", count(&|v| v.error.is_none() && !v.verified)))?;
    if strict_cases > 0 {
        w(out, format!("strict-consistency: {}/{}", count(&|v| v.error.is_none() && v.strict_ok), strict_cases))?;
    }

    let mut bad = false;
    for (case, v) in cases.iter().zip(&verdicts) {
        if let Some(e) = &v.error {
            w(out, format!("error: {}: {}", case.label, e))?;
            continue;
        }
        if !(v.agree && v.bound_ok && v.verified && v.strict_ok) {
            bad = true;
            w(out, format!("disagreement: {}", case.label))?;
            write!(out, "{}", case.inst).map_err(io_failure)?;
        }
    }
    Ok(if bad {
        EXIT_DISAGREEMENT
    } else if errors > 0 {
        EXIT_LIMIT
    } else {
        EXIT_DECIDED
    })
}

fn cmd_gen(args: &GenArgs, out: Out<'_>) -> Result<i32, Failure> {
    let inst = random_instance(args.agents, &args.edge_prob, &args.tie_prob, args.seed)
        .map_err(|e| Failure::Input(e.to_string()))?;
    write!(out, "{}", inst).map_err(io_failure)?;
    Ok(EXIT_DECIDED)
}
