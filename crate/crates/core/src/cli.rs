//! The `tlf` command line.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 refused as infeasible,
//! 3 verification mismatch, 4 internal check failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cover::{self, RPartite};
use crate::error::{CoverError, FormulaError, GraphError, ParseError, SearchError};
use crate::formulas;
use crate::hypergraph::{self, Hypergraph};
use crate::limits::Limits;
use crate::search::{self, Report, SearchConfig, SearchRecord, Target};
use crate::solvers;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const LIMITS_ENV: &str = "TLF_LIMITS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Parser, Debug, Serialize)]
#[command(name = "tlf", version, about = "Tight linear forests: solvers, bounds and exact Turán search")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Feasibility override, e.g. `r3=8` or `exact-path=16`. Repeatable.
    #[arg(long = "limit-override", global = true, value_name = "KEY=VAL")]
    pub limit_override: Vec<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Write a named construction as a `.hg` file.
    Gen(GenArgs),
    /// Solve ν, l or the longest tight path for a `.hg` file.
    Solve(SolveArgs),
    /// Exact Turán number by branch-and-bound.
    Exact(ExactArgs),
    /// Evaluate a closed-form bound.
    Formula(FormulaArgs),
    /// Sweep exact values against a closed form.
    Verify(VerifyArgs),
    /// Peel a random r-partite instance into tight paths.
    Cover(CoverArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Complete,
    Empty,
    CliqueJoinEmpty,
    CliquePlusIsolated,
    PerfectMatching,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub construction: Construction,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    /// Forest size; sizes the clique of the two extremal constructions.
    #[arg(long)]
    pub k: Option<usize>,
    /// Explicit clique size, instead of deriving it from `k`.
    #[arg(long)]
    pub s: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    Nu,
    Lforest,
    Tightpath,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[arg(value_enum)]
    pub what: Quantity,
    pub input: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct ExactArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "forest", value_parser = parse_target)]
    pub target: Target,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Append one summary row to this CSV file (header written when new).
    #[arg(long)]
    pub append_csv: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub witness_cap: usize,
    #[arg(long, default_value_t = 3)]
    pub iso_depth: usize,
    #[arg(long, default_value_t = 10)]
    pub split_depth: usize,
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaName {
    EmcRhs,
    ConjectureRhs,
    ReductionCheck,
    NingWang,
    Frankl3,
    Franklr,
    Beta0,
    Alpha0,
    MatchingLb,
    DenseForestLb,
    Theorem12,
}

#[derive(Args, Debug, Serialize)]
pub struct FormulaArgs {
    #[arg(value_enum)]
    pub which: FormulaName,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyTarget {
    Conjecture,
    Emc,
    NingWang,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub target: VerifyTarget,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, default_value_t = 4)]
    pub n_min: usize,
    /// Forest sizes for `conjecture`, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct CoverArgs {
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub density: f64,
    #[arg(long)]
    pub eps: f64,
    /// Read the instance from an r-partite `.hg` file instead of sampling.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INTERNAL, message: message.into() }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<FormulaError> for CliError {
    fn from(e: FormulaError) -> Self {
        CliError::usage(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        let code = match &e {
            SearchError::Infeasible(_) => EXIT_INFEASIBLE,
            SearchError::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        let code = if matches!(e, CoverError::TooLarge(_)) { EXIT_INFEASIBLE } else { EXIT_USAGE };
        CliError { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

/// What a command produced, before formatting.
struct Outcome {
    result: Value,
    /// Table form for `--format csv`; defaults to the scalar fields of `result`.
    csv: Option<String>,
    text: String,
    code: i32,
    elapsed: f64,
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = if code == EXIT_OK { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn load_limits(cli: &Cli) -> Result<Limits, CliError> {
    let mut limits = Limits::default();
    if let Some(path) = std::env::var_os(LIMITS_ENV) {
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::usage(format!("{LIMITS_ENV} file {}: {e}", Path::new(&path).display())))?;
        limits.apply_file(&text).map_err(CliError::usage)?;
    }
    for o in &cli.limit_override {
        limits.apply(o).map_err(CliError::usage)?;
    }
    Ok(limits)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let limits = load_limits(cli)?;
    if cli.workers == 0 {
        return Err(CliError::usage("--workers must be positive"));
    }
    let start = Instant::now();
    let mut outcome = match &cli.command {
        Command::Gen(a) => return gen(cli, a, out),
        Command::Solve(a) => solve(a)?,
        Command::Exact(a) => exact(cli, a, &limits)?,
        Command::Formula(a) => formula(a)?,
        Command::Verify(a) => verify(cli, a, &limits)?,
        Command::Cover(a) => cover_cmd(cli, a, &limits)?,
    };
    outcome.elapsed = start.elapsed().as_secs_f64();
    let rendered = match cli.format {
        Format::Json => {
            let doc = json!({
                "tool_version": TOOL_VERSION,
                "config": cli,
                "limits": limits,
                "seed": cli.seed,
                "result": outcome.result,
                "elapsed_seconds": outcome.elapsed,
            });
            serde_json::to_string_pretty(&doc).map_err(|e| CliError::internal(e.to_string()))? + "\n"
        }
        Format::Csv => match outcome.csv.take() {
            Some(csv) => csv,
            None => scalar_csv(&outcome.result),
        },
        Format::Text => outcome.text.clone(),
    };
    emit(cli, &rendered, out)?;
    Ok(outcome.code)
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Header and one row from the scalar top-level fields of a JSON object.
fn scalar_csv(v: &Value) -> String {
    let mut header = Vec::new();
    let mut row = Vec::new();
    if let Some(obj) = v.as_object() {
        for (k, v) in obj {
            let cell = match v {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                Value::Null => String::new(),
                _ => continue,
            };
            header.push(k.clone());
            row.push(cell);
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    w.write_record(&row).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::internal(e.to_string()))
}

fn gen(cli: &Cli, a: &GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (n, r) = (a.n, a.r);
    if n > hypergraph::MAX_VERTICES || r == 0 {
        return Err(CliError::usage(format!("need 1 <= r and n <= {}", hypergraph::MAX_VERTICES)));
    }
    let clique_size = || a.s.ok_or_else(|| CliError::usage("this construction needs --k or --s"));
    let h = match a.construction {
        Construction::Complete => Hypergraph::complete(n, r),
        Construction::Empty => Hypergraph::empty(n, r),
        Construction::PerfectMatching => Hypergraph::perfect_matching(n, r)?,
        Construction::CliquePlusIsolated => {
            if let (None, Some(k)) = (a.s, a.k) {
                hypergraph::extremal_construction(n, r, k)?.0
            } else {
                hypergraph::clique_plus_isolated(n, r, clique_size()?)?
            }
        }
        Construction::CliqueJoinEmpty => {
            if let (None, Some(k)) = (a.s, a.k) {
                hypergraph::extremal_construction(n, r, k)?.1
            } else {
                hypergraph::clique_join_empty(n, r, clique_size()?)?
            }
        }
    };
    let text = h.serialize();
    match &cli.output {
        Some(path) => {
            fs::write(path, &text)?;
            let summary = json!({
                "tool_version": TOOL_VERSION,
                "config": cli,
                "seed": cli.seed,
                "result": {"path": path, "n": h.n(), "r": h.r(), "edges": h.edge_count()},
            });
            let s = serde_json::to_string_pretty(&summary).map_err(|e| CliError::internal(e.to_string()))?;
            writeln!(out, "{s}")?;
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn read_graph(path: &Path) -> Result<Hypergraph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Hypergraph::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn solve(a: &SolveArgs) -> Result<Outcome, CliError> {
    let h = read_graph(&a.input)?;
    let start = Instant::now();
    let (value, witness, valid) = match a.what {
        Quantity::Nu => {
            let (v, m) = solvers::nu(&h);
            let ok = m.is_valid_for(&h) && m.size() == v;
            (v, to_value(&m)?, ok)
        }
        Quantity::Lforest => {
            let (v, f) = solvers::lforest(&h);
            let ok = f.is_valid_for(&h) && f.edge_count() == v;
            (v, to_value(&f)?, ok)
        }
        Quantity::Tightpath => {
            let (v, p) = solvers::max_tight_path(&h);
            let ok = p.as_ref().map_or(v == 0, |p| p.is_valid_for(&h) && p.edge_count(h.r()) == v);
            (v, to_value(&p)?, ok)
        }
    };
    if !valid {
        return Err(CliError::internal("solver witness failed validation"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let what = to_value(&a.what)?;
    let result = json!({
        "quantity": what,
        "n": h.n(),
        "r": h.r(),
        "edges": h.edge_count(),
        "value": value,
        "witness": witness,
        "elapsed": elapsed,
    });
    let text = format!("{} = {value}\n", what.as_str().unwrap_or(""));
    Ok(Outcome { result, csv: None, text, code: EXIT_OK, elapsed: 0.0 })
}

pub const EXACT_CSV_HEADER: [&str; 10] =
    ["n", "r", "k", "target", "value", "lower_bound", "witnesses", "nodes", "status", "seconds"];

fn exact_row(rec: &SearchRecord, seconds: f64) -> [String; 10] {
    [
        rec.n.to_string(),
        rec.r.to_string(),
        rec.k.to_string(),
        rec.target.to_string(),
        rec.value.to_string(),
        rec.lower_bound.to_string(),
        rec.witnesses.len().to_string(),
        rec.nodes_explored.to_string(),
        to_value(&rec.status).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
        format!("{seconds:.3}"),
    ]
}

fn exact(cli: &Cli, a: &ExactArgs, limits: &Limits) -> Result<Outcome, CliError> {
    let cfg = SearchConfig {
        workers: cli.workers,
        limits: limits.clone(),
        iso_depth: a.iso_depth,
        split_depth: a.split_depth,
        witness_cap: a.witness_cap,
        checkpoint: a.checkpoint.clone(),
        ..SearchConfig::default()
    };
    let start = Instant::now();
    let rec = search::turan_exact(a.n, a.r, a.k, a.target, &cfg)?;
    let seconds = start.elapsed().as_secs_f64();
    let row = exact_row(&rec, seconds);
    if let Some(path) = &a.append_csv {
        let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
        let file = fs::OpenOptions::new().create(true).append(true).open(path)?;
        let mut w = csv::WriterBuilder::new().from_writer(file);
        if fresh {
            w.write_record(EXACT_CSV_HEADER).map_err(|e| CliError::usage(e.to_string()))?;
        }
        w.write_record(&row).map_err(|e| CliError::usage(e.to_string()))?;
        w.flush()?;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EXACT_CSV_HEADER).expect("in-memory write");
    w.write_record(&row).expect("in-memory write");
    let csv = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8");
    let text = format!(
        "ex_{}({}; {} k={}) = {}  [{} witnesses, {} nodes, {}]\n",
        rec.r,
        rec.n,
        rec.target,
        rec.k,
        rec.value,
        rec.witnesses.len(),
        rec.nodes_explored,
        row[8]
    );
    Ok(Outcome { result: to_value(&rec)?, csv: Some(csv), text, code: EXIT_OK, elapsed: 0.0 })
}

fn need<T: Copy>(v: Option<T>, flag: &str, which: FormulaName) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("formula {which:?} needs --{flag}")))
}

fn formula(a: &FormulaArgs) -> Result<Outcome, CliError> {
    use FormulaName::*;
    let w = a.which;
    let (result, text) = match w {
        Beta0 => {
            let b = formulas::beta0();
            let residual = formulas::f(b.value).abs();
            (
                json!({"beta0": b.value, "abs_f_beta0": residual}),
                format!("beta0 = {}  |f(beta0)| = {residual:e}\n", b.value),
            )
        }
        Alpha0 => {
            let v = formulas::alpha0();
            (json!({"alpha0": v}), format!("alpha0 = {v}\n"))
        }
        ReductionCheck => {
            let (n, r, k) = (need(a.n, "n", w)?, need(a.r, "r", w)?, need(a.k, "k", w)?);
            let ok = formulas::emc_reduction_check(n, r, k)?;
            (json!({"holds": ok}), format!("reduction identity holds: {ok}\n"))
        }
        _ => {
            let v = match w {
                EmcRhs => formulas::emc_rhs(need(a.n, "n", w)?, need(a.r, "r", w)?, need(a.k, "k", w)?)?,
                ConjectureRhs => {
                    formulas::conjecture_rhs(need(a.n, "n", w)?, need(a.r, "r", w)?, need(a.k, "k", w)?)?
                }
                NingWang => formulas::ning_wang_rhs(need(a.n, "n", w)?, need(a.k, "k", w)?)?,
                Frankl3 => formulas::frankl3_rhs(need(a.n, "n", w)?, need(a.k, "k", w)?)?,
                Franklr => formulas::franklr_rhs(need(a.n, "n", w)?, need(a.r, "r", w)?, need(a.k, "k", w)?)?,
                MatchingLb => {
                    let r = need(a.r, "r", w)?;
                    let alpha = need(a.alpha, "alpha", w)?;
                    let n = a.n.unwrap_or(1000);
                    if r == 3 {
                        formulas::matching_lb_r3(alpha, n)?
                    } else {
                        formulas::matching_lb_general(alpha, n, r as u32)?
                    }
                }
                DenseForestLb => {
                    formulas::dense_forest_lb(need(a.alpha, "alpha", w)?, a.n.unwrap_or(1000), need(a.r, "r", w)? as u32)?
                }
                Theorem12 => formulas::theorem12_rhs(need(a.n, "n", w)?, need(a.r, "r", w)? as u32, need(a.c, "c", w)?)?,
                Beta0 | Alpha0 | ReductionCheck => unreachable!("handled above"),
            };
            let text = format!("{v}\n");
            (to_value(&v)?, text)
        }
    };
    Ok(Outcome { result, csv: None, text, code: EXIT_OK, elapsed: 0.0 })
}

fn verify(cli: &Cli, a: &VerifyArgs, limits: &Limits) -> Result<Outcome, CliError> {
    let cfg = SearchConfig { workers: cli.workers, limits: limits.clone(), ..SearchConfig::default() };
    let report: Report = match a.target {
        VerifyTarget::NingWang => search::verify_ning_wang(a.n_min, a.n_max, &cfg)?,
        VerifyTarget::Conjecture => {
            let r = a.r.ok_or_else(|| CliError::usage("verify conjecture needs --r"))?;
            if a.k.is_empty() {
                return Err(CliError::usage("verify conjecture needs --k"));
            }
            search::verify_conjecture(a.n_max, r, &a.k, &cfg)?
        }
        VerifyTarget::Emc => {
            let r = a.r.ok_or_else(|| CliError::usage("verify emc needs --r"))?;
            let k_max = a.k_max.ok_or_else(|| CliError::usage("verify emc needs --k-max"))?;
            search::verify_emc_small(a.n_max, r, k_max, &cfg)?
        }
    };
    let code = if report.all_match() { EXIT_OK } else { EXIT_MISMATCH };
    let mut text = String::new();
    for row in &report.rows {
        let cell = |v: Option<String>| v.unwrap_or_else(|| "-".into());
        text.push_str(&format!(
            "n={} r={} k={} exact={} formula={} match={} {}\n",
            row.n,
            row.r,
            row.k,
            cell(row.exact.map(|v| v.to_string())),
            cell(row.formula.map(|v| v.to_string())),
            cell(row.matched.map(|v| v.to_string())),
            row.status
        ));
    }
    let mismatches = report.mismatches().count();
    text.push_str(&format!(
        "{} rows, {mismatches} mismatches, {} skipped\n",
        report.rows.len(),
        report.skipped()
    ));
    Ok(Outcome { result: to_value(&report)?, csv: Some(report.to_csv()), text, code, elapsed: 0.0 })
}

fn cover_cmd(cli: &Cli, a: &CoverArgs, limits: &Limits) -> Result<Outcome, CliError> {
    let h = match &a.input {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let h = RPartite::parse(&text)?;
            if (h.r(), h.m()) != (a.r, a.m) {
                return Err(CliError::usage("instance shape differs from --r/--m"));
            }
            h
        }
        None => cover::random_rpartite(a.r, a.m, a.density, cli.seed.unwrap_or(0))?,
    };
    let rep = cover::peel_cover(&h, a.eps, a.density, limits)?;
    let code = if rep.bounds_hold == Some(false) { EXIT_INTERNAL } else { EXIT_OK };
    let text = format!(
        "paths={} covered={} leftover={} rounds={} violated={} path_bound={:.2} leftover_bound={:.2}\n",
        rep.paths.len(),
        rep.covered,
        rep.leftover,
        rep.rounds,
        rep.violated,
        rep.path_bound,
        rep.leftover_bound
    );
    let mut result = to_value(&rep)?;
    result["generator"] = json!(if a.input.is_some() { "file" } else { cover::GENERATOR });
    result["edges"] = json!(h.edge_count());
    Ok(Outcome { result, csv: None, text, code, elapsed: 0.0 })
}
