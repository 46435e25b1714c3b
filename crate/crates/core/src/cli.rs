//! The `qec` command line.
//!
//! Exit codes: `0` pass, `1` property failure, `2` usage or configuration
//! error, `3` internal error. Reports are JSON on stdout or `--output`.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ec::{check_ec, CheckOptions};
use crate::error::QecError;
use crate::graph::{
    quadrance, sphere_table, GraphParams, Point, QuadranceGraph, DEFAULT_MATERIALIZE_LIMIT,
};
use crate::paley::{verify_isomorphism, GaussianField};
use crate::witness::{find_witness, Pattern3};
use crate::zmod::Modulus;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

/// Environment override for the materialization threshold.
pub const MATERIALIZE_ENV: &str = "QEC_MATERIALIZE_LIMIT";

#[derive(Debug, Parser)]
#[command(name = "qec", version, about = "Quadrance graphs and existential closure")]
pub struct Cli {
    /// Largest vertex count whose connection set is materialized
    #[arg(long, global = true)]
    pub materialize_limit: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a graph and print its summary
    Build(BuildArgs),
    /// Check the n-e.c. property
    Check(CheckArgs),
    /// Construct a 3-e.c. witness
    Witness(WitnessArgs),
    /// Check a grid of (m, d, n)
    Survey(SurveyArgs),
    /// Sphere sizes N_d(u) and the graph degree
    Spheres(SpheresArgs),
    /// Compare the d = 2 quadratic-residue graph with the Paley graph
    PaleyCheck(PaleyArgs),
}

#[derive(Debug, Args)]
pub struct ModulusArgs {
    /// Prime modulus
    #[arg(long, conflicts_with = "m", required_unless_present = "m")]
    pub p: Option<u64>,
    /// Any modulus >= 2
    #[arg(long)]
    pub m: Option<u64>,
}

impl ModulusArgs {
    fn resolve(&self) -> Result<u64, CliError> {
        match (self.p, self.m) {
            (Some(p), _) => {
                Modulus::odd_prime(p).map_err(CliError::usage)?;
                Ok(p)
            }
            (None, Some(m)) => {
                Modulus::new(m).map_err(CliError::usage)?;
                Ok(m)
            }
            (None, None) => Err(CliError::Usage("one of --p or --m is required".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub modulus: ModulusArgs,
    #[arg(long)]
    pub d: usize,
    /// Comma-separated edge values (default {0, ..., (m-1)/2})
    #[arg(long, value_delimiter = ',')]
    pub edge_values: Option<Vec<u64>>,
    /// Write the edge list ("i j" per line) to this file
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub modulus: ModulusArgs,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Count every failing query instead of stopping at the first
    #[arg(long)]
    pub full_scan: bool,
    /// Include elapsed_ms in the report
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub d: usize,
    /// Comma-separated coordinates
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub c: Vec<i64>,
    /// Three digits over {1,2}, e.g. 121
    #[arg(long)]
    pub pattern: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<u64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    /// Cells with at most this many vertices are checked exhaustively
    #[arg(long, default_value_t = 4096)]
    pub exhaustive_limit: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpheresArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub d: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PaleyArgs {
    #[arg(long)]
    pub p: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    fn usage(e: QecError) -> Self {
        CliError::Usage(e.to_string())
    }

    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<QecError> for CliError {
    fn from(e: QecError) -> Self {
        match e {
            QecError::NoWitness { .. } | QecError::NoCompatibleTriple => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) | CliError::Internal(m) => m,
            };
            let _ = writeln!(stderr, "error: {msg}");
            e.code()
        }
    }
}

fn materialize_limit(cli: &Cli) -> Result<usize, CliError> {
    if let Some(l) = cli.materialize_limit {
        return Ok(l);
    }
    match std::env::var(MATERIALIZE_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MATERIALIZE_ENV} must be an integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_MATERIALIZE_LIMIT),
    }
}

fn emit(out: &OutputArgs, stdout: &mut dyn Write, body: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            writeln!(f, "{body}")?;
            f.flush()?;
        }
        None => writeln!(stdout, "{body}")?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let limit = materialize_limit(cli)?;
    match &cli.command {
        Command::Build(args) => cmd_build(args, limit, stdout),
        Command::Check(args) => cmd_check(args, limit, stdout),
        Command::Witness(args) => cmd_witness(args, stdout),
        Command::Survey(args) => cmd_survey(args, limit, stdout),
        Command::Spheres(args) => cmd_spheres(args, stdout),
        Command::PaleyCheck(args) => cmd_paley(args, stdout),
    }
}

fn cmd_build(args: &BuildArgs, limit: usize, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let m = args.modulus.resolve()?;
    let params = match &args.edge_values {
        None => GraphParams::canonical(m, args.d)?,
        Some(v) => GraphParams::with_edge_values(Modulus::new(m)?, args.d, v.clone())?,
    };
    let g = QuadranceGraph::build(params, limit)?;
    if let Some(path) = &args.export {
        let f = BufWriter::new(File::create(path)?);
        g.write_edge_list(f)?;
    }
    let v = json!({
        "m": m,
        "d": args.d,
        "edge_values": g.params().edge_values(),
        "vertices": g.vertex_count(),
        "degree": g.degree(),
        "materialized": g.is_materialized(),
    });
    emit(&args.out, stdout, &pretty(&v))?;
    Ok(EXIT_PASS)
}

fn cmd_check(args: &CheckArgs, limit: usize, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let m = args.modulus.resolve()?;
    let g = QuadranceGraph::build(GraphParams::canonical(m, args.d)?, limit)?;
    let mut opts = match args.mode {
        ModeArg::Exhaustive => CheckOptions::exhaustive(),
        ModeArg::Sample => {
            if args.samples == 0 {
                return Err(CliError::Usage("--samples must be at least 1".into()));
            }
            CheckOptions::sampled(args.samples, args.seed)
        }
    }
    .with_full_scan(args.full_scan);
    if let Some(w) = args.workers {
        opts = opts.with_workers(w);
    }
    let report = check_ec(&g, args.n, opts)?;
    emit(&args.out, stdout, &report.to_json(args.timing))?;
    Ok(if report.is_pass() { EXIT_PASS } else { EXIT_FAIL })
}

fn cmd_witness(args: &WitnessArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let p = Modulus::odd_prime(args.p).map_err(CliError::usage)?;
    let pattern: Pattern3 = args.pattern.parse().map_err(CliError::usage)?;
    let point = |name: &str, coords: &[i64]| {
        if coords.len() != args.d {
            Err(CliError::Usage(format!(
                "--{name} has {} coordinates, expected {}",
                coords.len(),
                args.d
            )))
        } else {
            Ok(Point::from_i64(p, coords))
        }
    };
    let (a, b, c) = (point("a", &args.a)?, point("b", &args.b)?, point("c", &args.c)?);
    if a == b || a == c || b == c {
        return Err(CliError::Usage("points must be pairwise distinct".into()));
    }
    let r = find_witness(&a, &b, &c, pattern)?;
    if !r.verify(&a, &b, &c, pattern) {
        return Err(CliError::Internal(format!("witness {} failed verification", r.x)));
    }
    let q = |y: &Point| quadrance(&r.x, y).map(|q| q.0);
    let mut plan = json!({
        "u": r.plan.u,
        "v": r.plan.v,
        "w": r.plan.w,
        "x0": r.plan.x0.coords(),
        "basis": r.plan.basis.iter().map(|f| f.coords()).collect::<Vec<_>>(),
    });
    if let Value::Object(case) = json!(r.plan.case) {
        plan.as_object_mut().expect("object").extend(case);
    }
    let v = json!({
        "p": args.p,
        "d": args.d,
        "a": a.coords(),
        "b": b.coords(),
        "c": c.coords(),
        "pattern": pattern.to_string(),
        "x": r.x.coords(),
        "quadrances": [q(&a)?, q(&b)?, q(&c)?],
        "plan": plan,
        "attempts": r.attempts,
        "outside_hypotheses": r.outside_hypotheses,
        "verified": true,
    });
    emit(&args.out, stdout, &pretty(&v))?;
    Ok(EXIT_PASS)
}

/// One survey cell.
fn survey_cell(
    m: u64,
    d: usize,
    n: usize,
    args: &SurveyArgs,
    limit: usize,
) -> Result<Value, QecError> {
    let g = QuadranceGraph::build(GraphParams::canonical(m, d)?, limit)?;
    let mut opts = if g.vertex_count() <= args.exhaustive_limit {
        CheckOptions::exhaustive()
    } else {
        CheckOptions::sampled(args.samples, args.seed)
    };
    if let Some(w) = args.workers {
        opts = opts.with_workers(w);
    }
    let report = check_ec(&g, n, opts)?;
    let mut v = report.to_json_value(args.timing);
    if let Some(cert) = report.verdict.certificate() {
        v["certificate_verified"] = json!(cert.verify(&g));
    }
    v["within_theorem"] = json!(Modulus::new(m)?.is_prime() && m >= 7 && d >= 5 && n <= 3);
    Ok(v)
}

fn cmd_survey(args: &SurveyArgs, limit: usize, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut rows = Vec::new();
    for &m in &args.m {
        for &d in &args.d {
            for &n in &args.n {
                let row = survey_cell(m, d, n, args, limit).unwrap_or_else(|e| {
                    json!({ "m": m, "d": d, "n": n, "verdict": "error", "error": e.to_string() })
                });
                rows.push(row);
            }
        }
    }
    let body = match args.format {
        FormatArg::Json => pretty(&Value::Array(rows)),
        FormatArg::Csv => survey_csv(&rows, args.timing),
    };
    emit(&args.out, stdout, body.trim_end())?;
    Ok(EXIT_PASS)
}

fn survey_csv(rows: &[Value], timing: bool) -> String {
    let mut cols = vec!["m", "d", "n", "mode", "samples", "seed", "verdict", "queries_checked", "pattern"];
    if timing {
        cols.push("elapsed_ms");
    }
    let mut out = cols.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = cols
            .iter()
            .map(|&c| {
                let v = if c == "pattern" { &r["certificate"]["pattern"] } else { &r[c] };
                match v {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn cmd_spheres(args: &SpheresArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let p = Modulus::odd_prime(args.p).map_err(CliError::usage)?;
    let table = sphere_table(p, args.d)?;
    let params = GraphParams::canonical(args.p, args.d)?;
    let v = json!({
        "p": args.p,
        "d": args.d,
        "counts": table.counts(),
        "total": table.total(),
        "degree": table.degree(params.edge_values()),
    });
    emit(&args.out, stdout, &pretty(&v))?;
    Ok(EXIT_PASS)
}

fn cmd_paley(args: &PaleyArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    Modulus::odd_prime(args.p).map_err(CliError::usage)?;
    if let Err(e) = GaussianField::new(args.p) {
        let v = json!({ "p": args.p, "supported": false, "isomorphic": null, "reason": e.to_string() });
        emit(&args.out, stdout, &pretty(&v))?;
        return Ok(EXIT_USAGE);
    }
    let r = verify_isomorphism(args.p)?;
    let mut v = json!({
        "p": args.p,
        "supported": true,
        "isomorphic": r.isomorphic,
        "pairs_checked": r.pairs_checked,
    });
    if let Some((x, y)) = r.counterexample {
        v["counterexample"] = json!([x, y]);
    }
    emit(&args.out, stdout, &pretty(&v))?;
    Ok(if r.isomorphic { EXIT_PASS } else { EXIT_FAIL })
}
