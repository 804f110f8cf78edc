//! Batch front-end. `run` parses arguments, executes one job, writes a
//! JSON report to `--out` when given and a short summary to `stdout`.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 inconclusive, 3 usage or
//! parse error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::catalog::{resolve_catalog, verify_catalog_with, FIT_TOLERANCE};
use crate::error::{Result, TraceError};
use crate::flows::{certify_symplectic, Certified, FamilyId, FlowFamily, FlowTolerances};
use crate::generation::chains::{default_chains, lemma_ids, load_chains, replay_lemma_chain_with, ReplayOptions};
use crate::generation::closure::{build_closure, default_depth, standard_generators, ClosureConfig};
use crate::generation::membership::{MembershipContext, MembershipStatus};
use crate::generation::model::{model_generation, standard_model_generators, ExponentBox, ModelSpace};
use crate::numeric::cm::{sample_many, trace_residual, CMPointRecord, SamplerConfig};
use crate::poisson::{bracket_standard, bracket_traceless_unreduced};
use crate::poly::{Mode, TracePolynomial};
use crate::reduce::cayley_hamilton_reduce;
use crate::text::parse_polynomial_in;

pub const SEED_ENV: &str = "TRACE_POISSON_SEED";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Plain,
    Traceless,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Plain => Mode::Plain,
            ModeArg::Traceless => Mode::Traceless,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "trace-poisson", version, about = "Poisson calculus on trace polynomials of matrix pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub job: JobConfig,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct JobConfig {
    /// Matrix size.
    #[arg(long = "n", global = true)]
    pub n_value: Option<usize>,
    #[arg(long, global = true, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Bracket nesting depth cap for closures.
    #[arg(long = "depth", global = true)]
    pub depth_cap: Option<usize>,
    #[arg(long = "degree", global = true)]
    pub degree_cap: Option<u32>,
    #[arg(long = "samples", global = true)]
    pub sample_count: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, global = true)]
    pub catalog: Option<String>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance override, e.g. `fit=1e-9`.
    #[arg(long = "tol", global = true, value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Poisson bracket of two polynomials.
    Bracket { f: String, g: String },
    /// Cayley–Hamilton reduction at `--n`.
    Reduce { polynomial: String },
    /// Sample Calogero–Moser points.
    Sample,
    /// Certify the explicit flow families.
    Flow {
        /// Family name; all four when omitted.
        #[arg(long)]
        family: Vec<String>,
        /// Flow times, e.g. `1+1i`; defaults to 0.1, 1, 1+i, 10.
        #[arg(long = "t", value_parser = parse_complex)]
        times: Vec<Complex64>,
    },
    /// Verify a bracket catalog.
    Verify,
    /// Replay lemma chains; all shipped lemmas when none is named.
    Replay { lemmas: Vec<String> },
    /// Build the Lie closure of the standard generators, or of a model space.
    Closure {
        #[arg(long, value_parser = parse_space)]
        space: Option<ModelSpace>,
    },
    /// Certify that targets lie in the closure span.
    Membership {
        #[arg(long, required = true)]
        target: Vec<String>,
    },
}

fn parse_tolerance(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = value.trim().parse().map_err(|e| format!("tolerance `{value}`: {e}"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(format!("tolerance `{name}` must be positive"));
    }
    Ok((name.trim().to_string(), v))
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    s.parse::<Complex64>().map_err(|e| format!("complex number `{s}`: {e:?}"))
}

fn parse_space(s: &str) -> std::result::Result<ModelSpace, String> {
    s.parse::<ModelSpace>().map_err(|e| e.to_string())
}

/// Outcome of one job: exit code, summary lines and the structured report.
pub struct Outcome {
    pub code: i32,
    pub summary: Vec<String>,
    pub report: serde_json::Value,
}

impl Outcome {
    fn new(code: i32, summary: Vec<String>, report: impl Serialize) -> Result<Self> {
        Ok(Self { code, summary, report: serde_json::to_value(report)? })
    }
}

/// Documented safe range per tolerance name.
const TOLERANCES: &[(&str, f64, f64)] =
    &[("fit", 1e-14, 1e-4), ("symplectic", 1e-14, 1e-3), ("rank", 1e-14, 1e-4), ("trace", 1e-15, 1e-4)];

impl JobConfig {
    fn n(&self, default: usize) -> Result<usize> {
        match self.n_value.unwrap_or(default) {
            0 => Err(TraceError::ZeroN),
            n => Ok(n),
        }
    }

    fn samples(&self, default: usize) -> Result<usize> {
        match self.sample_count.unwrap_or(default) {
            0 => Err(TraceError::Usage("--samples must be positive".into())),
            s => Ok(s),
        }
    }

    /// Looks up `--tol name=...`; names outside `allowed` are usage errors.
    fn tolerance(&self, allowed: &[&str], name: &str, default: f64, warnings: &mut Vec<String>) -> Result<f64> {
        if let Some((bad, _)) = self.tolerances.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(TraceError::Usage(format!(
                "unknown tolerance `{bad}` (expected one of {})",
                allowed.join(", ")
            )));
        }
        let Some(&(_, v)) = self.tolerances.iter().rev().find(|(k, _)| k == name) else {
            return Ok(default);
        };
        if let Some(&(_, lo, hi)) = TOLERANCES.iter().find(|t| t.0 == name) {
            if !(lo..=hi).contains(&v) {
                warnings.push(format!("warning: {name}={v:e} is outside the safe range [{lo:e}, {hi:e}]"));
            }
        }
        Ok(v)
    }
}

fn parse_in(text: &str, mode: Mode) -> Result<TracePolynomial> {
    parse_polynomial_in(text, mode)
}

fn run_bracket(job: &JobConfig, f: &str, g: &str) -> Result<Outcome> {
    let mode: Mode = job.mode.unwrap_or(ModeArg::Traceless).into();
    let (f, g) = (parse_in(f, mode)?, parse_in(g, mode)?);
    let mut summary = Vec::new();
    let (unreduced, bracket) = match mode {
        Mode::Plain => {
            let b = bracket_standard(&f, &g)?;
            summary.push(b.to_string());
            (None, b)
        }
        Mode::Traceless => {
            let u = bracket_traceless_unreduced(&f, &g)?;
            let b = u.reduce();
            summary.push(u.to_string());
            summary.push(b.to_string());
            (Some(u.to_string()), b)
        }
    };
    let reduced = match job.n_value {
        Some(n) => {
            let r = cayley_hamilton_reduce(&bracket, n as u32)?;
            summary.push(format!("n={n}: {r}"));
            Some(r.to_string())
        }
        None => None,
    };
    let report = json!({
        "command": "bracket",
        "mode": mode.to_string(),
        "f": f.to_string(),
        "g": g.to_string(),
        "unreduced": unreduced,
        "bracket": bracket.to_string(),
        "reduced": reduced,
        "n": job.n_value,
    });
    Outcome::new(EXIT_PASS, summary, report)
}

fn run_reduce(job: &JobConfig, text: &str) -> Result<Outcome> {
    let n = job.n_value.ok_or_else(|| TraceError::Usage("reduce needs --n".into()))?;
    let p = parse_in(text, job.mode.unwrap_or(ModeArg::Traceless).into())?;
    let r = cayley_hamilton_reduce(&p, job.n(n)? as u32)?;
    let report = json!({"command": "reduce", "n": n, "input": p.to_string(), "reduced": r.to_string()});
    Outcome::new(EXIT_PASS, vec![r.to_string()], report)
}

fn run_sample(job: &JobConfig) -> Result<Outcome> {
    let n = job.n(2)?;
    let count = job.samples(1)?;
    let traceless = job.mode.unwrap_or(ModeArg::Traceless) == ModeArg::Traceless;
    let points = sample_many(n, traceless, job.seed, count, &SamplerConfig::default())?;
    let records: Vec<CMPointRecord> = points.iter().map(CMPointRecord::from).collect();
    let rank = points.iter().map(|p| p.rank_residual).fold(0.0, f64::max);
    let tr = if traceless { points.iter().map(|p| trace_residual(&p.pair)).fold(0.0, f64::max) } else { 0.0 };
    let summary = vec![format!("{count} points, n={n}, max rank residual {rank:.3e}, max trace residual {tr:.3e}")];
    Outcome::new(EXIT_PASS, summary, json!({"command": "sample", "n": n, "seed": job.seed, "points": records}))
}

fn run_flow(job: &JobConfig, families: &[String], times: &[Complex64]) -> Result<Outcome> {
    let mut warnings = Vec::new();
    let names = ["symplectic", "rank", "trace"];
    let d = FlowTolerances::default();
    let tol = FlowTolerances {
        symplectic: job.tolerance(&names, "symplectic", d.symplectic, &mut warnings)?,
        rank: job.tolerance(&names, "rank", d.rank, &mut warnings)?,
        trace: job.tolerance(&names, "trace", d.trace, &mut warnings)?,
    };
    let ids: Vec<FamilyId> = if families.is_empty() {
        FamilyId::ALL.to_vec()
    } else {
        families.iter().map(|f| f.parse()).collect::<Result<_>>()?
    };
    let times: Vec<Complex64> = if times.is_empty() {
        vec![Complex64::new(0.1, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(10.0, 0.0)]
    } else {
        times.to_vec()
    };
    let ns: Vec<usize> = match job.n_value {
        Some(_) => vec![job.n(2)?],
        None => vec![2, 3],
    };
    let count = job.samples(5)?;
    let mut records = Vec::new();
    for &n in &ns {
        let pts = sample_many(n, true, job.seed, count, &SamplerConfig::flow())?;
        for &id in &ids {
            for &t in &times {
                records.extend(certify_symplectic(&Certified::Family(FlowFamily::new(id, t)), &pts, tol));
            }
        }
    }
    let failed = records.iter().filter(|r| !r.passed).count();
    let mut summary = warnings;
    summary.push(format!("{} of {} flow records passed", records.len() - failed, records.len()));
    for r in records.iter().filter(|r| !r.passed).take(10) {
        summary.push(format!(
            "FAIL {} t={}{:+}i n={} point {}: symplectic {:.3e} rank {:.3e} trace {:.3e}",
            r.family, r.t[0], r.t[1], r.n, r.point_id, r.symplectic_residual, r.rank_residual, r.trace_residual
        ));
    }
    let code = if failed == 0 { EXIT_PASS } else { EXIT_FAIL };
    Outcome::new(code, summary, json!({"command": "flow", "seed": job.seed, "records": records}))
}

fn run_verify(job: &JobConfig) -> Result<Outcome> {
    let mut warnings = Vec::new();
    let tol = job.tolerance(&["fit"], "fit", FIT_TOLERANCE, &mut warnings)?;
    let entries = resolve_catalog(job.catalog.as_deref().unwrap_or("default"))?;
    let report = verify_catalog_with(&entries, job.n(3)?, job.samples(100)?, job.seed, tol)?;
    let mut summary = warnings;
    summary.push(format!("{} passed, {} failed (n={})", report.passed, report.failed, report.n));
    for e in report.entries.iter().filter(|e| !e.passed) {
        summary.push(format!("FAIL {}: difference {}", e.id, e.difference));
    }
    let code = if report.all_passed() { EXIT_PASS } else { EXIT_FAIL };
    Outcome::new(code, summary, report)
}

fn run_replay(job: &JobConfig, lemmas: &[String]) -> Result<Outcome> {
    let mut warnings = Vec::new();
    let tol = job.tolerance(&["fit"], "fit", FIT_TOLERANCE, &mut warnings)?;
    let steps = match &job.catalog {
        Some(path) if path != "default" => load_chains(std::path::Path::new(path))?,
        _ => default_chains(),
    };
    let ids = if lemmas.is_empty() { lemma_ids(&steps) } else { lemmas.to_vec() };
    let mut opts = ReplayOptions { seed: job.seed, tolerance: tol, ..ReplayOptions::default() };
    if let Some(n) = job.n_value {
        opts.n_values = vec![job.n(n)?];
    }
    opts.samples = job.samples(opts.samples)?;
    let reports = ids.iter().map(|id| replay_lemma_chain_with(id, &steps, &opts)).collect::<Result<Vec<_>>>()?;
    let mut summary = warnings;
    for r in &reports {
        match r.first_failure {
            None => summary.push(format!("{}: {} steps passed", r.lemma_id, r.steps.len())),
            Some(s) => {
                let last = r.steps.last().expect("a failing step is recorded");
                summary.push(format!("{}: FAIL at step {s}, difference {}", r.lemma_id, last.difference));
            }
        }
    }
    let code = if reports.iter().all(|r| r.passed) { EXIT_PASS } else { EXIT_FAIL };
    Outcome::new(code, summary, json!({"command": "replay", "seed": job.seed, "lemmas": reports}))
}

fn closure_config(job: &JobConfig) -> Result<ClosureConfig> {
    let n = job.n(3)?;
    let mut cfg = ClosureConfig::new(n);
    cfg.depth_cap = job.depth_cap.unwrap_or(default_depth(n));
    cfg.degree_cap = job.degree_cap.unwrap_or(cfg.degree_cap);
    cfg.seed = job.seed;
    Ok(cfg)
}

fn run_model(job: &JobConfig, space: ModelSpace) -> Result<Outcome> {
    let d = job.degree_cap.unwrap_or(4) as i32;
    let target = match space {
        ModelSpace::Plane => ExponentBox::degree(d),
        ModelSpace::Cylinder => ExponentBox::rect((0, d), (-d, d)),
        ModelSpace::Torus => ExponentBox::rect((-d, d), (-d, d)),
    };
    let gens = standard_model_generators(space, &target);
    let report = model_generation(space, &gens, &target, job.depth_cap.unwrap_or(8))?;
    let mut summary =
        vec![format!("{space} {}: {} of {} monomials reached", report.target, report.reached, report.targets)];
    if !report.missing.is_empty() {
        summary.push(format!("missing: {}", report.missing.join(", ")));
    }
    let code = if report.passed { EXIT_PASS } else { EXIT_FAIL };
    Outcome::new(code, summary, report)
}

fn run_closure(job: &JobConfig, space: Option<ModelSpace>) -> Result<Outcome> {
    if let Some(space) = space {
        return run_model(job, space);
    }
    let cfg = closure_config(job)?;
    let basis = build_closure(&standard_generators(), &cfg)?;
    let elements: Vec<_> = basis
        .elements
        .iter()
        .map(|e| json!({"polynomial": e.poly.to_string(), "tree": e.tree.render(&basis.generators)}))
        .collect();
    let report = json!({
        "command": "closure",
        "n": basis.n_value,
        "depth_cap": basis.depth_cap,
        "degree_cap": basis.degree_cap,
        "seed": basis.seed,
        "generators": basis.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
        "levels": basis.levels,
        "pool_size": basis.pool_size,
        "elements": elements,
    });
    let summary = vec![format!(
        "{} elements at depth {} (degree cap {}, n={}), span by depth {:?}",
        basis.len(),
        basis.depth_cap,
        basis.degree_cap,
        basis.n_value,
        basis.levels
    )];
    Outcome::new(EXIT_PASS, summary, report)
}

fn run_membership(job: &JobConfig, targets: &[String]) -> Result<Outcome> {
    let targets: Vec<TracePolynomial> = targets.iter().map(|t| parse_in(t, Mode::Traceless)).collect::<Result<_>>()?;
    let mut cfg = closure_config(job)?;
    if job.degree_cap.is_none() {
        cfg.degree_cap = targets.iter().filter_map(|t| t.degree()).max().unwrap_or(2).max(cfg.degree_cap);
    }
    let basis = build_closure(&standard_generators(), &cfg)?;
    let ctx = MembershipContext::new(&basis, job.sample_count, job.seed)?;
    let certs = targets.iter().map(|t| ctx.check(t)).collect::<Result<Vec<_>>>()?;
    let summary = certs
        .iter()
        .map(|c| format!("{}: {:?}, residual {:.3e} ({})", c.target, c.status, c.residual, c.message))
        .collect();
    let code = if certs.iter().any(|c| c.status == MembershipStatus::NotFound) {
        EXIT_FAIL
    } else if certs.iter().any(|c| c.status == MembershipStatus::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_PASS
    };
    Outcome::new(code, summary, json!({"command": "membership", "certificates": certs}))
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let job = &cli.job;
    match &cli.command {
        Command::Bracket { f, g } => run_bracket(job, f, g),
        Command::Reduce { polynomial } => run_reduce(job, polynomial),
        Command::Sample => run_sample(job),
        Command::Flow { family, times } => run_flow(job, family, times),
        Command::Verify => run_verify(job),
        Command::Replay { lemmas } => run_replay(job, lemmas),
        Command::Closure { space } => run_closure(job, *space),
        Command::Membership { target } => run_membership(job, target),
    }
}

fn error_code(e: &TraceError) -> i32 {
    match e {
        TraceError::Parse { .. }
        | TraceError::Usage(_)
        | TraceError::ZeroN
        | TraceError::Unknown { .. }
        | TraceError::Catalog(_)
        | TraceError::WrongMode { .. }
        | TraceError::ModeMismatch { .. }
        | TraceError::Json(_)
        | TraceError::Io(_) => EXIT_USAGE,
        _ => EXIT_INCONCLUSIVE,
    }
}

/// Parses `args` (program name first), runs the job and returns the exit
/// code. Summaries go to `stdout`, errors to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return error_code(&e);
        }
    };
    for line in &outcome.summary {
        let _ = writeln!(stdout, "{line}");
    }
    if let Some(path) = &cli.job.out {
        let text = serde_json::to_string_pretty(&outcome.report).expect("reports serialize");
        if let Err(e) = std::fs::write(path, text + "\n") {
            let _ = writeln!(stderr, "error: writing {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    outcome.code
}
