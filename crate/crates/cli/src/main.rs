//! `meridian`: build meridian surfaces in R⁴, export their invariants and run
//! the verification suites.
//!
//! Exit codes: 0 success or suite pass, 1 suite failure, 2 bad parameters,
//! spec or I/O error, 3 surface not of the general class.

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use meridian_core::error::GeomError;
use meridian_core::meridian::{evaluate_grid, EvaluatorRegistry};
use meridian_core::numeric::{DiffConfig, Interval, Rect};
use meridian_core::profiles::{Branch, ProfileDocument, DEFAULT_RK4_STEP};
use meridian_core::surface_spec::{ProfileSpec, SurfaceSpec};
use meridian_core::verify::{suite_grid, SuiteParams, SuiteRegistry, Tolerances};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "meridian", version, about = "Meridian surfaces in four-dimensional Euclidean space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a meridian profile to JSON and CSV.
    Profile {
        #[command(subcommand)]
        kind: ProfileCmd,
    },
    /// Evaluate the invariant fields of a surface spec on a grid.
    Invariants(InvariantsArgs),
    /// Run a verification suite and print its JSON report.
    Verify(VerifyArgs),
    /// List verification suites and invariant evaluators.
    List,
}

#[derive(Args)]
struct SampleArgs {
    /// Number of samples.
    #[arg(long, default_value_t = 401)]
    n: usize,
    /// Output prefix; writes PREFIX.json and PREFIX.csv. Without it the CSV goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ProfileCmd {
    /// f = √(u² + 2cu + d).
    CaseI {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        d: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a_shift: f64,
        #[arg(long, default_value = "-2:2", value_parser = parse_interval, allow_hyphen_values = true)]
        u: Interval,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Integrated Chen profile ḟ = y(f).
    Chen {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value = "+", value_parser = parse_branch)]
        branch: Branch,
        #[arg(long)]
        f0: f64,
        #[arg(long, default_value_t = DEFAULT_RK4_STEP)]
        step: f64,
        /// Integration span; the profile stops earlier at the end of its validity interval.
        #[arg(long, default_value = "0:10", value_parser = parse_interval, allow_hyphen_values = true)]
        u: Interval,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// Integrated profile with ġ + fκ_m ≡ a.
    ParallelIi {
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value = "+", value_parser = parse_branch)]
        branch: Branch,
        #[arg(long)]
        f0: f64,
        #[arg(long, default_value_t = DEFAULT_RK4_STEP)]
        step: f64,
        #[arg(long, default_value = "0:10", value_parser = parse_interval, allow_hyphen_values = true)]
        u: Interval,
        #[command(flatten)]
        sample: SampleArgs,
    },
    /// f = sin u, g = −cos u.
    Sphere {
        #[arg(long, default_value = "0.3:2.8415926535897933", value_parser = parse_interval)]
        u: Interval,
        #[command(flatten)]
        sample: SampleArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct InvariantsArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value_t = 16)]
    nu: usize,
    #[arg(long, default_value_t = 16)]
    nv: usize,
    /// Evaluator name, see `meridian list`.
    #[arg(long, default_value = "closed")]
    method: String,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the u range of the spec domain.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    u: Option<Interval>,
    /// Overrides the v range of the spec domain.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    v: Option<Interval>,
    /// Finite-difference step; the grid keeps a guard of twice the step from the domain edge.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, see `meridian list`.
    suite: String,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<f64>,
    #[arg(long)]
    f0: Option<f64>,
    #[arg(long, value_parser = parse_branch)]
    branch: Option<Branch>,
    /// Directrix curvature of the parallel suites.
    #[arg(long)]
    kappa: Option<f64>,
    /// Relative change of the directrix curvature of the main surface.
    #[arg(long, allow_hyphen_values = true)]
    perturb_kappa: Option<f64>,
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long)]
    nv: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    /// Surface spec for the identities suite.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Tolerance override NAME=VALUE, repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    NotGeneral(String),
}

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::NotGeneralClass(_) => Failure::NotGeneral(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Input(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(format!("json error: {e}"))
    }
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    serde_json::from_value(Value::String(s.into())).map_err(|_| format!("branch must be + or -, got {s:?}"))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_profile(kind: ProfileCmd) -> Result<u8, Failure> {
    let (spec, range, sample) = match kind {
        ProfileCmd::CaseI { c, d, a_shift, u, sample } => (ProfileSpec::CaseI { c, d, a_shift }, Some(u), sample),
        ProfileCmd::Chen { a, b, branch, f0, step, u, sample } => {
            (ProfileSpec::Chen { a, b, branch, f0, step, u_span: u }, None, sample)
        }
        ProfileCmd::ParallelIi { a, c, branch, f0, step, u, sample } => {
            (ProfileSpec::ParallelIi { a, c, branch, f0, step, u_span: u }, None, sample)
        }
        ProfileCmd::Sphere { u, sample } => (ProfileSpec::Sphere {}, Some(u), sample),
    };
    let profile = spec.build(Path::new("."))?;
    let doc = ProfileDocument::sample(profile.as_ref(), range.unwrap_or_else(|| profile.domain()), sample.n)?;
    match sample.out {
        Some(prefix) => {
            let mut json = create(&prefix.with_extension("json"))?;
            serde_json::to_writer_pretty(&mut json, &doc)?;
            writeln!(json)?;
            json.flush()?;
            let csv = create(&prefix.with_extension("csv"))?;
            write_profile_csv(profile.as_ref(), &doc, csv)?;
        }
        None => write_profile_csv(profile.as_ref(), &doc, io::stdout().lock())?,
    }
    if doc.degenerate {
        eprintln!("note: straight meridian (κ_m ≡ 0), the profile is degenerate");
    }
    Ok(0)
}

fn write_profile_csv(
    p: &dyn meridian_core::profiles::MeridianProfile,
    doc: &ProfileDocument,
    out: impl Write,
) -> Result<(), Failure> {
    output::profile_csv(p, doc, out).map_err(|e| Failure::Input(e.to_string()))
}

fn diff_config(step: Option<f64>) -> Result<DiffConfig, Failure> {
    Ok(match step {
        Some(h) => DiffConfig::with_step(h)?,
        None => DiffConfig::default(),
    })
}

fn cmd_invariants(args: InvariantsArgs) -> Result<u8, Failure> {
    let (mut spec, base) = SurfaceSpec::load(&args.spec)?;
    if let Some(u) = args.u {
        spec.domain.u = Some(u);
    }
    if let Some(v) = args.v {
        spec.domain.v = v;
    }
    let registry = EvaluatorRegistry::builtin();
    let eval = registry.get(&args.method).ok_or_else(|| {
        Failure::Input(format!("unknown method {:?}; available: {}", args.method, registry.names().join(", ")))
    })?;
    let cfg = diff_config(args.step)?;
    let ms = spec.build(&base)?;
    ms.require_general()?;
    let grid = suite_grid(&Rect::new(ms.domain().u, ms.domain().v), args.nu, args.nv, &cfg)?;
    let samples = evaluate_grid(&ms, eval, &grid, &cfg)?;
    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        Format::Csv => output::invariants_csv(&samples, &mut sink)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &output::invariants_json(&samples))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(0)
}

fn merge_tolerances(overrides: &[String]) -> Result<Tolerances, Failure> {
    let mut obj = match serde_json::to_value(Tolerances::default())? {
        Value::Object(m) => m,
        _ => unreachable!("tolerances serialize to an object"),
    };
    for item in overrides {
        let (name, value) =
            item.split_once('=').ok_or_else(|| Failure::Input(format!("--tol expects NAME=VALUE, got {item:?}")))?;
        let value: f64 =
            value.parse().map_err(|e| Failure::Input(format!("--tol {name}: bad value {value:?}: {e}")))?;
        if !(value > 0.0 && value.is_finite()) {
            return Err(Failure::Input(format!("--tol {name}: tolerance must be positive, got {value}")));
        }
        if !obj.contains_key(name) {
            let known: Vec<&str> = obj.keys().map(String::as_str).collect();
            return Err(Failure::Input(format!("unknown tolerance {name:?}; known: {}", known.join(", "))));
        }
        obj.insert(name.into(), value.into());
    }
    Ok(serde_json::from_value(Value::Object(obj))?)
}

fn suite_params(args: &VerifyArgs) -> Result<SuiteParams, Failure> {
    let mut p = SuiteParams { tolerances: merge_tolerances(&args.tol)?, ..SuiteParams::default() };
    match args.suite.as_str() {
        "chen" => {
            p.chen.a = args.a.unwrap_or(p.chen.a);
            p.chen.b = args.b.unwrap_or(p.chen.b);
            p.chen.branch = args.branch.unwrap_or(p.chen.branch);
            p.chen_f0 = args.f0.unwrap_or(p.chen_f0);
        }
        "parallel-i" => {
            p.parallel_i.c = args.c.unwrap_or(p.parallel_i.c);
            p.parallel_i.d = args.d.unwrap_or(p.parallel_i.d);
            p.parallel_i.a_shift = args.a.unwrap_or(p.parallel_i.a_shift);
        }
        "parallel-ii" => {
            p.parallel_ii.a = args.a.unwrap_or(p.parallel_ii.a);
            p.parallel_ii.c = args.c.unwrap_or(p.parallel_ii.c);
            p.parallel_ii.branch = args.branch.unwrap_or(p.parallel_ii.branch);
            p.parallel_ii_f0 = args.f0.unwrap_or(p.parallel_ii_f0);
        }
        _ => {}
    }
    p.kappa = args.kappa.unwrap_or(p.kappa);
    p.perturb_kappa = args.perturb_kappa.unwrap_or(p.perturb_kappa);
    p.nu = args.nu.unwrap_or(p.nu);
    p.nv = args.nv.unwrap_or(p.nv);
    if p.nu < 2 || p.nv < 2 {
        return Err(Failure::Input("grid needs at least 2 points per direction".into()));
    }
    p.cfg = diff_config(args.step)?;
    if let Some(path) = &args.spec {
        let (spec, base) = SurfaceSpec::load(path)?;
        p.surface = Some(spec.build(&base)?);
    }
    Ok(p)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Failure> {
    let registry = SuiteRegistry::builtin();
    let suite = registry.get(&args.suite).ok_or_else(|| {
        Failure::Input(format!("unknown suite {:?}; available: {}", args.suite, registry.names().join(", ")))
    })?;
    let params = suite_params(&args)?;
    let report = suite.run(&params)?;
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(path) = &args.out {
        let mut f = create(path)?;
        writeln!(f, "{text}")?;
        f.flush()?;
    }
    if let Some(reason) = &report.skipped {
        eprintln!("skipped: {reason}");
        return Ok(3);
    }
    for c in report.failures() {
        eprintln!("FAIL {}: {:e} (limit {:e})", c.name, c.max_residual, c.tolerance);
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn cmd_list() -> Result<u8, Failure> {
    println!("suites:");
    for s in SuiteRegistry::builtin().iter() {
        println!("  {:<12} {}", s.name(), s.description());
    }
    println!("methods:");
    for e in EvaluatorRegistry::builtin().iter() {
        println!("  {:<12} {}", e.name(), e.description());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Profile { kind } => cmd_profile(kind),
        Command::Invariants(args) => cmd_invariants(args),
        Command::Verify(args) => cmd_verify(args),
        Command::List => cmd_list(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::NotGeneral(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
