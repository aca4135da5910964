mod render;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use supersurf::crosscheck::{check_report, compute_report, verify_example, PaperTables, Pipeline};
use supersurf::dsl::{bindings, elaborate_exact, elaborate_symbolic, Backend, DslError, ErrorKind, SurfaceSpec};
use supersurf::random::{metric, rng, MetricShape};
use supersurf::symbolic::Printer;
use supersurf::{ExactScalar, GeometryError, IdentityKind, Metric};

const EXAMPLES: [(&str, &str, &str); 4] = [
    ("example1.surf", include_str!("../../core/fixtures/example1.surf"), include_str!("../../core/fixtures/example1.paper")),
    ("example2.surf", include_str!("../../core/fixtures/example2.surf"), include_str!("../../core/fixtures/example2.paper")),
    ("example3.surf", include_str!("../../core/fixtures/example3.surf"), include_str!("../../core/fixtures/example3.paper")),
    ("example4.surf", include_str!("../../core/fixtures/example4.surf"), include_str!("../../core/fixtures/example4.paper")),
];

/// Christoffel symbols, curvature and identity checks on noncommutative
/// super-surfaces.
#[derive(Parser)]
#[command(name = "supersurf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the inverse metric, Christoffel symbols, curvature, Ricci and scalar curvature.
    Compute {
        file: String,
        #[command(flatten)]
        opts: MetricOpts,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the connection and curvature identities. FILE may be `random`.
    Check {
        file: String,
        #[command(flatten)]
        opts: MetricOpts,
        #[command(flatten)]
        random: RandomOpts,
        /// Comma-separated identity names; all when omitted.
        #[arg(long, value_delimiter = ',')]
        identities: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Compare the engine against the transcribed tables of a worked example.
    Example {
        #[arg(value_parser = clap::value_parser!(u32).range(1..=4))]
        k: u32,
        /// Show every row, not only the differing ones.
        #[arg(long)]
        all: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a random metric file with polynomial entries.
    Random {
        #[command(flatten)]
        random: RandomOpts,
        #[arg(long, default_value_t = 3)]
        order: u32,
    },
}

#[derive(Args)]
struct MetricOpts {
    /// Truncation order in hbar (overrides the file).
    #[arg(long)]
    order: Option<u32>,
    /// Backend (overrides the file).
    #[arg(long)]
    backend: Option<Backend>,
    /// Binding set for the exact backend; the first one in the file by default.
    #[arg(long)]
    bindings: Option<u32>,
}

#[derive(Args)]
struct RandomOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of odd coordinates.
    #[arg(long, default_value_t = 0)]
    p: u8,
    /// Polynomial degree of the entries.
    #[arg(long, default_value_t = 2)]
    degree: usize,
    /// Drop graded symmetry.
    #[arg(long)]
    asymmetric: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Exit codes.
const INPUT: u8 = 1;
const PRECONDITION: u8 = 2;
const FAILED: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT, message: message.into() }
    }
}

impl From<DslError> for Failure {
    fn from(e: DslError) -> Self {
        let code = if e.kind == ErrorKind::Singular { PRECONDITION } else { INPUT };
        Failure { code, message: e.to_string() }
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        let code = if matches!(e, GeometryError::NotInvertible(_)) { PRECONDITION } else { INPUT };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Compute { file, opts, format } => compute(&file, &opts, format),
        Command::Check { file, opts, random, identities, format } => {
            let only = identities
                .iter()
                .map(|s| IdentityKind::parse(s).ok_or_else(|| Failure::input(format!("unknown identity `{s}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            check(&file, &opts, &random, &only, format)
        }
        Command::Example { k, all, format } => example(k, all, format),
        Command::Random { random, order } => {
            out(&render::surf(&random_metric(&random, order)?, random.seed));
            Ok(0)
        }
    }
}

fn load(file: &str, opts: &MetricOpts) -> Result<SurfaceSpec, Failure> {
    let src = fs::read_to_string(file).map_err(|e| Failure::input(format!("{file}: {e}")))?;
    let mut spec = SurfaceSpec::parse(&src).map_err(|e| Failure::input(format!("{file}:{e}")))?;
    if let Some(n) = opts.order {
        spec.order = n;
    }
    if let Some(b) = opts.backend {
        spec.backend = b;
    }
    Ok(spec)
}

fn binding_index(spec: &SurfaceSpec, opts: &MetricOpts) -> u32 {
    opts.bindings
        .or_else(|| spec.bindings.first().map(|b| b.index))
        .unwrap_or(0)
}

fn exact_metric(spec: &SurfaceSpec, opts: &MetricOpts) -> Result<Metric<ExactScalar>, Failure> {
    let index = binding_index(spec, opts);
    bindings(spec, index)?;
    Ok(elaborate_exact(spec, index)?)
}

fn printer(spec: &SurfaceSpec) -> Printer {
    Printer {
        generator_names: spec.generator_names(),
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn out(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn emit<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Json => out(&(serde_json::to_string_pretty(value).expect("reports serialize") + "\n")),
        Format::Text => out(&text()),
    }
}

fn compute(file: &str, opts: &MetricOpts, format: Format) -> Result<u8, Failure> {
    let spec = load(file, opts)?;
    let report = match spec.backend {
        Backend::Symbolic => {
            let p = printer(&spec);
            compute_report(file, "symbolic", &Pipeline::run(elaborate_symbolic(&spec)?), &|v| p.print(v))
        }
        Backend::Exact => {
            let m = exact_metric(&spec, opts)?;
            compute_report(file, "exact", &Pipeline::run(m), &|v| v.to_string())
        }
    };
    emit(format, &report, || render::compute(&report));
    Ok(0)
}

fn random_metric(r: &RandomOpts, order: u32) -> Result<Metric<ExactScalar>, Failure> {
    let shape = MetricShape {
        odd: r.p,
        order,
        graded_symmetric: !r.asymmetric,
        degree: r.degree,
    };
    metric(&mut rng(r.seed), shape).map_err(|e| {
        let mut f = Failure::from(e);
        if r.p % 2 == 1 && !r.asymmetric {
            f.message += " (with an odd number of odd coordinates, graded symmetry forces a zero odd-odd body; pass --asymmetric)";
        }
        f
    })
}

fn check(file: &str, opts: &MetricOpts, random: &RandomOpts, only: &[IdentityKind], format: Format) -> Result<u8, Failure> {
    let report = if file == "random" {
        let m = random_metric(random, opts.order.unwrap_or(3))?;
        let source = format!("random seed={} p={}", random.seed, random.p);
        check_report(&source, "exact", &m, only, &|v| v.to_string())
    } else {
        let spec = load(file, opts)?;
        match spec.backend {
            Backend::Symbolic => {
                let p = printer(&spec);
                check_report(file, "symbolic", &elaborate_symbolic(&spec)?, only, &|v| p.print(v))
            }
            Backend::Exact => check_report(file, "exact", &exact_metric(&spec, opts)?, only, &|v| v.to_string()),
        }
    };
    emit(format, &report, || render::check(&report));
    Ok(if report.all_pass() { 0 } else { FAILED })
}

fn example(k: u32, all: bool, format: Format) -> Result<u8, Failure> {
    let (name, surf, paper) = EXAMPLES[k as usize - 1];
    let spec = SurfaceSpec::parse(surf)?;
    let paper = PaperTables::parse(paper, &spec)?;
    let sets: Vec<u32> = spec.bindings.iter().map(|b| b.index).collect();
    let report = verify_example(name, &spec, &paper, &sets)?;
    emit(format, &report, || render::example(&report, all));
    Ok(if report.summary.inconsistent == 0 { 0 } else { FAILED })
}
