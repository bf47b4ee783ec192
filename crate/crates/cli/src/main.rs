//! `spinalg` command-line verifier.
//!
//! Exit codes: 0 when every executed check passes, 1 when a check fails or
//! the oracle disagrees, 2 for an invalid configuration.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use spinalg::lie::{AlgebraSpec, LieTables};
use spinalg::models::{Coupling, Frequency, ModelKind, ModelSpec, Transcription};
use spinalg::scalar::format_rational;
use spinalg::verify::{self, CheckReport, SuiteConfig};
use spinalg::{parse_rational, Rational};

#[derive(Debug, Parser)]
#[command(name = "spinalg", version, about = "Exact checks of so(N)/sp(N) spin Calogero-type operator identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lie-structure, spin-identity and appendix checks for one algebra.
    Lie {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Conservation, level relations, Serre identities and the oracle for one model.
    Model {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Common rational roots in lambda of every coefficient of [H, G1].
    SolveLambda {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Basis, structure constants and metric as a deterministic table.
    DumpTables {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct AlgebraArgs {
    /// Matrix size N.
    #[arg(long = "N", value_name = "N")]
    n: usize,
    /// +1 for so(N), -1 for sp(N).
    #[arg(long, allow_hyphen_values = true, value_name = "+1|-1")]
    theta0: i64,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = Kind::Calogero)]
    model: Kind,
    /// Number of particles L.
    #[arg(long = "L", value_name = "L", default_value_t = 3)]
    sites: usize,
    /// star, symbolic or a rational p/q.
    #[arg(long, allow_hyphen_values = true, default_value = "star")]
    lambda: String,
    /// symbolic or a rational p/q (confined model only).
    #[arg(long, allow_hyphen_values = true, default_value = "symbolic")]
    omega: String,
    #[arg(long, value_enum, default_value_t = TranscriptionArg::Corrected)]
    transcription: TranscriptionArg,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Check names or group prefixes, comma separated.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads.
    #[arg(long, env = "SPINALG_JOBS")]
    jobs: Option<usize>,
    /// Oracle seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Oracle trials per identity family.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Abort a product once it exceeds this many terms.
    #[arg(long, env = "SPINALG_TERM_CEILING")]
    term_ceiling: Option<usize>,
    /// Report every duration as 0 ms.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Calogero,
    Sutherland,
    Confined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TranscriptionArg {
    Corrected,
    AsPrinted,
}

/// Invalid configuration, reported with exit code 2.
struct ConfigError(String);

impl<E: std::fmt::Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

impl AlgebraArgs {
    fn spec(&self) -> Result<AlgebraSpec, ConfigError> {
        Ok(AlgebraSpec::new(self.n, self.theta0)?)
    }
}

impl ModelArgs {
    fn spec(&self, algebra: AlgebraSpec) -> Result<ModelSpec<Rational>, ConfigError> {
        let kind = match self.model {
            Kind::Calogero => ModelKind::Calogero,
            Kind::Sutherland => ModelKind::Sutherland,
            Kind::Confined => ModelKind::Confined,
        };
        let lambda = match self.lambda.as_str() {
            "star" => Coupling::Star,
            "symbolic" => Coupling::Symbolic,
            lit => Coupling::Explicit(parse_rational(lit)?),
        };
        let omega = match self.omega.as_str() {
            "symbolic" => Frequency::Symbolic,
            lit => Frequency::Explicit(parse_rational(lit)?),
        };
        let transcription = match self.transcription {
            TranscriptionArg::Corrected => Transcription::Corrected,
            TranscriptionArg::AsPrinted => Transcription::AsPrinted,
        };
        let spec =
            ModelSpec::new(algebra, self.sites, kind, lambda).with_omega(omega).with_transcription(transcription);
        spec.validate()?;
        Ok(spec)
    }
}

impl RunArgs {
    fn config(&self) -> SuiteConfig {
        SuiteConfig {
            checks: self.checks.clone(),
            jobs: self.jobs,
            seed: self.seed,
            trials: self.trials,
            term_ceiling: self.term_ceiling,
            timing: !self.no_timing,
        }
    }
}

#[derive(Serialize)]
struct StructureEntry {
    a: String,
    b: String,
    c: String,
    value: String,
}

#[derive(Serialize)]
struct Tables {
    algebra: String,
    n: usize,
    theta0: i8,
    dim: usize,
    basis: Vec<String>,
    structure_constants: Vec<StructureEntry>,
    metric: Vec<Vec<String>>,
    metric_inverse: Vec<Vec<String>>,
    engine_version: String,
}

fn tables(spec: AlgebraSpec) -> Result<Tables, ConfigError> {
    let t = LieTables::<Rational>::new(spec)?;
    let basis: Vec<String> = t.basis().iter().map(|g| g.to_string()).collect();
    let d = basis.len();
    let mut structure_constants = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for (k, c) in t.constants.row_at(i, j) {
                structure_constants.push(StructureEntry {
                    a: basis[i].clone(),
                    b: basis[j].clone(),
                    c: basis[*k].clone(),
                    value: format_rational(c),
                });
            }
        }
    }
    let grid = |m: &spinalg::dense::DenseMatrix<Rational>| {
        (0..d).map(|i| (0..d).map(|j| format_rational(m.get(i, j))).collect()).collect()
    };
    Ok(Tables {
        algebra: spec.name(),
        n: spec.n(),
        theta0: spec.theta0(),
        dim: d,
        basis,
        structure_constants,
        metric: grid(t.metric.metric()),
        metric_inverse: grid(t.metric.inverse()),
        engine_version: spinalg::ENGINE_VERSION.to_string(),
    })
}

fn render_tables(t: &Tables) -> String {
    let mut out =
        format!("{} dim={}\nbasis: {}\nstructure constants f^(a,b)_c:\n", t.algebra, t.dim, t.basis.join(" "));
    for e in &t.structure_constants {
        out.push_str(&format!("  {} {} -> {} : {}\n", e.a, e.b, e.c, e.value));
    }
    for (label, m) in [("metric", &t.metric), ("metric inverse", &t.metric_inverse)] {
        out.push_str(&format!("{label}:\n"));
        for row in m {
            out.push_str(&format!("  {}\n", row.join(" ")));
        }
    }
    out
}

fn emit<T: Serialize>(value: &T, text: impl FnOnce() -> String, format: Format) -> Result<(), ConfigError> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => print!("{}", text()),
    }
    Ok(())
}

fn emit_report(report: &CheckReport, format: Format) -> Result<ExitCode, ConfigError> {
    emit(report, || report.render_text(), format)?;
    if report.summary.oracle_disagreement {
        eprintln!("!!! ORACLE DISAGREEMENT: symbolic and evaluated results differ !!!");
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode, ConfigError> {
    match cli.command {
        Command::Lie { algebra, run } => {
            let report = verify::run_lie_suite(algebra.spec()?, &run.config())?;
            emit_report(&report, run.format)
        }
        Command::Model { algebra, model, run } => {
            let spec = model.spec(algebra.spec()?)?;
            let report = verify::run_model_suite(&spec, &run.config())?;
            emit_report(&report, run.format)
        }
        Command::SolveLambda { algebra, model, run } => {
            let spec = model.spec(algebra.spec()?)?;
            let report = verify::run_solve_lambda(&spec, &run.config())?;
            emit_report(&report, run.format)
        }
        Command::DumpTables { algebra, format } => {
            let t = tables(algebra.spec()?)?;
            emit(&t, || render_tables(&t), format)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
