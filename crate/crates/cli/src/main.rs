//! Single entry point wiring the measure library: analytic evaluation,
//! sample estimation, simulation scenarios, characterization checks,
//! epoch-photometry tables and a selftest.
//!
//! Exit codes: 0 success, 1 usage, 2 input problem, 3 numeric problem.

mod commands;
mod output;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::{env, fs, io};

use clap::{Args, Parser, Subcommand};

use rcri::error::{Error, ExitClass, Result};
use rcri::quadrature::QuadratureOptions;

use commands::CommandOutput;
use output::{Format, RunManifest};

#[derive(Parser)]
#[command(
    name = "rcri",
    version,
    about = "Relative cumulative residual information toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Absolute quadrature tolerance (overrides RCRI_ABS_TOL).
    #[arg(long, global = true)]
    abs_tol: Option<f64>,

    /// Relative quadrature tolerance (overrides RCRI_REL_TOL).
    #[arg(long, global = true)]
    rel_tol: Option<f64>,

    /// Upper-limit ceiling before an integral is declared divergent.
    #[arg(long, global = true)]
    tail_ceiling: Option<f64>,

    /// Cap worker threads; defaults to all cores. Output is identical
    /// for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Tabular output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write tabular output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Manifest path; defaults to `<out>.manifest.json`, or stderr when
    /// output goes to stdout.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the measure for one distribution under a proportional-hazards power.
    Analytic(AnalyticArgs),
    /// Estimate the measure from two single-column sample files.
    Estimate(EstimateArgs),
    /// Run a key=value scenario file and report bias/MSE rows.
    Simulate(SimulateArgs),
    /// Check a structural property of the residual measure on a grid.
    Characterize(CharacterizeArgs),
    /// Band-pair analysis of an epoch-photometry CSV.
    Photometry(PhotometryArgs),
    /// Run the built-in consistency checks.
    Selftest,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analytic(_) => "analytic",
            Command::Estimate(_) => "estimate",
            Command::Simulate(_) => "simulate",
            Command::Characterize(_) => "characterize",
            Command::Photometry(_) => "photometry",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Args)]
struct AnalyticArgs {
    /// Distribution in family:params syntax, e.g. exponential:1 or gpd:0.5,2.
    #[arg(long)]
    spec: String,

    #[arg(long, default_value_t = 1.0)]
    alpha: f64,

    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// Power applied to the second survival function.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,

    /// Truncation age; a positive value evaluates the residual measure.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(Args)]
struct EstimateArgs {
    /// Sample file for the first variable (one value per line, # comments).
    x: PathBuf,

    /// Sample file for the second variable.
    y: PathBuf,

    #[arg(long, default_value_t = 1.0)]
    alpha: f64,

    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// Truncation age; a positive value estimates the residual measure.
    #[arg(long, default_value_t = 0.0)]
    t: f64,

    /// Smoothing kernel: gaussian or epanechnikov.
    #[arg(long, default_value = "gaussian")]
    kernel: String,

    /// Pool both samples into a single Silverman bandwidth.
    #[arg(long)]
    shared_bandwidth: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario file (flat key=value text).
    scenario: PathBuf,
}

#[derive(Args)]
struct CharacterizeArgs {
    /// Distribution in family:params syntax.
    #[arg(long)]
    spec: String,

    /// Power applied to the second survival function.
    #[arg(long, default_value_t = 1.0)]
    theta: f64,

    #[arg(long, default_value_t = 1.0)]
    alpha: f64,

    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// Truncation-age grid as start:stop:step.
    #[arg(long)]
    grid: String,

    /// Property to check: constant, linear, hazard or mrl.
    #[arg(long)]
    property: String,
}

#[derive(Args)]
struct PhotometryArgs {
    /// Epoch-photometry CSV (header source_id,band,time,mag).
    #[arg(long)]
    input: PathBuf,

    /// Keep only rows with this source id.
    #[arg(long)]
    source: Option<String>,

    /// Ordered band pairs to evaluate.
    #[arg(long, default_value = "G:BP,G:RP,BP:RP")]
    pairs: String,

    #[arg(long, default_value_t = 1.0)]
    alpha: f64,

    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// parametric (exponential MLE plug-in) or kernel.
    #[arg(long, default_value = "parametric")]
    method: String,

    /// Bootstrap replicate count; omits the error study when absent.
    #[arg(long)]
    bootstrap: Option<usize>,

    /// Bootstrap resampling seed.
    #[arg(long, default_value_t = 20)]
    seed: u64,
}

fn main() -> ExitCode {
    let argv: Vec<String> = env::args().collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here with non-error kinds.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.exit_class() {
                ExitClass::Input => 2,
                ExitClass::Numeric => 3,
            })
        }
    }
}

fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    if let Some(n) = cli.global.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("threads must be >= 1".into()));
        }
        // A pool may already exist when called twice in-process; fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let quad = resolve_quadrature(&cli.global)?;

    let CommandOutput {
        tables,
        config,
        seeds,
    } = match &cli.command {
        Command::Analytic(a) => commands::analytic(&a.spec, a.alpha, a.beta, a.theta, a.t, &quad)?,
        Command::Estimate(a) => commands::estimate(
            &a.x,
            &a.y,
            a.alpha,
            a.beta,
            a.t,
            &a.kernel,
            a.shared_bandwidth,
            &quad,
        )?,
        Command::Simulate(a) => commands::simulate(&a.scenario)?,
        Command::Characterize(a) => {
            commands::characterize(&a.spec, a.theta, a.alpha, a.beta, &a.grid, &a.property)?
        }
        Command::Photometry(a) => commands::photometry(
            &a.input,
            a.source.as_deref(),
            &a.pairs,
            a.alpha,
            a.beta,
            &a.method,
            a.bootstrap,
            a.seed,
        )?,
        Command::Selftest => commands::selftest(&quad)?,
    };

    let body = output::render(&tables, cli.global.format);
    let outputs = match &cli.global.out {
        Some(path) => {
            fs::write(path, &body)?;
            vec![path.display().to_string()]
        }
        None => {
            print!("{body}");
            io::stdout().flush()?;
            vec!["stdout".to_string()]
        }
    };

    let manifest = RunManifest {
        tool: "rcri",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        argv: argv.to_vec(),
        config,
        seeds,
        outputs,
    };
    let manifest_path = cli.global.manifest.clone().or_else(|| {
        cli.global
            .out
            .as_ref()
            .map(|p| p.with_extension("manifest.json"))
    });
    match manifest_path {
        Some(path) => fs::write(path, manifest.to_json())?,
        None => eprint!("{}", manifest.to_json()),
    }
    Ok(())
}

fn env_override(name: &str) -> Result<Option<f64>> {
    match env::var(name) {
        Ok(raw) => {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{name} must be a real number, got {raw:?}")))?;
            Ok(Some(v))
        }
        Err(_) => Ok(None),
    }
}

/// Flags beat environment variables beat built-in defaults.
fn resolve_quadrature(g: &GlobalArgs) -> Result<QuadratureOptions> {
    let mut q = QuadratureOptions::default();
    if let Some(v) = env_override("RCRI_ABS_TOL")? {
        q.abs_tol = v;
    }
    if let Some(v) = env_override("RCRI_REL_TOL")? {
        q.rel_tol = v;
    }
    if let Some(v) = g.abs_tol {
        q.abs_tol = v;
    }
    if let Some(v) = g.rel_tol {
        q.rel_tol = v;
    }
    if let Some(v) = g.tail_ceiling {
        q.tail_ceiling = v;
    }
    if !(q.abs_tol > 0.0 && q.abs_tol.is_finite() && q.rel_tol > 0.0 && q.rel_tol.is_finite()) {
        return Err(Error::InvalidParameter(
            "tolerances must be positive reals".into(),
        ));
    }
    if q.tail_ceiling.is_nan() || q.tail_ceiling <= 1.0 {
        return Err(Error::InvalidParameter("tail ceiling must exceed 1".into()));
    }
    Ok(q)
}
