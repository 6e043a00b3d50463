use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use scatter_entangle_core::sweep::{self, LoadedConfig};
use scatter_entangle_core::{EngineSettings, Error};

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NOT_CONVERGED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

/// Momentum-space entanglement of two particles scattering off a fixed
/// potential.
#[derive(Parser, Debug)]
#[command(name = "scatter-entangle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the engine's relative refinement tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(clap::Args, Debug)]
struct ValidateArgs {
    /// Optional configuration; only its `engine` block is used.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate t(q) and r(q).
    Amplitudes(Common),
    /// Full purity report at one parameter point (JSON).
    Purity(Common),
    /// Exact purity and approximations along a sweep axis (CSV).
    Sweep(Common),
    /// Closed-form reflected-Gaussian purity over a (mu1, c) grid (CSV).
    Reflectmap(Common),
    /// Run the built-in invariant suite.
    Validate(ValidateArgs),
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config { .. } | Error::Io(_) | Error::Json(_) | Error::InvalidParameter { .. } => EXIT_CONFIG,
            _ => EXIT_NUMERICAL,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    let res = match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    res.map_err(|e| fail(EXIT_CONFIG, format!("cannot write output: {e}")))
}

fn load(path: &Path) -> Result<LoadedConfig, Failure> {
    LoadedConfig::from_path(path).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", path.display())))
}

fn settings(cfg: Option<&LoadedConfig>, rel_tol: Option<f64>) -> Result<EngineSettings, Failure> {
    let mut s = match cfg {
        Some(c) => c.config.settings()?,
        None => EngineSettings::default(),
    };
    if let Some(t) = rel_tol {
        s.rel_tol = t;
        s.validate().map_err(|e| fail(EXIT_CONFIG, format!("--rel-tol: {e}")))?;
    }
    Ok(s)
}

fn strict(cfg: &LoadedConfig) -> bool {
    cfg.config.engine.strict
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Amplitudes(c) => {
            let cfg = load(&c.config)?;
            emit(c.out.as_deref(), &sweep::cmd_amplitudes(&cfg)?)
        }
        Command::Purity(c) => {
            let cfg = load(&c.config)?;
            let s = settings(Some(&cfg), c.rel_tol)?;
            let report = sweep::cmd_purity(&cfg, &s)?;
            let mut text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
            text.push('\n');
            emit(c.out.as_deref(), &text)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if strict(&cfg) && !report.report.converged {
                return Err(fail(EXIT_NOT_CONVERGED, "purity did not converge (strict mode)"));
            }
            Ok(())
        }
        Command::Sweep(c) => {
            let cfg = load(&c.config)?;
            let s = settings(Some(&cfg), c.rel_tol)?;
            let out = sweep::cmd_sweep(&cfg, &s)?;
            emit(c.out.as_deref(), &out.csv)?;
            let failed = out.rows.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("warning: {failed} point(s) failed, see the errors column");
            }
            if strict(&cfg) && !out.all_converged() {
                return Err(fail(EXIT_NOT_CONVERGED, "some sweep points did not converge (strict mode)"));
            }
            Ok(())
        }
        Command::Reflectmap(c) => {
            let cfg = load(&c.config)?;
            emit(c.out.as_deref(), &sweep::cmd_reflectmap(&cfg)?)
        }
        Command::Validate(v) => {
            let cfg = v.config.as_deref().map(load).transpose()?;
            let s = settings(cfg.as_ref(), v.rel_tol)?;
            let checks = sweep::cmd_validate(&s)?;
            emit(v.out.as_deref(), &sweep::render_checks(&checks))?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(fail(EXIT_VALIDATION, format!("{failed} check(s) failed")));
            }
            Ok(())
        }
    }
}

fn workers(command: &Command) -> Option<usize> {
    match command {
        Command::Amplitudes(c) | Command::Purity(c) | Command::Sweep(c) | Command::Reflectmap(c) => c.workers,
        Command::Validate(v) => v.workers,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers(&cli.command) {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_NUMERICAL);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
