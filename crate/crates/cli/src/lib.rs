//! Driver for the `logdgla` binary: TOML run configurations in, versioned
//! JSON reports out.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails, 2 for
//! usage, configuration and module errors. Errors are reported as a JSON
//! object with an `error` member.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;
use serde_json::{json, Value};

mod commands;
pub mod config;

pub use commands::run;
pub use config::{parse_config, Command, ConfigError, ConfigErrors, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] logdgla_core::Error),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigErrors),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl RunError {
    pub fn kind(&self) -> &'static str {
        match self {
            RunError::Core(logdgla_core::Error::Config(_)) => "model-config",
            RunError::Core(logdgla_core::Error::Precondition(_)) => "precondition",
            RunError::Core(logdgla_core::Error::Solver(_)) => "solver",
            RunError::Core(logdgla_core::Error::Parse(_)) => "parse",
            RunError::Usage(_) => "usage",
            RunError::Config(_) => "config",
            RunError::Io(_) => "io",
            RunError::Json(_) => "serialization",
        }
    }

    /// Machine-readable error object.
    pub fn to_value(&self) -> Value {
        let mut error = json!({ "kind": self.kind(), "message": self.to_string() });
        if let RunError::Config(e) = self {
            error["errors"] = json!(e);
        }
        json!({
            "schema_version": SCHEMA_VERSION,
            "version": env!("CARGO_PKG_VERSION"),
            "error": error,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub value: Value,
    pub passed: bool,
}

impl Report {
    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        to_json(&self.value)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Debug, Parser)]
#[command(name = "logdgla", version, about = "Exact log-DGLA model checks with JSON reports")]
pub struct Args {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Report destination; overrides `output` in the config. Defaults to stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Overrides `tolerance` in the config (`ode` only).
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// No summary line on stderr.
    #[arg(long)]
    pub quiet: bool,
}

/// Loads the config named by `args` and applies the command-line overrides.
pub fn load_config(args: &Args) -> Result<RunConfig, RunError> {
    let text = std::fs::read_to_string(&args.config)?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(tol) = args.tol {
        if config.command != Command::Ode {
            return Err(RunError::Usage("--tol applies to the ode command only".into()));
        }
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(RunError::Usage(format!("--tol must be positive, got {tol}")));
        }
        config.tolerance = Some(tol);
    }
    if let Some(out) = &args.out {
        config.output = Some(out.clone());
    }
    Ok(config)
}

/// Full command-line entry point; returns the process exit code.
pub fn cli_main<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    let fail = |e: RunError, stdout: &mut dyn Write, stderr: &mut dyn Write| {
        let _ = stdout.write_all(to_json(&e.to_value()).as_bytes());
        if !args.quiet {
            let _ = writeln!(stderr, "logdgla: {e}");
        }
        EXIT_USAGE
    };
    let config = match load_config(&args) {
        Ok(c) => c,
        Err(e) => return fail(e, stdout, stderr),
    };
    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => return fail(e, stdout, stderr),
    };
    let text = report.to_json();
    let written = match &config.output {
        Some(path) => std::fs::write(path, &text),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        return fail(e.into(), stdout, stderr);
    }
    if !args.quiet {
        let failed: Vec<&str> = report.value["checks"]
            .as_object()
            .map(|m| m.iter().filter(|(_, v)| **v != Value::Bool(true)).map(|(k, _)| k.as_str()).collect())
            .unwrap_or_default();
        let _ = if failed.is_empty() {
            writeln!(stderr, "logdgla {}: all checks passed", config.command.name())
        } else {
            writeln!(stderr, "logdgla {}: failed checks: {}", config.command.name(), failed.join(", "))
        };
    }
    report.exit_code()
}
