use std::fmt;
use std::path::PathBuf;

use logdgla_core::fixtures;
use logdgla_core::ode::Expression;
use logdgla_core::{ModelConfig, Rational, Truncation};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    DglaCheck,
    Primitive,
    Koszul,
    E1,
    Specseq,
    Ode,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::DglaCheck => "dgla-check",
            Command::Primitive => "primitive",
            Command::Koszul => "koszul",
            Command::E1 => "e1",
            Command::Specseq => "specseq",
            Command::Ode => "ode",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexSource {
    /// Admissible model complex of the configured model and truncation.
    #[default]
    Model,
    /// Seeded random anticommuting double complexes.
    Random,
    Staircase,
    VerticalPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecseqOptions {
    #[serde(default)]
    pub source: ComplexSource,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_side")]
    pub width: usize,
    #[serde(default = "default_side")]
    pub height: usize,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
    /// Defaults to the grid height plus one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<usize>,
}

impl Default for SpecseqOptions {
    fn default() -> Self {
        SpecseqOptions {
            source: ComplexSource::Model,
            count: default_count(),
            width: default_side(),
            height: default_side(),
            max_dim: default_max_dim(),
            r_max: None,
        }
    }
}

fn default_count() -> usize {
    10
}

fn default_side() -> usize {
    3
}

fn default_max_dim() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeOptions {
    pub kappa: Rational,
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_n_r")]
    pub n_r: usize,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_verify_fraction")]
    pub verify_fraction: f64,
    pub f: Expression,
}

fn default_radius() -> f64 {
    1.0
}

fn default_n_r() -> usize {
    256
}

fn default_n_phi() -> usize {
    64
}

fn default_n_max() -> usize {
    32
}

fn default_verify_fraction() -> f64 {
    0.9
}

pub const DEFAULT_ODE_TOLERANCE: f64 = 1e-6;

/// One run of the driver. Exactly one of `model` and `fixture` names the
/// model for the algebraic commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    /// Residual threshold; `ode` only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Adds wall-clock timings to the report, which then is no longer
    /// byte-stable.
    #[serde(default, skip_serializing_if = "is_false")]
    pub timings: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specseq: Option<SpecseqOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ode: Option<OdeOptions>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: 0,
            tolerance: None,
            output: None,
            samples: None,
            timings: false,
            fixture: None,
            model: None,
            truncation: None,
            specseq: None,
            ode: None,
        }
    }

    /// The configured model, resolving a fixture name.
    pub fn resolved_model(&self) -> Option<ModelConfig> {
        match (&self.model, &self.fixture) {
            (Some(m), _) => Some(m.clone()),
            (None, Some(name)) => fixtures::by_name(name),
            (None, None) => None,
        }
    }

    pub fn needs_model(&self) -> bool {
        match self.command {
            Command::Ode => false,
            Command::Specseq => {
                self.specseq.as_ref().map_or(ComplexSource::Model, |s| s.source) == ComplexSource::Model
            }
            _ => true,
        }
    }

    pub fn needs_truncation(&self) -> bool {
        matches!(self.command, Command::Primitive | Command::Koszul | Command::E1)
            || (self.command == Command::Specseq && self.needs_model())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs serialize to TOML")
    }
}

/// A schema error at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(transparent)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

/// Position of the first line defining `key` (as `key =` or `[key]`),
/// falling back to the start of the text.
fn key_position(text: &str, key: &str) -> (usize, usize) {
    for (n, line) in text.lines().enumerate() {
        let t = line.trim_start();
        let is_table = t.starts_with('[') && t.trim_start_matches('[').trim_end_matches(']').trim() == key;
        let is_value = t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='));
        if is_table || is_value {
            return (n + 1, line.len() - t.len() + 1);
        }
    }
    (1, 1)
}

/// Parses and validates a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let config: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| position(text, s.start));
        ConfigErrors(vec![ConfigError { line, column, message: e.message().trim().to_string() }])
    })?;
    let errors = semantic_errors(&config, text);
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(errors))
    }
}

fn semantic_errors(c: &RunConfig, text: &str) -> Vec<ConfigError> {
    let mut out = Vec::new();
    let mut err = |key: &str, message: String| {
        let (line, column) = key_position(text, key);
        out.push(ConfigError { line, column, message });
    };
    let cmd = c.command.name();
    match (&c.model, &c.fixture) {
        (Some(_), Some(_)) => err("fixture", "give either `model` or `fixture`, not both".into()),
        (None, Some(name)) if fixtures::by_name(name).is_none() => {
            err("fixture", format!("unknown fixture {name:?}; known: {}", fixtures::NAMES.join(", ")))
        }
        (None, None) if c.needs_model() => err("command", format!("`{cmd}` needs `model` or `fixture`")),
        _ => {}
    }
    if c.needs_truncation() && c.truncation.is_none() {
        err("command", format!("`{cmd}` needs a `truncation` table"));
    }
    if c.tolerance.is_some() && c.command != Command::Ode {
        err("tolerance", "`tolerance` applies to `ode` only".into());
    }
    if let Some(t) = c.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            err("tolerance", format!("tolerance must be positive, got {t}"));
        }
    }
    if c.command == Command::Specseq {
        if let Some(s) = &c.specseq {
            if s.source == ComplexSource::Random && (s.width == 0 || s.height == 0) {
                err("specseq", "random complexes need positive width and height".into());
            }
        }
    }
    if c.command == Command::Ode {
        match &c.ode {
            None => err("command", "`ode` needs an `ode` table".into()),
            Some(o) => {
                if o.kappa.is_negative() || o.kappa.is_zero() || o.kappa >= Rational::one() {
                    err("kappa", format!("kappa = {} is outside (0, 1)", o.kappa));
                }
                if !(o.radius > 0.0 && o.radius.is_finite()) {
                    err("radius", format!("radius must be positive, got {}", o.radius));
                }
                if !(o.verify_fraction > 0.0 && o.verify_fraction <= 1.0) {
                    err("verify_fraction", "verify_fraction must lie in (0, 1]".into());
                }
            }
        }
    }
    out
}
