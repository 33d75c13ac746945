//! Experiment configuration: a JSON document overlaid with CLI flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use minglab_core::SampleRule;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Average,
    Trajectory,
    Noise,
    Limit,
    Validate,
    Orbits,
    MacroCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Average => "average",
            Command::Trajectory => "trajectory",
            Command::Noise => "noise",
            Command::Limit => "limit",
            Command::Validate => "validate",
            Command::Orbits => "orbits",
            Command::MacroCheck => "macro-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[default]
    Pointer,
    FirstSite,
    Constant,
}

/// `"auto"` or a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Samples(pub SampleRule);

impl FromStr for Samples {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Samples(SampleRule::Auto));
        }
        s.parse::<usize>()
            .map(|m| Samples(SampleRule::Fixed(m)))
            .map_err(|_| format!("expected \"auto\" or an integer, got {s:?}"))
    }
}

impl<'de> Deserialize<'de> for Samples {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(m) => Ok(Samples(SampleRule::Fixed(m))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Bad configuration, naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid config field `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &str, message: impl fmt::Display) -> Self {
        Self {
            field: field.to_string(),
            message: message.to_string(),
        }
    }
}

/// Every key of the JSON manifest; all optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub n_list: Option<Vec<usize>>,
    pub alpha: Option<f64>,
    pub h0: Option<f64>,
    pub a1_sq: Option<f64>,
    pub phase: Option<f64>,
    pub samples: Option<Samples>,
    pub defects: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub method: Option<Method>,
    pub family: Option<Family>,
    pub tol: Option<f64>,
    pub dense_cap: Option<usize>,
    pub max_memory_mb: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::new("config", e))
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overlay(self, other: ConfigFile) -> ConfigFile {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigFile { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            command,
            n_list,
            alpha,
            h0,
            a1_sq,
            phase,
            samples,
            defects,
            seed,
            output,
            format,
            method,
            family,
            tol,
            dense_cap,
            max_memory_mb
        )
    }
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub n_list: Vec<usize>,
    pub alpha: f64,
    pub h0: f64,
    pub a1_sq: f64,
    pub phase: f64,
    pub samples: SampleRule,
    pub defects: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub method: Method,
    pub family: Family,
    pub tol: f64,
    pub dense_cap: usize,
    pub max_memory_mb: usize,
    /// Negative control for `validate`: evolve with the literal phase law.
    pub corrupt_phase: bool,
}

pub const DEFAULT_MACRO_GRID: [usize; 5] = [16, 64, 256, 1024, 4096];

impl ExperimentConfig {
    pub fn from_file(command: Command, file: ConfigFile) -> Result<Self, ConfigError> {
        let n_list = match (file.n_list, command) {
            (Some(list), _) => list,
            (None, Command::MacroCheck) => DEFAULT_MACRO_GRID.to_vec(),
            (None, _) => return Err(ConfigError::new("n_list", "required for this command")),
        };
        let config = Self {
            command,
            n_list,
            alpha: file.alpha.unwrap_or(0.5),
            h0: file.h0.unwrap_or(1.0),
            a1_sq: file.a1_sq.unwrap_or(0.36),
            phase: file.phase.unwrap_or(0.0),
            samples: file.samples.map_or(SampleRule::Auto, |s| s.0),
            defects: file.defects.unwrap_or(0),
            seed: file.seed.unwrap_or(0),
            output: file.output,
            format: file.format.unwrap_or_default(),
            method: file.method.unwrap_or_default(),
            family: file.family.unwrap_or_default(),
            tol: file.tol.unwrap_or(1e-2),
            dense_cap: file.dense_cap.unwrap_or(minglab_core::DEFAULT_DENSE_CAP),
            max_memory_mb: file.max_memory_mb.unwrap_or(4096),
            corrupt_phase: false,
        };
        config.validate()?;
        Ok(config)
    }

    /// Defaults with the given sizes; handy for library callers.
    pub fn new(command: Command, n_list: Vec<usize>) -> Result<Self, ConfigError> {
        Self::from_file(
            command,
            ConfigFile {
                n_list: Some(n_list),
                ..ConfigFile::default()
            },
        )
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_list.is_empty() {
            return Err(ConfigError::new("n_list", "must not be empty"));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(ConfigError::new("n_list", format!("every n must be >= 2, got {n}")));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::new(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        if !(self.h0.is_finite() && self.h0 > 0.0) {
            return Err(ConfigError::new("h0", format!("must be positive, got {}", self.h0)));
        }
        if !(0.0..=1.0).contains(&self.a1_sq) {
            return Err(ConfigError::new(
                "a1_sq",
                format!("must lie in [0, 1], got {}", self.a1_sq),
            ));
        }
        if !self.phase.is_finite() {
            return Err(ConfigError::new("phase", "must be finite"));
        }
        if self.samples == SampleRule::Fixed(0) {
            return Err(ConfigError::new("samples", "must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ConfigError::new("tol", "must be positive"));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| self.defects > n) {
            return Err(ConfigError::new(
                "defects",
                format!("{} defects do not fit in n = {n}", self.defects),
            ));
        }
        if self.command == Command::Trajectory && self.n_list.len() != 1 {
            return Err(ConfigError::new("n_list", "trajectory takes exactly one n"));
        }
        if self.command == Command::Validate {
            if let Some(n) = self.n_list.iter().find(|&&n| n > self.dense_cap) {
                return Err(ConfigError::new(
                    "n_list",
                    format!("validate needs n <= dense cap {}, got {n}", self.dense_cap),
                ));
            }
        }
        if self.command == Command::Limit && self.n_list.len() < 2 {
            return Err(ConfigError::new(
                "n_list",
                "limit extrapolation needs at least two sizes",
            ));
        }
        self.check_memory()
    }

    /// Rough peak-memory estimate in bytes.
    pub fn memory_estimate(&self) -> u128 {
        let n = *self.n_list.iter().max().unwrap() as u128;
        match self.command {
            Command::Validate => 16 * (1u128 << n.min(100)) * (1u128 << n.min(100)),
            Command::Orbits => 0,
            Command::MacroCheck => 64 * n,
            _ => {
                let m = self.samples.resolve(n as usize) as u128;
                let workers = self.workers() as u128;
                // three orbit vectors per sector, plus per-worker time series
                96 * n + 24 * m * (1 + workers)
            }
        }
    }

    fn workers(&self) -> usize {
        std::thread::available_parallelism().map_or(1, |w| w.get())
    }

    fn check_memory(&self) -> Result<(), ConfigError> {
        let cap = self.max_memory_mb as u128 * 1024 * 1024;
        let need = self.memory_estimate();
        if need > cap {
            return Err(ConfigError::new(
                "max_memory_mb",
                format!(
                    "estimated {} MiB exceeds cap {} MiB",
                    need / (1024 * 1024),
                    self.max_memory_mb
                ),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(json: &str) -> ConfigFile {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn flags_override_file() {
        let base = file(r#"{"n_list": [11, 101], "alpha": 0.4, "samples": "auto", "seed": 3}"#);
        let flags = ConfigFile {
            alpha: Some(0.3),
            samples: Some(Samples(SampleRule::Fixed(50))),
            ..ConfigFile::default()
        };
        let c = ExperimentConfig::from_file(Command::Average, base.overlay(flags)).unwrap();
        assert_eq!(c.alpha, 0.3);
        assert_eq!(c.samples, SampleRule::Fixed(50));
        assert_eq!(c.n_list, [11, 101]);
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn samples_accepts_int_or_auto() {
        assert_eq!(file(r#"{"samples": 7}"#).samples, Some(Samples(SampleRule::Fixed(7))));
        assert_eq!(file(r#"{"samples": "auto"}"#).samples, Some(Samples(SampleRule::Auto)));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"samples": "many"}"#).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn field_errors_name_the_field() {
        let bad = |json: &str, cmd: Command| ExperimentConfig::from_file(cmd, file(json)).unwrap_err().field;
        assert_eq!(bad(r#"{"n_list": [11], "a1_sq": 1.5}"#, Command::Average), "a1_sq");
        assert_eq!(bad(r#"{"n_list": [11], "alpha": 1.0}"#, Command::Average), "alpha");
        assert_eq!(bad(r#"{"n_list": [1]}"#, Command::Average), "n_list");
        assert_eq!(bad(r#"{}"#, Command::Average), "n_list");
        assert_eq!(bad(r#"{"n_list": [11, 13]}"#, Command::Trajectory), "n_list");
        assert_eq!(bad(r#"{"n_list": [13]}"#, Command::Validate), "n_list");
        assert_eq!(bad(r#"{"n_list": [11], "samples": 0}"#, Command::Average), "samples");
        assert_eq!(bad(r#"{"n_list": [5], "defects": 6}"#, Command::Average), "defects");
        assert_eq!(
            bad(r#"{"n_list": [100000000], "max_memory_mb": 16}"#, Command::Average),
            "max_memory_mb"
        );
    }

    #[test]
    fn macro_check_has_default_grid() {
        let c = ExperimentConfig::from_file(Command::MacroCheck, ConfigFile::default()).unwrap();
        assert_eq!(c.n_list, DEFAULT_MACRO_GRID);
    }
}
