//! Experiment configuration: a plain `key = value` file whose entries
//! are overridden by command-line flags.

use crate::error::{DriverError, Result};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentId {
    KernelSelftest,
    GlobularEndpoint,
    BulkStationary,
    CriticalEndpoint,
    DiffusiveScaling,
    SmoothedLimit,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        Self::KernelSelftest,
        Self::GlobularEndpoint,
        Self::BulkStationary,
        Self::CriticalEndpoint,
        Self::DiffusiveScaling,
        Self::SmoothedLimit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::KernelSelftest => "kernel-selftest",
            Self::GlobularEndpoint => "globular-endpoint",
            Self::BulkStationary => "bulk-stationary",
            Self::CriticalEndpoint => "critical-endpoint",
            Self::DiffusiveScaling => "diffusive-scaling",
            Self::SmoothedLimit => "smoothed-limit",
        }
    }

    pub fn is_statistical(self) -> bool {
        self != Self::KernelSelftest
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = DriverError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| DriverError::UnknownExperiment(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = DriverError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(DriverError::Config(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

/// What the user asked for; unset fields take per-experiment defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    pub gamma: Option<f64>,
    pub kappa: Option<f64>,
    pub horizon: Option<f64>,
    pub n_paths: Option<usize>,
    pub seed: u64,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        Self {
            id,
            gamma: None,
            kappa: None,
            horizon: None,
            n_paths: None,
            seed: 1,
            grid: None,
            out: None,
            format: Format::Csv,
        }
    }

    /// Builds a config from `(key, value)` pairs, later pairs winning.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut id = None;
        let mut cfg = Self::new(ExperimentId::KernelSelftest);
        for (key, value) in pairs {
            let value = value.trim();
            match key.trim() {
                "experiment" => id = Some(value.parse()?),
                "gamma" => cfg.gamma = Some(real(key, value)?),
                "kappa" => cfg.kappa = Some(real(key, value)?),
                "T" => cfg.horizon = Some(real(key, value)?),
                "n_paths" | "n-paths" => cfg.n_paths = Some(integer(key, value)?),
                "seed" => cfg.seed = integer(key, value)?,
                "grid" => cfg.grid = Some(integer(key, value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => cfg.format = value.parse()?,
                other => return Err(DriverError::Config(format!("unknown key `{other}`"))),
            }
        }
        cfg.id = id.ok_or_else(|| DriverError::Config("no experiment given".into()))?;
        Ok(cfg)
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse_file_text(text: &str) -> Result<Vec<(String, String)>> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| DriverError::Config(format!("line {}: expected key = value", n + 1)))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(pairs)
    }

    pub fn read_file(path: &Path) -> Result<Vec<(String, String)>> {
        Self::parse_file_text(&std::fs::read_to_string(path)?)
    }
}

fn real(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DriverError::Config(format!("`{key}` needs a finite number, got `{value}`")))
}

fn integer<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| DriverError::Config(format!("`{key}` needs a non-negative integer, got `{value}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let file =
            ExperimentConfig::parse_file_text("# sweep\nexperiment = globular-endpoint\nT = 10\nseed=4\n").unwrap();
        let mut pairs: Vec<(&str, &str)> = file.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        pairs.push(("T", "20"));
        let cfg = ExperimentConfig::from_pairs(pairs).unwrap();
        assert_eq!(cfg.id, ExperimentId::GlobularEndpoint);
        assert_eq!(cfg.horizon, Some(20.0));
        assert_eq!(cfg.seed, 4);
    }

    #[test]
    fn rejects_unknown_things() {
        assert!(matches!(
            ExperimentConfig::from_pairs([("experiment", "foo")]),
            Err(DriverError::UnknownExperiment(_))
        ));
        assert!(ExperimentConfig::from_pairs([("experiment", "kernel-selftest"), ("colour", "red")]).is_err());
        assert!(ExperimentConfig::from_pairs([("experiment", "kernel-selftest"), ("T", "inf")]).is_err());
        assert!(ExperimentConfig::from_pairs([("seed", "1")]).is_err());
        assert!(ExperimentConfig::parse_file_text("gamma 1").is_err());
    }

    #[test]
    fn names_round_trip() {
        for id in ExperimentId::ALL {
            assert_eq!(id.name().parse::<ExperimentId>().unwrap(), id);
        }
    }
}
