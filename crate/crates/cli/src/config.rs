//! Run configuration shared by flags and the optional JSON config file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Kepler,
    Geodesic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    Natural,
    Transformed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SheetKind {
    Primary,
    Antipodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    Attractive,
    Repulsive,
}

/// Every setting a command can take. Flags override file values field by field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: Option<SystemKind>,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
    pub chart: Option<ChartKind>,
    pub x: Option<[f64; 3]>,
    pub p: Option<[f64; 3]>,
    pub t_final: Option<f64>,
    pub tol: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub max_step: Option<f64>,
    pub samples: Option<usize>,
    pub regularize: Option<bool>,
    pub sheet: Option<SheetKind>,
    pub seed: Option<u64>,
    pub suite: Option<String>,
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Values from `self` where set, otherwise from `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(
            base, self, system, alpha, k, chart, x, p, t_final, tol, rtol, atol, max_step, samples, regularize, sheet,
            seed, suite, out
        )
    }
}

/// Parse `a,b,c` into a 3-vector.
pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.parse().map_err(|e| format!("'{part}': {e}"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig { alpha: Some(1.0), t_final: Some(3.0), ..Default::default() };
        let flags = RunConfig { alpha: Some(2.0), ..Default::default() };
        let merged = flags.over(file);
        assert_eq!(merged.alpha, Some(2.0));
        assert_eq!(merged.t_final, Some(3.0));
    }

    #[test]
    fn triples_parse() {
        assert_eq!(parse_triple("1, 0,-2.5").unwrap(), [1.0, 0.0, -2.5]);
        assert!(parse_triple("1,2").is_err());
        assert!(parse_triple("1,a,2").is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"alpha": 1, "bogus": 2}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"system": "kepler", "x": [1, 0, 0]}"#).unwrap();
        assert_eq!(c.system, Some(SystemKind::Kepler));
    }
}
