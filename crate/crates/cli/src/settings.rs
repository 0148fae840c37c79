use std::ops::RangeInclusive;
use std::path::Path;

use anyhow::{bail, Result};
use clustval::calibration::{AggregationSpec, CalibrationMode};
use clustval::clusterers::Method;
use clustval::{IndexId, ValidationConfig};
use serde::Deserialize;

/// Optional TOML settings; command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub validation: Option<ValidationConfig>,
    pub indexes: Option<Vec<IndexId>>,
    pub weights: Option<AggregationSpec>,
    pub calibration: Option<CalibrationMode>,
    pub methods: Option<Vec<Method>>,
    pub k_range: Option<String>,
    pub seed: Option<u64>,
    pub normalise_weights: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| clustval::Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| {
            clustval::Error::InvalidConfig(format!("{}: {e}", path.display())).into()
        })
    }
}

/// `A..B`, `A..=B` (both inclusive) or a single `K`.
pub fn parse_k_range(s: &str) -> Result<RangeInclusive<usize>> {
    let bad = || clustval::Error::InvalidConfig(format!("bad K range {s:?}, expected A..B"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let lo: usize = lo.parse().map_err(|_| bad())?;
    let hi: usize = hi.parse().map_err(|_| bad())?;
    if lo == 0 || lo > hi {
        bail!(bad());
    }
    Ok(lo..=hi)
}
