use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tuning parameters shared by all indexes and the random baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    /// Portion of each cluster's objects used by the separation index.
    pub p_sep: f64,
    /// Quantile of pairwise dissimilarities used as kernel bandwidth.
    pub p_dens: f64,
    /// Neighbour order for the within-cluster density variation index.
    pub k_cv: usize,
    /// Largest number of clusters of interest.
    pub k_max: usize,
    /// Random clusterings per generator and per K.
    pub b: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            p_sep: 0.1,
            p_dens: 0.1,
            k_cv: 4,
            k_max: 10,
            b: 100,
        }
    }
}

impl ValidationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.p_sep > 0.0 && self.p_sep <= 1.0) {
            return bad(format!("p_sep must lie in (0, 1], got {}", self.p_sep));
        }
        if !(self.p_dens > 0.0 && self.p_dens <= 1.0) {
            return bad(format!("p_dens must lie in (0, 1], got {}", self.p_dens));
        }
        if self.k_cv < 1 {
            return bad("k_cv must be at least 1".into());
        }
        if self.k_max < 2 {
            return bad(format!("k_max must be at least 2, got {}", self.k_max));
        }
        if self.b < 2 {
            return bad(format!("B must be at least 2, got {}", self.b));
        }
        Ok(())
    }
}

// Relative slack for products like 0.29 * 100 that land a hair below an integer.
const PORTION_SLACK: f64 = 1e-9;

/// `floor(p * n)` tolerant of representation error in `p`.
pub(crate) fn floor_portion(p: f64, n: usize) -> usize {
    let x = p * n as f64;
    let r = x.round();
    if (x - r).abs() <= PORTION_SLACK * r.max(1.0) {
        r as usize
    } else {
        x.floor() as usize
    }
}

/// `ceil(p * n)` tolerant of representation error in `p`.
pub(crate) fn ceil_portion(p: f64, n: usize) -> usize {
    let x = p * n as f64;
    let r = x.round();
    if (x - r).abs() <= PORTION_SLACK * r.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}
