//! Internal validation indexes.
//!
//! Every index yields a raw value in its own units and a normalised value in
//! `[0, 1]` where larger is better. The density-based indexes live in
//! [`crate::density`] but share the identifiers and profile types defined
//! here.

mod homogeneity;
mod separation;
mod sizes;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::config::ValidationConfig;
use crate::density::{self, KernelDensity};
use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;

pub use homogeneity::{centroid_index, cv_density, medoids, widest_gap, within_dis};
pub use separation::{p_separation, pearson_gamma};
pub use sizes::{entropy, parsimony};

/// Identifier of a validation index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexId {
    WithinDis,
    PSep,
    Centroid,
    PearsonGamma,
    WidestGap,
    DensDec,
    DensBound,
    HighDGap,
    CvDens,
    Entropy,
    Parsimony,
}

impl IndexId {
    pub const ALL: [IndexId; 11] = [
        IndexId::WithinDis,
        IndexId::PSep,
        IndexId::Centroid,
        IndexId::PearsonGamma,
        IndexId::WidestGap,
        IndexId::DensDec,
        IndexId::DensBound,
        IndexId::HighDGap,
        IndexId::CvDens,
        IndexId::Entropy,
        IndexId::Parsimony,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IndexId::WithinDis => "withindis",
            IndexId::PSep => "psep",
            IndexId::Centroid => "centroid",
            IndexId::PearsonGamma => "pearsongamma",
            IndexId::WidestGap => "widestgap",
            IndexId::DensDec => "densdec",
            IndexId::DensBound => "densbound",
            IndexId::HighDGap => "highdgap",
            IndexId::CvDens => "cvdens",
            IndexId::Entropy => "entropy",
            IndexId::Parsimony => "parsimony",
        }
    }

    pub fn is_density(self) -> bool {
        matches!(
            self,
            IndexId::DensDec | IndexId::DensBound | IndexId::HighDGap
        )
    }

    /// Comma-separated list of every valid identifier.
    pub fn valid_list() -> String {
        Self::ALL.map(IndexId::as_str).join(",")
    }

    /// Parses a comma-separated selection, dropping duplicates but keeping order.
    pub fn parse_list(s: &str) -> Result<Vec<IndexId>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let id: IndexId = part.parse()?;
            if !out.contains(&id) {
                out.push(id);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidConfig("empty index selection".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for IndexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndexId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownIndex(s.to_string()))
    }
}

/// Raw and normalised value of one index on one clustering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexValue {
    pub index: IndexId,
    pub raw: f64,
    pub normalised: f64,
}

impl IndexValue {
    pub(crate) fn new(index: IndexId, raw: f64, normalised: f64) -> Self {
        Self {
            index,
            raw,
            normalised: normalised.clamp(0.0, 1.0),
        }
    }
}

/// Index values for one clustering. Indexes that could not be evaluated are
/// kept in `failures` with the reason.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct IndexProfile {
    pub k: usize,
    pub values: BTreeMap<IndexId, IndexValue>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub failures: BTreeMap<IndexId, String>,
}

impl IndexProfile {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn get(&self, id: IndexId) -> Option<&IndexValue> {
        self.values.get(&id)
    }

    pub fn normalised(&self, id: IndexId) -> Option<f64> {
        self.values.get(&id).map(|v| v.normalised)
    }

    pub fn record(&mut self, id: IndexId, result: Result<IndexValue>) {
        match result {
            Ok(v) => {
                self.failures.remove(&id);
                self.values.insert(id, v);
            }
            Err(e) => {
                self.values.remove(&id);
                self.failures.insert(id, e.to_string());
            }
        }
    }
}

/// Evaluates index profiles for many clusterings of one dataset.
///
/// Clustering-independent quantities (the kernel bandwidth and raw
/// densities) are computed once and reused.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    d: &'a DissimilarityMatrix,
    config: ValidationConfig,
    selection: Vec<IndexId>,
    kernel: Option<KernelDensity>,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        d: &'a DissimilarityMatrix,
        config: ValidationConfig,
        selection: &[IndexId],
    ) -> Result<Self> {
        config.validate()?;
        if selection.is_empty() {
            return Err(Error::InvalidConfig("empty index selection".into()));
        }
        let kernel = selection
            .iter()
            .any(|id| id.is_density())
            .then(|| KernelDensity::new(d, config.p_dens))
            .transpose()?;
        Ok(Self {
            d,
            config,
            selection: selection.to_vec(),
            kernel,
        })
    }

    pub fn matrix(&self) -> &DissimilarityMatrix {
        self.d
    }

    pub fn config(&self) -> &ValidationConfig {
        &self.config
    }

    pub fn selection(&self) -> &[IndexId] {
        &self.selection
    }

    pub fn profile(&self, c: &Clustering) -> Result<IndexProfile> {
        if c.n() != self.d.n() {
            return Err(Error::MalformedInput(format!(
                "clustering has {} objects, matrix has {}",
                c.n(),
                self.d.n()
            )));
        }
        let d = self.d;
        let cfg = &self.config;
        let mut profile = IndexProfile::new(c.k());
        for &id in &self.selection {
            if id.is_density() {
                continue;
            }
            let value = match id {
                IndexId::WithinDis => within_dis(d, c),
                IndexId::PSep => p_separation(d, c, cfg.p_sep),
                IndexId::Centroid => centroid_index(d, c),
                IndexId::PearsonGamma => pearson_gamma(d, c),
                IndexId::WidestGap => widest_gap(d, c),
                IndexId::CvDens => cv_density(d, c, cfg.k_cv),
                IndexId::Entropy => entropy(c),
                IndexId::Parsimony => parsimony(c, cfg.k_max),
                _ => unreachable!(),
            };
            profile.record(id, value);
        }
        if let Some(kernel) = &self.kernel {
            let dp = kernel.profile(d, c);
            let wants = |id| self.selection.contains(&id);
            if wants(IndexId::DensDec) || wants(IndexId::HighDGap) {
                let (densdec, gaps) = density::densdec_and_gaps(d, c, &dp);
                if wants(IndexId::DensDec) {
                    profile.record(IndexId::DensDec, Ok(densdec));
                }
                if wants(IndexId::HighDGap) {
                    profile.record(IndexId::HighDGap, density::highdgap(&gaps, d.d_max()));
                }
            }
            if wants(IndexId::DensBound) {
                profile.record(IndexId::DensBound, Ok(density::densbound(c, &dp)));
            }
        }
        Ok(profile)
    }
}
