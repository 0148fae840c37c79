//! Reference clustering methods used to produce candidate clusterings, and
//! the adjusted Rand index for comparing against known partitions.

mod ari;
mod kmeans;
mod linkage;
mod pam;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::error::{Error, Result};

pub use ari::adjusted_rand;
pub use kmeans::{kmeans, kmeans_from_centers, DEFAULT_MAX_ITER};
pub use linkage::{linkage, linkage_dendrogram, Dendrogram, Linkage, Merge};
pub use pam::pam;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    KMeans,
    Pam,
    Single,
    Average,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::KMeans, Method::Pam, Method::Single, Method::Average];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::KMeans => "kmeans",
            Method::Pam => "pam",
            Method::Single => "single",
            Method::Average => "average",
        }
    }

    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m: Method = part.parse()?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown method {s:?} (valid: kmeans, pam, single, average)"
                ))
            })
    }
}

/// Cluster representatives returned by centroid methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Centers {
    None,
    /// Mean vectors.
    Coordinates(Vec<Vec<f64>>),
    /// Zero-based medoid objects, one per cluster in canonical order.
    Medoids(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringResult {
    pub clustering: Clustering,
    pub method: Method,
    /// Sum of squared Euclidean distances to centers (k-means), sum of
    /// dissimilarities to medoids (PAM), or the last merge height (linkage).
    pub objective: f64,
    pub centers: Centers,
    /// Objective after each improvement step, ending with `objective`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<f64>,
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        Err(Error::KOutOfRange { k, max: n })
    } else {
        Ok(())
    }
}
