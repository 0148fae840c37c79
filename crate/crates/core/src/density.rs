//! Dissimilarity-based kernel density and the density-mode indexes.
//!
//! The kernel is triangular, `k(t) = 1 - t / q` for `t <= q`, with bandwidth
//! `q` the `p`-quantile of all pairwise dissimilarities. When `q = 0` the
//! kernel degenerates to the indicator of zero distance, so densities count
//! coincident objects.

use serde::{Deserialize, Serialize};

use crate::clustering::Clustering;
use crate::config::ceil_portion;
use crate::error::{Error, Result};
use crate::indexes::{IndexId, IndexValue};
use crate::matrix::DissimilarityMatrix;

/// Smallest pairwise dissimilarity `v` such that at least `ceil(p * m)` of
/// the `m` pairs are `<= v`.
pub fn bandwidth(d: &DissimilarityMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "density quantile must lie in (0, 1], got {p}"
        )));
    }
    let mut pairs = d.condensed();
    if pairs.is_empty() {
        return Ok(0.0);
    }
    let rank = ceil_portion(p, pairs.len()).clamp(1, pairs.len());
    let (_, q, _) = pairs.select_nth_unstable_by(rank - 1, f64::total_cmp);
    Ok(*q)
}

#[inline]
fn kernel(t: f64, q: f64) -> f64 {
    if q > 0.0 {
        if t <= q {
            1.0 - t / q
        } else {
            0.0
        }
    } else if t == 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Clustering-independent part of the density: bandwidth, raw densities and
/// the sparse list of kernel-positive neighbours of every object.
#[derive(Debug, Clone)]
pub struct KernelDensity {
    q: f64,
    h: Vec<f64>,
    h_max: f64,
    // Per object: (neighbour, kernel weight), neighbour != object, weight > 0.
    neighbours: Vec<Vec<(u32, f64)>>,
}

impl KernelDensity {
    pub fn new(d: &DissimilarityMatrix, p: f64) -> Result<Self> {
        let q = bandwidth(d, p)?;
        let n = d.n();
        let mut h = Vec::with_capacity(n);
        let mut neighbours = Vec::with_capacity(n);
        for i in 0..n {
            let mut hi = 0.0;
            let mut near = Vec::new();
            for (j, &t) in d.row(i).iter().enumerate() {
                let w = kernel(t, q);
                hi += w;
                if j != i && w > 0.0 {
                    near.push((j as u32, w));
                }
            }
            h.push(hi);
            neighbours.push(near);
        }
        let h_max = h.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            q,
            h,
            h_max,
            neighbours,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.q
    }

    pub fn density(&self) -> &[f64] {
        &self.h
    }

    /// Adds the cross-cluster contributions for clustering `c`.
    pub fn profile(&self, d: &DissimilarityMatrix, c: &Clustering) -> DensityProfile {
        debug_assert_eq!(d.n(), c.n());
        let labels = c.assignment();
        let h_o: Vec<f64> = self
            .neighbours
            .iter()
            .enumerate()
            .map(|(i, near)| {
                near.iter()
                    .filter(|(j, _)| labels[*j as usize] != labels[i])
                    .map(|(_, w)| w)
                    .sum()
            })
            .collect();
        // h(x) >= k(0) = 1, so h_max > 0 whenever n >= 1.
        let h_star = self.h.iter().map(|v| v / self.h_max).collect();
        let h_o_star = h_o.iter().map(|v| v / self.h_max).collect();
        DensityProfile {
            q: self.q,
            h: self.h.clone(),
            h_star,
            h_o,
            h_o_star,
        }
    }
}

/// Per-object densities for one clustering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    /// Kernel bandwidth.
    pub q: f64,
    /// Raw density, including the self term.
    pub h: Vec<f64>,
    /// `h` divided by its maximum over the dataset.
    pub h_star: Vec<f64>,
    /// Density contributed by objects of other clusters.
    pub h_o: Vec<f64>,
    /// `h_o` divided by the maximum of `h`.
    pub h_o_star: Vec<f64>,
}

pub fn density_profile(d: &DissimilarityMatrix, c: &Clustering, p: f64) -> Result<DensityProfile> {
    if c.n() != d.n() {
        return Err(Error::MalformedInput(format!(
            "clustering has {} objects, matrix has {}",
            c.n(),
            d.n()
        )));
    }
    Ok(KernelDensity::new(d, p)?.profile(d, c))
}

/// Density-weighted merge distances collected while growing each cluster
/// from its density mode.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GapSet {
    pub values: Vec<f64>,
}

impl GapSet {
    pub fn max(&self) -> Option<f64> {
        self.values.iter().cloned().reduce(f64::max)
    }
}

/// Grows every cluster from its mode by repeatedly adding the closest
/// remaining member, penalising density increases along the way.
///
/// Returns the density-decrease index and the gap set used by
/// [`highdgap`]. Ties (mode, closest pair) go to the lowest object index.
pub fn densdec_and_gaps(
    d: &DissimilarityMatrix,
    c: &Clustering,
    profile: &DensityProfile,
) -> (IndexValue, GapSet) {
    let hs = &profile.h_star;
    let mut penalty = 0.0;
    let mut gaps = Vec::with_capacity(c.n() - c.k());
    for members in c.clusters() {
        let m = members.len();
        let mut mode = 0;
        for t in 1..m {
            if hs[members[t]] > hs[members[mode]] {
                mode = t;
            }
        }
        // Prim's scheme: `key[t]` is the distance from member t to the grown
        // set, `via[t]` the lowest-indexed grown member attaining it.
        let mut grown = vec![false; m];
        let mut key = vec![f64::INFINITY; m];
        let mut via = vec![usize::MAX; m];
        grown[mode] = true;
        let row = d.row(members[mode]);
        for t in 0..m {
            key[t] = row[members[t]];
            via[t] = mode;
        }
        for _ in 1..m {
            let mut next = usize::MAX;
            let mut remaining_max = f64::NEG_INFINITY;
            for t in 0..m {
                if grown[t] {
                    continue;
                }
                remaining_max = remaining_max.max(hs[members[t]]);
                if next == usize::MAX || key[t] < key[next] {
                    next = t;
                }
            }
            let (x, y) = (members[next], members[via[next]]);
            gaps.push(remaining_max * key[next]);
            if hs[x] > hs[y] {
                penalty += (hs[x] - hs[y]) * (hs[x] - hs[y]);
            }
            grown[next] = true;
            let row = d.row(x);
            for t in 0..m {
                if grown[t] {
                    continue;
                }
                let v = row[members[t]];
                // Members are ascending, so a smaller position is a smaller index.
                if v < key[t] || (v == key[t] && next < via[t]) {
                    key[t] = v;
                    via[t] = next;
                }
            }
        }
    }
    let raw = (penalty / c.n() as f64).sqrt();
    (
        IndexValue::new(IndexId::DensDec, raw, 1.0 - raw),
        GapSet { values: gaps },
    )
}

/// Largest density-weighted gap; zero when no merges happened.
pub fn highdgap(gaps: &GapSet, d_max: f64) -> Result<IndexValue> {
    if d_max.is_nan() || d_max <= 0.0 {
        return Err(Error::ZeroMaxDissimilarity);
    }
    let raw = gaps.max().unwrap_or(0.0);
    Ok(IndexValue::new(IndexId::HighDGap, raw, 1.0 - raw / d_max))
}

/// Mean over objects of `h_star * h_o_star`: high-density objects with much
/// density coming from other clusters indicate a boundary through a dense
/// region.
pub fn densbound(c: &Clustering, profile: &DensityProfile) -> IndexValue {
    let raw = profile
        .h_star
        .iter()
        .zip(&profile.h_o_star)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / c.n() as f64;
    IndexValue::new(IndexId::DensBound, raw, 1.0 - raw)
}
