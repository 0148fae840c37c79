use serde::{Deserialize, Serialize};

use super::{check_k, Centers, ClusteringResult, Method};
use crate::clustering::Clustering;
use crate::error::Result;
use crate::matrix::DissimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    /// UPGMA.
    Average,
}

/// One agglomeration step. `a < b` are the smallest object indices of the two
/// merged clusters; the merged cluster is afterwards represented by `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
    /// Size of the merged cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub n: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Partition into `k` clusters from the first `n - k` merges.
    pub fn cut(&self, k: usize) -> Result<Clustering> {
        check_k(k, self.n)?;
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for m in &self.merges[..self.n - k] {
            let (ra, rb) = (find(&mut parent, m.a), find(&mut parent, m.b));
            parent[rb] = ra;
        }
        let labels: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        Clustering::from_labels(&labels)
    }
}

/// Agglomerative clustering with Lance-Williams updates.
///
/// Each step merges the closest pair, with ties broken towards the
/// lexicographically smallest (a, b).
pub fn linkage_dendrogram(d: &DissimilarityMatrix, method: Linkage) -> Dendrogram {
    let n = d.n();
    let mut dist: Vec<f64> = (0..n).flat_map(|i| d.row(i).to_vec()).collect();
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut nn = vec![usize::MAX; n];
    let mut nnd = vec![f64::INFINITY; n];

    // Nearest active neighbour among higher-indexed rows only.
    let recompute = |i: usize, dist: &[f64], active: &[bool], nn: &mut [usize], nnd: &mut [f64]| {
        let row = &dist[i * n..(i + 1) * n];
        let mut best = (usize::MAX, f64::INFINITY);
        for j in (i + 1)..n {
            if active[j] && row[j] < best.1 {
                best = (j, row[j]);
            }
        }
        nn[i] = best.0;
        nnd[i] = best.1;
    };
    for i in 0..n {
        recompute(i, &dist, &active, &mut nn, &mut nnd);
    }

    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let mut a = usize::MAX;
        for i in 0..n {
            if active[i] && nn[i] != usize::MAX && (a == usize::MAX || nnd[i] < nnd[a]) {
                a = i;
            }
        }
        let b = nn[a];
        let height = nnd[a];
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        active[b] = false;
        for k in (0..n).filter(|&k| active[k] && k != a) {
            let (dka, dkb) = (dist[k * n + a], dist[k * n + b]);
            let v = match method {
                Linkage::Single => dka.min(dkb),
                Linkage::Average => (sa * dka + sb * dkb) / (sa + sb),
            };
            dist[k * n + a] = v;
            dist[a * n + k] = v;
        }
        size[a] += size[b];
        merges.push(Merge { a, b, height, size: size[a] });

        for k in 0..b {
            if !active[k] {
                continue;
            }
            if k == a || nn[k] == a || nn[k] == b {
                recompute(k, &dist, &active, &mut nn, &mut nnd);
            } else if k < a {
                let v = dist[k * n + a];
                if v < nnd[k] || (v == nnd[k] && a < nn[k]) {
                    nn[k] = a;
                    nnd[k] = v;
                }
            }
        }
    }
    Dendrogram { n, merges }
}

/// Cut a `method` dendrogram at `k` clusters. The objective is the height of
/// the last merge performed (0 when `k == n`).
pub fn linkage(d: &DissimilarityMatrix, method: Linkage, k: usize) -> Result<ClusteringResult> {
    check_k(k, d.n())?;
    let dendrogram = linkage_dendrogram(d, method);
    let clustering = dendrogram.cut(k)?;
    let used = &dendrogram.merges[..d.n() - k];
    Ok(ClusteringResult {
        clustering,
        method: match method {
            Linkage::Single => Method::Single,
            Linkage::Average => Method::Average,
        },
        objective: used.last().map_or(0.0, |m| m.height),
        centers: Centers::None,
        trace: used.iter().map(|m| m.height).collect(),
    })
}
