use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::indexes::{IndexId, IndexValue};
use crate::matrix::DissimilarityMatrix;

/// Average dissimilarity over unordered within-cluster pairs.
pub fn within_dis(d: &DissimilarityMatrix, c: &Clustering) -> Result<IndexValue> {
    let d_max = d.require_positive_max()?;
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for members in c.clusters() {
        for (a, &i) in members.iter().enumerate() {
            let row = d.row(i);
            for &j in &members[a + 1..] {
                sum += row[j];
            }
        }
        pairs += members.len() * (members.len() - 1) / 2;
    }
    if pairs == 0 {
        return Err(Error::NoWithinPairs);
    }
    let raw = sum / pairs as f64;
    Ok(IndexValue::new(IndexId::WithinDis, raw, 1.0 - raw / d_max))
}

/// Medoid of every cluster: the member minimising the summed dissimilarity to
/// its cluster, lowest object index on ties.
pub fn medoids(d: &DissimilarityMatrix, c: &Clustering) -> Vec<usize> {
    c.clusters().map(|members| medoid_of(d, members)).collect()
}

pub(crate) fn medoid_of(d: &DissimilarityMatrix, members: &[usize]) -> usize {
    let mut best = (members[0], f64::INFINITY);
    for &x in members {
        let row = d.row(x);
        let s: f64 = members.iter().map(|&i| row[i]).sum();
        if s < best.1 {
            best = (x, s);
        }
    }
    best.0
}

/// Mean dissimilarity of each object to its cluster's medoid.
pub fn centroid_index(d: &DissimilarityMatrix, c: &Clustering) -> Result<IndexValue> {
    let d_max = d.require_positive_max()?;
    let meds = medoids(d, c);
    let total: f64 = (0..c.n()).map(|i| d.get(i, meds[c.cluster_of(i)])).sum();
    let raw = total / c.n() as f64;
    Ok(IndexValue::new(IndexId::Centroid, raw, 1.0 - raw / d_max))
}

/// Largest edge of a minimum spanning tree over `members` (Prim, dense).
pub(crate) fn mst_max_edge(d: &DissimilarityMatrix, members: &[usize]) -> f64 {
    let m = members.len();
    if m < 2 {
        return 0.0;
    }
    let mut in_tree = vec![false; m];
    let mut key = vec![f64::INFINITY; m];
    in_tree[0] = true;
    let row = d.row(members[0]);
    for (k, &j) in key.iter_mut().zip(members) {
        *k = row[j];
    }
    let mut widest = 0.0f64;
    for _ in 1..m {
        let mut next = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..m {
            if !in_tree[t] && (next == usize::MAX || key[t] < best) {
                next = t;
                best = key[t];
            }
        }
        widest = widest.max(best);
        in_tree[next] = true;
        let row = d.row(members[next]);
        for t in 0..m {
            if !in_tree[t] {
                key[t] = key[t].min(row[members[t]]);
            }
        }
    }
    widest
}

/// Widest within-cluster gap, found as the largest within-cluster MST edge.
pub fn widest_gap(d: &DissimilarityMatrix, c: &Clustering) -> Result<IndexValue> {
    let d_max = d.require_positive_max()?;
    let raw = c
        .clusters()
        .map(|members| mst_max_edge(d, members))
        .fold(0.0, f64::max);
    Ok(IndexValue::new(IndexId::WidestGap, raw, 1.0 - raw / d_max))
}

/// Size-weighted coefficient of variation of within-cluster k-th nearest
/// neighbour dissimilarities, over clusters with more than `k` members.
pub fn cv_density(d: &DissimilarityMatrix, c: &Clustering, k: usize) -> Result<IndexValue> {
    if k == 0 {
        return Err(Error::InvalidConfig("neighbour order must be at least 1".into()));
    }
    let mut weighted = 0.0;
    let mut weight = 0usize;
    let mut scratch = Vec::new();
    let mut kth = Vec::new();
    for members in c.clusters() {
        let nj = members.len();
        if nj <= k {
            continue;
        }
        kth.clear();
        for &x in members {
            let row = d.row(x);
            scratch.clear();
            scratch.extend(members.iter().filter(|&&y| y != x).map(|&y| row[y]));
            let (_, v, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
            kth.push(*v);
        }
        weighted += nj as f64 * coefficient_of_variation(&kth);
        weight += nj;
    }
    if weight == 0 {
        return Err(Error::InsufficientClusterSizes { k });
    }
    let raw = weighted / weight as f64;
    let normalised = 1.0 - raw / (c.n() as f64).sqrt();
    Ok(IndexValue::new(IndexId::CvDens, raw, normalised))
}

/// Sample coefficient of variation; zero when the mean is zero.
fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt() / mean
}
