use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_k, Centers, ClusteringResult, Method};
use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::matrix::{Metric, PointDataset};

pub const DEFAULT_MAX_ITER: usize = 300;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest center for every point (ties: lowest center).
fn assign(points: &PointDataset, centers: &[Vec<f64>], labels: &mut [usize]) {
    for (i, label) in labels.iter_mut().enumerate() {
        let p = points.point(i);
        let mut best = (0, sq_dist(p, &centers[0]));
        for (j, c) in centers.iter().enumerate().skip(1) {
            let v = sq_dist(p, c);
            if v < best.1 {
                best = (j, v);
            }
        }
        *label = best.0;
    }
}

/// Means of the current clusters. An empty cluster takes the point farthest
/// from its own cluster's mean (lowest index on ties) from a cluster with at
/// least two points.
fn update_means(points: &PointDataset, k: usize, labels: &mut [usize]) -> Vec<Vec<f64>> {
    let dim = points.dim();
    loop {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(points.point(i)) {
                *s += x;
            }
        }
        let means: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .map(|(s, &c)| s.into_iter().map(|v| v / c.max(1) as f64).collect())
            .collect();
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return means;
        };
        let mut far = (usize::MAX, -1.0);
        for (i, &l) in labels.iter().enumerate() {
            if counts[l] < 2 {
                continue;
            }
            let v = sq_dist(points.point(i), &means[l]);
            if v > far.1 {
                far = (i, v);
            }
        }
        labels[far.0] = empty;
    }
}

fn objective(points: &PointDataset, centers: &[Vec<f64>], labels: &[usize]) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &l)| sq_dist(points.point(i), &centers[l]))
        .sum()
}

fn require_euclidean(points: &PointDataset) -> Result<()> {
    if points.metric() != Metric::Euclidean {
        return Err(Error::InvalidConfig(format!(
            "k-means needs euclidean points, got {}",
            points.metric()
        )));
    }
    Ok(())
}

/// Lloyd's algorithm from the given initial centers until assignments are
/// stable or `max_iter` passes have run.
pub fn kmeans_from_centers(
    points: &PointDataset,
    initial: Vec<Vec<f64>>,
    max_iter: usize,
) -> Result<ClusteringResult> {
    require_euclidean(points)?;
    let n = points.n();
    let k = initial.len();
    check_k(k, n)?;
    if initial.iter().any(|c| c.len() != points.dim()) {
        return Err(Error::MalformedInput("initial center has wrong dimension".into()));
    }
    let mut labels = vec![0usize; n];
    assign(points, &initial, &mut labels);
    let mut centers = update_means(points, k, &mut labels);
    let mut trace = vec![objective(points, &centers, &labels)];
    let mut next = labels.clone();
    for _ in 0..max_iter {
        assign(points, &centers, &mut next);
        if next == labels {
            break;
        }
        labels.copy_from_slice(&next);
        centers = update_means(points, k, &mut labels);
        trace.push(objective(points, &centers, &labels));
    }
    let clustering = Clustering::from_labels(&labels)?;
    // Reorder centers to canonical cluster order.
    let mut ordered = Vec::with_capacity(k);
    for j in 0..clustering.k() {
        ordered.push(centers[labels[clustering.members(j)[0]]].clone());
    }
    Ok(ClusteringResult {
        clustering,
        method: Method::KMeans,
        objective: *trace.last().expect("nonempty"),
        centers: Centers::Coordinates(ordered),
        trace,
    })
}

/// Best of `restarts` Lloyd runs, each started from `k` distinct random
/// points.
pub fn kmeans(points: &PointDataset, k: usize, seed: u64, restarts: usize) -> Result<ClusteringResult> {
    require_euclidean(points)?;
    check_k(k, points.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ClusteringResult> = None;
    for _ in 0..restarts.max(1) {
        let idx = rand::seq::index::sample(&mut rng, points.n(), k);
        let init = idx.iter().map(|i| points.point(i).to_vec()).collect();
        let run = kmeans_from_centers(points, init, DEFAULT_MAX_ITER)?;
        if best.as_ref().is_none_or(|b| run.objective < b.objective) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}
