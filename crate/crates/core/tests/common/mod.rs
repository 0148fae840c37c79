//! Random instances and brute-force reference implementations of the
//! indexes, written independently of the library code: explicit pair
//! enumeration, full sorts and exhaustive splits.

#![allow(dead_code)]

use clustval::{Clustering, DissimilarityMatrix, Metric, PointDataset};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_points<R: Rng>(rng: &mut R, n: usize, dim: usize, metric: Metric) -> PointDataset {
    let rows = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect())
        .collect();
    PointDataset::new(rows, metric).unwrap()
}

pub fn random_metric<R: Rng>(rng: &mut R) -> Metric {
    if rng.random_bool(0.5) {
        Metric::Euclidean
    } else {
        Metric::Manhattan
    }
}

/// Uniform labels conditioned on every one of the `k` clusters being used.
pub fn random_labels<R: Rng>(rng: &mut R, n: usize, k: usize) -> Clustering {
    loop {
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mut used = vec![false; k];
        labels.iter().for_each(|&l| used[l] = true);
        if used.iter().all(|&u| u) {
            return Clustering::from_labels(&labels).unwrap();
        }
    }
}

pub fn random_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Cluster membership lists indexed by cluster.
pub fn groups(c: &Clustering) -> Vec<Vec<usize>> {
    let labels = c.labels();
    let k = *labels.iter().max().unwrap();
    let mut g = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        g[l - 1].push(i);
    }
    g
}

pub fn d_max(d: &DissimilarityMatrix) -> f64 {
    let n = d.n();
    let mut m: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            m = m.max(d.get(i, j));
        }
    }
    m
}

/// (raw, normalised)
pub type Pair = (f64, f64);

pub fn withindis(d: &DissimilarityMatrix, c: &Clustering) -> Option<Pair> {
    let lab = c.labels();
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..d.n() {
        for j in (i + 1)..d.n() {
            if lab[i] == lab[j] {
                sum += d.get(i, j);
                count += 1;
            }
        }
    }
    (count > 0).then(|| {
        let raw = sum / count as f64;
        (raw, 1.0 - raw / d_max(d))
    })
}

pub fn psep(d: &DissimilarityMatrix, c: &Clustering, p: f64) -> Option<Pair> {
    let lab = c.labels();
    let g = groups(c);
    if g.len() < 2 {
        return None;
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for members in &g {
        let mut nearest: Vec<f64> = members
            .iter()
            .map(|&i| {
                (0..d.n())
                    .filter(|&j| lab[j] != lab[i])
                    .map(|j| d.get(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        nearest.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let m = ((p * members.len() as f64).floor() as usize).max(1);
        total += nearest[..m].iter().sum::<f64>();
        count += m;
    }
    let raw = total / count as f64;
    Some((raw, raw / d_max(d)))
}

pub fn centroid(d: &DissimilarityMatrix, c: &Clustering) -> Pair {
    let mut total = 0.0;
    for members in groups(c) {
        let best = members
            .iter()
            .map(|&x| members.iter().map(|&i| d.get(i, x)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        total += best;
    }
    let raw = total / d.n() as f64;
    (raw, 1.0 - raw / d_max(d))
}

/// Two-pass textbook Pearson correlation of the pair vectors.
pub fn pearsongamma(d: &DissimilarityMatrix, c: &Clustering) -> Option<Pair> {
    let lab = c.labels();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..d.n() {
        for j in (i + 1)..d.n() {
            xs.push(d.get(i, j));
            ys.push(if lab[i] == lab[j] { 0.0 } else { 1.0 });
        }
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let r = sxy / (sxx * syy).sqrt();
    Some((r, (r + 1.0) / 2.0))
}

/// Widest split of one cluster: over all bipartitions, the largest minimum
/// cross distance.
pub fn widest_split_exhaustive(d: &DissimilarityMatrix, members: &[usize]) -> f64 {
    let m = members.len();
    assert!(m <= 16);
    let mut best: f64 = 0.0;
    // Fix the first member in part D to enumerate each split once.
    for mask in 0..(1u32 << (m - 1)) {
        let in_d = |t: usize| t == 0 || mask & (1 << (t - 1)) != 0;
        if (0..m).all(in_d) {
            continue;
        }
        let mut cross = f64::INFINITY;
        for a in 0..m {
            for b in 0..m {
                if in_d(a) && !in_d(b) {
                    cross = cross.min(d.get(members[a], members[b]));
                }
            }
        }
        best = best.max(cross);
    }
    best
}

/// Same quantity as the smallest threshold at which the cluster's
/// threshold graph becomes connected (used for clusters too large to split
/// exhaustively).
pub fn widest_split_threshold(d: &DissimilarityMatrix, members: &[usize]) -> f64 {
    let mut thresholds: Vec<f64> = members
        .iter()
        .flat_map(|&a| members.iter().map(move |&b| (a, b)))
        .filter(|(a, b)| a < b)
        .map(|(a, b)| d.get(a, b))
        .collect();
    thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for t in thresholds {
        let mut seen = vec![false; members.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..members.len() {
                if !seen[v] && d.get(members[u], members[v]) <= t {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            return t;
        }
    }
    0.0
}

pub fn widestgap(d: &DissimilarityMatrix, c: &Clustering) -> Pair {
    let mut raw: f64 = 0.0;
    for members in groups(c).iter().filter(|m| m.len() > 1) {
        let gap = if members.len() <= 8 {
            widest_split_exhaustive(d, members)
        } else {
            widest_split_threshold(d, members)
        };
        raw = raw.max(gap);
    }
    (raw, 1.0 - raw / d_max(d))
}

pub fn entropy(c: &Clustering) -> Option<Pair> {
    let g = groups(c);
    if g.len() < 2 {
        return None;
    }
    let n = c.n() as f64;
    let raw: f64 = g
        .iter()
        .map(|m| {
            let p = m.len() as f64 / n;
            -p * p.ln()
        })
        .sum();
    Some((raw, raw / (g.len() as f64).ln()))
}

pub fn parsimony(c: &Clustering, k_max: usize) -> Option<Pair> {
    let k = groups(c).len();
    (k <= k_max).then(|| {
        let v = 1.0 - k as f64 / k_max as f64;
        (v, v)
    })
}

pub fn cvdens(d: &DissimilarityMatrix, c: &Clustering, k: usize) -> Option<Pair> {
    let mut weighted = 0.0;
    let mut size = 0usize;
    for members in groups(c).iter().filter(|m| m.len() > k) {
        let knn: Vec<f64> = members
            .iter()
            .map(|&x| {
                let mut ds: Vec<f64> = members.iter().filter(|&&y| y != x).map(|&y| d.get(x, y)).collect();
                ds.sort_by(|a, b| a.partial_cmp(b).unwrap());
                ds[k - 1]
            })
            .collect();
        let m = knn.len() as f64;
        let mean = knn.iter().sum::<f64>() / m;
        let var = knn.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
        let cv = if mean == 0.0 { 0.0 } else { var.sqrt() / mean };
        weighted += members.len() as f64 * cv;
        size += members.len();
    }
    (size > 0).then(|| {
        let raw = weighted / size as f64;
        (raw, 1.0 - raw / (d.n() as f64).sqrt())
    })
}
