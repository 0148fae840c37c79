use super::{check_k, Centers, ClusteringResult, Method};
use crate::clustering::Clustering;
use crate::error::Result;
use crate::matrix::DissimilarityMatrix;

/// Nearest and second-nearest medoid distances for every object.
fn nearest_two(d: &DissimilarityMatrix, medoids: &[usize]) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let n = d.n();
    let mut near = vec![0usize; n];
    let mut dn = vec![f64::INFINITY; n];
    let mut ds = vec![f64::INFINITY; n];
    for i in 0..n {
        let row = d.row(i);
        for (pos, &m) in medoids.iter().enumerate() {
            let v = row[m];
            if v < dn[i] {
                ds[i] = dn[i];
                dn[i] = v;
                near[i] = pos;
            } else if v < ds[i] {
                ds[i] = v;
            }
        }
    }
    (near, dn, ds)
}

/// Classic PAM: greedy BUILD followed by steepest-descent SWAP.
///
/// Ties in BUILD and SWAP go to the lowest object indices, so the result is
/// deterministic.
pub fn pam(d: &DissimilarityMatrix, k: usize) -> Result<ClusteringResult> {
    let n = d.n();
    check_k(k, n)?;

    // BUILD
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    let mut is_medoid = vec![false; n];
    let mut dn = vec![f64::INFINITY; n];
    for _ in 0..k {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for x in (0..n).filter(|&x| !is_medoid[x]) {
            let row = d.row(x);
            // First medoid: minimise total cost, i.e. maximise its negation.
            let gain: f64 = if medoids.is_empty() {
                -row.iter().sum::<f64>()
            } else {
                (0..n).map(|j| (dn[j] - row[j]).max(0.0)).sum()
            };
            if gain > best.1 {
                best = (x, gain);
            }
        }
        let x = best.0;
        medoids.push(x);
        is_medoid[x] = true;
        let row = d.row(x);
        for j in 0..n {
            dn[j] = dn[j].min(row[j]);
        }
    }
    medoids.sort_unstable();
    let mut trace = vec![dn.iter().sum::<f64>()];

    // SWAP
    let scale = d.d_max().max(f64::MIN_POSITIVE) * n as f64;
    loop {
        let (near, dn, ds) = nearest_two(d, &medoids);
        let mut best = (0usize, 0usize, 0.0f64);
        for (pos, _) in medoids.iter().enumerate() {
            for x in (0..n).filter(|&x| !is_medoid[x]) {
                let row = d.row(x);
                let mut delta = 0.0;
                for j in 0..n {
                    let dx = row[j];
                    delta += if near[j] == pos {
                        dx.min(ds[j]) - dn[j]
                    } else {
                        (dx - dn[j]).min(0.0)
                    };
                }
                if delta < best.2 {
                    best = (pos, x, delta);
                }
            }
        }
        // Ignore rounding-level improvements so SWAP cannot cycle.
        if best.2 >= -1e-12 * scale {
            break;
        }
        let (pos, x, _) = best;
        is_medoid[medoids[pos]] = false;
        is_medoid[x] = true;
        medoids[pos] = x;
        medoids.sort_unstable();
        let (_, dn, _) = nearest_two(d, &medoids);
        trace.push(dn.iter().sum());
    }

    let (near, dn, _) = nearest_two(d, &medoids);
    // Each medoid belongs to its own cluster even if another medoid is at
    // distance zero.
    let mut labels = near;
    for (pos, &m) in medoids.iter().enumerate() {
        labels[m] = pos;
    }
    let objective: f64 = (0..n).map(|i| d.get(i, medoids[labels[i]])).sum();
    debug_assert!((objective - dn.iter().sum::<f64>()).abs() <= 1e-9 * scale);
    if let Some(last) = trace.last_mut() {
        *last = objective;
    }
    let clustering = Clustering::from_labels(&labels)?;
    let canonical = (0..clustering.k())
        .map(|j| medoids[labels[clustering.members(j)[0]]])
        .collect();
    Ok(ClusteringResult {
        clustering,
        method: Method::Pam,
        objective,
        centers: Centers::Medoids(canonical),
        trace,
    })
}
