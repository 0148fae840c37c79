//! Synthetic inputs shared by the benchmarks.

use clustval::{DissimilarityMatrix, Metric, PointDataset};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` points in the plane drawn around four centres.
pub fn blobs(n: usize, seed: u64) -> PointDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres = [(0.0, 0.0), (6.0, 0.0), (0.0, 6.0), (6.0, 6.0)];
    let rows = (0..n)
        .map(|i| {
            let (cx, cy) = centres[i % centres.len()];
            vec![cx + rng.random_range(-2.0..2.0), cy + rng.random_range(-2.0..2.0)]
        })
        .collect();
    PointDataset::new(rows, Metric::Euclidean).expect("finite points")
}

pub fn blob_matrix(n: usize, seed: u64) -> DissimilarityMatrix {
    DissimilarityMatrix::from_points(&blobs(n, seed)).expect("n >= 2")
}
