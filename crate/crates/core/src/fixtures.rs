//! Small shared test fixtures.

use crate::clustering::Clustering;
use crate::matrix::{DissimilarityMatrix, Metric, PointDataset};

pub(crate) fn line(values: &[f64]) -> DissimilarityMatrix {
    DissimilarityMatrix::from_points(&PointDataset::from_values(values, Metric::Euclidean).unwrap())
        .unwrap()
}

/// Points 0, 1, 2, 10, 11, 12 on a line.
pub(crate) fn d6() -> DissimilarityMatrix {
    line(&[0.0, 1.0, 2.0, 10.0, 11.0, 12.0])
}

/// `{0, 1, 2 | 3, 4, 5}` on [`d6`].
pub(crate) fn d6_a() -> Clustering {
    Clustering::from_labels(&[1, 1, 1, 2, 2, 2]).unwrap()
}
