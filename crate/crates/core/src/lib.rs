//! Multidimensional internal cluster validation.
//!
//! A clustering of a dissimilarity matrix is characterised by a profile of
//! validation indexes (homogeneity, separation, representation, gaps,
//! density shape, cluster-size balance, parsimony). Index values are
//! calibrated against random "stupid" clusterings of the same data and
//! combined with user weights into one aggregate score for comparing
//! clusterings, methods and numbers of clusters.

pub mod calibration;
pub mod clustering;
pub mod clusterers;
pub mod config;
pub mod density;
pub mod error;
pub mod indexes;
pub mod io;
pub mod matrix;
pub mod random;
pub mod report;

#[cfg(test)]
mod fixtures;

pub use calibration::{AggregationSpec, CalibratedCell, CalibratedProfile, CalibrationMode, Calibrator};
pub use clustering::Clustering;
pub use clusterers::{ClusteringResult, Method};
pub use config::ValidationConfig;
pub use density::{DensityProfile, GapSet, KernelDensity};
pub use error::{Error, Result};
pub use indexes::{Evaluator, IndexId, IndexProfile, IndexValue};
pub use matrix::{DissimilarityMatrix, Metric, PointDataset};
pub use random::{Generator, RandomClusteringCollection, SeedPlan};
pub use report::{Candidate, CompareOptions, Report, SeedSource};
