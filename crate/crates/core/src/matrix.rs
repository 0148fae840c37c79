//! Dissimilarity matrices and point datasets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for symmetry and diagonal checks on loaded matrices.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Distance used to turn a [`PointDataset`] into dissimilarities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Manhattan,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "manhattan" => Ok(Metric::Manhattan),
            other => Err(Error::MalformedInput(format!(
                "unknown metric {other:?} (expected euclidean or manhattan)"
            ))),
        }
    }
}

/// `n` points in `p`-dimensional space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDataset {
    coords: Vec<f64>,
    n: usize,
    dim: usize,
    metric: Metric,
}

impl PointDataset {
    /// Builds a dataset from rows; all rows must share one dimension `p >= 1`.
    pub fn new(rows: Vec<Vec<f64>>, metric: Metric) -> Result<Self> {
        let n = rows.len();
        let dim = rows.first().map_or(0, Vec::len);
        if n > 0 && dim == 0 {
            return Err(Error::MalformedInput("points have dimension 0".into()));
        }
        let mut coords = Vec::with_capacity(n * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::MalformedInput(format!(
                    "point {} has dimension {}, expected {dim}",
                    i + 1,
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::MalformedInput(format!(
                    "point {} has non-finite coordinate {bad}",
                    i + 1
                )));
            }
            coords.extend(row);
        }
        Ok(Self {
            coords,
            n,
            dim,
            metric,
        })
    }

    /// One-dimensional convenience constructor.
    pub fn from_values(values: &[f64], metric: Metric) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect(), metric)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }
}

/// Symmetric, nonnegative `n x n` dissimilarities with zero diagonal.
///
/// Summary statistics over the `n(n-1)/2` unordered pairs (maximum, mean and
/// centred sum of squares) are computed once at construction, since several
/// indexes normalise by them.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    d: Vec<f64>,
    d_max: f64,
    pair_mean: f64,
    pair_ss: f64,
}

impl DissimilarityMatrix {
    /// Validates a square matrix. Pairs that differ by at most `tolerance`
    /// are symmetrised by averaging; larger differences are rejected.
    pub fn from_rows(rows: &[Vec<f64>], tolerance: f64) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::MalformedInput("empty dissimilarity matrix".into()));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::MalformedInput(format!(
                "matrix is not square: row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        let mut d = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::MalformedInput(format!(
                        "non-finite entry at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                if v < 0.0 {
                    return Err(Error::NegativeDissimilarity {
                        i: i + 1,
                        j: j + 1,
                        value: v,
                    });
                }
            }
            if rows[i][i].abs() > tolerance {
                return Err(Error::BadDiagonal {
                    i: i + 1,
                    value: rows[i][i],
                });
            }
            for j in (i + 1)..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > tolerance {
                    return Err(Error::AsymmetricInput {
                        i: i + 1,
                        j: j + 1,
                        a,
                        b,
                    });
                }
                let v = if a == b { a } else { 0.5 * (a + b) };
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Ok(Self::from_dense_unchecked(n, d))
    }

    /// Pairwise metric distances between the dataset's points.
    pub fn from_points(points: &PointDataset) -> Result<Self> {
        let n = points.n();
        if n < 2 {
            return Err(Error::InputTooSmall { needed: 2, got: n });
        }
        let metric = points.metric();
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = metric.distance(points.point(i), points.point(j));
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Ok(Self::from_dense_unchecked(n, d))
    }

    /// Builds from the upper triangle `d(i, j)` for `i < j`, in row order.
    pub fn from_condensed(n: usize, condensed: &[f64]) -> Result<Self> {
        if condensed.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::MalformedInput(format!(
                "condensed length {} does not match n = {n}",
                condensed.len()
            )));
        }
        let mut d = vec![0.0; n * n];
        let mut it = condensed.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let &v = it.next().expect("length checked");
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::NegativeDissimilarity {
                        i: i + 1,
                        j: j + 1,
                        value: v,
                    });
                }
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        Ok(Self::from_dense_unchecked(n, d))
    }

    fn from_dense_unchecked(n: usize, d: Vec<f64>) -> Self {
        let m = n * n.saturating_sub(1) / 2;
        let mut d_max = 0.0f64;
        let mut sum = 0.0;
        for i in 0..n {
            for &v in &d[i * n + i + 1..(i + 1) * n] {
                d_max = d_max.max(v);
                sum += v;
            }
        }
        let pair_mean = if m > 0 { sum / m as f64 } else { 0.0 };
        let mut pair_ss = 0.0;
        for i in 0..n {
            for &v in &d[i * n + i + 1..(i + 1) * n] {
                pair_ss += (v - pair_mean) * (v - pair_mean);
            }
        }
        Self {
            n,
            d,
            d_max,
            pair_mean,
            pair_ss,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    /// Largest off-diagonal entry.
    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    /// Mean of the off-diagonal upper-triangle entries.
    pub fn pair_mean(&self) -> f64 {
        self.pair_mean
    }

    /// Centred sum of squares of the off-diagonal upper-triangle entries.
    pub fn pair_sum_squares(&self) -> f64 {
        self.pair_ss
    }

    pub fn pair_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    /// Off-diagonal entries `d(i, j)`, `i < j`, in row order.
    pub fn condensed(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pair_count());
        for i in 0..self.n {
            out.extend_from_slice(&self.row(i)[i + 1..]);
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Matrix with objects reordered so that new object `i` is old object `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let n = self.n;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                d[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Ok(Self::from_dense_unchecked(n, d))
    }

    /// Every entry multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::MalformedInput(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        let d = self.d.iter().map(|v| v * c).collect();
        Ok(Self::from_dense_unchecked(self.n, d))
    }

    pub(crate) fn require_positive_max(&self) -> Result<f64> {
        if self.d_max > 0.0 {
            Ok(self.d_max)
        } else {
            Err(Error::ZeroMaxDissimilarity)
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::MalformedInput(format!(
            "permutation has length {}, expected {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::MalformedInput("not a permutation".into()));
        }
    }
    Ok(())
}
