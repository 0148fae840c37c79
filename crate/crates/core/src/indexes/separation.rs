use crate::clustering::Clustering;
use crate::config::floor_portion;
use crate::error::{Error, Result};
use crate::indexes::{IndexId, IndexValue};
use crate::matrix::DissimilarityMatrix;

/// Average over clusters of the `max(1, floor(p * n_j))` smallest
/// object-to-other-cluster dissimilarities.
pub fn p_separation(d: &DissimilarityMatrix, c: &Clustering, p: f64) -> Result<IndexValue> {
    if c.k() < 2 {
        return Err(Error::RequiresTwoClusters);
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidConfig(format!("portion must lie in (0, 1], got {p}")));
    }
    let d_max = d.require_positive_max()?;
    let labels = c.assignment();
    let mut nearest_outside: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut count = 0usize;
    for (j, members) in c.clusters().enumerate() {
        nearest_outside.clear();
        nearest_outside.extend(members.iter().map(|&i| {
            d.row(i)
                .iter()
                .zip(labels)
                .filter(|&(_, &l)| l != j)
                .map(|(&v, _)| v)
                .fold(f64::INFINITY, f64::min)
        }));
        let m = floor_portion(p, members.len()).max(1);
        if m < nearest_outside.len() {
            nearest_outside.select_nth_unstable_by(m - 1, f64::total_cmp);
        }
        sum += nearest_outside[..m].iter().sum::<f64>();
        count += m;
    }
    let raw = sum / count as f64;
    Ok(IndexValue::new(IndexId::PSep, raw, raw / d_max))
}

/// Pearson correlation between pairwise dissimilarities and the
/// between-cluster indicator.
///
/// Since the indicator is binary, the covariance reduces to sums over
/// between-cluster pairs; the dissimilarity mean and centred sum of squares
/// come precomputed with the matrix.
pub fn pearson_gamma(d: &DissimilarityMatrix, c: &Clustering) -> Result<IndexValue> {
    if c.k() < 2 {
        return Err(Error::RequiresTwoClusters);
    }
    let total_pairs = d.pair_count();
    let mean = d.pair_mean();
    let mut within_pairs = 0usize;
    let mut within_centred = 0.0;
    for members in c.clusters() {
        for (a, &i) in members.iter().enumerate() {
            let row = d.row(i);
            for &j in &members[a + 1..] {
                within_centred += row[j] - mean;
            }
        }
        within_pairs += members.len() * (members.len() - 1) / 2;
    }
    let between_pairs = total_pairs - within_pairs;
    let ss = d.pair_sum_squares();
    if ss <= 0.0 || between_pairs == 0 || within_pairs == 0 {
        return Err(Error::DegenerateCorrelation);
    }
    // Centred values sum to zero, so the between-cluster sum is the negated
    // within-cluster sum.
    let cov = -within_centred;
    let var_c = between_pairs as f64 * within_pairs as f64 / total_pairs as f64;
    let r = (cov / (ss * var_c).sqrt()).clamp(-1.0, 1.0);
    Ok(IndexValue::new(IndexId::PearsonGamma, r, (r + 1.0) / 2.0))
}
