use crate::clustering::Clustering;
use crate::error::{Error, Result};
use crate::indexes::{IndexId, IndexValue};

/// Shannon entropy (natural log) of the cluster size distribution,
/// normalised by its maximum `log K`.
pub fn entropy(c: &Clustering) -> Result<IndexValue> {
    let k = c.k();
    if k < 2 {
        return Err(Error::RequiresTwoClusters);
    }
    let n = c.n() as f64;
    // Summing over sorted sizes makes the value a function of the size
    // multiset alone, bit for bit, whatever the cluster order.
    let mut sizes = c.sizes();
    sizes.sort_unstable();
    let raw: f64 = sizes
        .into_iter()
        .map(|m| {
            let p = m as f64 / n;
            -p * p.ln()
        })
        .sum();
    Ok(IndexValue::new(IndexId::Entropy, raw, raw / (k as f64).ln()))
}

/// `1 - K / k_max`.
pub fn parsimony(c: &Clustering, k_max: usize) -> Result<IndexValue> {
    let k = c.k();
    if k > k_max {
        return Err(Error::KOutOfRange { k, max: k_max });
    }
    let v = 1.0 - k as f64 / k_max as f64;
    Ok(IndexValue::new(IndexId::Parsimony, v, v))
}
