use crate::clustering::Clustering;
use crate::error::{Error, Result};

fn pairs(m: usize) -> f64 {
    (m as f64) * (m as f64 - 1.0) / 2.0
}

/// Hubert-Arabie adjusted Rand index.
///
/// When the chance correction is undefined (both partitions are a single
/// cluster, or both all singletons) identical partitions score 1.
pub fn adjusted_rand(a: &Clustering, b: &Clustering) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::MalformedInput(format!(
            "partitions have {} and {} objects",
            a.n(),
            b.n()
        )));
    }
    let (ka, kb) = (a.k(), b.k());
    let mut table = vec![0usize; ka * kb];
    for (&x, &y) in a.assignment().iter().zip(b.assignment()) {
        table[x * kb + y] += 1;
    }
    let index: f64 = table.iter().map(|&m| pairs(m)).sum();
    let sum_a: f64 = a.sizes().into_iter().map(pairs).sum();
    let sum_b: f64 = b.sizes().into_iter().map(pairs).sum();
    let expected = sum_a * sum_b / pairs(a.n());
    let max = (sum_a + sum_b) / 2.0;
    if max == expected {
        return Ok(if a == b { 1.0 } else { 0.0 });
    }
    Ok((index - expected) / (max - expected))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(l: &[usize]) -> Clustering {
        Clustering::from_labels(l).unwrap()
    }

    #[test]
    fn identical_is_one() {
        let a = c(&[1, 1, 2, 2, 3]);
        assert_eq!(adjusted_rand(&a, &a).unwrap(), 1.0);
        let relabeled = c(&[7, 7, 0, 0, 4]);
        assert_eq!(adjusted_rand(&a, &relabeled).unwrap(), 1.0);
        let one = c(&[1; 4]);
        assert_eq!(adjusted_rand(&one, &one).unwrap(), 1.0);
    }

    #[test]
    fn against_single_cluster_is_zero() {
        let a = c(&[1, 1, 1, 2, 2, 2]);
        let one = c(&[1; 6]);
        assert_eq!(adjusted_rand(&a, &one).unwrap(), 0.0);
    }

    #[test]
    fn known_value() {
        // Contingency [[2,1],[0,2]]: index 2, sums 4 and 4, N = 10 pairs.
        // expected 1.6, max 4 -> (2 - 1.6) / 2.4 = 1/6.
        let a = c(&[1, 1, 1, 2, 2]);
        let b = c(&[1, 1, 2, 2, 2]);
        let v = adjusted_rand(&a, &b).unwrap();
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(v, adjusted_rand(&b, &a).unwrap());
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            adjusted_rand(&c(&[1, 2]), &c(&[1, 2, 3])),
            Err(Error::MalformedInput(_))
        ));
    }
}
