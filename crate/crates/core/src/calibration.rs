//! Calibration of normalised index values against the random collection,
//! and weighted aggregation of calibrated values.
//!
//! * per-K: z-score against the `2B` random clusterings with the same `K`;
//! * pooled: z-score against all random clusterings;
//! * rank: scaled average rank in the pool of random and candidate
//!   clusterings;
//! * none: the normalised values themselves.
//!
//! Z-scores use the sample standard deviation. Candidates never enter the
//! z-score pools but do enter the rank pool.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexes::{IndexId, IndexProfile};
use crate::random::RandomClusteringCollection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMode {
    PerK,
    Pooled,
    Rank,
    None,
}

impl CalibrationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CalibrationMode::PerK => "per-k",
            CalibrationMode::Pooled => "pooled",
            CalibrationMode::Rank => "rank",
            CalibrationMode::None => "none",
        }
    }

    pub fn needs_collection(self) -> bool {
        self != CalibrationMode::None
    }
}

impl fmt::Display for CalibrationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CalibrationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-k" => Ok(CalibrationMode::PerK),
            "pooled" => Ok(CalibrationMode::Pooled),
            "rank" => Ok(CalibrationMode::Rank),
            "none" => Ok(CalibrationMode::None),
            other => Err(Error::InvalidConfig(format!(
                "unknown calibration mode {other:?} (valid: per-k, pooled, rank, none)"
            ))),
        }
    }
}

/// A calibrated value, or the reason none could be computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CalibratedCell {
    Value(f64),
    Unavailable(String),
}

impl CalibratedCell {
    pub fn value(&self) -> Option<f64> {
        match self {
            CalibratedCell::Value(v) => Some(*v),
            CalibratedCell::Unavailable(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedProfile {
    pub mode: CalibrationMode,
    pub k: usize,
    pub values: BTreeMap<IndexId, CalibratedCell>,
}

impl CalibratedProfile {
    pub fn get(&self, id: IndexId) -> Option<f64> {
        self.values.get(&id).and_then(CalibratedCell::value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PoolStats {
    mean: f64,
    sd: f64,
}

fn pool_stats(values: &[f64]) -> std::result::Result<PoolStats, String> {
    if values.len() < 2 {
        return Err(format!("only {} usable random values", values.len()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    // A constant pool can still yield a rounding-level sd from the mean;
    // treat spread below that noise floor as none.
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sd.is_nan() || sd <= 1e-12 * scale {
        return Err("random values have zero spread".into());
    }
    Ok(PoolStats { mean, sd })
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// `(average rank - 1) / (m - 1)` of `v` within the sorted pool `pool`,
/// where `v` is one of the pool members.
fn rank_score(pool: &[f64], v: f64) -> f64 {
    let below = pool.partition_point(|&x| x < v);
    let through = pool.partition_point(|&x| x <= v);
    let ties = (through - below).max(1);
    let avg_rank = below as f64 + (ties as f64 + 1.0) / 2.0;
    (avg_rank - 1.0) / (pool.len() - 1) as f64
}

enum Reference {
    PerK(BTreeMap<(usize, IndexId), std::result::Result<PoolStats, String>>),
    Pooled(BTreeMap<IndexId, std::result::Result<PoolStats, String>>),
    Rank(BTreeMap<IndexId, Vec<f64>>),
    None,
}

/// Precomputed reference distributions for one calibration mode.
///
/// Cheap to apply to many profiles: candidates as well as the random
/// clusterings themselves.
pub struct Calibrator {
    mode: CalibrationMode,
    selection: Vec<IndexId>,
    k_range: Option<(usize, usize)>,
    reference: Reference,
}

impl Calibrator {
    /// `candidates` only matter in rank mode, where they join the pool.
    pub fn new<'c>(
        mode: CalibrationMode,
        collection: Option<&'c RandomClusteringCollection>,
        candidates: &[IndexProfile],
        selection: &[IndexId],
    ) -> Result<Self> {
        let k_range = collection.map(|c| (2, c.k_max));
        let need = |coll: Option<&'c RandomClusteringCollection>| {
            coll.ok_or_else(|| {
                Error::InvalidConfig(format!("calibration mode {mode} needs a random collection"))
            })
        };
        let reference = match mode {
            CalibrationMode::PerK => {
                let coll = need(collection)?;
                let mut m = BTreeMap::new();
                for k in coll.ks() {
                    for &id in selection {
                        m.insert((k, id), pool_stats(&coll.pool(id, Some(k))));
                    }
                }
                Reference::PerK(m)
            }
            CalibrationMode::Pooled => {
                let coll = need(collection)?;
                Reference::Pooled(
                    selection
                        .iter()
                        .map(|&id| (id, pool_stats(&coll.pool(id, None))))
                        .collect(),
                )
            }
            CalibrationMode::Rank => {
                let coll = need(collection)?;
                Reference::Rank(
                    selection
                        .iter()
                        .map(|&id| {
                            let mut pool = coll.pool(id, None);
                            pool.extend(candidates.iter().filter_map(|p| p.normalised(id)));
                            (id, sorted(pool))
                        })
                        .collect(),
                )
            }
            CalibrationMode::None => Reference::None,
        };
        Ok(Self {
            mode,
            selection: selection.to_vec(),
            k_range,
            reference,
        })
    }

    pub fn mode(&self) -> CalibrationMode {
        self.mode
    }

    pub fn calibrate(&self, profile: &IndexProfile) -> Result<CalibratedProfile> {
        if let (Reference::PerK(_), Some((lo, hi))) = (&self.reference, self.k_range) {
            if !(lo..=hi).contains(&profile.k) {
                return Err(Error::KNotInCollection(profile.k));
            }
        }
        let mut values = BTreeMap::new();
        for &id in &self.selection {
            let cell = match profile.normalised(id) {
                None => CalibratedCell::Unavailable(
                    profile
                        .failures
                        .get(&id)
                        .cloned()
                        .unwrap_or_else(|| "index not evaluated".into()),
                ),
                Some(v) => self.calibrate_value(id, profile.k, v),
            };
            values.insert(id, cell);
        }
        Ok(CalibratedProfile {
            mode: self.mode,
            k: profile.k,
            values,
        })
    }

    fn calibrate_value(&self, id: IndexId, k: usize, v: f64) -> CalibratedCell {
        let z = |stats: Option<&std::result::Result<PoolStats, String>>| match stats {
            Some(Ok(s)) => CalibratedCell::Value((v - s.mean) / s.sd),
            Some(Err(reason)) => CalibratedCell::Unavailable(format!("degenerate calibration: {reason}")),
            None => CalibratedCell::Unavailable("index not in collection".into()),
        };
        match &self.reference {
            Reference::PerK(m) => z(m.get(&(k, id))),
            Reference::Pooled(m) => z(m.get(&id)),
            Reference::Rank(m) => match m.get(&id) {
                Some(pool) if pool.len() >= 2 => CalibratedCell::Value(rank_score(pool, v)),
                Some(pool) => CalibratedCell::Unavailable(format!(
                    "degenerate calibration: rank pool of size {}",
                    pool.len()
                )),
                None => CalibratedCell::Unavailable("index not in collection".into()),
            },
            Reference::None => CalibratedCell::Value(v),
        }
    }
}

fn strict(profile: CalibratedProfile) -> Result<CalibratedProfile> {
    for (id, cell) in &profile.values {
        if let CalibratedCell::Unavailable(reason) = cell {
            if reason.starts_with("degenerate") {
                return Err(Error::DegenerateCalibration {
                    index: id.to_string(),
                    reason: reason.clone(),
                });
            }
        }
    }
    Ok(profile)
}

/// Z-scores against the random clusterings with the profile's `K`.
///
/// Degenerate pools are reported as an error naming the first such index;
/// use [`Calibrator`] to keep the other indexes.
pub fn calibrate_per_k(
    profile: &IndexProfile,
    collection: &RandomClusteringCollection,
) -> Result<CalibratedProfile> {
    let cal = Calibrator::new(CalibrationMode::PerK, Some(collection), &[], &collection.selection)?;
    strict(cal.calibrate(profile)?)
}

/// Z-scores against all random clusterings.
pub fn calibrate_pooled(
    profile: &IndexProfile,
    collection: &RandomClusteringCollection,
) -> Result<CalibratedProfile> {
    let cal = Calibrator::new(CalibrationMode::Pooled, Some(collection), &[], &collection.selection)?;
    strict(cal.calibrate(profile)?)
}

/// Rank scores of every candidate within the pool of random and candidate
/// clusterings.
pub fn calibrate_rank(
    candidates: &[IndexProfile],
    collection: &RandomClusteringCollection,
) -> Result<Vec<CalibratedProfile>> {
    let cal = Calibrator::new(
        CalibrationMode::Rank,
        Some(collection),
        candidates,
        &collection.selection,
    )?;
    candidates
        .iter()
        .map(|p| cal.calibrate(p).and_then(strict))
        .collect()
}

/// Selected indexes with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<IndexId, f64>", into = "BTreeMap<IndexId, f64>")]
pub struct AggregationSpec {
    weights: BTreeMap<IndexId, f64>,
}

impl AggregationSpec {
    pub fn new(weights: impl IntoIterator<Item = (IndexId, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, w) in weights {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::BadWeight {
                    index: id.to_string(),
                    weight: w,
                });
            }
            map.insert(id, w);
        }
        if map.is_empty() {
            return Err(Error::InvalidConfig("aggregation needs at least one index".into()));
        }
        Ok(Self { weights: map })
    }

    /// Weight 1 on every listed index.
    pub fn uniform(ids: &[IndexId]) -> Result<Self> {
        Self::new(ids.iter().map(|&id| (id, 1.0)))
    }

    /// Parses `id=w,id=w`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (id, w) = part.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("weight {part:?} is not of the form id=w"))
            })?;
            let id: IndexId = id.trim().parse()?;
            let w: f64 = w.trim().parse().map_err(|_| {
                Error::InvalidConfig(format!("weight for {id} is not a number: {w:?}"))
            })?;
            pairs.push((id, w));
        }
        Self::new(pairs)
    }

    pub fn weights(&self) -> &BTreeMap<IndexId, f64> {
        &self.weights
    }

    pub fn indexes(&self) -> Vec<IndexId> {
        self.weights.keys().copied().collect()
    }

    /// Same indexes with weights rescaled to sum to one.
    pub fn normalised(&self) -> Self {
        let total: f64 = self.weights.values().sum();
        Self {
            weights: self.weights.iter().map(|(&id, &w)| (id, w / total)).collect(),
        }
    }
}

impl TryFrom<BTreeMap<IndexId, f64>> for AggregationSpec {
    type Error = Error;

    fn try_from(m: BTreeMap<IndexId, f64>) -> Result<Self> {
        Self::new(m)
    }
}

impl From<AggregationSpec> for BTreeMap<IndexId, f64> {
    fn from(s: AggregationSpec) -> Self {
        s.weights
    }
}

/// Weighted sum of the selected calibrated values.
pub fn aggregate(calibrated: &CalibratedProfile, spec: &AggregationSpec) -> Result<f64> {
    let mut total = 0.0;
    for (&id, &w) in &spec.weights {
        let v = calibrated
            .get(id)
            .ok_or_else(|| Error::MissingIndex(id.to_string()))?;
        total += w * v;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::Clustering;
    use crate::indexes::IndexValue;
    use crate::random::{Generator, RandomClustering};

    fn profile(k: usize, values: &[(IndexId, f64)]) -> IndexProfile {
        let mut p = IndexProfile::new(k);
        for &(id, v) in values {
            p.record(id, Ok(IndexValue::new(id, v, v)));
        }
        p
    }

    /// Collection whose members carry the given (K, withindis*) values.
    fn synthetic(k_max: usize, b: usize, values: &[(usize, f64)]) -> RandomClusteringCollection {
        let members = values
            .iter()
            .enumerate()
            .map(|(r, &(k, v))| RandomClustering {
                generator: Generator::StupidCentroids,
                k,
                replicate: r,
                substream: String::new(),
                centers: vec![],
                clustering: Clustering::single(1).unwrap(),
                profile: profile(k, &[(IndexId::WithinDis, v)]),
            })
            .collect();
        RandomClusteringCollection {
            master_seed: 0,
            b,
            k_max,
            selection: vec![IndexId::WithinDis],
            members,
        }
    }

    #[test]
    fn per_k_two_point_pool() {
        let coll = synthetic(2, 1, &[(2, 0.2), (2, 0.4)]);
        let c = calibrate_per_k(&profile(2, &[(IndexId::WithinDis, 0.4)]), &coll).unwrap();
        let expected = 0.1 / (0.02f64).sqrt();
        assert!((c.get(IndexId::WithinDis).unwrap() - expected).abs() < 1e-12);
        assert!((expected - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let c = calibrate_per_k(&profile(2, &[(IndexId::WithinDis, 0.3)]), &coll).unwrap();
        assert!(c.get(IndexId::WithinDis).unwrap().abs() < 1e-12);
    }

    #[test]
    fn per_k_missing_k_and_degenerate() {
        let coll = synthetic(3, 1, &[(2, 0.2), (2, 0.4), (3, 0.5), (3, 0.5)]);
        assert_eq!(
            calibrate_per_k(&profile(4, &[(IndexId::WithinDis, 0.4)]), &coll),
            Err(Error::KNotInCollection(4))
        );
        assert!(matches!(
            calibrate_per_k(&profile(3, &[(IndexId::WithinDis, 0.4)]), &coll),
            Err(Error::DegenerateCalibration { .. })
        ));
        // Pooled mode sees spread across K.
        assert!(calibrate_pooled(&profile(3, &[(IndexId::WithinDis, 0.4)]), &coll).is_ok());
    }

    #[test]
    fn pooled_equals_per_k_when_k_independent() {
        let vals = [0.1, 0.5, 0.3, 0.9];
        let mut members = Vec::new();
        for k in 2..=4 {
            for v in vals {
                members.push((k, v));
            }
        }
        let coll = synthetic(4, 2, &members);
        for k in 2..=4 {
            let p = profile(k, &[(IndexId::WithinDis, 0.77)]);
            let a = calibrate_per_k(&p, &coll).unwrap().get(IndexId::WithinDis).unwrap();
            let b = calibrate_pooled(&p, &coll).unwrap().get(IndexId::WithinDis).unwrap();
            // Same mean; pooled SS is 3x the per-K SS, so
            // sd_k / sd_pooled = sqrt((N - 1) / (N_k - 1) * N_k / N) with N_k = 4, N = 12.
            let ratio = ((11.0 / 3.0) * (4.0 / 12.0f64)).sqrt();
            assert!((b - a * ratio).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn constant_pool_with_inexact_mean_is_degenerate() {
        // 0.6 * 40 / 40 is not exactly 0.6 in floating point.
        let coll = synthetic(2, 20, &[(2, 0.6); 40]);
        assert!(matches!(
            calibrate_per_k(&profile(2, &[(IndexId::WithinDis, 0.6)]), &coll),
            Err(Error::DegenerateCalibration { .. })
        ));
    }

    #[test]
    fn rank_scores() {
        let coll = synthetic(2, 2, &[(2, 0.2), (2, 0.8)]);
        let cands = vec![
            profile(2, &[(IndexId::WithinDis, 0.4)]),
            profile(2, &[(IndexId::WithinDis, 0.4)]),
        ];
        let out = calibrate_rank(&cands, &coll).unwrap();
        assert_eq!(out[0].get(IndexId::WithinDis), Some(0.5));
        assert_eq!(out[1].get(IndexId::WithinDis), Some(0.5));

        let cands = vec![
            profile(2, &[(IndexId::WithinDis, 0.9)]),
            profile(2, &[(IndexId::WithinDis, 0.1)]),
        ];
        let out = calibrate_rank(&cands, &coll).unwrap();
        assert_eq!(out[0].get(IndexId::WithinDis), Some(1.0));
        assert_eq!(out[1].get(IndexId::WithinDis), Some(0.0));
    }

    #[test]
    fn rank_needs_two() {
        let coll = synthetic(2, 1, &[]);
        let cands = vec![profile(2, &[(IndexId::WithinDis, 0.4)])];
        assert!(matches!(
            calibrate_rank(&cands, &coll),
            Err(Error::DegenerateCalibration { .. })
        ));
    }

    #[test]
    fn aggregation() {
        let mut values = BTreeMap::new();
        for (id, v) in [
            (IndexId::WithinDis, 0.68),
            (IndexId::PSep, 1.79),
            (IndexId::PearsonGamma, 1.86),
            (IndexId::WidestGap, 0.45),
        ] {
            values.insert(id, CalibratedCell::Value(v));
        }
        let cp = CalibratedProfile {
            mode: CalibrationMode::PerK,
            k: 5,
            values,
        };
        let spec = AggregationSpec::uniform(&[
            IndexId::WithinDis,
            IndexId::PSep,
            IndexId::PearsonGamma,
            IndexId::WidestGap,
        ])
        .unwrap();
        assert!((aggregate(&cp, &spec).unwrap() - 4.78).abs() < 1e-12);

        let spec = AggregationSpec::new([(IndexId::PSep, 1.0)]).unwrap();
        assert_eq!(aggregate(&cp, &spec).unwrap(), 1.79);

        let spec = AggregationSpec::parse("withindis=2, psep=0.5").unwrap();
        let mut values = BTreeMap::new();
        values.insert(IndexId::WithinDis, CalibratedCell::Value(1.0));
        values.insert(IndexId::PSep, CalibratedCell::Value(-2.0));
        let cp = CalibratedProfile {
            mode: CalibrationMode::None,
            k: 2,
            values,
        };
        assert_eq!(aggregate(&cp, &spec).unwrap(), 1.0);

        let spec = AggregationSpec::parse("entropy=1").unwrap();
        assert_eq!(
            aggregate(&cp, &spec),
            Err(Error::MissingIndex("entropy".into()))
        );
        assert!(matches!(
            AggregationSpec::parse("psep=0"),
            Err(Error::BadWeight { .. })
        ));
        assert!(matches!(
            AggregationSpec::parse("psep=-1"),
            Err(Error::BadWeight { .. })
        ));
    }

    #[test]
    fn normalised_weights_sum_to_one() {
        let spec = AggregationSpec::parse("psep=3,withindis=1").unwrap().normalised();
        let total: f64 = spec.weights().values().sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert_eq!(spec.weights()[&IndexId::PSep], 0.75);
    }

    #[test]
    fn mode_strings() {
        for m in [
            CalibrationMode::PerK,
            CalibrationMode::Pooled,
            CalibrationMode::Rank,
            CalibrationMode::None,
        ] {
            assert_eq!(m.as_str().parse::<CalibrationMode>().unwrap(), m);
        }
        assert!("perk".parse::<CalibrationMode>().is_err());
    }
}
