//! End-to-end pipelines behind the command-line tool: candidate generation,
//! index profiles, calibration against the random collection, aggregation
//! and report assembly.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calibration::{aggregate, AggregationSpec, CalibratedCell, CalibrationMode, Calibrator};
use crate::clustering::Clustering;
use crate::clusterers::{adjusted_rand, kmeans, linkage_dendrogram, pam, Linkage, Method};
use crate::config::ValidationConfig;
use crate::error::{Error, Result};
use crate::indexes::{Evaluator, IndexId, IndexProfile};
use crate::matrix::{DissimilarityMatrix, PointDataset};
use crate::random::{generate_with, RandomClusteringCollection};

pub const SCHEMA_VERSION: u32 = 1;

/// Random restarts per k-means run in method sweeps.
pub const KMEANS_RESTARTS: usize = 10;

/// Method tag of clusterings read from label files.
pub const LABELS_METHOD: &str = "labels";

/// A clustering to be validated.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub name: String,
    pub method: String,
    pub clustering: Clustering,
}

impl Candidate {
    pub fn from_labels(name: impl Into<String>, clustering: Clustering) -> Self {
        Self {
            name: name.into(),
            method: LABELS_METHOD.into(),
            clustering,
        }
    }
}

/// Runs every method for every K in `ks`. k-means needs `points`; its seeds
/// are derived from `seed` per K.
pub fn sweep(
    d: &DissimilarityMatrix,
    points: Option<&PointDataset>,
    methods: &[Method],
    ks: RangeInclusive<usize>,
    seed: u64,
) -> Result<Vec<Candidate>> {
    let mut out = Vec::new();
    for &method in methods {
        let dendrogram = match method {
            Method::Single => Some(linkage_dendrogram(d, Linkage::Single)),
            Method::Average => Some(linkage_dendrogram(d, Linkage::Average)),
            _ => None,
        };
        for k in ks.clone() {
            let clustering = match method {
                Method::KMeans => {
                    let points = points.ok_or_else(|| {
                        Error::InvalidConfig("kmeans needs point coordinates, not only a dissimilarity matrix".into())
                    })?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(k as u64);
                    kmeans(points, k, rng.next_u64(), KMEANS_RESTARTS)?.clustering
                }
                Method::Pam => pam(d, k)?.clustering,
                Method::Single | Method::Average => {
                    dendrogram.as_ref().expect("linkage method").cut(k)?
                }
            };
            out.push(Candidate {
                name: format!("{method}-{k}"),
                method: method.to_string(),
                clustering,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Flag,
    Config,
    Entropy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub n: usize,
    pub config: ValidationConfig,
    pub indexes: Vec<IndexId>,
    pub seed: Option<u64>,
    pub seed_source: Option<SeedSource>,
    pub calibration: Option<CalibrationMode>,
    /// Effective weights (after optional normalisation).
    pub weights: Option<AggregationSpec>,
    pub weights_normalised: bool,
    pub random_clusterings: usize,
    /// Random clusterings excluded from each index's calibration pool
    /// because the index could not be computed on them.
    pub exclusions: BTreeMap<IndexId, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub method: String,
    pub k: usize,
    pub raw: BTreeMap<IndexId, f64>,
    pub normalised: BTreeMap<IndexId, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub failures: BTreeMap<IndexId, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrated: Option<BTreeMap<IndexId, CalibratedCell>>,
    /// Aggregated index A(C); absent if a weighted index could not be
    /// calibrated.
    pub aggregate: Option<f64>,
    /// Adjusted Rand index against the reference partition.
    pub ari: Option<f64>,
}

/// A evaluated on the random clusterings with one K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSummary {
    pub k: usize,
    /// Members with a defined A.
    pub count: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub metadata: Metadata,
    /// Sorted by (method, K, name).
    pub rows: Vec<Row>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub random_aggregate: Vec<RandomSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareOptions {
    pub config: ValidationConfig,
    pub indexes: Vec<IndexId>,
    pub calibration: CalibrationMode,
    pub weights: AggregationSpec,
    pub normalise_weights: bool,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub parallel: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub report: Report,
    pub collection: Option<RandomClusteringCollection>,
}

fn check_candidates(d: &DissimilarityMatrix, candidates: &[Candidate]) -> Result<()> {
    for c in candidates {
        if c.clustering.n() != d.n() {
            return Err(Error::MalformedInput(format!(
                "clustering {} has {} objects, data has {}",
                c.name,
                c.clustering.n(),
                d.n()
            )));
        }
    }
    Ok(())
}

fn base_row(c: &Candidate, profile: &IndexProfile, truth: Option<&Clustering>) -> Result<Row> {
    Ok(Row {
        name: c.name.clone(),
        method: c.method.clone(),
        k: c.clustering.k(),
        raw: profile.values.iter().map(|(&id, v)| (id, v.raw)).collect(),
        normalised: profile.values.iter().map(|(&id, v)| (id, v.normalised)).collect(),
        failures: profile.failures.clone(),
        calibrated: None,
        aggregate: None,
        ari: truth.map(|t| adjusted_rand(&c.clustering, t)).transpose()?,
    })
}

fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| (&a.method, a.k, &a.name).cmp(&(&b.method, b.k, &b.name)));
}

/// Normalised index profiles of the candidates, without calibration.
pub fn validate(
    d: &DissimilarityMatrix,
    candidates: &[Candidate],
    config: ValidationConfig,
    indexes: &[IndexId],
    truth: Option<&Clustering>,
) -> Result<Report> {
    check_candidates(d, candidates)?;
    let evaluator = Evaluator::new(d, config, indexes)?;
    let mut rows = candidates
        .iter()
        .map(|c| base_row(c, &evaluator.profile(&c.clustering)?, truth))
        .collect::<Result<Vec<_>>>()?;
    sort_rows(&mut rows);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        metadata: Metadata {
            command: "validate".into(),
            n: d.n(),
            config,
            indexes: indexes.to_vec(),
            seed: None,
            seed_source: None,
            calibration: None,
            weights: None,
            weights_normalised: false,
            random_clusterings: 0,
            exclusions: BTreeMap::new(),
        },
        rows,
        random_aggregate: Vec::new(),
    })
}

fn calibrate_and_aggregate(
    calibrator: &Calibrator,
    profile: &IndexProfile,
    weights: &AggregationSpec,
    indexes: &[IndexId],
) -> (BTreeMap<IndexId, CalibratedCell>, Option<f64>) {
    match calibrator.calibrate(profile) {
        Ok(cal) => {
            let a = aggregate(&cal, weights).ok();
            (cal.values, a)
        }
        Err(e) => {
            let reason = e.to_string();
            let cells = indexes
                .iter()
                .map(|&id| (id, CalibratedCell::Unavailable(reason.clone())))
                .collect();
            (cells, None)
        }
    }
}

fn summarise(k: usize, values: &[f64]) -> RandomSummary {
    let count = values.len();
    let mean = (count > 0).then(|| values.iter().sum::<f64>() / count as f64);
    let sd = mean.filter(|_| count > 1).map(|m| {
        (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (count - 1) as f64).sqrt()
    });
    RandomSummary {
        k,
        count,
        mean,
        sd,
        min: values.iter().copied().reduce(f64::min),
        max: values.iter().copied().reduce(f64::max),
    }
}

/// Profiles, calibrates and aggregates the candidates. Unless calibration
/// is `none` the random collection is generated first; it is returned for
/// optional auditing.
pub fn compare(
    d: &DissimilarityMatrix,
    candidates: &[Candidate],
    truth: Option<&Clustering>,
    opts: &CompareOptions,
) -> Result<Comparison> {
    check_candidates(d, candidates)?;
    if let Some(missing) = opts.weights.indexes().into_iter().find(|id| !opts.indexes.contains(id)) {
        return Err(Error::InvalidConfig(format!(
            "weighted index {missing} is not among the selected indexes"
        )));
    }
    let weights = if opts.normalise_weights {
        opts.weights.normalised()
    } else {
        opts.weights.clone()
    };
    let evaluator = Evaluator::new(d, opts.config, &opts.indexes)?;
    let collection = opts
        .calibration
        .needs_collection()
        .then(|| generate_with(&evaluator, opts.seed, opts.parallel))
        .transpose()?;
    let profiles = candidates
        .iter()
        .map(|c| evaluator.profile(&c.clustering))
        .collect::<Result<Vec<_>>>()?;
    let calibrator = Calibrator::new(opts.calibration, collection.as_ref(), &profiles, &opts.indexes)?;

    let mut rows = Vec::with_capacity(candidates.len());
    for (c, profile) in candidates.iter().zip(&profiles) {
        let mut row = base_row(c, profile, truth)?;
        let (cells, a) = calibrate_and_aggregate(&calibrator, profile, &weights, &opts.indexes);
        row.calibrated = Some(cells);
        row.aggregate = a;
        rows.push(row);
    }
    sort_rows(&mut rows);

    let mut random_aggregate = Vec::new();
    if let Some(coll) = &collection {
        for k in coll.ks() {
            let values: Vec<f64> = coll
                .for_k(k)
                .filter_map(|m| calibrate_and_aggregate(&calibrator, &m.profile, &weights, &opts.indexes).1)
                .collect();
            random_aggregate.push(summarise(k, &values));
        }
    }

    let report = Report {
        schema_version: SCHEMA_VERSION,
        metadata: Metadata {
            command: "compare".into(),
            n: d.n(),
            config: opts.config,
            indexes: opts.indexes.clone(),
            seed: Some(opts.seed),
            seed_source: Some(opts.seed_source),
            calibration: Some(opts.calibration),
            weights: Some(weights),
            weights_normalised: opts.normalise_weights,
            random_clusterings: collection.as_ref().map_or(0, |c| c.members.len()),
            exclusions: collection.as_ref().map(|c| c.exclusions()).unwrap_or_default(),
        },
        rows,
        random_aggregate,
    };
    Ok(Comparison { report, collection })
}

#[derive(Serialize)]
struct LongRecord<'a> {
    name: &'a str,
    method: &'a str,
    k: usize,
    measure: &'a str,
    raw: Option<f64>,
    normalised: Option<f64>,
    calibrated: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::MalformedInput(format!("report JSON: {e}")))
    }

    /// Long format: one record per (clustering, index), then the aggregate
    /// (in the calibrated column) and the ARI (in the raw column).
    pub fn write_long_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::MalformedInput(format!("writing CSV: {e}"));
        for row in &self.rows {
            let record = |measure, raw, normalised, calibrated| LongRecord {
                name: &row.name,
                method: &row.method,
                k: row.k,
                measure,
                raw,
                normalised,
                calibrated,
            };
            for &id in &self.metadata.indexes {
                let cal = row.calibrated.as_ref().and_then(|m| m.get(&id)).and_then(CalibratedCell::value);
                wtr.serialize(record(
                    id.as_str(),
                    row.raw.get(&id).copied(),
                    row.normalised.get(&id).copied(),
                    cal,
                ))
                .map_err(io)?;
            }
            if row.calibrated.is_some() {
                wtr.serialize(record("aggregate", None, None, row.aggregate)).map_err(io)?;
            }
            if row.ari.is_some() {
                wtr.serialize(record("ari", row.ari, None, None)).map_err(io)?;
            }
        }
        wtr.flush()
            .map_err(|e| Error::MalformedInput(format!("writing CSV: {e}")))
    }
}
