//! Random baseline clusterings.
//!
//! Two generators replace the optimisation of classic methods with random
//! seeding: *stupid K-centroids* assigns every object to the nearest of `K`
//! randomly drawn objects, and *stupid nearest neighbours* grows `K` random
//! seeds by repeatedly attaching the unassigned object closest to any
//! assigned one. A [`RandomClusteringCollection`] holds `B` clusterings from
//! each generator for every `K` in `2..=k_max`, together with their index
//! profiles, and is the reference distribution for calibration.
//!
//! Every clustering draws from its own ChaCha8 stream, seeded by SHA-256 of
//! the master seed, generator tag, `K` and replicate number, so the
//! collection does not depend on evaluation order or thread scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clustering::Clustering;
use crate::config::ValidationConfig;
use crate::error::{Error, Result};
use crate::indexes::{Evaluator, IndexId, IndexProfile};
use crate::matrix::DissimilarityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Generator {
    #[serde(rename = "stupidcent")]
    StupidCentroids,
    #[serde(rename = "stupidnn")]
    StupidNearestNeighbours,
}

impl Generator {
    pub const ALL: [Generator; 2] = [Generator::StupidCentroids, Generator::StupidNearestNeighbours];

    pub fn as_str(self) -> &'static str {
        match self {
            Generator::StupidCentroids => "stupidcent",
            Generator::StupidNearestNeighbours => "stupidnn",
        }
    }

    /// Clustering of `d` seeded at `centers`.
    pub fn cluster(self, d: &DissimilarityMatrix, centers: &[usize]) -> Result<Clustering> {
        match self {
            Generator::StupidCentroids => stupid_kcentroids(d, centers),
            Generator::StupidNearestNeighbours => stupid_nn(d, centers),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown generator {s:?} (valid: stupidcent, stupidnn)"
                ))
            })
    }
}

/// Derives independent, reproducible substreams from one master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPlan {
    pub master: u64,
}

impl SeedPlan {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn substream_seed(&self, generator: Generator, k: usize, replicate: usize) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"clustval/substream/v1");
        h.update(self.master.to_le_bytes());
        h.update(generator.as_str().as_bytes());
        h.update([0u8]);
        h.update((k as u64).to_le_bytes());
        h.update((replicate as u64).to_le_bytes());
        h.finalize().into()
    }

    pub fn rng(&self, generator: Generator, k: usize, replicate: usize) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.substream_seed(generator, k, replicate))
    }
}

/// Uniformly random `k`-subset of `0..n`, ascending.
pub fn draw_centers<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    let mut q = rand::seq::index::sample(rng, n, k).into_vec();
    q.sort_unstable();
    Ok(q)
}

fn check_centers(n: usize, centers: &[usize]) -> Result<()> {
    if centers.is_empty() || centers.len() > n {
        return Err(Error::KOutOfRange {
            k: centers.len(),
            max: n,
        });
    }
    let mut seen = vec![false; n];
    for &c in centers {
        if c >= n {
            return Err(Error::MalformedInput(format!(
                "center {} out of range for {n} objects",
                c + 1
            )));
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::MalformedInput(format!("center {} repeated", c + 1)));
        }
    }
    Ok(())
}

/// Assigns every object to its nearest center; ties go to the earliest
/// center in `centers`, and each center always keeps itself.
pub fn stupid_kcentroids(d: &DissimilarityMatrix, centers: &[usize]) -> Result<Clustering> {
    let n = d.n();
    check_centers(n, centers)?;
    let mut labels = vec![0usize; n];
    for (i, label) in labels.iter_mut().enumerate() {
        let row = d.row(i);
        let mut best = 0;
        for (pos, &q) in centers.iter().enumerate().skip(1) {
            if row[q] < row[centers[best]] {
                best = pos;
            }
        }
        *label = best;
    }
    for (pos, &q) in centers.iter().enumerate() {
        labels[q] = pos;
    }
    Clustering::from_labels(&labels)
}

/// Grows singleton clusters at `centers` by repeatedly attaching the
/// unassigned object nearest to any assigned one (ties: lowest unassigned
/// index, then lowest assigned index) to that object's cluster.
pub fn stupid_nn(d: &DissimilarityMatrix, centers: &[usize]) -> Result<Clustering> {
    let n = d.n();
    check_centers(n, centers)?;
    const UNASSIGNED: usize = usize::MAX;
    let mut labels = vec![UNASSIGNED; n];
    for (pos, &q) in centers.iter().enumerate() {
        labels[q] = pos;
    }
    // key[x]: distance from unassigned x to the assigned set; via[x]: the
    // lowest-indexed assigned object attaining it.
    let mut key = vec![f64::INFINITY; n];
    let mut via = vec![usize::MAX; n];
    let mut sorted_centers = centers.to_vec();
    sorted_centers.sort_unstable();
    for x in 0..n {
        if labels[x] != UNASSIGNED {
            continue;
        }
        let row = d.row(x);
        for &q in &sorted_centers {
            if row[q] < key[x] {
                key[x] = row[q];
                via[x] = q;
            }
        }
    }
    for _ in centers.len()..n {
        let mut next = usize::MAX;
        for x in 0..n {
            if labels[x] == UNASSIGNED && (next == usize::MAX || key[x] < key[next]) {
                next = x;
            }
        }
        labels[next] = labels[via[next]];
        let row = d.row(next);
        for x in 0..n {
            if labels[x] != UNASSIGNED {
                continue;
            }
            let v = row[x];
            if v < key[x] || (v == key[x] && next < via[x]) {
                key[x] = v;
                via[x] = next;
            }
        }
    }
    Clustering::from_labels(&labels)
}

/// One random clustering with its provenance and index profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomClustering {
    pub generator: Generator,
    pub k: usize,
    pub replicate: usize,
    /// Hex SHA-256 substream seed.
    pub substream: String,
    /// Zero-based objects drawn as seeds.
    pub centers: Vec<usize>,
    pub clustering: Clustering,
    pub profile: IndexProfile,
}

/// `2B` random clusterings for each `K` in `2..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomClusteringCollection {
    pub master_seed: u64,
    pub b: usize,
    pub k_max: usize,
    pub selection: Vec<IndexId>,
    pub members: Vec<RandomClustering>,
}

impl RandomClusteringCollection {
    pub fn ks(&self) -> std::ops::RangeInclusive<usize> {
        2..=self.k_max
    }

    pub fn contains_k(&self, k: usize) -> bool {
        self.ks().contains(&k)
    }

    pub fn for_k(&self, k: usize) -> impl Iterator<Item = &RandomClustering> + '_ {
        self.members.iter().filter(move |m| m.k == k)
    }

    /// Normalised values of `index` over the members with the given `K`
    /// (or all members), skipping members where the index failed.
    pub fn pool(&self, index: IndexId, k: Option<usize>) -> Vec<f64> {
        self.members
            .iter()
            .filter(|m| k.is_none_or(|k| m.k == k))
            .filter_map(|m| m.profile.normalised(index))
            .collect()
    }

    /// Number of members excluded from each index's pool.
    pub fn exclusions(&self) -> BTreeMap<IndexId, usize> {
        let mut out: BTreeMap<IndexId, usize> =
            self.selection.iter().map(|&id| (id, 0)).collect();
        for m in &self.members {
            for id in m.profile.failures.keys() {
                *out.entry(*id).or_default() += 1;
            }
        }
        out
    }
}

/// Generates and evaluates the random collection. With `parallel` the
/// members are evaluated on the rayon pool; the result is identical either
/// way.
pub fn generate_collection(
    d: &DissimilarityMatrix,
    config: &ValidationConfig,
    master_seed: u64,
    selection: &[IndexId],
    parallel: bool,
) -> Result<RandomClusteringCollection> {
    let evaluator = Evaluator::new(d, *config, selection)?;
    generate_with(&evaluator, master_seed, parallel)
}

pub(crate) fn generate_with(
    evaluator: &Evaluator<'_>,
    master_seed: u64,
    parallel: bool,
) -> Result<RandomClusteringCollection> {
    let d = evaluator.matrix();
    let config = evaluator.config();
    if config.k_max > d.n() {
        return Err(Error::KOutOfRange {
            k: config.k_max,
            max: d.n(),
        });
    }
    let plan = SeedPlan::new(master_seed);
    let tasks: Vec<(usize, Generator, usize)> = (2..=config.k_max)
        .flat_map(|k| {
            Generator::ALL
                .into_iter()
                .flat_map(move |g| (0..config.b).map(move |r| (k, g, r)))
        })
        .collect();
    let run = |&(k, g, r): &(usize, Generator, usize)| -> Result<RandomClustering> {
        let seed = plan.substream_seed(g, k, r);
        let mut rng = ChaCha8Rng::from_seed(seed);
        let centers = draw_centers(d.n(), k, &mut rng)?;
        let clustering = g.cluster(d, &centers)?;
        let profile = evaluator.profile(&clustering)?;
        Ok(RandomClustering {
            generator: g,
            k,
            replicate: r,
            substream: seed.iter().map(|b| format!("{b:02x}")).collect(),
            centers,
            clustering,
            profile,
        })
    };
    let members = if parallel {
        tasks.par_iter().map(run).collect::<Result<Vec<_>>>()?
    } else {
        tasks.iter().map(run).collect::<Result<Vec<_>>>()?
    };
    Ok(RandomClusteringCollection {
        master_seed,
        b: config.b,
        k_max: config.k_max,
        selection: evaluator.selection().to_vec(),
        members,
    })
}
