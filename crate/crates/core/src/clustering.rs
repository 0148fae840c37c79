//! Crisp partitions of `{0, .., n-1}`.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::check_permutation;

/// A partition of `n` objects into `K` nonempty clusters.
///
/// Cluster ids are canonical: cluster `0` holds object `0`, and each new id
/// is the next unused one in order of first appearance. [`Clustering::labels`]
/// reports them one-based, matching label files.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Clustering {
    assignment: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Clustering {
    /// Canonicalises arbitrary labels by first appearance.
    pub fn from_labels<L: Eq + Hash + Copy>(raw: &[L]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::MalformedInput("empty label sequence".into()));
        }
        let mut ids: HashMap<L, usize> = HashMap::new();
        let mut assignment = Vec::with_capacity(raw.len());
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (i, l) in raw.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(*l).or_insert(next);
            if id == members.len() {
                members.push(Vec::new());
            }
            members[id].push(i);
            assignment.push(id);
        }
        Ok(Self {
            assignment,
            members,
        })
    }

    /// Every object in one cluster.
    pub fn single(n: usize) -> Result<Self> {
        Self::from_labels(&vec![0usize; n])
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    /// Zero-based cluster of object `i`.
    #[inline]
    pub fn cluster_of(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Zero-based assignment of every object.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// One-based canonical labels.
    pub fn labels(&self) -> Vec<usize> {
        self.assignment.iter().map(|&c| c + 1).collect()
    }

    /// Members of cluster `j`, ascending.
    pub fn members(&self, j: usize) -> &[usize] {
        &self.members[j]
    }

    pub fn clusters(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.members.iter().map(Vec::as_slice)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    /// Clustering of the reordered objects: new object `i` is old `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n())?;
        let raw: Vec<usize> = perm.iter().map(|&p| self.assignment[p]).collect();
        Self::from_labels(&raw)
    }
}

impl TryFrom<Vec<usize>> for Clustering {
    type Error = Error;

    fn try_from(labels: Vec<usize>) -> Result<Self> {
        Self::from_labels(&labels)
    }
}

impl From<Clustering> for Vec<usize> {
    fn from(c: Clustering) -> Self {
        c.labels()
    }
}
