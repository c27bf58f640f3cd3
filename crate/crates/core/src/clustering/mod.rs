//! Centroid models, batch and incremental k-means, optimizer-searched centroids and the
//! membership product that turns two models into blood-pressure classes.

mod ffi_cluster;
mod fitness;
mod fusion;
mod kmeans;

pub use ffi_cluster::{ffi_cluster, FfiClusterFit};
pub use fitness::{accuracy_fitness, majority_class_map, one_vs_rest_counts, ClassMap, ConfusionCounts};
pub use fusion::{class_memberships, fuse, MembershipMatrix};
pub use kmeans::{kmeans_batch, KMeansFit};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::BpLabel;
use crate::ffi::OptimizerError;

/// Additive constant in inverse-squared-distance memberships.
pub const MEMBERSHIP_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("need at least {k} samples, got {n}")]
    InsufficientData { n: usize, k: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("no samples")]
    Empty,
    #[error("cluster {0} does not exist")]
    UnknownCluster(usize),
    #[error("model has no populated cluster")]
    EmptyModel,
    #[error("invalid membership row {row}: {reason}")]
    InvalidMembership { row: usize, reason: String },
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
    #[error("model snapshot: {0}")]
    Snapshot(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BpClass {
    Low,
    Normal,
    High,
}

impl BpClass {
    pub const ALL: [BpClass; 3] = [BpClass::Low, BpClass::Normal, BpClass::High];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BpClass::Low => "low",
            BpClass::Normal => "normal",
            BpClass::High => "high",
        }
    }
}

/// Systolic/diastolic cut-offs: High at 140/90, Low below 90/60; High takes precedence.
pub fn bp_class_from_label(label: &BpLabel) -> BpClass {
    let (sys, dia) = (label.systolic_mmhg(), label.diastolic_mmhg());
    if sys >= 140.0 || dia >= 90.0 {
        BpClass::High
    } else if sys < 90.0 || dia < 60.0 {
        BpClass::Low
    } else {
        BpClass::Normal
    }
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// `k` centroids with the running sums and counts used by incremental updates.
///
/// Whenever `counts[j] > 0`, `centroids[j] == sums[j] / counts[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    k: usize,
    #[serde(rename = "d")]
    dim: usize,
    centroids: Vec<Vec<f64>>,
    counts: Vec<u64>,
    sums: Vec<Vec<f64>>,
    #[serde(default)]
    class_map: Option<Vec<BpClass>>,
}

impl ClusterModel {
    /// A model with the given centroids and empty running statistics.
    pub fn from_centroids(centroids: Vec<Vec<f64>>) -> Result<Self, ClusterError> {
        let k = centroids.len();
        if k < 2 {
            return Err(ClusterError::InvalidK(k));
        }
        let dim = centroids[0].len();
        if let Some(c) = centroids.iter().find(|c| c.len() != dim) {
            return Err(ClusterError::DimensionMismatch {
                expected: dim,
                got: c.len(),
            });
        }
        Ok(Self {
            k,
            dim,
            counts: vec![0; k],
            sums: vec![vec![0.0; dim]; k],
            centroids,
            class_map: None,
        })
    }

    /// Centroids are the means of the assigned points; clusters nobody joined keep `fallback`.
    pub fn from_assignments(
        data: &[Vec<f64>],
        assignments: &[usize],
        fallback: Vec<Vec<f64>>,
    ) -> Result<Self, ClusterError> {
        let mut model = Self::from_centroids(fallback)?;
        if data.len() != assignments.len() {
            return Err(ClusterError::LengthMismatch(data.len(), assignments.len()));
        }
        for (p, &j) in data.iter().zip(assignments) {
            model.check_dim(p)?;
            model.counts[j] += 1;
            model.sums[j].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
        for j in 0..model.k {
            if model.counts[j] > 0 {
                let n = model.counts[j] as f64;
                model.centroids[j] = model.sums[j].iter().map(|s| s / n).collect();
            }
        }
        Ok(model)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn sums(&self) -> &[Vec<f64>] {
        &self.sums
    }

    pub fn class_map(&self) -> Option<&[BpClass]> {
        self.class_map.as_deref()
    }

    pub fn set_class_map(&mut self, map: Vec<BpClass>) -> Result<(), ClusterError> {
        if map.len() != self.k {
            return Err(ClusterError::LengthMismatch(map.len(), self.k));
        }
        self.class_map = Some(map);
        Ok(())
    }

    fn check_dim(&self, p: &[f64]) -> Result<(), ClusterError> {
        if p.len() == self.dim {
            Ok(())
        } else {
            Err(ClusterError::DimensionMismatch {
                expected: self.dim,
                got: p.len(),
            })
        }
    }

    /// Nearest centroid and its Euclidean distance; ties go to the lowest index.
    pub fn assign(&self, point: &[f64]) -> (usize, f64) {
        nearest(&self.centroids, point)
    }

    /// Adds `point` to cluster `j`: the centroid becomes `(sum + point)/(count + 1)`.
    pub fn absorb(&mut self, point: &[f64], j: usize) -> Result<(), ClusterError> {
        self.check_dim(point)?;
        if j >= self.k {
            return Err(ClusterError::UnknownCluster(j));
        }
        self.counts[j] += 1;
        let n = self.counts[j] as f64;
        for ((s, c), v) in self.sums[j].iter_mut().zip(&mut self.centroids[j]).zip(point) {
            *s += v;
            *c = *s / n;
        }
        Ok(())
    }

    /// Streams one point into its nearest cluster and returns that cluster's index.
    pub fn incremental_update(&mut self, point: &[f64]) -> Result<usize, ClusterError> {
        if self.counts.iter().all(|&c| c == 0) {
            return Err(ClusterError::EmptyModel);
        }
        self.check_dim(point)?;
        let (j, _) = self.assign(point);
        self.absorb(point, j)?;
        Ok(j)
    }

    /// Inverse squared distance weights `1/(d² + ε)`, normalized to sum to one.
    pub fn soft_membership(&self, point: &[f64]) -> Vec<f64> {
        let w: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| 1.0 / (squared_distance(c, point) + MEMBERSHIP_EPSILON))
            .collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    /// Within-cluster sum of squared distances for the given assignment.
    pub fn loss(&self, data: &[Vec<f64>], assignments: &[usize]) -> f64 {
        data.iter()
            .zip(assignments)
            .map(|(p, &j)| squared_distance(p, &self.centroids[j]))
            .sum()
    }

    pub fn assign_all(&self, data: &[Vec<f64>]) -> Vec<usize> {
        data.iter().map(|p| self.assign(p).0).collect()
    }

    /// Class of the nearest cluster, if a class map is attached.
    pub fn predict_class(&self, point: &[f64]) -> Option<BpClass> {
        let (j, _) = self.assign(point);
        self.class_map.as_ref().map(|m| m[j])
    }

    pub fn to_json(&self) -> Result<String, ClusterError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ClusterError> {
        let m: Self = serde_json::from_str(text)?;
        let consistent = m.k >= 2
            && m.centroids.len() == m.k
            && m.counts.len() == m.k
            && m.sums.len() == m.k
            && m.centroids.iter().chain(&m.sums).all(|v| v.len() == m.dim)
            && m.class_map.as_ref().is_none_or(|c| c.len() == m.k);
        if !consistent {
            return Err(ClusterError::InvalidK(m.k));
        }
        Ok(m)
    }
}

pub(crate) fn nearest(centroids: &[Vec<f64>], point: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(c, point);
        if d < best.1 {
            best = (j, d);
        }
    }
    (best.0, best.1.sqrt())
}
