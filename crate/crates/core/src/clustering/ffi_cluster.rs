use crate::ffi::{optimize, Bounds, FfiConfig, OptimizeOutcome};

use super::fitness::{accuracy_fitness, majority_class_map};
use super::{nearest, BpClass, ClusterError, ClusterModel};

#[derive(Debug, Clone)]
pub struct FfiClusterFit {
    /// Centroids recomputed from the optimizer's final assignment, with the class map attached.
    pub model: ClusterModel,
    pub assignments: Vec<usize>,
    /// Fitness of `model` on the training data.
    pub train_accuracy: f64,
    pub outcome: OptimizeOutcome,
    /// Clusters that received no training point.
    pub degenerate_clusters: Vec<usize>,
}

fn split_centroids(flat: &[f64], k: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..k).map(|j| flat[j * dim..(j + 1) * dim].to_vec()).collect()
}

/// Per-feature data range; constant features get a unit-wide box.
fn feature_bounds(data: &[Vec<f64>], k: usize) -> Result<Bounds, ClusterError> {
    let dim = data[0].len();
    let per_feature: Vec<(f64, f64)> = (0..dim)
        .map(|l| {
            let lo = data.iter().map(|p| p[l]).fold(f64::INFINITY, f64::min);
            let hi = data.iter().map(|p| p[l]).fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                (lo, hi)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        })
        .collect();
    Ok(Bounds::new(per_feature.repeat(k))?)
}

fn mapped_fitness(data: &[Vec<f64>], truth: &[BpClass], centroids: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let assignments: Vec<usize> = data.iter().map(|p| nearest(centroids, p).0).collect();
    let map = majority_class_map(&assignments, truth, centroids.len());
    let predicted: Vec<BpClass> = assignments.iter().map(|&j| map.classes[j]).collect();
    let acc = accuracy_fitness(&predicted, truth).expect("equal non-empty lengths");
    (acc, assignments)
}

/// Searches the `k·d` centroid coordinates with the population optimizer, minimizing
/// `1 − fitness` after mapping each cluster to its majority class.
///
/// `template` supplies everything but the bounds, which span the data range per feature.
pub fn ffi_cluster(
    data: &[Vec<f64>],
    truth: &[BpClass],
    k: usize,
    template: &FfiConfig,
) -> Result<FfiClusterFit, ClusterError> {
    if k < 2 {
        return Err(ClusterError::InvalidK(k));
    }
    if data.len() != truth.len() {
        return Err(ClusterError::LengthMismatch(data.len(), truth.len()));
    }
    if data.len() < k {
        return Err(ClusterError::InsufficientData { n: data.len(), k });
    }
    let dim = data[0].len();
    let cfg = FfiConfig {
        bounds: feature_bounds(data, k)?,
        ..template.clone()
    };
    let objective = |flat: &[f64]| 1.0 - mapped_fitness(data, truth, &split_centroids(flat, k, dim)).0;
    let outcome = optimize(&objective, &cfg)?;

    let searched = split_centroids(&outcome.best.position, k, dim);
    let (_, assignments) = mapped_fitness(data, truth, &searched);
    let mut model = ClusterModel::from_assignments(data, &assignments, searched)?;

    let (train_accuracy, assignments) = mapped_fitness(data, truth, model.centroids());
    let map = majority_class_map(&assignments, truth, k);
    model.set_class_map(map.classes)?;
    Ok(FfiClusterFit {
        model,
        assignments,
        train_accuracy,
        outcome,
        degenerate_clusters: map.degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(seed: u64) -> FfiConfig {
        FfiConfig {
            population_size: 10,
            max_iterations: 40,
            seed,
            ..FfiConfig::new(Bounds::uniform(0.0, 1.0, 1).unwrap())
        }
    }

    fn blobs() -> (Vec<Vec<f64>>, Vec<BpClass>) {
        // centres 10 apart, radius 1
        let centres = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]];
        let offsets = [[0.0, 0.0], [1.0, 0.0], [0.0, -1.0], [-0.7, 0.7], [0.5, 0.5]];
        let mut data = vec![];
        let mut truth = vec![];
        for (c, class) in centres.iter().zip(BpClass::ALL) {
            for o in offsets {
                data.push(vec![c[0] + o[0], c[1] + o[1]]);
                truth.push(class);
            }
        }
        (data, truth)
    }

    #[test]
    fn separated_blobs_reach_perfect_fitness() {
        let (data, truth) = blobs();
        // brute-force check that the classes are separable by nearest class mean
        let means: Vec<Vec<f64>> = (0..3)
            .map(|c| {
                let pts: Vec<&Vec<f64>> = data.iter().zip(&truth).filter(|(_, t)| t.index() == c).map(|(p, _)| p).collect();
                (0..2).map(|l| pts.iter().map(|p| p[l]).sum::<f64>() / pts.len() as f64).collect()
            })
            .collect();
        assert!(data.iter().zip(&truth).all(|(p, t)| nearest(&means, p).0 == t.index()));

        let fit = ffi_cluster(&data, &truth, 3, &cfg(1)).unwrap();
        assert_eq!(fit.train_accuracy, 1.0);
        assert_eq!(*fit.outcome.trace.last().unwrap(), 0.0);
        let m = &fit.model;
        for j in 0..3 {
            if m.counts()[j] > 0 {
                for l in 0..2 {
                    assert!((m.centroids()[j][l] * m.counts()[j] as f64 - m.sums()[j][l]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn single_class_is_trivially_perfect() {
        let (data, _) = blobs();
        let truth = vec![BpClass::Normal; data.len()];
        let fit = ffi_cluster(&data, &truth, 3, &cfg(2)).unwrap();
        assert_eq!(fit.train_accuracy, 1.0);
        assert_eq!(fit.outcome.trace.len(), 1);
    }

    #[test]
    fn deterministic_under_seed() {
        let (data, truth) = blobs();
        let a = ffi_cluster(&data, &truth, 3, &cfg(5)).unwrap();
        let b = ffi_cluster(&data, &truth, 3, &cfg(5)).unwrap();
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn rejects_mismatched_labels() {
        let (data, truth) = blobs();
        assert!(ffi_cluster(&data, &truth[..3], 3, &cfg(0)).is_err());
    }
}
