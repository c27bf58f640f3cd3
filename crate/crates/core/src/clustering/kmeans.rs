use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{nearest, squared_distance, ClusterError, ClusterModel};

#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub model: ClusterModel,
    /// Final cluster of every input row; the model's sums and counts are built from these.
    pub assignments: Vec<usize>,
    /// Within-cluster sum of squares after each centroid update.
    pub loss_history: Vec<f64>,
    pub iterations: usize,
    /// Number of times an empty cluster was reseeded with the worst-fitting point.
    pub empty_cluster_repairs: usize,
}

/// D²-weighted seeding: the first centre is uniform, later ones are drawn with probability
/// proportional to the squared distance to the nearest chosen centre.
fn seed_centroids(data: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut chosen = vec![rng.random_range(0..data.len())];
    let mut d2: Vec<f64> = data.iter().map(|p| squared_distance(p, &data[chosen[0]])).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // every remaining point duplicates a centre
            (0..data.len()).find(|i| !chosen.contains(i)).expect("n >= k")
        };
        chosen.push(next);
        for (w, p) in d2.iter_mut().zip(data) {
            *w = w.min(squared_distance(p, &data[next]));
        }
    }
    chosen
}

/// Moves the worst-fitting point of a multi-member cluster into each empty cluster.
fn repair_empty(data: &[Vec<f64>], assignments: &mut [usize], centroids: &[Vec<f64>], k: usize) -> usize {
    let mut repairs = 0;
    loop {
        let mut counts = vec![0usize; k];
        assignments.iter().for_each(|&j| counts[j] += 1);
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return repairs;
        };
        let donor = (0..data.len())
            .filter(|&i| counts[assignments[i]] > 1)
            .map(|i| (i, squared_distance(&data[i], &centroids[assignments[i]])))
            .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        match donor {
            Some((i, _)) => {
                assignments[i] = empty;
                repairs += 1;
            }
            None => return repairs,
        }
    }
}

/// Lloyd's algorithm from D² seeding. Stops when assignments stop changing or after
/// `max_iters` centroid updates.
pub fn kmeans_batch(data: &[Vec<f64>], k: usize, max_iters: usize, seed: u64) -> Result<KMeansFit, ClusterError> {
    if k < 2 {
        return Err(ClusterError::InvalidK(k));
    }
    if data.len() < k {
        return Err(ClusterError::InsufficientData { n: data.len(), k });
    }
    let dim = data[0].len();
    if let Some(p) = data.iter().find(|p| p.len() != dim) {
        return Err(ClusterError::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = seed_centroids(data, k, &mut rng)
        .into_iter()
        .map(|i| data[i].clone())
        .collect();
    let mut assignments: Vec<usize> = data.iter().map(|p| nearest(&centroids, p).0).collect();
    let mut loss_history = Vec::new();
    let mut repairs = 0;
    let mut iterations = 0;

    while iterations < max_iters.max(1) {
        iterations += 1;
        repairs += repair_empty(data, &mut assignments, &centroids, k);
        let model = ClusterModel::from_assignments(data, &assignments, centroids.clone())?;
        centroids = model.centroids().to_vec();
        loss_history.push(model.loss(data, &assignments));

        let next: Vec<usize> = data.iter().map(|p| nearest(&centroids, p).0).collect();
        if next == assignments {
            break;
        }
        assignments = next;
    }

    repairs += repair_empty(data, &mut assignments, &centroids, k);
    let model = ClusterModel::from_assignments(data, &assignments, centroids)?;
    Ok(KMeansFit {
        model,
        assignments,
        loss_history,
        iterations,
        empty_cluster_repairs: repairs,
    })
}
