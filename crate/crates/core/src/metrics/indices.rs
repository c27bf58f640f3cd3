use std::collections::BTreeMap;

use super::MetricError;
use crate::clustering::euclidean;

fn check_lengths(a: usize, b: usize) -> Result<(), MetricError> {
    if a != b {
        return Err(MetricError::LengthMismatch(a, b));
    }
    if a == 0 {
        return Err(MetricError::Empty);
    }
    Ok(())
}

/// Member indices per cluster id, in ascending id order.
fn groups(assignments: &[usize]) -> Vec<Vec<usize>> {
    let k = assignments.iter().max().map_or(0, |m| m + 1);
    let mut g = vec![Vec::new(); k];
    for (i, &j) in assignments.iter().enumerate() {
        g[j].push(i);
    }
    g.retain(|m| !m.is_empty());
    g
}

/// Lower is better. Empty clusters are skipped.
///
/// `centroids[j]` is the centre of cluster id `j`.
pub fn davies_bouldin(data: &[Vec<f64>], assignments: &[usize], centroids: &[Vec<f64>]) -> Result<f64, MetricError> {
    check_lengths(data.len(), assignments.len())?;
    if let Some(&j) = assignments.iter().find(|&&j| j >= centroids.len()) {
        return Err(MetricError::UnknownCluster(j));
    }
    let mut scatter = vec![0.0; centroids.len()];
    let mut size = vec![0usize; centroids.len()];
    for (p, &j) in data.iter().zip(assignments) {
        scatter[j] += euclidean(p, &centroids[j]);
        size[j] += 1;
    }
    let live: Vec<usize> = (0..centroids.len()).filter(|&j| size[j] > 0).collect();
    if live.len() < 2 {
        return Err(MetricError::TooFewClusters(live.len()));
    }
    for &j in &live {
        scatter[j] /= size[j] as f64;
    }
    let mut total = 0.0;
    for &i in &live {
        let mut worst = 0.0f64;
        for &j in live.iter().filter(|&&j| j != i) {
            let gap = euclidean(&centroids[i], &centroids[j]);
            if gap == 0.0 {
                return Err(MetricError::DegenerateClusters(i, j));
            }
            worst = worst.max((scatter[i] + scatter[j]) / gap);
        }
        total += worst;
    }
    Ok(total / live.len() as f64)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `(homogeneity, completeness)`.
///
/// A score whose reference entropy is zero is 1 by convention.
pub fn homogeneity_completeness<C: Ord, K: Ord>(truth: &[C], clusters: &[K]) -> Result<(f64, f64), MetricError> {
    check_lengths(truth.len(), clusters.len())?;
    let n = truth.len() as f64;
    let mut joint: BTreeMap<(&C, &K), usize> = BTreeMap::new();
    let mut by_class: BTreeMap<&C, usize> = BTreeMap::new();
    let mut by_cluster: BTreeMap<&K, usize> = BTreeMap::new();
    for (c, k) in truth.iter().zip(clusters) {
        *joint.entry((c, k)).or_default() += 1;
        *by_class.entry(c).or_default() += 1;
        *by_cluster.entry(k).or_default() += 1;
    }
    let h_class = entropy(by_class.values().copied(), n);
    let h_cluster = entropy(by_cluster.values().copied(), n);
    let (mut class_given_cluster, mut cluster_given_class) = (0.0, 0.0);
    for (&(c, k), &nck) in &joint {
        let p = nck as f64 / n;
        class_given_cluster -= p * (nck as f64 / by_cluster[k] as f64).ln();
        cluster_given_class -= p * (nck as f64 / by_class[c] as f64).ln();
    }
    let score = |cond: f64, reference: f64| {
        if reference <= 0.0 {
            1.0
        } else {
            (1.0 - cond / reference).clamp(0.0, 1.0)
        }
    };
    Ok((score(class_given_cluster, h_class), score(cluster_given_class, h_cluster)))
}

fn pairs(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

/// Pairwise co-membership Jaccard: pairs together in both partitions over pairs together in
/// either. Two partitions that never pair anything are identical, so that case scores 1.
pub fn jaccard_similarity<C: Ord, K: Ord>(truth: &[C], clusters: &[K]) -> Result<f64, MetricError> {
    check_lengths(truth.len(), clusters.len())?;
    if truth.len() < 2 {
        return Err(MetricError::Empty);
    }
    let mut joint: BTreeMap<(&C, &K), usize> = BTreeMap::new();
    let mut by_class: BTreeMap<&C, usize> = BTreeMap::new();
    let mut by_cluster: BTreeMap<&K, usize> = BTreeMap::new();
    for (c, k) in truth.iter().zip(clusters) {
        *joint.entry((c, k)).or_default() += 1;
        *by_class.entry(c).or_default() += 1;
        *by_cluster.entry(k).or_default() += 1;
    }
    let both: u64 = joint.values().map(|&n| pairs(n)).sum();
    let same_class: u64 = by_class.values().map(|&n| pairs(n)).sum();
    let same_cluster: u64 = by_cluster.values().map(|&n| pairs(n)).sum();
    let union = same_class + same_cluster - both;
    Ok(if union == 0 { 1.0 } else { both as f64 / union as f64 })
}

/// Mean silhouette over all points. Singleton members score 0, as do points with `a = b = 0`.
pub fn silhouette(data: &[Vec<f64>], assignments: &[usize]) -> Result<f64, MetricError> {
    check_lengths(data.len(), assignments.len())?;
    let g = groups(assignments);
    if g.len() < 2 {
        return Err(MetricError::TooFewClusters(g.len()));
    }
    let own: Vec<usize> = {
        let mut own = vec![0; data.len()];
        for (gi, members) in g.iter().enumerate() {
            members.iter().for_each(|&i| own[i] = gi);
        }
        own
    };
    let total: f64 = (0..data.len())
        .map(|i| {
            let mine = &g[own[i]];
            if mine.len() == 1 {
                return 0.0;
            }
            let mean_to = |members: &[usize]| members.iter().map(|&m| euclidean(&data[i], &data[m])).sum::<f64>();
            let a = mean_to(mine) / (mine.len() - 1) as f64;
            let b = g
                .iter()
                .enumerate()
                .filter(|&(gi, _)| gi != own[i])
                .map(|(_, m)| mean_to(m) / m.len() as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .sum();
    Ok(total / data.len() as f64)
}

/// Smallest between-cluster point distance over the largest within-cluster diameter.
pub fn dunn_index(data: &[Vec<f64>], assignments: &[usize]) -> Result<f64, MetricError> {
    check_lengths(data.len(), assignments.len())?;
    let g = groups(assignments);
    if g.len() < 2 {
        return Err(MetricError::TooFewClusters(g.len()));
    }
    let mut separation = f64::INFINITY;
    let mut diameter = 0.0f64;
    for i in 0..data.len() {
        for j in i + 1..data.len() {
            let d = euclidean(&data[i], &data[j]);
            if assignments[i] == assignments[j] {
                diameter = diameter.max(d);
            } else {
                separation = separation.min(d);
            }
        }
    }
    if diameter == 0.0 {
        return Err(MetricError::ZeroDiameter);
    }
    Ok(separation / diameter)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn davies_bouldin_cases() {
        let d = rows(&[0.0, 5.0]);
        assert_eq!(davies_bouldin(&d, &[0, 1], &d).unwrap(), 0.0);

        let d = rows(&[0.0, 2.0, 10.0, 12.0]);
        let c = rows(&[1.0, 11.0]);
        assert!((davies_bouldin(&d, &[0, 0, 1, 1], &c).unwrap() - 0.2).abs() < 1e-12);

        let c = rows(&[1.0, 1.0]);
        assert!(matches!(davies_bouldin(&d, &[0, 0, 1, 1], &c), Err(MetricError::DegenerateClusters(..))));
    }

    #[test]
    fn homogeneity_completeness_cases() {
        let (h, c) = homogeneity_completeness(&['A', 'B', 'C'], &[2, 0, 1]).unwrap();
        assert_eq!((h, c), (1.0, 1.0));

        let (h, c) = homogeneity_completeness(&['A', 'A', 'B', 'B'], &[0, 0, 0, 0]).unwrap();
        assert_eq!((h, c), (0.0, 1.0));

        // H(C|K) = 0, H(K|C) = 0.5 bits, H(K) = 1.5 bits → c = 1 − 0.5/1.5
        let (h, c) = homogeneity_completeness(&['A', 'A', 'B', 'B'], &[0, 0, 1, 2]).unwrap();
        assert!((h - 1.0).abs() < 1e-12);
        assert!((c - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn jaccard_cases() {
        let t = ['A', 'A', 'B', 'B'];
        assert_eq!(jaccard_similarity(&t, &[5, 5, 9, 9]).unwrap(), 1.0);
        assert_eq!(jaccard_similarity(&t, &[0, 1, 2, 3]).unwrap(), 0.0);
        assert_eq!(jaccard_similarity(&t, &[0, 0, 0, 1]).unwrap(), 0.25);
    }

    #[test]
    fn silhouette_cases() {
        let d = rows(&[0.0, 0.1, 10.0, 10.1]);
        // closed form: a = 0.1, b = mean(10, 10.1) or mean(9.9, 10)
        let s0 = (10.05 - 0.1) / 10.05;
        let s1 = (9.95 - 0.1) / 9.95;
        let expect = (2.0 * s0 + 2.0 * s1) / 4.0;
        let got = silhouette(&d, &[0, 0, 1, 1]).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!(got > 0.9);

        assert_eq!(silhouette(&d, &[0, 1, 2, 3]).unwrap(), 0.0);
        assert_eq!(silhouette(&rows(&[3.0; 4]), &[0, 0, 1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn dunn_cases() {
        let d = rows(&[0.0, 1.0, 10.0, 11.0]);
        assert_eq!(dunn_index(&d, &[0, 0, 1, 1]).unwrap(), 9.0);
        let d = rows(&[0.0, 1.0, 1.0, 2.0]);
        assert_eq!(dunn_index(&d, &[0, 0, 1, 1]).unwrap(), 0.0);
        assert!(matches!(dunn_index(&rows(&[0.0, 1.0]), &[0, 1]), Err(MetricError::ZeroDiameter)));
    }

    #[test]
    fn one_cluster_is_rejected() {
        let d = rows(&[0.0, 1.0]);
        assert!(matches!(silhouette(&d, &[0, 0]), Err(MetricError::TooFewClusters(1))));
        assert!(matches!(dunn_index(&d, &[1, 1]), Err(MetricError::TooFewClusters(1))));
    }
}
