use super::{BpClass, ClusterError};

/// Binary outcome tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl ConfusionCounts {
    /// `(tp + tn) / (tp + tn + fp + fn)`; zero when there is nothing to count.
    pub fn fitness(&self) -> f64 {
        let total = self.tp + self.tn + self.fp + self.fn_;
        if total == 0 {
            0.0
        } else {
            (self.tp + self.tn) as f64 / total as f64
        }
    }
}

/// Tallies summed over one-vs-rest splits of every label in `0..n_labels`.
///
/// With two labels this collapses to ordinary binary counts doubled, so the fitness equals
/// plain accuracy.
pub fn one_vs_rest_counts(predicted: &[usize], truth: &[usize], n_labels: usize) -> Result<ConfusionCounts, ClusterError> {
    if predicted.len() != truth.len() {
        return Err(ClusterError::LengthMismatch(predicted.len(), truth.len()));
    }
    if predicted.is_empty() {
        return Err(ClusterError::Empty);
    }
    let mut c = ConfusionCounts::default();
    for label in 0..n_labels {
        for (&p, &t) in predicted.iter().zip(truth) {
            match (p == label, t == label) {
                (true, true) => c.tp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
            }
        }
    }
    Ok(c)
}

/// Clustering fitness over the three blood-pressure classes, in `[0, 1]`.
pub fn accuracy_fitness(predicted: &[BpClass], truth: &[BpClass]) -> Result<f64, ClusterError> {
    let p: Vec<usize> = predicted.iter().map(|c| c.index()).collect();
    let t: Vec<usize> = truth.iter().map(|c| c.index()).collect();
    Ok(one_vs_rest_counts(&p, &t, BpClass::ALL.len())?.fitness())
}

/// Cluster-to-class mapping by majority vote.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMap {
    pub classes: Vec<BpClass>,
    /// Clusters with no training members; they get the overall most frequent class.
    pub degenerate: Vec<usize>,
}

/// Ties go to the lower class index.
pub fn majority_class_map(assignments: &[usize], truth: &[BpClass], k: usize) -> ClassMap {
    let mut votes = vec![[0usize; 3]; k];
    let mut overall = [0usize; 3];
    for (&j, &c) in assignments.iter().zip(truth) {
        votes[j][c.index()] += 1;
        overall[c.index()] += 1;
    }
    let argmax = |v: &[usize; 3]| {
        let mut best = 0;
        for i in 1..3 {
            if v[i] > v[best] {
                best = i;
            }
        }
        BpClass::ALL[best]
    };
    let fallback = argmax(&overall);
    let mut degenerate = Vec::new();
    let classes = votes
        .iter()
        .enumerate()
        .map(|(j, v)| {
            if v.iter().sum::<usize>() == 0 {
                degenerate.push(j);
                fallback
            } else {
                argmax(v)
            }
        })
        .collect();
    ClassMap { classes, degenerate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use BpClass::*;

    #[test]
    fn counts_arithmetic() {
        let c = ConfusionCounts {
            tp: 8,
            tn: 7,
            fp: 3,
            fn_: 2,
        };
        assert_eq!(c.fitness(), 0.75);
    }

    #[test]
    fn perfect_prediction() {
        let t = [Low, Normal, High, High, Normal];
        assert_eq!(accuracy_fitness(&t, &t).unwrap(), 1.0);
    }

    #[test]
    fn three_class_confusion_matches_hand_tally() {
        // rows = truth, columns = predicted: [[2,1,0],[0,3,0],[1,0,3]]
        let mut truth = vec![];
        let mut pred = vec![];
        for (t, row) in [[2, 1, 0], [0, 3, 0], [1, 0, 3]].iter().enumerate() {
            for (p, &n) in row.iter().enumerate() {
                for _ in 0..n {
                    truth.push(BpClass::ALL[t]);
                    pred.push(BpClass::ALL[p]);
                }
            }
        }
        assert_eq!(truth.len(), 10);
        // hand tally per class (tp, fp, fn, tn):
        //   Low:    2, 1, 1, 6
        //   Normal: 3, 1, 0, 6
        //   High:   3, 0, 1, 6
        let hand = ConfusionCounts {
            tp: 8,
            fp: 2,
            fn_: 2,
            tn: 18,
        };
        let p: Vec<usize> = pred.iter().map(|c| c.index()).collect();
        let t: Vec<usize> = truth.iter().map(|c| c.index()).collect();
        assert_eq!(one_vs_rest_counts(&p, &t, 3).unwrap(), hand);
        assert!((accuracy_fitness(&pred, &truth).unwrap() - 26.0 / 30.0).abs() < 1e-15);
    }

    #[test]
    fn two_labels_reduce_to_plain_accuracy() {
        let p = [0, 1, 1, 0, 1, 1, 0];
        let t = [0, 1, 0, 0, 1, 0, 1];
        let plain = p.iter().zip(&t).filter(|(a, b)| a == b).count() as f64 / 7.0;
        assert!((one_vs_rest_counts(&p, &t, 2).unwrap().fitness() - plain).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_and_empty() {
        assert!(matches!(accuracy_fitness(&[Low], &[Low, High]), Err(ClusterError::LengthMismatch(1, 2))));
        assert!(matches!(accuracy_fitness(&[], &[]), Err(ClusterError::Empty)));
    }

    #[test]
    fn majority_mapping() {
        let assign = [0, 0, 0, 1, 1, 2];
        let truth = [High, High, Low, Normal, Low, Normal];
        let m = majority_class_map(&assign, &truth, 4);
        // cluster 1 ties Normal/Low -> lower index (Low)
        assert_eq!(m.classes, vec![High, Low, Normal, Low]);
        // empty cluster 3 -> overall most frequent; Low, Normal and High tie at 2 -> Low
        assert_eq!(m.degenerate, vec![3]);
    }
}
