//! Position update formulas with every random coefficient passed in explicitly.
//!
//! Vectors are per-dimension; coefficient slices have the same length as positions.

/// Suspect exploration step: `x + a ∘ (x_d − (x_q + x_p)/2)`, `a ∈ [−1, 1]`.
pub fn first_suspect_move(x: &[f64], x_d: &[f64], x_q: &[f64], x_p: &[f64], a: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|l| x[l] + a[l] * (x_d[l] - (x_q[l] + x_p[l]) / 2.0))
        .collect()
}

/// Chance that each suspect takes the second step: `(worst − f)/(worst − best)`.
///
/// The best objective maps to 1 and the worst to 0. When every objective is equal all
/// probabilities are 1.
pub fn location_probability(objectives: &[f64]) -> Vec<f64> {
    let best = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    let worst = objectives.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = worst - best;
    objectives
        .iter()
        .map(|&f| {
            if spread > 0.0 {
                ((worst - f) / spread).clamp(0.0, 1.0)
            } else {
                1.0
            }
        })
        .collect()
}

/// Best-guided suspect step: `x_min + x_b + a5 ∘ (x_d − x_p)`, `a5 ∈ [0, 1]`.
pub fn second_suspect_move(x_min: &[f64], x_b: &[f64], x_d: &[f64], x_p: &[f64], a5: &[f64]) -> Vec<f64> {
    (0..x_min.len())
        .map(|l| x_min[l] + x_b[l] + a5[l] * (x_d[l] - x_p[l]))
        .collect()
}

/// Keeps `|a4| ≥ epsilon`, preserving sign (zero counts as positive).
pub fn guard_divisor(a4: f64, epsilon: f64) -> f64 {
    if a4.abs() >= epsilon {
        a4
    } else if a4 < 0.0 {
        -epsilon
    } else {
        epsilon
    }
}

/// Chaser pursuit step: `x + (a3 − 0.5)·2·m / a4` with `m` the chaser-team mean.
///
/// `a4` must already be guarded away from zero.
pub fn chaser_move(x: &[f64], chaser_mean: &[f64], a3: &[f64], a4: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|l| x[l] + (a3[l] - 0.5) * 2.0 * chaser_mean[l] / a4[l])
        .collect()
}

/// Instructor step: `x_te + a1 ∘ (x_te − t·μ)` with teaching factor `t ∈ {1, 2}`.
pub fn instructor_move(x_te: &[f64], mean: &[f64], teaching_factor: f64, a1: &[f64]) -> Vec<f64> {
    (0..x_te.len())
        .map(|l| x_te[l] + a1[l] * (x_te[l] - teaching_factor * mean[l]))
        .collect()
}

/// Learner step toward the instructor used by the instructor-only variant:
/// `x + a1 ∘ (x_te − t·μ)`.
pub fn learner_move(x: &[f64], x_te: &[f64], mean: &[f64], teaching_factor: f64, a1: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|l| x[l] + a1[l] * (x_te[l] - teaching_factor * mean[l]))
        .collect()
}

/// Equal-weight blend of the chaser and instructor positions.
pub fn combine(chaser: &[f64], instructor: &[f64]) -> Vec<f64> {
    chaser.iter().zip(instructor).map(|(a, b)| 0.5 * a + 0.5 * b).collect()
}

/// Per-dimension mean of a set of positions.
pub fn mean_position<'a>(positions: impl IntoIterator<Item = &'a [f64]>, dim: usize) -> Vec<f64> {
    let mut sum = vec![0.0; dim];
    let mut n = 0usize;
    for p in positions {
        sum.iter_mut().zip(p).for_each(|(s, v)| *s += v);
        n += 1;
    }
    if n > 0 {
        sum.iter_mut().for_each(|s| *s /= n as f64);
    }
    sum
}
