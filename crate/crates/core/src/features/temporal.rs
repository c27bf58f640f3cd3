use crate::audio::FrameSequence;

use super::FeatureError;

/// Fraction of adjacent sample pairs with strictly opposite signs.
pub fn zero_crossing_rate(frame: &[f64]) -> f64 {
    if frame.len() < 2 {
        return 0.0;
    }
    let crossings = frame
        .windows(2)
        .filter(|w| (w[0] > 0.0 && w[1] < 0.0) || (w[0] < 0.0 && w[1] > 0.0))
        .count();
    crossings as f64 / (frame.len() - 1) as f64
}

/// First difference of the per-frame zero-crossing rate.
pub fn delta_zero_crossing(frames: &FrameSequence) -> Result<Vec<f64>, FeatureError> {
    if frames.len() < 2 {
        return Err(FeatureError::TooFewFrames(frames.len()));
    }
    let rates: Vec<f64> = frames.frames().iter().map(|f| zero_crossing_rate(f)).collect();
    Ok(first_difference(&rates))
}

pub fn first_difference(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Mean squared approximation and detail coefficients of a one-level orthonormal Haar
/// transform. Odd-length frames are padded with one zero.
pub fn haar_features(frame: &[f64]) -> (f64, f64) {
    if frame.is_empty() {
        return (0.0, 0.0);
    }
    let pairs = frame.len().div_ceil(2);
    let (mut approx, mut detail) = (0.0, 0.0);
    for i in 0..pairs {
        let a = frame[2 * i];
        let b = frame.get(2 * i + 1).copied().unwrap_or(0.0);
        approx += (a + b) * (a + b) / 2.0;
        detail += (a - b) * (a - b) / 2.0;
    }
    (approx / pairs as f64, detail / pairs as f64)
}

/// Root-mean-square amplitude.
pub fn loudness(frame: &[f64]) -> f64 {
    if frame.is_empty() {
        return 0.0;
    }
    (frame.iter().map(|x| x * x).sum::<f64>() / frame.len() as f64).sqrt()
}

/// Short-time energy: sum of squared samples.
pub fn energy(frame: &[f64]) -> f64 {
    frame.iter().map(|x| x * x).sum()
}
