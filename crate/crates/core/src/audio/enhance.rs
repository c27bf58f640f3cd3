//! DC removal, adaptive line enhancement and peak normalization.

use serde::{Deserialize, Serialize};

use super::AudioClip;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    /// Run the NLMS line enhancer. Disabling leaves DC removal and normalization only.
    pub enhance: bool,
    pub filter_order: usize,
    pub step_size: f64,
    /// Decorrelation delay of the reference tap line, in samples.
    pub delay: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            enhance: true,
            filter_order: 32,
            step_size: 0.1,
            delay: 1,
        }
    }
}

/// Normalized LMS predictor fed with a delayed copy of its own input.
///
/// Periodic components stay correlated across the delay and are predicted; broadband noise is
/// not, so the prediction is the enhanced signal.
#[derive(Debug, Clone)]
pub struct NlmsLineEnhancer {
    weights: Vec<f64>,
    history: Vec<f64>,
    step_size: f64,
    delay: usize,
}

const NLMS_REGULARIZER: f64 = 1e-8;

/// Peaks below this after DC removal are rounding residue and count as silence.
const SILENCE_PEAK: f64 = 1e-9;

impl NlmsLineEnhancer {
    pub fn new(order: usize, step_size: f64, delay: usize) -> Self {
        let order = order.max(1);
        let delay = delay.max(1);
        Self {
            weights: vec![0.0; order],
            // history[0] is x[n-1]
            history: vec![0.0; order + delay - 1],
            step_size,
            delay,
        }
    }

    /// Consumes one input sample and returns the prediction of it.
    pub fn process(&mut self, input: f64) -> f64 {
        let reference = &self.history[self.delay - 1..];
        let prediction: f64 = self.weights.iter().zip(reference).map(|(w, r)| w * r).sum();
        let power: f64 = reference.iter().map(|r| r * r).sum();
        let gain = self.step_size * (input - prediction) / (NLMS_REGULARIZER + power);
        for (w, r) in self.weights.iter_mut().zip(reference) {
            *w += gain * r;
        }
        self.history.rotate_right(1);
        self.history[0] = input;
        prediction
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn remove_mean(samples: &mut [f64]) {
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    samples.iter_mut().for_each(|s| *s -= mean);
}

/// Removes DC, denoises with an [`NlmsLineEnhancer`] and peak-normalizes to 1.
///
/// Silent input (nothing left after DC removal) is returned as zeros.
pub fn preprocess(clip: &AudioClip, cfg: &PreprocessConfig) -> AudioClip {
    let mut samples = clip.samples().to_vec();
    remove_mean(&mut samples);

    if cfg.enhance {
        let mut ale = NlmsLineEnhancer::new(cfg.filter_order, cfg.step_size, cfg.delay);
        samples = samples.iter().map(|&x| ale.process(x)).collect();
        remove_mean(&mut samples);
    }

    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if peak > SILENCE_PEAK && peak.is_finite() {
        samples.iter_mut().for_each(|s| *s = (*s / peak).clamp(-1.0, 1.0));
    } else {
        samples.iter_mut().for_each(|s| *s = 0.0);
    }
    clip.with_samples(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn clip(samples: Vec<f64>) -> AudioClip {
        AudioClip::new("t", samples, 16000, None).unwrap()
    }

    #[test]
    fn constant_becomes_zero() {
        let out = preprocess(&clip(vec![0.3; 4000]), &PreprocessConfig::default());
        assert!(out.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn silence_is_fixed_point() {
        let out = preprocess(&clip(vec![0.0; 4000]), &PreprocessConfig::default());
        assert!(out.samples().iter().all(|&s| s == 0.0));
    }

    #[test]
    fn output_is_zero_mean_and_unit_peak() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..8000)
            .map(|i| 0.2 + 0.3 * (2.0 * PI * 150.0 * i as f64 / 16000.0).sin() + 0.1 * (rng.random::<f64>() - 0.5))
            .collect();
        let out = preprocess(&clip(x), &PreprocessConfig::default());
        let mean = out.samples().iter().sum::<f64>() / out.len() as f64;
        assert!(mean.abs() < 1e-6);
        let peak = out.samples().iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert!((peak - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enhancer_learns_a_sinusoid() {
        let mut ale = NlmsLineEnhancer::new(32, 0.1, 1);
        let mut err = 0.0;
        for i in 0..20000 {
            let x = (2.0 * PI * 300.0 * i as f64 / 16000.0).sin();
            let y = ale.process(x);
            if i >= 19000 {
                err += (x - y).powi(2);
            }
        }
        assert!(err / 1000.0 < 1e-4, "residual power {}", err / 1000.0);
    }
}
