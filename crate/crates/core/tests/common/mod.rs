//! Signal generators and reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn sine(freq_hz: f64, fs: f64, n: usize, amplitude: f64) -> Vec<f64> {
    (0..n).map(|i| amplitude * (TAU * freq_hz * i as f64 / fs).sin()).collect()
}

pub fn gaussian_noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Normal::new(0.0, sigma).unwrap();
    (0..n).map(|_| d.sample(&mut rng)).collect()
}

/// Denominator `[1, a1, …, a4]` of an all-pole filter with a conjugate pole pair per resonance.
pub fn two_resonance_denominator(centres_hz: [f64; 2], bandwidth_hz: f64, fs: f64) -> Vec<f64> {
    let r = (-PI * bandwidth_hz / fs).exp();
    let section = |f: f64| [1.0, -2.0 * r * (TAU * f / fs).cos(), r * r];
    let (a, b) = (section(centres_hz[0]), section(centres_hz[1]));
    let mut out = vec![0.0; 5];
    for i in 0..3 {
        for j in 0..3 {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// Drives the all-pole filter with a pitch-rate impulse train plus a little noise and returns
/// `n` samples after the start-up transient.
pub fn two_resonance_signal(centres_hz: [f64; 2], bandwidth_hz: f64, fs: f64, pitch_hz: f64, n: usize, seed: u64) -> Vec<f64> {
    let a = two_resonance_denominator(centres_hz, bandwidth_hz, fs);
    let skip = 4000;
    let period = (fs / pitch_hz).round() as usize;
    let noise = gaussian_noise(n + skip, 1e-3, seed);
    let mut y = vec![0.0; n + skip];
    for i in 0..y.len() {
        let excitation = if i % period == 0 { 1.0 } else { 0.0 } + noise[i];
        let feedback: f64 = (1..a.len()).filter(|&k| k <= i).map(|k| a[k] * y[i - k]).sum();
        y[i] = excitation - feedback;
    }
    let tail = y[skip..].to_vec();
    let peak = tail.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    tail.into_iter().map(|x| 0.5 * x / peak).collect()
}

/// Roots of `c[0] zⁿ + … + c[n]` as eigenvalues of the companion matrix.
pub fn companion_roots(coeffs_high_first: &[f64]) -> Vec<Complex64> {
    let n = coeffs_high_first.len() - 1;
    let lead = coeffs_high_first[0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs_high_first[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect()
}

/// Upper-half-plane roots as (frequency, bandwidth) in Hz, ascending by frequency.
pub fn resonances(roots: &[Complex64], fs: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = roots
        .iter()
        .filter(|z| z.im > 1e-12)
        .map(|z| (z.arg() * fs / TAU, -fs / PI * z.norm().ln()))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Power-weighted SNR of `signal` against `clean` after the least-squares gain is removed.
pub fn snr_db(signal: &[f64], clean: &[f64]) -> f64 {
    let gain = signal.iter().zip(clean).map(|(s, c)| s * c).sum::<f64>() / clean.iter().map(|c| c * c).sum::<f64>();
    let power: f64 = clean.iter().map(|c| (gain * c).powi(2)).sum();
    let error: f64 = signal.iter().zip(clean).map(|(s, c)| (s - gain * c).powi(2)).sum();
    10.0 * (power / error).log10()
}
