//! Windowed power spectra and the features derived from them.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Floor applied to mel energies before the logarithm.
pub const LOG_FLOOR: f64 = 1e-10;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn hann(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

pub fn hamming(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / (n - 1) as f64).cos())
        .collect()
}

/// One-sided power spectrum of a Hann-windowed frame.
#[derive(Debug, Clone)]
pub struct PowerSpectrum {
    pub power: Vec<f64>,
    pub fft_len: usize,
    pub sample_rate_hz: f64,
}

impl PowerSpectrum {
    /// Zero-pads to the next power of two.
    pub fn of(frame: &[f64], sample_rate_hz: u32) -> Self {
        let fft_len = frame.len().next_power_of_two().max(2);
        let window = hann(frame.len());
        let mut buf: Vec<Complex64> = frame
            .iter()
            .zip(&window)
            .map(|(x, w)| Complex64::new(x * w, 0.0))
            .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
            .take(fft_len)
            .collect();
        PLANNER.with(|p| p.borrow_mut().plan_fft_forward(fft_len).process(&mut buf));
        let power = buf[..=fft_len / 2].iter().map(|c| c.norm_sqr()).collect();
        Self {
            power,
            fft_len,
            sample_rate_hz: f64::from(sample_rate_hz),
        }
    }

    pub fn bin_hz(&self, bin: usize) -> f64 {
        bin as f64 * self.sample_rate_hz / self.fft_len as f64
    }

    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }
}

/// Shannon entropy of the normalized power spectrum divided by `ln(bins)`. Silence gives 0.
pub fn spectral_entropy(frame: &[f64], sample_rate_hz: u32) -> f64 {
    entropy_of(&PowerSpectrum::of(frame, sample_rate_hz))
}

pub(crate) fn entropy_of(spec: &PowerSpectrum) -> f64 {
    let total = spec.total();
    if total <= 0.0 || spec.power.len() < 2 {
        return 0.0;
    }
    let h: f64 = spec
        .power
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let q = p / total;
            -q * q.ln()
        })
        .sum();
    (h / (spec.power.len() as f64).ln()).clamp(0.0, 1.0)
}

/// Power-weighted mean frequency in Hz. Silence gives 0.
pub fn spectral_centroid(frame: &[f64], sample_rate_hz: u32) -> f64 {
    centroid_of(&PowerSpectrum::of(frame, sample_rate_hz))
}

pub(crate) fn centroid_of(spec: &PowerSpectrum) -> f64 {
    let total = spec.total();
    if total <= 0.0 {
        return 0.0;
    }
    spec.power
        .iter()
        .enumerate()
        .map(|(k, p)| spec.bin_hz(k) * p)
        .sum::<f64>()
        / total
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters equally spaced on the mel scale between 0 Hz and Nyquist.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    /// `edges[m]..edges[m + 2]` is the support of filter `m`, peaking at `edges[m + 1]`.
    edges_hz: Vec<f64>,
}

impl MelFilterbank {
    pub fn new(n_filters: usize, sample_rate_hz: f64) -> Self {
        let top = hz_to_mel(sample_rate_hz / 2.0);
        let edges_hz = (0..n_filters + 2)
            .map(|i| mel_to_hz(top * i as f64 / (n_filters + 1) as f64))
            .collect();
        Self { edges_hz }
    }

    pub fn len(&self) -> usize {
        self.edges_hz.len() - 2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self, filter: usize, hz: f64) -> f64 {
        let (lo, mid, hi) = (
            self.edges_hz[filter],
            self.edges_hz[filter + 1],
            self.edges_hz[filter + 2],
        );
        if hz <= lo || hz >= hi {
            0.0
        } else if hz <= mid {
            (hz - lo) / (mid - lo)
        } else {
            (hi - hz) / (hi - mid)
        }
    }

    pub fn energies(&self, spec: &PowerSpectrum) -> Vec<f64> {
        (0..self.len())
            .map(|m| {
                spec.power
                    .iter()
                    .enumerate()
                    .map(|(k, p)| self.weight(m, spec.bin_hz(k)) * p)
                    .sum()
            })
            .collect()
    }
}

/// Orthonormal DCT-II, keeping the first `n_out` coefficients.
pub fn dct2(input: &[f64], n_out: usize) -> Vec<f64> {
    let m = input.len() as f64;
    (0..n_out)
        .map(|i| {
            let scale = if i == 0 { (1.0 / m).sqrt() } else { (2.0 / m).sqrt() };
            scale
                * input
                    .iter()
                    .enumerate()
                    .map(|(j, x)| x * (PI * i as f64 * (j as f64 + 0.5) / m).cos())
                    .sum::<f64>()
        })
        .collect()
}

/// Mel cepstral coefficients: log mel energies (floored at [`LOG_FLOOR`]) through a DCT-II.
pub fn mel_cepstrum(frame: &[f64], sample_rate_hz: u32, n_filters: usize, n_coeffs: usize) -> Vec<f64> {
    let spec = PowerSpectrum::of(frame, sample_rate_hz);
    let bank = MelFilterbank::new(n_filters, spec.sample_rate_hz);
    cepstrum_of(&spec, &bank, n_coeffs)
}

pub(crate) fn cepstrum_of(spec: &PowerSpectrum, bank: &MelFilterbank, n_coeffs: usize) -> Vec<f64> {
    let logs: Vec<f64> = bank
        .energies(spec)
        .into_iter()
        .map(|e| e.max(LOG_FLOOR).ln())
        .collect();
    dct2(&logs, n_coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tone(hz: f64, fs: u32, n: usize) -> Vec<f64> {
        (0..n).map(|i| (2.0 * PI * hz * i as f64 / f64::from(fs)).sin()).collect()
    }

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
    }

    #[test]
    fn entropy_of_tone_is_low_and_noise_high() {
        let t = tone(1000.0, 16000, 1024);
        let spec = PowerSpectrum::of(&t, 16000);
        // one dominant region: the strongest bin sits at 1000 Hz
        let peak = spec
            .power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((spec.bin_hz(peak) - 1000.0).abs() < 16.0);
        assert!(spectral_entropy(&t, 16000) < 0.3);
        assert!(spectral_entropy(&noise(1, 1024), 16000) > 0.8);
        assert_eq!(spectral_entropy(&[0.0; 512], 16000), 0.0);
    }

    #[test]
    fn centroid_cases() {
        assert!((spectral_centroid(&tone(1000.0, 16000, 1024), 16000) - 1000.0).abs() < 20.0);
        assert_eq!(spectral_centroid(&[0.0; 256], 16000), 0.0);
        let two: Vec<f64> = tone(500.0, 16000, 2048)
            .iter()
            .zip(tone(1500.0, 16000, 2048))
            .map(|(a, b)| a + b)
            .collect();
        assert!((spectral_centroid(&two, 16000) - 1000.0).abs() < 20.0);
    }

    #[test]
    fn silent_cepstrum_is_constant_log_floor() {
        let c = mel_cepstrum(&[0.0; 400], 16000, 26, 13);
        assert!((c[0] - 26f64.sqrt() * LOG_FLOOR.ln()).abs() < 1e-9);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-9));
    }

    #[test]
    fn doubling_shifts_only_first_coefficient() {
        let frame: Vec<f64> = tone(310.0, 16000, 400)
            .iter()
            .zip(noise(4, 400))
            .map(|(a, b)| 0.4 * a + 0.05 * b)
            .collect();
        let doubled: Vec<f64> = frame.iter().map(|x| 2.0 * x).collect();
        let a = mel_cepstrum(&frame, 16000, 26, 13);
        let b = mel_cepstrum(&doubled, 16000, 26, 13);
        assert!((b[0] - a[0] - 26f64.sqrt() * 4f64.ln()).abs() < 1e-6);
        for i in 1..13 {
            assert!((a[i] - b[i]).abs() < 1e-6, "coefficient {i}");
        }
    }

    #[test]
    fn dct_of_constant_is_dc_only() {
        let c = dct2(&[2.0; 8], 8);
        assert!((c[0] - 2.0 * 8f64.sqrt()).abs() < 1e-12);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn mel_roundtrip() {
        for hz in [0.0, 100.0, 1000.0, 7999.0] {
            assert!((mel_to_hz(hz_to_mel(hz)) - hz).abs() < 1e-9);
        }
    }
}
