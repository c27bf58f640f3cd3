//! Per-frame speech descriptors and their clip-level aggregate.

mod formant;
mod periodicity;
mod spectral;
mod temporal;

pub use formant::{
    formant_lpc_order, formants, polynomial_roots, pre_emphasize, Formant, FormantConfig, FormantSet, Lpc,
};
pub use periodicity::{harmonic_ratio, lag_range, normalized_autocorrelation, pitch, Pitch, PitchRange};
pub use spectral::{
    dct2, hamming, hann, hz_to_mel, mel_cepstrum, mel_to_hz, spectral_centroid, spectral_entropy, MelFilterbank,
    PowerSpectrum, LOG_FLOOR,
};
pub use temporal::{delta_zero_crossing, energy, first_difference, haar_features, loudness, zero_crossing_rate};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audio::{frame, ms_to_samples, AudioClip, AudioError};

/// Number of cepstral coefficients kept per frame.
pub const MFCC_COUNT: usize = 13;
/// Length of a flattened [`FeatureVector`].
pub const FEATURE_COUNT: usize = 7 + MFCC_COUNT + 5 + 6;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("need at least two frames, got {0}")]
    TooFewFrames(usize),
    #[error("clip {0} has no voiced frames")]
    NoVoicedFrames(String),
    #[error("fewer than two formants found")]
    NoFormantsFound,
    #[error(transparent)]
    Audio(#[from] AudioError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub mel_filters: usize,
    pub pitch: PitchRange,
    pub formant: FormantConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            mel_filters: 26,
            pitch: PitchRange::default(),
            formant: FormantConfig::default(),
        }
    }
}

/// Clip-level descriptor in a fixed order (see [`FeatureVector::NAMES`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub zcr: f64,
    pub delta_zcr: f64,
    pub haar_energy_approx: f64,
    pub haar_energy_detail: f64,
    pub pitch_hz: f64,
    pub loudness_rms: f64,
    pub spectral_entropy: f64,
    /// Mel cepstral coefficients; the first three are `mfcc1..mfcc3`.
    pub mel_lpc: [f64; MFCC_COUNT],
    pub variance: f64,
    pub mean: f64,
    pub harmonic_ratio: f64,
    pub spectral_centroid_hz: f64,
    pub energy: f64,
    pub formant1_hz: f64,
    pub formant2_hz: f64,
    pub formant1_amp: f64,
    pub formant2_amp: f64,
    pub formant1_bw: f64,
    pub formant2_bw: f64,
}

impl FeatureVector {
    pub const NAMES: [&'static str; FEATURE_COUNT] = [
        "zcr",
        "delta_zcr",
        "haar_energy_approx",
        "haar_energy_detail",
        "pitch_hz",
        "loudness_rms",
        "spectral_entropy",
        "mfcc1",
        "mfcc2",
        "mfcc3",
        "mfcc4",
        "mfcc5",
        "mfcc6",
        "mfcc7",
        "mfcc8",
        "mfcc9",
        "mfcc10",
        "mfcc11",
        "mfcc12",
        "mfcc13",
        "variance",
        "mean",
        "harmonic_ratio",
        "spectral_centroid_hz",
        "energy",
        "formant1_hz",
        "formant2_hz",
        "formant1_amp",
        "formant2_amp",
        "formant1_bw",
        "formant2_bw",
    ];

    pub fn mfcc(&self, i: usize) -> f64 {
        self.mel_lpc[i]
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(FEATURE_COUNT);
        v.extend([
            self.zcr,
            self.delta_zcr,
            self.haar_energy_approx,
            self.haar_energy_detail,
            self.pitch_hz,
            self.loudness_rms,
            self.spectral_entropy,
        ]);
        v.extend(self.mel_lpc);
        v.extend([
            self.variance,
            self.mean,
            self.harmonic_ratio,
            self.spectral_centroid_hz,
            self.energy,
            self.formant1_hz,
            self.formant2_hz,
            self.formant1_amp,
            self.formant2_amp,
            self.formant1_bw,
            self.formant2_bw,
        ]);
        v
    }

    pub fn is_finite(&self) -> bool {
        self.to_vec().iter().all(|x| x.is_finite())
    }
}

/// Mean formant measurements over the frames where formants were found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormantSummary {
    pub first: Formant,
    pub second: Formant,
}

/// Output of [`extract_feature_vector`]: everything but the formants is final.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipFeatures {
    pub id: String,
    pub voiced_frames: usize,
    pub total_frames: usize,
    /// `None` when no voiced frame yielded two formants; filled by [`impute_formants`].
    pub formants: Option<FormantSummary>,
    partial: FeatureVector,
}

impl ClipFeatures {
    /// The vector with whatever formants were measured, or `None` if they still need imputing.
    pub fn complete(&self) -> Option<FeatureVector> {
        self.formants.map(|f| with_formants(&self.partial, &f))
    }
}

fn with_formants(v: &FeatureVector, f: &FormantSummary) -> FeatureVector {
    FeatureVector {
        formant1_hz: f.first.frequency_hz,
        formant2_hz: f.second.frequency_hz,
        formant1_amp: f.first.amplitude,
        formant2_amp: f.second.amplitude,
        formant1_bw: f.first.bandwidth_hz,
        formant2_bw: f.second.bandwidth_hz,
        ..v.clone()
    }
}

#[derive(Default)]
struct Accumulator {
    sums: Vec<f64>,
    n: usize,
}

impl Accumulator {
    fn push(&mut self, values: &[f64]) {
        if self.sums.is_empty() {
            self.sums = vec![0.0; values.len()];
        }
        self.sums.iter_mut().zip(values).for_each(|(s, v)| *s += v);
        self.n += 1;
    }

    fn mean(&self) -> Vec<f64> {
        self.sums.iter().map(|s| s / self.n as f64).collect()
    }
}

/// Computes the clip descriptor from voiced frames, averaging per-frame values.
///
/// `variance` is the variance of the raw samples and `mean` the mean absolute sample.
/// `delta_zcr` is the mean absolute frame-to-frame change in zero-crossing rate over the whole
/// frame sequence.
pub fn extract_feature_vector(clip: &AudioClip, cfg: &FeatureConfig) -> Result<ClipFeatures, FeatureError> {
    let fs = clip.sample_rate_hz();
    let frames = frame(clip, ms_to_samples(cfg.frame_ms, fs), ms_to_samples(cfg.hop_ms, fs))?;
    let bank = MelFilterbank::new(cfg.mel_filters, f64::from(fs));

    let delta_zcr = match delta_zero_crossing(&frames) {
        Ok(d) => d.iter().map(|x| x.abs()).sum::<f64>() / d.len() as f64,
        Err(FeatureError::TooFewFrames(_)) => 0.0,
        Err(e) => return Err(e),
    };

    let mut frame_stats = Accumulator::default();
    let mut formant_stats = Accumulator::default();
    for f in frames.frames() {
        let Pitch::Voiced(pitch_hz) = pitch(f, fs, &cfg.pitch) else {
            continue;
        };
        let spec = PowerSpectrum::of(f, fs);
        let (approx, detail) = haar_features(f);
        let mut row = vec![
            zero_crossing_rate(f),
            approx,
            detail,
            pitch_hz,
            loudness(f),
            spectral::entropy_of(&spec),
            harmonic_ratio(f, fs, &cfg.pitch),
            spectral::centroid_of(&spec),
            energy(f),
        ];
        row.extend(spectral::cepstrum_of(&spec, &bank, MFCC_COUNT));
        frame_stats.push(&row);

        if let Ok(set) = formants(f, fs, &cfg.formant) {
            let (a, b) = (set.first(), set.second());
            formant_stats.push(&[
                a.frequency_hz,
                a.amplitude,
                a.bandwidth_hz,
                b.frequency_hz,
                b.amplitude,
                b.bandwidth_hz,
            ]);
        }
    }
    if frame_stats.n == 0 {
        return Err(FeatureError::NoVoicedFrames(clip.id.clone()));
    }

    let m = frame_stats.mean();
    let samples = clip.samples();
    let n = samples.len() as f64;
    let sample_mean = samples.iter().sum::<f64>() / n;
    let variance = samples.iter().map(|x| (x - sample_mean).powi(2)).sum::<f64>() / n;
    let mean_abs = samples.iter().map(|x| x.abs()).sum::<f64>() / n;

    let mut mel_lpc = [0.0; MFCC_COUNT];
    mel_lpc.copy_from_slice(&m[9..9 + MFCC_COUNT]);
    let partial = FeatureVector {
        zcr: m[0],
        delta_zcr,
        haar_energy_approx: m[1],
        haar_energy_detail: m[2],
        pitch_hz: m[3],
        loudness_rms: m[4],
        spectral_entropy: m[5],
        mel_lpc,
        variance,
        mean: mean_abs,
        harmonic_ratio: m[6],
        spectral_centroid_hz: m[7],
        energy: m[8],
        formant1_hz: f64::NAN,
        formant2_hz: f64::NAN,
        formant1_amp: f64::NAN,
        formant2_amp: f64::NAN,
        formant1_bw: f64::NAN,
        formant2_bw: f64::NAN,
    };
    let formants = (formant_stats.n > 0).then(|| {
        let f = formant_stats.mean();
        FormantSummary {
            first: Formant {
                frequency_hz: f[0],
                amplitude: f[1],
                bandwidth_hz: f[2],
            },
            second: Formant {
                frequency_hz: f[3],
                amplitude: f[4],
                bandwidth_hz: f[5],
            },
        }
    });
    Ok(ClipFeatures {
        id: clip.id.clone(),
        voiced_frames: frame_stats.n,
        total_frames: frames.len(),
        formants,
        partial,
    })
}

/// Mean formant summary over the clips in `reference` that have one.
pub fn mean_formants<'a>(reference: impl IntoIterator<Item = &'a ClipFeatures>) -> Option<FormantSummary> {
    let mut acc = Accumulator::default();
    for f in reference.into_iter().filter_map(|c| c.formants) {
        acc.push(&[
            f.first.frequency_hz,
            f.first.amplitude,
            f.first.bandwidth_hz,
            f.second.frequency_hz,
            f.second.amplitude,
            f.second.bandwidth_hz,
        ]);
    }
    (acc.n > 0).then(|| {
        let m = acc.mean();
        FormantSummary {
            first: Formant {
                frequency_hz: m[0],
                amplitude: m[1],
                bandwidth_hz: m[2],
            },
            second: Formant {
                frequency_hz: m[3],
                amplitude: m[4],
                bandwidth_hz: m[5],
            },
        }
    })
}

/// Fills missing formants with `fallback`, or with zeros if no clip in the run had any.
pub fn impute_formants(clips: &[ClipFeatures], fallback: Option<FormantSummary>) -> Vec<FeatureVector> {
    let zero = Formant {
        frequency_hz: 0.0,
        amplitude: 0.0,
        bandwidth_hz: 0.0,
    };
    let fallback = fallback.unwrap_or(FormantSummary {
        first: zero,
        second: zero,
    });
    clips
        .iter()
        .map(|c| with_formants(&c.partial, &c.formants.unwrap_or(fallback)))
        .collect()
}

/// Per-feature z-scoring with statistics frozen from a reference set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Features with zero spread keep unit scale.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let stds = (0..d)
            .map(|j| {
                let var = rows.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n;
                let sd = var.sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Self { means, stds }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(x, (m, s))| (x - m) / s)
            .collect()
    }
}

/// CSV header for a feature dump: clip id followed by [`FeatureVector::NAMES`].
pub fn csv_header() -> Vec<&'static str> {
    std::iter::once("clip_id").chain(FeatureVector::NAMES).collect()
}
