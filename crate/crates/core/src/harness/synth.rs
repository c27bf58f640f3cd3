use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{DatasetManifest, HarnessError, ManifestRow, Sex};
use crate::audio::write_wav;
use crate::clustering::BpClass;

/// Source and vocal-tract parameters for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassVoice {
    pub pitch_hz: f64,
    pub formant1_hz: f64,
    pub formant2_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub clips_per_class: usize,
    pub duration_s: f64,
    pub sample_rate_hz: u32,
    /// Standard deviation of additive white noise, relative to full scale.
    pub noise_level: f64,
    /// Per-clip relative spread of pitch and formants around the class values.
    pub jitter: f64,
    pub low: ClassVoice,
    pub normal: ClassVoice,
    pub high: ClassVoice,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            clips_per_class: 10,
            duration_s: 1.0,
            sample_rate_hz: 16_000,
            noise_level: 0.01,
            jitter: 0.04,
            low: ClassVoice {
                pitch_hz: 110.0,
                formant1_hz: 500.0,
                formant2_hz: 1000.0,
            },
            normal: ClassVoice {
                pitch_hz: 160.0,
                formant1_hz: 700.0,
                formant2_hz: 1300.0,
            },
            high: ClassVoice {
                pitch_hz: 230.0,
                formant1_hz: 900.0,
                formant2_hz: 1700.0,
            },
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn voice(&self, class: BpClass) -> ClassVoice {
        match class {
            BpClass::Low => self.low,
            BpClass::Normal => self.normal,
            BpClass::High => self.high,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.clips_per_class == 0 {
            return bad("clips_per_class must be positive".into());
        }
        if !(self.duration_s >= 0.1 && self.duration_s <= 60.0) {
            return bad(format!("duration {} s outside 0.1..60", self.duration_s));
        }
        if self.sample_rate_hz < crate::audio::MIN_SAMPLE_RATE_HZ {
            return bad(format!("sample rate {} Hz", self.sample_rate_hz));
        }
        if !(0.0..0.5).contains(&self.noise_level) || !(0.0..0.3).contains(&self.jitter) {
            return bad("noise_level must be in [0, 0.5) and jitter in [0, 0.3)".into());
        }
        let nyquist = f64::from(self.sample_rate_hz) / 2.0;
        for c in BpClass::ALL {
            let v = self.voice(c);
            let ok = (50.0..=500.0).contains(&v.pitch_hz)
                && v.formant1_hz > v.pitch_hz
                && v.formant2_hz > v.formant1_hz
                && v.formant2_hz * (1.0 + self.jitter) < 0.8 * nyquist;
            if !ok {
                return bad(format!("{} voice {:?} outside extractable range", c.name(), v));
            }
        }
        Ok(())
    }
}

/// Systolic and diastolic ranges, in whole mmHg, that fall inside each class.
fn label_band(class: BpClass) -> ((u32, u32), (u32, u32)) {
    match class {
        BpClass::Low => ((75, 88), (45, 58)),
        BpClass::Normal => ((95, 135), (62, 85)),
        BpClass::High => ((142, 175), (92, 110)),
    }
}

/// Two-pole resonator `y[n] = x[n] + 2r·cos θ·y[n−1] − r²·y[n−2]`.
fn resonate(input: &[f64], centre_hz: f64, bandwidth_hz: f64, fs: f64) -> Vec<f64> {
    let r = (-PI * bandwidth_hz / fs).exp();
    let a1 = 2.0 * r * (TAU * centre_hz / fs).cos();
    let a2 = -r * r;
    let (mut y1, mut y2) = (0.0, 0.0);
    input
        .iter()
        .map(|&x| {
            let y = x + a1 * y1 + a2 * y2;
            y2 = y1;
            y1 = y;
            y
        })
        .collect()
}

/// Impulse train with slow vibrato, shaped by two resonators, faded at the ends and scaled
/// to a 0.5 peak before noise is added.
fn render(voice: ClassVoice, spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let fs = f64::from(spec.sample_rate_hz);
    let n = (spec.duration_s * fs).round() as usize;
    let vibrato_phase = rng.random::<f64>() * TAU;
    let mut phase = rng.random::<f64>();
    let source: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            let f0 = voice.pitch_hz * (1.0 + 0.02 * (TAU * 5.0 * t + vibrato_phase).sin());
            phase += f0 / fs;
            if phase >= 1.0 {
                phase -= 1.0;
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let tract = resonate(&resonate(&source, voice.formant1_hz, 80.0, fs), voice.formant2_hz, 120.0, fs);

    let fade = ((0.02 * fs) as usize).min(n / 2).max(1);
    let shaped: Vec<f64> = tract
        .iter()
        .enumerate()
        .map(|(i, &x)| x * ((i.min(n - 1 - i) as f64) / fade as f64).min(1.0))
        .collect();
    let peak = shaped.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let gain = if peak > 0.0 { 0.5 / peak } else { 0.0 };
    let noise = Normal::new(0.0, spec.noise_level).expect("validated noise level");
    shaped
        .iter()
        .map(|&x| (x * gain + noise.sample(rng)).clamp(-1.0, 1.0))
        .collect()
}

/// Writes `clips_per_class` WAV files per class plus `manifest.csv` into `out_dir`.
///
/// Output bytes depend only on the spec.
pub fn generate_synthetic(spec: &SyntheticSpec, out_dir: impl AsRef<Path>) -> Result<DatasetManifest, HarnessError> {
    spec.validate()?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(HarnessError::io(out_dir))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::new();
    for class in BpClass::ALL {
        let base = spec.voice(class);
        let ((s_lo, s_hi), (d_lo, d_hi)) = label_band(class);
        for i in 0..spec.clips_per_class {
            let mut wobble = || 1.0 + spec.jitter * (2.0 * rng.random::<f64>() - 1.0);
            let voice = ClassVoice {
                pitch_hz: base.pitch_hz * wobble(),
                formant1_hz: base.formant1_hz * wobble(),
                formant2_hz: base.formant2_hz * wobble(),
            };
            let samples = render(voice, spec, &mut rng);
            let name = format!("{}_{i:03}.wav", class.name().to_lowercase());
            let path = out_dir.join(&name);
            write_wav(&path, &samples, spec.sample_rate_hz)?;
            rows.push(ManifestRow {
                clip_path: name.into(),
                systolic: f64::from(rng.random_range(s_lo..=s_hi)),
                diastolic: f64::from(rng.random_range(d_lo..=d_hi)),
                age: rng.random_range(20..=65),
                sex: if rng.random::<bool>() { Sex::F } else { Sex::M },
            });
        }
    }
    let manifest = DatasetManifest::new(rows, out_dir)?;
    manifest.write(out_dir.join("manifest.csv"))?;
    Ok(manifest)
}
