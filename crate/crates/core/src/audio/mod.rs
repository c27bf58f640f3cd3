//! Speech recordings: loading, validation, denoising and framing.

mod enhance;
mod wav;

pub use enhance::{preprocess, NlmsLineEnhancer, PreprocessConfig};
pub use wav::{load_wav, read_wav, write_wav};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Lowest sample rate accepted for analysis.
pub const MIN_SAMPLE_RATE_HZ: u32 = 8000;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt audio file: {0}")]
    CorruptFile(String),
    #[error("invalid clip: {0}")]
    InvalidClip(String),
    #[error("invalid label: systolic {systolic} / diastolic {diastolic}")]
    InvalidLabel { systolic: f64, diastolic: f64 },
    #[error("invalid window: frame_len {frame_len}, hop {hop}, signal length {len}")]
    InvalidWindow {
        frame_len: usize,
        hop: usize,
        len: usize,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A cuff reading taken alongside a recording.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BpLabel {
    systolic_mmhg: f64,
    diastolic_mmhg: f64,
}

impl BpLabel {
    pub fn new(systolic_mmhg: f64, diastolic_mmhg: f64) -> Result<Self, AudioError> {
        let valid = systolic_mmhg.is_finite()
            && diastolic_mmhg.is_finite()
            && diastolic_mmhg > 0.0
            && systolic_mmhg > diastolic_mmhg;
        if !valid {
            return Err(AudioError::InvalidLabel {
                systolic: systolic_mmhg,
                diastolic: diastolic_mmhg,
            });
        }
        Ok(Self {
            systolic_mmhg,
            diastolic_mmhg,
        })
    }

    pub fn systolic_mmhg(&self) -> f64 {
        self.systolic_mmhg
    }

    pub fn diastolic_mmhg(&self) -> f64 {
        self.diastolic_mmhg
    }
}

/// A mono waveform with amplitudes in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
    pub id: String,
    pub label: Option<BpLabel>,
}

impl AudioClip {
    /// Validates and wraps a sample buffer.
    pub fn new(
        id: impl Into<String>,
        samples: Vec<f64>,
        sample_rate_hz: u32,
        label: Option<BpLabel>,
    ) -> Result<Self, AudioError> {
        if samples.is_empty() {
            return Err(AudioError::InvalidClip("no samples".into()));
        }
        if sample_rate_hz < MIN_SAMPLE_RATE_HZ {
            return Err(AudioError::InvalidClip(format!(
                "sample rate {sample_rate_hz} Hz below {MIN_SAMPLE_RATE_HZ} Hz"
            )));
        }
        if let Some(i) = samples
            .iter()
            .position(|s| !s.is_finite() || s.abs() > 1.0)
        {
            return Err(AudioError::InvalidClip(format!(
                "sample {i} = {} outside [-1, 1]",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            id: id.into(),
            label,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    /// Same metadata, new samples. Callers guarantee the range invariant.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert!(samples.iter().all(|s| s.is_finite() && s.abs() <= 1.0));
        Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
            id: self.id.clone(),
            label: self.label,
        }
    }
}

/// Fixed-length analysis windows cut from a clip.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    frames: Vec<Vec<f64>>,
    frame_len: usize,
    hop: usize,
    sample_rate_hz: u32,
}

impl FrameSequence {
    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Cuts `samples` into `⌊(N − frame_len)/hop⌋ + 1` windows; a trailing partial window is dropped.
pub fn frame_samples(
    samples: &[f64],
    sample_rate_hz: u32,
    frame_len: usize,
    hop: usize,
) -> Result<FrameSequence, AudioError> {
    let len = samples.len();
    if frame_len == 0 || hop == 0 || frame_len > len {
        return Err(AudioError::InvalidWindow {
            frame_len,
            hop,
            len,
        });
    }
    let count = (len - frame_len) / hop + 1;
    let frames = (0..count)
        .map(|i| samples[i * hop..i * hop + frame_len].to_vec())
        .collect();
    Ok(FrameSequence {
        frames,
        frame_len,
        hop,
        sample_rate_hz,
    })
}

pub fn frame(clip: &AudioClip, frame_len: usize, hop: usize) -> Result<FrameSequence, AudioError> {
    frame_samples(clip.samples(), clip.sample_rate_hz(), frame_len, hop)
}

/// Converts a duration in milliseconds to a whole number of samples (at least one).
pub fn ms_to_samples(ms: f64, sample_rate_hz: u32) -> usize {
    ((ms * f64::from(sample_rate_hz) / 1000.0).round() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn frame_counts() {
        let s = ramp(100);
        assert_eq!(frame_samples(&s, 8000, 100, 1).unwrap().len(), 1);
        let s = ramp(400);
        assert_eq!(frame_samples(&s, 8000, 200, 100).unwrap().len(), 3);
        let s = ramp(399);
        assert_eq!(frame_samples(&s, 8000, 200, 100).unwrap().len(), 2);
    }

    #[test]
    fn frame_rejects_bad_windows() {
        let s = ramp(50);
        for (len, hop) in [(0, 1), (10, 0), (51, 1)] {
            assert!(matches!(
                frame_samples(&s, 8000, len, hop),
                Err(AudioError::InvalidWindow { .. })
            ));
        }
    }

    #[test]
    fn non_overlapping_frames_rebuild_prefix() {
        let s = ramp(1037);
        let frames = frame_samples(&s, 8000, 64, 64).unwrap();
        let joined: Vec<f64> = frames.frames().iter().flatten().copied().collect();
        assert_eq!(joined.len(), 1024);
        assert_eq!(&joined[..], &s[..1024]);
    }

    #[test]
    fn clip_validation() {
        assert!(AudioClip::new("a", vec![], 16000, None).is_err());
        assert!(AudioClip::new("a", vec![0.0], 4000, None).is_err());
        assert!(AudioClip::new("a", vec![1.5], 16000, None).is_err());
        assert!(AudioClip::new("a", vec![f64::NAN], 16000, None).is_err());
        assert!(AudioClip::new("a", vec![-1.0, 1.0], 8000, None).is_ok());
    }

    #[test]
    fn label_ordering() {
        assert!(BpLabel::new(120.0, 80.0).is_ok());
        assert!(BpLabel::new(80.0, 80.0).is_err());
        assert!(BpLabel::new(80.0, 0.0).is_err());
        assert!(BpLabel::new(70.0, 90.0).is_err());
    }
}
