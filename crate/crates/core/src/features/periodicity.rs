//! Autocorrelation-based pitch and harmonicity.

use serde::{Deserialize, Serialize};

/// Pitch search band and voicing threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchRange {
    pub min_hz: f64,
    pub max_hz: f64,
    /// Minimum normalized autocorrelation peak for a frame to count as voiced.
    pub voicing_threshold: f64,
}

impl Default for PitchRange {
    fn default() -> Self {
        Self {
            min_hz: 50.0,
            max_hz: 500.0,
            voicing_threshold: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pitch {
    Voiced(f64),
    Unvoiced,
}

impl Pitch {
    pub fn hz(self) -> Option<f64> {
        match self {
            Pitch::Voiced(hz) => Some(hz),
            Pitch::Unvoiced => None,
        }
    }

    pub fn is_voiced(self) -> bool {
        matches!(self, Pitch::Voiced(_))
    }
}

/// Normalized autocorrelation
/// `Σ x[n]x[n+k] / sqrt(Σ x[n]² · Σ x[n+k]²)` over the overlapping part.
pub fn normalized_autocorrelation(frame: &[f64], lag: usize) -> f64 {
    if lag >= frame.len() {
        return 0.0;
    }
    let (head, tail) = (&frame[..frame.len() - lag], &frame[lag..]);
    let mut cross = 0.0;
    let mut e_head = 0.0;
    let mut e_tail = 0.0;
    for (a, b) in head.iter().zip(tail) {
        cross += a * b;
        e_head += a * a;
        e_tail += b * b;
    }
    let denom = (e_head * e_tail).sqrt();
    if denom > 0.0 {
        cross / denom
    } else {
        0.0
    }
}

/// Lags searched for a period. The longest lag is capped at half the frame so at least two
/// periods are always covered.
pub fn lag_range(frame_len: usize, sample_rate_hz: u32, range: &PitchRange) -> Option<(usize, usize)> {
    let fs = f64::from(sample_rate_hz);
    let lo = (fs / range.max_hz).floor().max(1.0) as usize;
    let hi = ((fs / range.min_hz).ceil() as usize).min(frame_len / 2);
    (lo < hi).then_some((lo, hi))
}

struct Correlogram {
    first_lag: usize,
    values: Vec<f64>,
}

impl Correlogram {
    fn new(frame: &[f64], sample_rate_hz: u32, range: &PitchRange) -> Option<Self> {
        let (lo, hi) = lag_range(frame.len(), sample_rate_hz, range)?;
        let values = (lo..=hi).map(|k| normalized_autocorrelation(frame, k)).collect();
        Some(Self { first_lag: lo, values })
    }

    fn peak(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Fundamental frequency from the normalized autocorrelation peak in the search band.
///
/// The chosen lag is the shortest local maximum within 90% of the global peak, which avoids
/// picking period multiples. Parabolic interpolation refines the lag.
pub fn pitch(frame: &[f64], sample_rate_hz: u32, range: &PitchRange) -> Pitch {
    let Some(cg) = Correlogram::new(frame, sample_rate_hz, range) else {
        return Pitch::Unvoiced;
    };
    let peak = cg.peak();
    if !(peak >= range.voicing_threshold) {
        return Pitch::Unvoiced;
    }
    let v = &cg.values;
    let last = v.len() - 1;
    let idx = (0..v.len())
        .find(|&i| {
            let left = if i == 0 { f64::NEG_INFINITY } else { v[i - 1] };
            let right = if i == last { f64::NEG_INFINITY } else { v[i + 1] };
            v[i] >= 0.9 * peak && v[i] >= left && v[i] >= right
        })
        .unwrap_or(0);

    let mut lag = (cg.first_lag + idx) as f64;
    if idx > 0 && idx < last {
        let (a, b, c) = (v[idx - 1], v[idx], v[idx + 1]);
        let curvature = a - 2.0 * b + c;
        if curvature < 0.0 {
            lag += 0.5 * (a - c) / curvature;
        }
    }
    Pitch::Voiced(f64::from(sample_rate_hz) / lag)
}

/// Largest normalized autocorrelation over the pitch lag band, clamped to `[0, 1]`.
pub fn harmonic_ratio(frame: &[f64], sample_rate_hz: u32, range: &PitchRange) -> f64 {
    Correlogram::new(frame, sample_rate_hz, range)
        .map(|cg| cg.peak().clamp(0.0, 1.0))
        .unwrap_or(0.0)
}
