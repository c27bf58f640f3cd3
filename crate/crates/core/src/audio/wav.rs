//! Minimal RIFF/WAVE reader and writer for 16-bit PCM.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{AudioClip, AudioError};

const FORMAT_PCM: u16 = 1;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits_per_sample: u16,
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Loads a PCM-16 WAV file as a mono clip whose id is the file stem.
pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip, AudioError> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let (samples, rate) = read_wav(&bytes)?;
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    AudioClip::new(id, samples, rate, None)
}

/// Decodes an in-memory WAV image. Stereo is averaged to mono and samples are scaled by 2⁻¹⁵.
pub fn read_wav(bytes: &[u8]) -> Result<(Vec<f64>, u32), AudioError> {
    if bytes.len() < 12 {
        return Err(AudioError::CorruptFile("shorter than RIFF header".into()));
    }
    if &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(AudioError::UnsupportedFormat("not a RIFF/WAVE file".into()));
    }

    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return Err(AudioError::CorruptFile(format!("truncated chunk header at byte {pos}")));
        }
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| {
                AudioError::CorruptFile(format!(
                    "chunk {:?} claims {size} bytes, {} available",
                    String::from_utf8_lossy(id),
                    bytes.len() - body_start
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(AudioError::CorruptFile("fmt chunk too short".into()));
                }
                let mut format = u16_at(body, 0);
                if format == FORMAT_EXTENSIBLE && body.len() >= 26 {
                    // first two bytes of the sub-format GUID carry the real format tag
                    format = u16_at(body, 24);
                }
                fmt = Some(FmtChunk {
                    format,
                    channels: u16_at(body, 2),
                    sample_rate: u32_at(body, 4),
                    bits_per_sample: u16_at(body, 14),
                });
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are word aligned
        pos = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| AudioError::CorruptFile("missing fmt chunk".into()))?;
    let data = data.ok_or_else(|| AudioError::CorruptFile("missing data chunk".into()))?;
    if fmt.format != FORMAT_PCM {
        return Err(AudioError::UnsupportedFormat(format!("format tag {}", fmt.format)));
    }
    if fmt.bits_per_sample != 16 {
        return Err(AudioError::UnsupportedFormat(format!(
            "{}-bit samples",
            fmt.bits_per_sample
        )));
    }
    let channels = usize::from(fmt.channels);
    if !(1..=2).contains(&channels) {
        return Err(AudioError::UnsupportedFormat(format!("{channels} channels")));
    }
    let block = 2 * channels;
    if data.len() % block != 0 {
        return Err(AudioError::CorruptFile("data chunk ends mid-frame".into()));
    }

    let samples = data
        .chunks_exact(block)
        .map(|frame| {
            let sum: f64 = frame
                .chunks_exact(2)
                .map(|s| f64::from(i16::from_le_bytes([s[0], s[1]])) / 32768.0)
                .sum();
            sum / channels as f64
        })
        .collect();
    Ok((samples, fmt.sample_rate))
}

/// Writes mono PCM-16. Samples are clamped to `[-1, 1]` and rounded to the nearest step.
pub fn write_wav(path: impl AsRef<Path>, samples: &[f64], sample_rate_hz: u32) -> Result<(), AudioError> {
    let data_len = (samples.len() * 2) as u32;
    let mut out = Vec::with_capacity(44 + samples.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&sample_rate_hz.to_le_bytes());
    out.extend_from_slice(&(sample_rate_hz * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in samples {
        let q = (s.clamp(-1.0, 1.0) * 32767.0).round() as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}
