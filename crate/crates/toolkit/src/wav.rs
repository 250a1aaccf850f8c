//! WAV input/output: 16-bit PCM and 32-bit float, any channel count.

use std::path::Path;

use crate::{Result, ToolkitError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

/// Reads a WAV file into per-channel f64 sample vectors.
pub fn read_wav(path: &Path) -> Result<(Vec<Vec<f64>>, u32)> {
    let mut reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()?,
        (hound::SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(|v| v as f64))
            .collect::<std::result::Result<_, _>>()?,
        (fmt, bits) => {
            return Err(ToolkitError::InvalidConfig(format!(
                "unsupported WAV format: {fmt:?} {bits}-bit (need 16-bit PCM or 32-bit float)"
            )))
        }
    };
    let frames = interleaved.len() / channels;
    let mut out = vec![Vec::with_capacity(frames); channels];
    for (i, s) in interleaved.iter().enumerate() {
        out[i % channels].push(*s);
    }
    Ok((out, spec.sample_rate))
}

/// Reads a mono WAV, validating the sample rate.
pub fn read_mono_wav(path: &Path, expected_rate: u32) -> Result<Vec<f64>> {
    let (channels, rate) = read_wav(path)?;
    if rate != expected_rate {
        return Err(ToolkitError::InvalidConfig(format!(
            "WAV sample rate {rate} does not match configured {expected_rate}"
        )));
    }
    if channels.len() != 1 {
        return Err(ToolkitError::InvalidConfig(format!(
            "expected mono WAV, got {} channels",
            channels.len()
        )));
    }
    Ok(channels.into_iter().next().unwrap())
}

pub fn write_wav(
    path: &Path,
    channels: &[Vec<f64>],
    sample_rate: u32,
    format: WavFormat,
) -> Result<()> {
    if channels.is_empty() || channels[0].is_empty() {
        return Err(ToolkitError::EmptySignal);
    }
    let len = channels[0].len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(ToolkitError::ChannelLengthMismatch);
    }
    let spec = hound::WavSpec {
        channels: channels.len() as u16,
        sample_rate,
        bits_per_sample: match format {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        },
        sample_format: match format {
            WavFormat::Pcm16 => hound::SampleFormat::Int,
            WavFormat::Float32 => hound::SampleFormat::Float,
        },
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for i in 0..len {
        for ch in channels {
            match format {
                WavFormat::Pcm16 => {
                    let v = (ch[i] * 32767.0).round().clamp(-32768.0, 32767.0) as i16;
                    writer.write_sample(v)?;
                }
                WavFormat::Float32 => writer.write_sample(ch[i] as f32)?,
            }
        }
    }
    writer.finalize()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let chans = vec![vec![0.1, -0.2, 0.3], vec![0.0, 0.5, -0.5]];
        write_wav(&path, &chans, 16000, WavFormat::Float32).unwrap();
        let (got, rate) = read_wav(&path).unwrap();
        assert_eq!(rate, 16000);
        for (a, b) in chans.iter().zip(got.iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert!((x - y).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn pcm16_round_trip_quantized() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let chans = vec![vec![0.25, -0.75, 0.0]];
        write_wav(&path, &chans, 16000, WavFormat::Pcm16).unwrap();
        let (got, _) = read_wav(&path).unwrap();
        for (x, y) in chans[0].iter().zip(got[0].iter()) {
            assert!((x - y).abs() < 1e-3);
        }
    }

    #[test]
    fn mono_reader_validates_rate() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        write_wav(&path, &[vec![0.0; 10]], 8000, WavFormat::Float32).unwrap();
        assert!(read_mono_wav(&path, 16000).is_err());
        assert_eq!(read_mono_wav(&path, 8000).unwrap().len(), 10);
    }
}
