//! STFT analysis and weighted overlap-add synthesis for multichannel
//! signals. Square-root Hann window on both sides, 50% overlap, zero
//! padding at the tail of the frame.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use mwf_ic_core::FilterPair;

use crate::{Result, ToolkitError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StftConfig {
    pub fft_size: usize,
    pub window_len: usize,
    pub hop: usize,
    pub sample_rate: u32,
}

impl Default for StftConfig {
    fn default() -> Self {
        StftConfig { fft_size: 1024, window_len: 512, hop: 256, sample_rate: 16000 }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.fft_size.is_power_of_two() || self.fft_size == 0 {
            return Err(ToolkitError::InvalidConfig("fft_size must be a power of two".into()));
        }
        if self.window_len == 0 || self.window_len > self.fft_size {
            return Err(ToolkitError::InvalidConfig("window_len must be in 1..=fft_size".into()));
        }
        if self.hop * 2 != self.window_len {
            return Err(ToolkitError::InvalidConfig("hop must equal window_len/2".into()));
        }
        if self.sample_rate == 0 {
            return Err(ToolkitError::InvalidConfig("sample_rate must be positive".into()));
        }
        Ok(())
    }

    /// Stored bins: 0..=fft_size/2.
    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    /// Center frequency of bin k in Hz.
    pub fn bin_frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.sample_rate as f64 / self.fft_size as f64
    }

    /// Square-root periodic Hann, satisfies COLA at 50% overlap when used
    /// for both analysis and synthesis.
    pub fn window(&self) -> Vec<f64> {
        let n = self.window_len as f64;
        (0..self.window_len)
            .map(|i| (0.5 * (1.0 - (2.0 * std::f64::consts::PI * i as f64 / n).cos())).sqrt())
            .collect()
    }

    pub fn num_frames(&self, signal_len: usize) -> usize {
        if signal_len < self.window_len {
            0
        } else {
            (signal_len - self.window_len) / self.hop + 1
        }
    }
}

/// Complex STFT coefficients indexed (channel, frame, bin); only
/// non-negative-frequency bins are stored.
#[derive(Debug, Clone)]
pub struct SpectroFrameTensor {
    pub config: StftConfig,
    pub channels: usize,
    pub frames: usize,
    data: Vec<Complex64>,
}

impl SpectroFrameTensor {
    pub fn zeros(config: StftConfig, channels: usize, frames: usize) -> Self {
        let bins = config.num_bins();
        SpectroFrameTensor {
            config,
            channels,
            frames,
            data: vec![Complex64::ZERO; channels * frames * bins],
        }
    }

    pub fn bins(&self) -> usize {
        self.config.num_bins()
    }

    #[inline]
    fn index(&self, channel: usize, frame: usize, bin: usize) -> usize {
        (channel * self.frames + frame) * self.bins() + bin
    }

    #[inline]
    pub fn at(&self, channel: usize, frame: usize, bin: usize) -> Complex64 {
        self.data[self.index(channel, frame, bin)]
    }

    #[inline]
    pub fn at_mut(&mut self, channel: usize, frame: usize, bin: usize) -> &mut Complex64 {
        let i = self.index(channel, frame, bin);
        &mut self.data[i]
    }

    /// The stacked per-bin observation vector across channels.
    pub fn stacked(&self, frame: usize, bin: usize) -> Vec<Complex64> {
        (0..self.channels).map(|c| self.at(c, frame, bin)).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SpectroFrameTensor {
            config: self.config,
            channels: self.channels,
            frames: self.frames,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }
}

fn plan(config: &StftConfig) -> (Arc<dyn rustfft::Fft<f64>>, Arc<dyn rustfft::Fft<f64>>) {
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(config.fft_size);
    let inverse = planner.plan_fft_inverse(config.fft_size);
    (forward, inverse)
}

/// Windowed STFT of a multichannel signal. Frame lambda covers samples
/// [lambda*hop, lambda*hop + window_len).
pub fn analyze(signal: &[Vec<f64>], config: &StftConfig) -> Result<SpectroFrameTensor> {
    config.validate()?;
    if signal.is_empty() || signal[0].is_empty() {
        return Err(ToolkitError::EmptySignal);
    }
    let len = signal[0].len();
    if signal.iter().any(|ch| ch.len() != len) {
        return Err(ToolkitError::ChannelLengthMismatch);
    }
    if len < config.window_len {
        return Err(ToolkitError::SignalTooShort);
    }
    let frames = config.num_frames(len);
    let window = config.window();
    let (forward, _) = plan(config);
    let bins = config.num_bins();
    let mut tensor = SpectroFrameTensor::zeros(*config, signal.len(), frames);
    let mut buf = vec![Complex64::ZERO; config.fft_size];
    for (c, channel) in signal.iter().enumerate() {
        for frame in 0..frames {
            let start = frame * config.hop;
            for i in 0..config.fft_size {
                buf[i] = if i < config.window_len {
                    Complex64::new(channel[start + i] * window[i], 0.0)
                } else {
                    Complex64::ZERO
                };
            }
            forward.process(&mut buf);
            for k in 0..bins {
                *tensor.at_mut(c, frame, k) = buf[k];
            }
        }
    }
    Ok(tensor)
}

/// Weighted overlap-add synthesis. Exact reconstruction away from the
/// first/last window_len samples.
pub fn synthesize(tensor: &SpectroFrameTensor) -> Result<Vec<Vec<f64>>> {
    let config = &tensor.config;
    config.validate()?;
    if tensor.frames == 0 || tensor.channels == 0 {
        return Err(ToolkitError::EmptySignal);
    }
    let window = config.window();
    let (_, inverse) = plan(config);
    let bins = config.num_bins();
    let out_len = (tensor.frames - 1) * config.hop + config.window_len;
    let scale = 1.0 / config.fft_size as f64;
    let mut out = vec![vec![0.0f64; out_len]; tensor.channels];
    let mut buf = vec![Complex64::ZERO; config.fft_size];
    for c in 0..tensor.channels {
        for frame in 0..tensor.frames {
            for k in 0..bins {
                buf[k] = tensor.at(c, frame, k);
            }
            // Negative frequencies by conjugate symmetry.
            for k in bins..config.fft_size {
                buf[k] = tensor.at(c, frame, config.fft_size - k).conj();
            }
            inverse.process(&mut buf);
            let start = frame * config.hop;
            for i in 0..config.window_len {
                out[c][start + i] += buf[i].re * scale * window[i];
            }
        }
    }
    Ok(out)
}

/// Per-bin binaural filtering: output channel L at (lambda, k) is
/// w_L(k)^H y(lambda, k), likewise R.
pub fn apply_filter_per_bin(
    tensor: &SpectroFrameTensor,
    filters: &[FilterPair],
) -> Result<SpectroFrameTensor> {
    let bins = tensor.bins();
    if filters.len() != bins {
        return Err(ToolkitError::DimensionMismatch(format!(
            "expected {bins} per-bin filters, got {}",
            filters.len()
        )));
    }
    if filters.iter().any(|f| f.num_channels() != tensor.channels) {
        return Err(ToolkitError::DimensionMismatch(
            "filter channel count differs from tensor".into(),
        ));
    }
    let mut out = SpectroFrameTensor::zeros(tensor.config, 2, tensor.frames);
    for frame in 0..tensor.frames {
        for k in 0..bins {
            let y = tensor.stacked(frame, k);
            let f = &filters[k];
            let z_l: Complex64 = f.left.iter().zip(y.iter()).map(|(w, v)| w.conj() * v).sum();
            let z_r: Complex64 = f.right.iter().zip(y.iter()).map(|(w, v)| w.conj() * v).sum();
            *out.at_mut(0, frame, k) = z_l;
            *out.at_mut(1, frame, k) = z_r;
        }
    }
    Ok(out)
}
