//! Objective evaluation by shadow filtering: the per-bin filters are
//! applied to each clean scene component separately, so noise reduction,
//! coherence and ITD changes can be measured per component.

use mwf_ic_core::FilterPair;

use crate::scene::{channel_power, design_lowpass, filter_same, SceneComponents};
use crate::spectral::oracle_psd;
use crate::stft::{analyze, apply_filter_per_bin, synthesize, StftConfig};
use crate::{Result, ToolkitError};

/// Binaural (2-channel) time signals per component, plus their sum.
#[derive(Debug, Clone)]
pub struct ShadowOutputs {
    pub direct_early: Vec<Vec<f64>>,
    pub late_reverb: Vec<Vec<f64>>,
    pub noise: Vec<Vec<f64>>,
    pub total: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ear {
    Left,
    Right,
}

impl Ear {
    pub fn channel(self) -> usize {
        match self {
            Ear::Left => 0,
            Ear::Right => 1,
        }
    }
}

fn filter_component(
    component: &[Vec<f64>],
    filters: &[FilterPair],
    config: &StftConfig,
) -> Result<Vec<Vec<f64>>> {
    let tensor = analyze(component, config)?;
    let filtered = apply_filter_per_bin(&tensor, filters)?;
    synthesize(&filtered)
}

/// Applies the same filters independently to every component. By linearity
/// the total equals the sum of the parts.
pub fn shadow_filter(
    components: &SceneComponents,
    filters: &[FilterPair],
    config: &StftConfig,
) -> Result<ShadowOutputs> {
    let direct_early = filter_component(&components.direct_early, filters, config)?;
    let late_reverb = filter_component(&components.late_reverb, filters, config)?;
    let noise = filter_component(&components.noise, filters, config)?;
    let len = direct_early[0].len();
    let total: Vec<Vec<f64>> = (0..2)
        .map(|c| {
            (0..len)
                .map(|i| direct_early[c][i] + late_reverb[c][i] + noise[c][i])
                .collect()
        })
        .collect();
    Ok(ShadowOutputs { direct_early, late_reverb, noise, total })
}

/// 10 log10 of direct/early output power over noise output power at one
/// ear. Silent noise yields +inf, silent speech -inf.
pub fn output_snr(shadow: &ShadowOutputs, ear: Ear) -> f64 {
    let c = ear.channel();
    let p_signal = channel_power(&shadow.direct_early[c]);
    let p_noise = channel_power(&shadow.noise[c]);
    if p_noise == 0.0 {
        return f64::INFINITY;
    }
    if p_signal == 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (p_signal / p_noise).log10()
}

/// Direct/early over (late reverb + noise) output power at one ear.
pub fn output_signal_to_undesired(shadow: &ShadowOutputs, ear: Ear) -> f64 {
    let c = ear.channel();
    let p_signal = channel_power(&shadow.direct_early[c]);
    let p_u: f64 = shadow
        .late_reverb[c]
        .iter()
        .zip(shadow.noise[c].iter())
        .map(|(d, v)| (d + v) * (d + v))
        .sum::<f64>()
        / shadow.noise[c].len() as f64;
    if p_u == 0.0 {
        return f64::INFINITY;
    }
    if p_signal == 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (p_signal / p_u).log10()
}

/// Per-bin magnitude-squared coherence of a binaural pair from long-term
/// cross-PSDs. Returns None for bins where either channel has (near) zero
/// power.
fn msc_per_bin(pair: &[Vec<f64>; 2], config: &StftConfig) -> Result<Vec<Option<f64>>> {
    let tensor = analyze(&pair.to_vec(), config)?;
    let bins = tensor.bins();
    let mut total_power = 0.0f64;
    let mut powers = Vec::with_capacity(bins);
    for k in 0..bins {
        let phi = oracle_psd(&tensor, k)?;
        let p = (phi[(0, 0)].re, phi[(1, 1)].re, phi[(0, 1)]);
        total_power += p.0 + p.1;
        powers.push(p);
    }
    let floor = 1e-12 * total_power / bins as f64;
    Ok(powers
        .into_iter()
        .map(|(pl, pr, cross)| {
            if pl <= floor || pr <= floor {
                None
            } else {
                Some((cross.norm_sqr() / (pl * pr)).min(1.0))
            }
        })
        .collect())
}

/// Band-mean |MSC_out - MSC_in| between the filtered binaural output of a
/// component and its raw reference-channel pair. Degenerate bins are
/// skipped; the count of skipped bins is returned alongside.
pub fn delta_msc(
    output_pair: &[Vec<f64>; 2],
    input_pair: &[Vec<f64>; 2],
    config: &StftConfig,
    band_hz: (f64, f64),
) -> Result<(f64, usize)> {
    if band_hz.1 > config.sample_rate as f64 / 2.0 {
        return Err(ToolkitError::InvalidConfig("band above Nyquist".into()));
    }
    let msc_out = msc_per_bin(output_pair, config)?;
    let msc_in = msc_per_bin(input_pair, config)?;
    let mut acc = 0.0;
    let mut used = 0usize;
    let mut skipped = 0usize;
    for k in 0..msc_out.len() {
        let f = config.bin_frequency(k);
        if f < band_hz.0 || f > band_hz.1 {
            continue;
        }
        match (msc_out[k], msc_in[k]) {
            (Some(a), Some(b)) => {
                acc += (a - b).abs();
                used += 1;
            }
            _ => skipped += 1,
        }
    }
    if used == 0 {
        return Err(ToolkitError::ZeroPower("delta_msc: no usable bins in band".into()));
    }
    Ok((acc / used as f64, skipped))
}

/// Broadband ITD of a binaural pair: peak of the normalized
/// cross-correlation of the low-pass filtered channels, with parabolic
/// interpolation for sub-sample precision. Microseconds; positive when the
/// right channel lags the left. None when the pair has too little energy
/// below the cutoff.
pub fn estimate_itd(
    left: &[f64],
    right: &[f64],
    sample_rate: u32,
    cutoff_hz: f64,
    max_lag_ms: f64,
) -> Option<f64> {
    let taps = design_lowpass(cutoff_hz, cutoff_hz * 1.2, sample_rate);
    let l = filter_same(left, &taps);
    let r = filter_same(right, &taps);
    let energy_l: f64 = l.iter().map(|v| v * v).sum();
    let energy_r: f64 = r.iter().map(|v| v * v).sum();
    if energy_l <= 1e-20 || energy_r <= 1e-20 {
        return None;
    }
    let max_lag = (max_lag_ms / 1000.0 * sample_rate as f64).round() as isize;
    let n = l.len() as isize;
    let norm = (energy_l * energy_r).sqrt();
    let corr = |lag: isize| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let j = i + lag;
            if j >= 0 && j < n {
                acc += l[i as usize] * r[j as usize];
            }
        }
        acc / norm
    };
    let values: Vec<f64> = (-max_lag..=max_lag).map(corr).collect();
    let (best, &peak) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    if peak <= 1e-9 {
        return None; // flat correlation
    }
    let mut lag = (best as isize - max_lag) as f64;
    if best > 0 && best + 1 < values.len() {
        let (y0, y1, y2) = (values[best - 1], values[best], values[best + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        if denom.abs() > 1e-18 {
            lag += 0.5 * (y0 - y2) / denom;
        }
    }
    Some(lag / sample_rate as f64 * 1e6)
}

/// |ITD_in - ITD_out| in microseconds for a component's binaural pair.
pub fn delta_itd(
    output_pair: &[Vec<f64>; 2],
    input_pair: &[Vec<f64>; 2],
    sample_rate: u32,
    cutoff_hz: f64,
    max_lag_ms: f64,
) -> Option<f64> {
    let itd_in = estimate_itd(&input_pair[0], &input_pair[1], sample_rate, cutoff_hz, max_lag_ms)?;
    let itd_out =
        estimate_itd(&output_pair[0], &output_pair[1], sample_rate, cutoff_hz, max_lag_ms)?;
    Some((itd_in - itd_out).abs())
}

/// Levinson-Durbin solve of the autocorrelation normal equations.
/// Returns LPC coefficients a_1..a_p of A(z) = 1 + sum a_i z^-i.
fn lpc_from_autocorrelation(r: &[f64], order: usize) -> Option<Vec<f64>> {
    if r[0] <= 0.0 {
        return None;
    }
    let mut a = vec![0.0f64; order + 1];
    a[0] = 1.0;
    let mut err = r[0];
    for i in 1..=order {
        let mut acc = r[i];
        for j in 1..i {
            acc += a[j] * r[i - j];
        }
        let k = -acc / err;
        let prev = a.clone();
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        if err <= 0.0 {
            return None;
        }
    }
    Some(a[1..].to_vec())
}

/// LPC cepstrum c_1..c_n of the all-pole model 1/A(z).
fn lpc_cepstrum(a: &[f64], n: usize) -> Vec<f64> {
    let p = a.len();
    let mut c = vec![0.0f64; n + 1];
    for m in 1..=n {
        let mut acc = if m <= p { -a[m - 1] } else { 0.0 };
        for k in 1..m {
            if m - k <= p {
                acc -= (k as f64 / m as f64) * c[k] * a[m - k - 1];
            }
        }
        c[m] = acc;
    }
    c[1..].to_vec()
}

const CD_LPC_ORDER: usize = 10;
const CD_CEPSTRUM_ORDER: usize = 10;

/// Frame-wise LPC-cepstral distance, gain-invariant (c_0 excluded):
/// (10/ln 10) sqrt(2 sum_j (c_ref,j - c_deg,j)^2), clamped to [0,10],
/// averaged over the 95% lowest-distance speech-active frames.
pub fn cepstral_distance(reference: &[f64], degraded: &[f64], config: &StftConfig) -> Result<f64> {
    if reference.len() != degraded.len() {
        return Err(ToolkitError::ChannelLengthMismatch);
    }
    if reference.len() < config.window_len {
        return Err(ToolkitError::SignalTooShort);
    }
    let frames = config.num_frames(reference.len());
    let window = config.window();
    let frame_energy = |x: &[f64], frame: usize| -> f64 {
        let start = frame * config.hop;
        (0..config.window_len).map(|i| (x[start + i] * window[i]).powi(2)).sum()
    };
    let max_energy = (0..frames)
        .map(|f| frame_energy(reference, f))
        .fold(0.0f64, f64::max);
    if max_energy <= 0.0 {
        return Err(ToolkitError::ZeroPower("cepstral_distance: silent reference".into()));
    }
    let active_floor = 1e-4 * max_energy; // speech-active: within 40 dB of the peak frame

    let cepstra = |x: &[f64], frame: usize| -> Option<Vec<f64>> {
        let start = frame * config.hop;
        let seg: Vec<f64> = (0..config.window_len).map(|i| x[start + i] * window[i]).collect();
        let mut r = vec![0.0f64; CD_LPC_ORDER + 1];
        for (lag, rv) in r.iter_mut().enumerate() {
            *rv = (0..config.window_len - lag).map(|i| seg[i] * seg[i + lag]).sum();
        }
        r[0] *= 1.0 + 1e-9;
        let a = lpc_from_autocorrelation(&r, CD_LPC_ORDER)?;
        Some(lpc_cepstrum(&a, CD_CEPSTRUM_ORDER))
    };

    let mut distances = Vec::new();
    for frame in 0..frames {
        if frame_energy(reference, frame) < active_floor {
            continue;
        }
        let (Some(c_ref), Some(c_deg)) = (cepstra(reference, frame), cepstra(degraded, frame))
        else {
            continue;
        };
        let sq: f64 = c_ref.iter().zip(c_deg.iter()).map(|(a, b)| (a - b).powi(2)).sum();
        let d = (10.0 / std::f64::consts::LN_10) * (2.0 * sq).sqrt();
        distances.push(d.clamp(0.0, 10.0));
    }
    if distances.is_empty() {
        return Err(ToolkitError::ZeroPower("cepstral_distance: no active frames".into()));
    }
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let keep = ((distances.len() as f64) * 0.95).ceil() as usize;
    let keep = keep.max(1).min(distances.len());
    Ok(distances[..keep].iter().sum::<f64>() / keep as f64)
}
