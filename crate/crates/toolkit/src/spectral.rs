//! Oracle spectral estimation: per-bin PSD matrices, RTF vectors, the
//! diffuse-field coherence model and the undesired-component decomposition.

use num_complex::Complex64;
use rustfft::FftPlanner;

use mwf_ic_core::CMat;

use crate::scene::ArrayGeometry;
use crate::stft::{SpectroFrameTensor, StftConfig};
use crate::{Result, ToolkitError};

/// Role tag for a per-bin PSD matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdRole {
    Observed,
    Speech,
    LateReverb,
    Noise,
    Undesired,
    Coherence,
}

/// Hermitian positive-semidefinite per-bin matrix with a role tag.
#[derive(Debug, Clone)]
pub struct PsdMatrix {
    pub mat: CMat,
    pub role: PsdRole,
}

impl PsdMatrix {
    pub fn new(mat: CMat, role: PsdRole) -> Self {
        PsdMatrix { mat, role }
    }

    /// Checks Hermitian symmetry, eigenvalue non-negativity (within
    /// -1e-10 * trace) and, for coherence matrices, the unit diagonal.
    pub fn validate(&self) -> Result<()> {
        if !self.mat.is_hermitian(1e-10) {
            return Err(ToolkitError::Matrix(mwf_ic_core::MatrixError::NotHermitian));
        }
        let trace = self.mat.trace().re;
        let eig = self.mat.eigh()?;
        if eig.eigenvalues.iter().any(|&l| l < -1e-10 * trace.max(1.0)) {
            return Err(ToolkitError::Other("matrix has a negative eigenvalue".into()));
        }
        if self.role == PsdRole::Coherence {
            for i in 0..self.mat.dim() {
                if (self.mat[(i, i)] - Complex64::ONE).norm() > 1e-10 {
                    return Err(ToolkitError::Other("coherence diagonal is not unity".into()));
                }
            }
        }
        Ok(())
    }
}

/// Long-term PSD at one bin: (1/L) sum_l y(l,k) y(l,k)^H, symmetrized.
pub fn oracle_psd(tensor: &SpectroFrameTensor, bin: usize) -> Result<CMat> {
    if tensor.frames < 10 {
        return Err(ToolkitError::TooFewFrames { needed: 10, got: tensor.frames });
    }
    let n = tensor.channels;
    let mut phi = CMat::zeros(n);
    for frame in 0..tensor.frames {
        let y = tensor.stacked(frame, bin);
        for i in 0..n {
            for j in 0..n {
                phi[(i, j)] += y[i] * y[j].conj();
            }
        }
    }
    let phi = phi.scale(1.0 / tensor.frames as f64);
    let mut phi = phi;
    phi.hermitian_symmetrize();
    Ok(phi)
}

/// Oracle PSDs for every bin.
pub fn oracle_psd_all(tensor: &SpectroFrameTensor) -> Result<Vec<CMat>> {
    (0..tensor.bins()).map(|k| oracle_psd(tensor, k)).collect()
}

/// Recursive per-frame PSD: Phi(l) = s Phi(l-1) + (1-s) y y^H, Phi(-1) = 0.
pub fn recursive_psd(frames: &[Vec<Complex64>], smoothing: f64) -> Result<Vec<CMat>> {
    if !(0.0..1.0).contains(&smoothing) {
        return Err(ToolkitError::InvalidConfig("smoothing must be in [0,1)".into()));
    }
    let mut out = Vec::with_capacity(frames.len());
    let mut prev: Option<CMat> = None;
    for y in frames {
        let inst = CMat::scaled_outer(y, 1.0 - smoothing);
        let phi = match prev {
            None => inst,
            Some(p) => p.scale(smoothing).add(&inst),
        };
        prev = Some(phi.clone());
        out.push(phi);
    }
    Ok(out)
}

/// Per-bin RTF pair computed from early impulse responses: the fft_size
/// transforms of the windowed responses, normalized by the left (a_L) and
/// right (a_R) reference entries. Returns (a_L, a_R, degenerate flags).
#[allow(clippy::type_complexity)]
pub fn compute_rtf(
    early_responses: &[Vec<f64>],
    geometry: &ArrayGeometry,
    config: &StftConfig,
) -> Result<(Vec<Vec<Complex64>>, Vec<Vec<Complex64>>, Vec<bool>)> {
    config.validate()?;
    let channels = early_responses.len();
    if channels != geometry.num_channels() {
        return Err(ToolkitError::DimensionMismatch("early responses vs geometry".into()));
    }
    let bins = config.num_bins();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(config.fft_size);
    let mut transforms = vec![vec![Complex64::ZERO; bins]; channels];
    let mut buf = vec![Complex64::ZERO; config.fft_size];
    for (c, response) in early_responses.iter().enumerate() {
        buf.iter_mut().for_each(|z| *z = Complex64::ZERO);
        for (i, &v) in response.iter().take(config.fft_size).enumerate() {
            buf[i] = Complex64::new(v, 0.0);
        }
        fft.process(&mut buf);
        transforms[c][..bins].copy_from_slice(&buf[..bins]);
    }

    let ref_left = geometry.reference_index_left();
    let ref_right = geometry.reference_index_right();
    let mut a_left = Vec::with_capacity(bins);
    let mut a_right = Vec::with_capacity(bins);
    let mut degenerate = Vec::with_capacity(bins);
    for k in 0..bins {
        let denom_l = transforms[ref_left][k];
        let denom_r = transforms[ref_right][k];
        let bad = denom_l.norm() < 1e-12 || denom_r.norm() < 1e-12;
        degenerate.push(bad);
        if bad {
            // flagged; selector-like placeholders keep dimensions intact
            let mut l = vec![Complex64::ZERO; channels];
            let mut r = vec![Complex64::ZERO; channels];
            l[ref_left] = Complex64::ONE;
            r[ref_right] = Complex64::ONE;
            a_left.push(l);
            a_right.push(r);
        } else {
            a_left.push((0..channels).map(|c| transforms[c][k] / denom_l).collect());
            a_right.push((0..channels).map(|c| transforms[c][k] / denom_r).collect());
        }
    }
    Ok((a_left, a_right, degenerate))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Diffuse-field coherence at one frequency:
/// Gamma_ij = sinc(2 pi f d_ij / c), real symmetric with unit diagonal.
pub fn diffuse_coherence_at(geometry: &ArrayGeometry, freq_hz: f64) -> CMat {
    let positions = geometry.mic_positions();
    let n = positions.len();
    let mut gamma = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let d = ((positions[i][0] - positions[j][0]).powi(2)
                + (positions[i][1] - positions[j][1]).powi(2))
            .sqrt();
            let x = 2.0 * std::f64::consts::PI * freq_hz * d / geometry.sound_speed;
            gamma[(i, j)] = Complex64::new(sinc(x), 0.0);
        }
    }
    gamma
}

/// Gamma_d for every stored bin.
pub fn diffuse_coherence(geometry: &ArrayGeometry, config: &StftConfig) -> Vec<CMat> {
    (0..config.num_bins())
        .map(|k| diffuse_coherence_at(geometry, config.bin_frequency(k)))
        .collect()
}

/// Phi_u = phi_d * Gamma_d + Phi_v.
pub fn undesired_psd(phi_d: f64, gamma_d: &CMat, phi_v: &CMat) -> Result<CMat> {
    if phi_d < 0.0 {
        return Err(ToolkitError::InvalidConfig("phi_d must be non-negative".into()));
    }
    if gamma_d.dim() != phi_v.dim() {
        return Err(ToolkitError::DimensionMismatch("Gamma_d vs Phi_v".into()));
    }
    Ok(gamma_d.scale(phi_d).add(phi_v))
}

/// Reference-channel speech PSDs and the late-reverb level phi_d per bin:
/// phi_X is the long-term mean |reference channel|^2 of the direct/early
/// component; phi_d is trace(Phi_d) / trace(Gamma_d).
#[allow(clippy::type_complexity)]
pub fn speech_psd_and_phi_d(
    direct_early: &SpectroFrameTensor,
    late_reverb: &SpectroFrameTensor,
    gammas: &[CMat],
    geometry: &ArrayGeometry,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let bins = direct_early.bins();
    if late_reverb.bins() != bins || gammas.len() != bins {
        return Err(ToolkitError::DimensionMismatch("bin counts".into()));
    }
    let ref_left = geometry.reference_index_left();
    let ref_right = geometry.reference_index_right();
    let mut phi_x_left = Vec::with_capacity(bins);
    let mut phi_x_right = Vec::with_capacity(bins);
    let mut phi_d = Vec::with_capacity(bins);
    for k in 0..bins {
        let mut pl = 0.0;
        let mut pr = 0.0;
        for frame in 0..direct_early.frames {
            pl += direct_early.at(ref_left, frame, k).norm_sqr();
            pr += direct_early.at(ref_right, frame, k).norm_sqr();
        }
        phi_x_left.push(pl / direct_early.frames as f64);
        phi_x_right.push(pr / direct_early.frames as f64);
        let phi_late = oracle_psd(late_reverb, k)?;
        phi_d.push((phi_late.trace().re / gammas[k].trace().re).max(0.0));
    }
    Ok((phi_x_left, phi_x_right, phi_d))
}

/// Bins with speech energy below 1e-12 of the peak are inactive; filters
/// there default to the selector passthrough.
pub fn active_bins(phi_x_left: &[f64]) -> Vec<bool> {
    let peak = phi_x_left.iter().cloned().fold(0.0, f64::max);
    phi_x_left.iter().map(|&p| p >= 1e-12 * peak && p > 0.0).collect()
}
