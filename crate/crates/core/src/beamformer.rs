//! Binaural MWF cost functions, interaural-coherence penalties and their
//! gradients over the real parameterization of the stacked weight vector.
//!
//! Channel convention: the stacked observation vector holds the M left
//! microphones first, then the M right microphones. The left reference is
//! channel 0, the right reference is channel M.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::{CMat, Complex64, MatrixError};

/// Cost-function variant: plain MWF, or the coherence-penalized forms using
/// the undesired-component PSD (late reverb + noise) or the noise-only PSD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Mwf,
    IcU,
    IcV,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Mwf => "MWF",
            Variant::IcU => "IC_U",
            Variant::IcV => "IC_V",
        }
    }
}

/// Left/right weight vectors, each of length 2M.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterPair {
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl FilterPair {
    pub fn zeros(num_channels: usize) -> Self {
        FilterPair {
            left: vec![Complex64::ZERO; num_channels],
            right: vec![Complex64::ZERO; num_channels],
        }
    }

    pub fn num_channels(&self) -> usize {
        self.left.len()
    }

    /// Real parameterization [Re w_L; Im w_L; Re w_R; Im w_R], length 8M.
    pub fn to_reals(&self) -> Vec<f64> {
        let n = self.left.len();
        let mut x = Vec::with_capacity(4 * n);
        x.extend(self.left.iter().map(|z| z.re));
        x.extend(self.left.iter().map(|z| z.im));
        x.extend(self.right.iter().map(|z| z.re));
        x.extend(self.right.iter().map(|z| z.im));
        x
    }

    pub fn from_reals(x: &[f64]) -> Self {
        assert_eq!(x.len() % 4, 0, "real parameter vector length must be 4*2M");
        let n = x.len() / 4;
        let left = (0..n).map(|i| Complex64::new(x[i], x[n + i])).collect();
        let right = (0..n)
            .map(|i| Complex64::new(x[2 * n + i], x[3 * n + i]))
            .collect();
        FilterPair { left, right }
    }
}

/// Reference-microphone selector vectors q_L (index 0) and q_R (index M).
#[derive(Debug, Clone, Copy)]
pub struct SelectorPair {
    pub num_channels: usize,
}

impl SelectorPair {
    pub fn new(num_channels: usize) -> Self {
        assert!(num_channels >= 2 && num_channels % 2 == 0);
        SelectorPair { num_channels }
    }

    pub fn left_index(&self) -> usize {
        0
    }

    pub fn right_index(&self) -> usize {
        self.num_channels / 2
    }

    pub fn left(&self) -> Vec<Complex64> {
        let mut q = vec![Complex64::ZERO; self.num_channels];
        q[self.left_index()] = Complex64::ONE;
        q
    }

    pub fn right(&self) -> Vec<Complex64> {
        let mut q = vec![Complex64::ZERO; self.num_channels];
        q[self.right_index()] = Complex64::ONE;
        q
    }

    pub fn filters(&self) -> FilterPair {
        FilterPair { left: self.left(), right: self.right() }
    }
}

/// One frequency bin's optimization problem.
#[derive(Debug, Clone)]
pub struct BinProblem {
    pub phi_x: CMat,
    pub phi_y: CMat,
    pub phi_u: CMat,
    pub phi_v: CMat,
    pub rtf_left: Vec<Complex64>,
    pub rtf_right: Vec<Complex64>,
    pub speech_psd_left: f64,
    pub speech_psd_right: f64,
    pub alpha: f64,
    pub variant: Variant,
    pub selectors: SelectorPair,
}

impl BinProblem {
    /// Validates Hermitian symmetry and consistent dimensions.
    pub fn new(
        phi_x: CMat,
        phi_y: CMat,
        phi_u: CMat,
        phi_v: CMat,
        rtf_left: Vec<Complex64>,
        rtf_right: Vec<Complex64>,
        speech_psd_left: f64,
        speech_psd_right: f64,
        alpha: f64,
        variant: Variant,
    ) -> Result<Self, MatrixError> {
        let n = phi_x.dim();
        if phi_y.dim() != n
            || phi_u.dim() != n
            || phi_v.dim() != n
            || rtf_left.len() != n
            || rtf_right.len() != n
        {
            return Err(MatrixError::DimensionMismatch);
        }
        for m in [&phi_x, &phi_y, &phi_u, &phi_v] {
            if !m.is_hermitian(1e-8) {
                return Err(MatrixError::NotHermitian);
            }
        }
        Ok(BinProblem {
            phi_x,
            phi_y,
            phi_u,
            phi_v,
            rtf_left,
            rtf_right,
            speech_psd_left,
            speech_psd_right,
            alpha,
            variant,
            selectors: SelectorPair::new(n),
        })
    }

    pub fn num_channels(&self) -> usize {
        self.phi_x.dim()
    }

    fn penalty_matrix(&self) -> Option<&CMat> {
        match self.variant {
            Variant::Mwf => None,
            Variant::IcU => Some(&self.phi_u),
            Variant::IcV => Some(&self.phi_v),
        }
    }
}

const DIAGONAL_LOADING: f64 = 1e-10;
const IC_POWER_FLOOR: f64 = 1e-300;

/// Closed-form MWF weights w = phi_X Phi_u^{-1} a / (1 + phi_X a^H Phi_u^{-1} a).
///
/// Diagonal loading of eps * trace/(2M) is applied before inversion.
pub fn mwf_closed_form(
    speech_psd: f64,
    rtf: &[Complex64],
    phi_u: &CMat,
) -> Result<Vec<Complex64>, MatrixError> {
    if speech_psd == 0.0 {
        return Ok(vec![Complex64::ZERO; rtf.len()]);
    }
    let n = phi_u.dim();
    let loading = DIAGONAL_LOADING * phi_u.trace().re / n as f64;
    let mut loaded = phi_u.clone();
    for i in 0..n {
        loaded[(i, i)] += Complex64::new(loading, 0.0);
    }
    let inv_a = loaded.solve(rtf)?;
    let quad: Complex64 = rtf.iter().zip(inv_a.iter()).map(|(a, x)| a.conj() * x).sum();
    let denom = 1.0 + speech_psd * quad.re;
    Ok(inv_a.iter().map(|x| x * (speech_psd / denom)).collect())
}

/// Quadratic MWF cost, the expanded eight-term form.
pub fn cost_quadratic(w: &FilterPair, problem: &BinProblem) -> f64 {
    let q_l = problem.selectors.left();
    let q_r = problem.selectors.right();
    let phi_x = &problem.phi_x;
    let phi_y = &problem.phi_y;
    let fixed = phi_x.sandwich(&q_l, &q_l) + phi_x.sandwich(&q_r, &q_r);
    let cross = phi_x.sandwich(&w.left, &q_l)
        + phi_x.sandwich(&w.right, &q_r)
        + phi_x.sandwich(&q_l, &w.left)
        + phi_x.sandwich(&q_r, &w.right);
    let quad = phi_y.sandwich(&w.left, &w.left) + phi_y.sandwich(&w.right, &w.right);
    (fixed - cross + quad).re
}

/// Normalized cross-PSD between the two filtered outputs.
#[derive(Debug, Clone, Copy)]
pub struct Coherence {
    pub value: Complex64,
    /// Set when one of the output powers vanishes; the value is then 0.
    pub degenerate: bool,
}

pub fn interaural_coherence(phi: &CMat, left: &[Complex64], right: &[Complex64]) -> Coherence {
    let p_left = phi.sandwich(left, left).re;
    let p_right = phi.sandwich(right, right).re;
    if p_left <= IC_POWER_FLOOR || p_right <= IC_POWER_FLOOR {
        return Coherence { value: Complex64::ZERO, degenerate: true };
    }
    let cross = phi.sandwich(left, right);
    Coherence {
        value: cross / libm::sqrt(p_left * p_right),
        degenerate: false,
    }
}

/// |IC_out(w) - IC_in(q)|^2 with the complex difference taken literally.
pub fn ic_penalty(w: &FilterPair, phi: &CMat, selectors: &SelectorPair) -> f64 {
    let ic_out = interaural_coherence(phi, &w.left, &w.right);
    let ic_in = interaural_coherence(phi, &selectors.left(), &selectors.right());
    (ic_out.value - ic_in.value).norm_sqr()
}

/// J(w) = J_w(w) + alpha * |IC_out - IC_in|^2 (penalty matrix by variant).
pub fn total_cost(w: &FilterPair, problem: &BinProblem) -> f64 {
    let quad = cost_quadratic(w, problem);
    match problem.penalty_matrix() {
        None => quad,
        Some(phi) => quad + problem.alpha * ic_penalty(w, phi, &problem.selectors),
    }
}

/// Gradient of `total_cost` with respect to [Re w_L; Im w_L; Re w_R; Im w_R].
pub fn gradient(w: &FilterPair, problem: &BinProblem) -> Vec<f64> {
    let n = problem.num_channels();
    // Quadratic part: per side, d/dw* = Phi_y w - Phi_x q; real gradient
    // is twice its real/imaginary parts.
    let b_left = problem.phi_x.matvec(&problem.selectors.left());
    let b_right = problem.phi_x.matvec(&problem.selectors.right());
    let g_left: Vec<Complex64> = problem
        .phi_y
        .matvec(&w.left)
        .iter()
        .zip(b_left.iter())
        .map(|(a, b)| a - b)
        .collect();
    let g_right: Vec<Complex64> = problem
        .phi_y
        .matvec(&w.right)
        .iter()
        .zip(b_right.iter())
        .map(|(a, b)| a - b)
        .collect();

    let mut wirtinger_left = g_left;
    let mut wirtinger_right = g_right;

    if let Some(phi) = problem.penalty_matrix() {
        if problem.alpha != 0.0 {
            let (pen_left, pen_right) = penalty_wirtinger(w, phi, &problem.selectors);
            for i in 0..n {
                wirtinger_left[i] += pen_left[i] * problem.alpha;
                wirtinger_right[i] += pen_right[i] * problem.alpha;
            }
        }
    }

    let mut grad = Vec::with_capacity(4 * n);
    grad.extend(wirtinger_left.iter().map(|z| 2.0 * z.re));
    grad.extend(wirtinger_left.iter().map(|z| 2.0 * z.im));
    grad.extend(wirtinger_right.iter().map(|z| 2.0 * z.re));
    grad.extend(wirtinger_right.iter().map(|z| 2.0 * z.im));
    grad
}

/// Wirtinger derivatives d/dw_L*, d/dw_R* of |IC_out - IC_in|^2.
///
/// With n = w_L^H Phi w_R, p_L = w_L^H Phi w_L, p_R = w_R^H Phi w_R,
/// s = sqrt(p_L p_R) and e = n/s - IC_in:
///   d/dw_L* = e* (Phi w_R)/s - Re(e* n) (Phi w_L)/(s p_L)
///   d/dw_R* = e  (Phi w_L)/s - Re(e* n) (Phi w_R)/(s p_R)
/// Degenerate output powers contribute a zero gradient (the penalty is
/// flat there by the degeneracy convention).
fn penalty_wirtinger(
    w: &FilterPair,
    phi: &CMat,
    selectors: &SelectorPair,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n_ch = w.num_channels();
    let zero = || vec![Complex64::ZERO; n_ch];
    let phi_wl = phi.matvec(&w.left);
    let phi_wr = phi.matvec(&w.right);
    let p_left: f64 = w.left.iter().zip(phi_wl.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let p_right: f64 = w.right.iter().zip(phi_wr.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    if p_left <= IC_POWER_FLOOR || p_right <= IC_POWER_FLOOR {
        return (zero(), zero());
    }
    let cross: Complex64 = w.left.iter().zip(phi_wr.iter()).map(|(a, b)| a.conj() * b).sum();
    let s = libm::sqrt(p_left * p_right);
    let ic_in = interaural_coherence(phi, &selectors.left(), &selectors.right());
    let e = cross / s - ic_in.value;
    let re_en = (e.conj() * cross).re;
    let d_left: Vec<Complex64> = (0..n_ch)
        .map(|i| e.conj() * phi_wr[i] / s - phi_wl[i] * (re_en / (s * p_left)))
        .collect();
    let d_right: Vec<Complex64> = (0..n_ch)
        .map(|i| e * phi_wl[i] / s - phi_wr[i] * (re_en / (s * p_right)))
        .collect();
    (d_left, d_right)
}
