//! Per-frequency-bin math for binaural multichannel Wiener filtering with
//! interaural-coherence preservation.
//!
//! This crate holds the pure numerical kernel: small complex matrices, the
//! quadratic MWF cost and its coherence-penalized variants, analytic
//! gradients over the real parameterization of the stacked weight vector,
//! and a dense BFGS solver with Armijo backtracking. It is `no_std`
//! (with `alloc`) so the kernel can be reused outside the offline pipeline.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod beamformer;
pub mod matrix;
pub mod optimizer;

pub use beamformer::{
    cost_quadratic, gradient, ic_penalty, interaural_coherence, mwf_closed_form, total_cost,
    BinProblem, Coherence, FilterPair, SelectorPair, Variant,
};
pub use matrix::{CMat, Complex64, Eigh, MatrixError};
pub use optimizer::{solve_all_bins, solve_bin, InitPolicy, Objective, SolveConfig, SolveReport};
