//! Binaural speech dereverberation and noise reduction toolkit.
//!
//! Offline companion to `mwf-ic-core`: STFT analysis/synthesis, a synthetic
//! binaural scene simulator with per-component ground truth, oracle spectral
//! estimation, objective metrics (SNR, delta-MSC, delta-ITD, cepstral
//! distance) and the experiment pipeline behind the `mwf-ic` CLI.

pub mod metrics;
pub mod pipeline;
pub mod scene;
pub mod spectral;
pub mod speech;
pub mod stft;
pub mod wav;

pub use mwf_ic_core as core;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolkitError {
    #[error("empty signal")]
    EmptySignal,
    #[error("channel length mismatch")]
    ChannelLengthMismatch,
    #[error("signal shorter than the analysis window")]
    SignalTooShort,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("too few frames: need {needed}, got {got}")]
    TooFewFrames { needed: usize, got: usize },
    #[error("zero-power input: {0}")]
    ZeroPower(String),
    #[error("source coincides with microphone {0}")]
    SourceAtMicrophone(usize),
    #[error("matrix error: {0}")]
    Matrix(mwf_ic_core::MatrixError),
    #[error("wav error: {0}")]
    Wav(#[from] hound::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Other(String),
}

impl From<mwf_ic_core::MatrixError> for ToolkitError {
    fn from(e: mwf_ic_core::MatrixError) -> Self {
        ToolkitError::Matrix(e)
    }
}

pub type Result<T> = std::result::Result<T, ToolkitError>;
