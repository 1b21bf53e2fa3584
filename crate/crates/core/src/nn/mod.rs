//! Inference for the NAFNet-style two-channel denoiser.
//!
//! The network maps a normalized `(re, im)` image to a denoised one. Weights come from a
//! [`WeightBundle`] written by the training harness; the parameter layout is documented in
//! [`arch`].

pub mod arch;
pub mod bundle;
pub mod model;
pub mod ops;

use thiserror::Error;

pub use arch::ArchDescriptor;
pub use bundle::{load_weights, ParamTensor, ReferencePair, WeightBundle, BUNDLE_MAGIC};
pub use model::{forward, DnnDenoiser, NafNet};
pub use ops::{conv2d, layer_norm2d, pixel_shuffle2, simple_gate};

#[derive(Debug, Error)]
pub enum NnError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid architecture: {0}")]
    Arch(String),
    #[error("image {h}x{w} is not a multiple of {multiple}")]
    Dimension { h: usize, w: usize, multiple: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("not a weight bundle (bad magic)")]
    BadMagic,
    #[error("weight bundle truncated: need {expected} bytes, have {found}")]
    Truncated { expected: usize, found: usize },
    #[error("malformed bundle header: {0}")]
    Header(String),
    #[error("blob checksum mismatch: header says {expected}, blob hashes to {found}")]
    Checksum { expected: String, found: String },
    #[error("missing tensor {0}")]
    MissingTensor(String),
    #[error("unexpected tensor {0}")]
    ExtraTensor(String),
    #[error("tensor {0} appears more than once")]
    DuplicateTensor(String),
    #[error("tensor {name} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        name: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
}
