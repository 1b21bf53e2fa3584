//! Simulation, filtering and evaluation of optically measured sound-field image sequences.
//!
//! The crate covers the whole loop: synthesize ground-truth fields ([`sim`]), corrupt them
//! ([`noise`]), denoise them per temporal frequency ([`spectral`]) with a classical filter
//! ([`filters`]) or the two-channel network ([`nn`]), and score the result ([`metrics`]).
//! [`dataset`] builds reproducible sample sets and [`cli`] wraps everything as batch commands.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod fft;
pub mod filters;
pub mod io;
pub mod methods;
pub mod metrics;
pub mod nn;
pub mod noise;
pub mod sim;
pub mod spectral;

pub use error::Error;
pub use spectral::{BinInfo, Denoiser, TwoChannelImage};

/// Toolkit version recorded in manifests, reports and provenance sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
