//! Classical single-frequency denoisers.
//!
//! Every filter here works on one real channel or one complex image and keeps the shape. Borders
//! are handled by mirror reflection without repeating the edge sample (`dcb|abcd|cba`).

pub mod gaussian;
pub mod median;
pub mod nlm;
pub mod sigma;
pub mod stbpf;
pub mod wff;

use ndarray::Array2;
use thiserror::Error;

pub use gaussian::{gaussian_filter, gaussian_kernel, GaussianConfig};
pub use median::{median_filter, MedianConfig};
pub use nlm::{nlm_channel, nlm_filter, NlmConfig};
pub use sigma::estimate_noise_sigma;
pub use stbpf::{butterworth_hp_gain2, butterworth_lp_gain2, stbpf_filter, stbpf_gain, StbpfConfig};
pub use wff::{wff_filter, WffConfig};

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("kernel size {0} must be odd and at least 1")]
    KernelSize(usize),
    #[error("image {ny}x{nx} is smaller than the required {min}x{min}")]
    TooSmall { ny: usize, nx: usize, min: usize },
    #[error("invalid filter parameter: {0}")]
    Parameter(String),
    #[error("frequency lattice is empty")]
    EmptyLattice,
}

/// Maps any integer index into `0..n` by mirror reflection about the end samples.
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

/// Pads by `py` rows and `px` columns on each side with mirror reflection.
pub fn reflect_pad(img: &Array2<f64>, py: usize, px: usize) -> Array2<f64> {
    let (ny, nx) = img.dim();
    Array2::from_shape_fn((ny + 2 * py, nx + 2 * px), |(j, i)| {
        let sj = reflect_index(j as isize - py as isize, ny);
        let si = reflect_index(i as isize - px as isize, nx);
        img[[sj, si]]
    })
}

pub(crate) fn check_odd(k: usize) -> Result<(), FilterError> {
    if k % 2 == 1 {
        Ok(())
    } else {
        Err(FilterError::KernelSize(k))
    }
}
