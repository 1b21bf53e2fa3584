//! Image-quality metrics on two-channel images and dataset-level reports.
//!
//! Both metrics take their dynamic range from the clean image: `peak` is the largest absolute value
//! over both channels and `L = 2 * peak`, the span of a signal in `[-peak, peak]`. PSNR is
//! `10 log10(L^2 / MSE)` with the mean squared error taken over both channels jointly. SSIM is the
//! plain single-scale index with an 11 x 11 Gaussian window (sigma 1.5), computed per channel on
//! valid window positions and averaged over the two channels.

pub mod report;

use ndarray::Array2;
use thiserror::Error;

use crate::spectral::TwoChannelImage;

pub use report::{evaluate_dataset, Aggregate, EvalReport, MethodSummary, SampleFailure, SampleScore};

/// PSNR returned for identical images.
pub const PSNR_CAP_DB: f64 = 99.0;
pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("shapes differ: {a:?} vs {b:?}")]
    ShapeMismatch { a: (usize, usize), b: (usize, usize) },
    #[error("clean image is identically zero; peak-based metrics are undefined")]
    ZeroPeak,
    #[error("image {h}x{w} is smaller than the {window}x{window} window")]
    TooSmall { h: usize, w: usize, window: usize },
}

fn check_shapes(a: &TwoChannelImage, b: &TwoChannelImage) -> Result<(), MetricError> {
    if a.dim() != b.dim() {
        return Err(MetricError::ShapeMismatch { a: a.dim(), b: b.dim() });
    }
    Ok(())
}

/// `10 log10((2 peak)^2 / MSE)`, saturating at [`PSNR_CAP_DB`].
pub fn psnr_db(clean: &TwoChannelImage, test: &TwoChannelImage) -> Result<f64, MetricError> {
    check_shapes(clean, test)?;
    let peak = clean.max_abs();
    if peak == 0.0 {
        return Err(MetricError::ZeroPeak);
    }
    let se: f64 = clean
        .re
        .iter()
        .zip(test.re.iter())
        .chain(clean.im.iter().zip(test.im.iter()))
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let mse = se / (2 * clean.re.len()) as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    let range = 2.0 * peak;
    Ok((10.0 * (range * range / mse).log10()).min(PSNR_CAP_DB))
}

fn ssim_window_1d() -> Vec<f64> {
    let r = (SSIM_WINDOW / 2) as isize;
    let mut g: Vec<f64> = (-r..=r)
        .map(|t| (-((t * t) as f64) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let s: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= s);
    g
}

/// Valid-mode separable filtering with the SSIM window.
fn window_filter(img: &Array2<f64>, g: &[f64]) -> Array2<f64> {
    let (h, w) = img.dim();
    let n = g.len();
    let (oh, ow) = (h + 1 - n, w + 1 - n);
    let mut rows = Array2::zeros((h, ow));
    for y in 0..h {
        for x in 0..ow {
            rows[[y, x]] = (0..n).map(|t| g[t] * img[[y, x + t]]).sum::<f64>();
        }
    }
    let mut out = Array2::zeros((oh, ow));
    for y in 0..oh {
        for x in 0..ow {
            out[[y, x]] = (0..n).map(|t| g[t] * rows[[y + t, x]]).sum::<f64>();
        }
    }
    out
}

/// Mean SSIM of one channel with dynamic range `range`.
pub fn ssim_channel(a: &Array2<f64>, b: &Array2<f64>, range: f64) -> Result<f64, MetricError> {
    let (h, w) = a.dim();
    if a.dim() != b.dim() {
        return Err(MetricError::ShapeMismatch { a: a.dim(), b: b.dim() });
    }
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(MetricError::TooSmall { h, w, window: SSIM_WINDOW });
    }
    let g = ssim_window_1d();
    let c1 = (SSIM_K1 * range).powi(2);
    let c2 = (SSIM_K2 * range).powi(2);
    let mu_a = window_filter(a, &g);
    let mu_b = window_filter(b, &g);
    let aa = window_filter(&(a * a), &g);
    let bb = window_filter(&(b * b), &g);
    let ab = window_filter(&(a * b), &g);
    let mut total = 0.0;
    for (((&ma, &mb), (&saa, &sbb)), &sab) in mu_a.iter().zip(mu_b.iter()).zip(aa.iter().zip(bb.iter())).zip(ab.iter()) {
        let va = saa - ma * ma;
        let vb = sbb - mb * mb;
        let cov = sab - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    Ok(total / mu_a.len() as f64)
}

/// Mean of the real- and imaginary-channel SSIMs, with `L = 2 * peak(clean)`.
pub fn ssim(clean: &TwoChannelImage, test: &TwoChannelImage) -> Result<f64, MetricError> {
    check_shapes(clean, test)?;
    let peak = clean.max_abs();
    if peak == 0.0 {
        return Err(MetricError::ZeroPeak);
    }
    let range = 2.0 * peak;
    Ok(0.5 * (ssim_channel(&clean.re, &test.re, range)? + ssim_channel(&clean.im, &test.im, range)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psnr_uniform_error() {
        let clean = TwoChannelImage::new(Array2::from_elem((4, 4), 1.0), Array2::zeros((4, 4)));
        let test = TwoChannelImage::new(clean.re.mapv(|v| v + 0.2), clean.im.mapv(|v| v - 0.2));
        assert!((psnr_db(&clean, &test).unwrap() - 20.0).abs() < 1e-9);
        assert_eq!(psnr_db(&clean, &clean).unwrap(), PSNR_CAP_DB);
        let zero = TwoChannelImage::zeros((4, 4));
        assert_eq!(psnr_db(&zero, &clean), Err(MetricError::ZeroPeak));
    }

    #[test]
    fn ssim_rejects_small() {
        let a = TwoChannelImage::new(Array2::from_elem((8, 8), 1.0), Array2::zeros((8, 8)));
        assert!(matches!(ssim(&a, &a), Err(MetricError::TooSmall { .. })));
    }
}
