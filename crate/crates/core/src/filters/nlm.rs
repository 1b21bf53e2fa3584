//! Non-local means with patch distances from integral images.
//!
//! For every search offset the squared difference between the image and its shifted copy is
//! summed over patches with a summed-area table, so the cost per offset is linear in the pixel
//! count regardless of patch size.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{check_odd, estimate_noise_sigma, reflect_pad, FilterError};
use crate::spectral::TwoChannelImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlmConfig {
    pub patch: usize,
    pub search: usize,
    /// `h = h_mult * sigma`.
    pub h_mult: f64,
    /// Noise level; estimated per channel when absent.
    pub sigma: Option<f64>,
}

impl Default for NlmConfig {
    fn default() -> Self {
        NlmConfig {
            patch: 7,
            search: 23,
            h_mult: 2.0,
            sigma: None,
        }
    }
}

/// NLM on one channel with explicit filtering strength `h` and noise level `sigma`.
///
/// Weights are `exp(-max(d2 - 2 sigma^2, 0) / h^2)` where `d2` is the mean squared patch
/// difference.
pub fn nlm_channel(
    img: &Array2<f64>,
    patch: usize,
    search: usize,
    h: f64,
    sigma: f64,
) -> Result<Array2<f64>, FilterError> {
    check_odd(patch)?;
    check_odd(search)?;
    if !(h >= 0.0) || !(sigma >= 0.0) {
        return Err(FilterError::Parameter(format!("nlm h {h} and sigma {sigma} must be non-negative")));
    }
    let (ny, nx) = img.dim();
    let pr = patch / 2;
    let sr = search / 2;
    let pad = pr + sr;
    let padded = reflect_pad(img, pad, pad);
    // Region covering every patch of every output pixel.
    let (ry, rx) = (ny + 2 * pr, nx + 2 * pr);
    let inv_area = 1.0 / (patch * patch) as f64;
    let h2 = h * h;
    let bias = 2.0 * sigma * sigma;

    let pw = nx + 2 * pad;
    let src = padded.as_standard_layout();
    let src = src.as_slice().expect("standard layout");
    let mut acc = vec![0.0; ny * nx];
    let mut wsum = vec![0.0; ny * nx];
    // Summed-area table with a zero guard row and column.
    let sw = rx + 1;
    let mut sat = vec![0.0; (ry + 1) * sw];
    for dy in -(sr as isize)..=(sr as isize) {
        for dx in -(sr as isize)..=(sr as isize) {
            let shift = dy * pw as isize + dx;
            for y in 0..ry {
                let base = (y + sr) * pw + sr;
                let a = &src[base..base + rx];
                let b = &src[(base as isize + shift) as usize..(base as isize + shift) as usize + rx];
                let (prev, cur) = sat[y * sw..(y + 2) * sw].split_at_mut(sw);
                let mut row = 0.0;
                for x in 0..rx {
                    let d = a[x] - b[x];
                    row += d * d;
                    cur[x + 1] = prev[x + 1] + row;
                }
            }
            for j in 0..ny {
                let top = &sat[j * sw..];
                let bottom = &sat[(j + patch) * sw..];
                let vbase = ((j + pad) * pw + pad) as isize + shift;
                let v = &src[vbase as usize..vbase as usize + nx];
                let acc_row = &mut acc[j * nx..(j + 1) * nx];
                let w_row = &mut wsum[j * nx..(j + 1) * nx];
                for i in 0..nx {
                    let s = bottom[i + patch] - top[i + patch] - bottom[i] + top[i];
                    let excess = (s * inv_area - bias).max(0.0);
                    let w = if excess == 0.0 {
                        1.0
                    } else if h2 == 0.0 {
                        0.0
                    } else {
                        (-excess / h2).exp()
                    };
                    acc_row[i] += w * v[i];
                    w_row[i] += w;
                }
            }
        }
    }
    let out: Vec<f64> = acc.iter().zip(&wsum).map(|(a, w)| a / w).collect();
    Ok(Array2::from_shape_vec((ny, nx), out).expect("shape matches"))
}

pub fn nlm_filter(img: &TwoChannelImage, cfg: &NlmConfig) -> Result<TwoChannelImage, FilterError> {
    let run = |ch: &Array2<f64>| -> Result<Array2<f64>, FilterError> {
        let sigma = match cfg.sigma {
            Some(s) => s,
            None => estimate_noise_sigma(ch)?,
        };
        nlm_channel(ch, cfg.patch, cfg.search, cfg.h_mult * sigma, sigma)
    };
    Ok(TwoChannelImage::new(run(&img.re)?, run(&img.im)?))
}
