use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{check_odd, reflect_index, FilterError};
use crate::spectral::TwoChannelImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianConfig {
    pub ksize: usize,
    pub sigma: f64,
}

impl Default for GaussianConfig {
    fn default() -> Self {
        GaussianConfig { ksize: 7, sigma: 4.0 }
    }
}

impl GaussianConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        check_odd(self.ksize)?;
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(FilterError::Parameter(format!("gaussian sigma {} must be positive", self.sigma)));
        }
        Ok(())
    }
}

fn kernel_1d(ksize: usize, sigma: f64) -> Vec<f64> {
    let r = (ksize / 2) as isize;
    let mut k: Vec<f64> = (-r..=r)
        .map(|t| (-(t * t) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Normalized truncated `ksize x ksize` Gaussian kernel.
pub fn gaussian_kernel(ksize: usize, sigma: f64) -> Result<Array2<f64>, FilterError> {
    GaussianConfig { ksize, sigma }.validate()?;
    let k = kernel_1d(ksize, sigma);
    Ok(Array2::from_shape_fn((ksize, ksize), |(j, i)| k[j] * k[i]))
}

/// Separable Gaussian smoothing of one channel.
pub fn gaussian_channel(img: &Array2<f64>, cfg: &GaussianConfig) -> Result<Array2<f64>, FilterError> {
    cfg.validate()?;
    let k = kernel_1d(cfg.ksize, cfg.sigma);
    let r = (cfg.ksize / 2) as isize;
    let (ny, nx) = img.dim();
    let mut rows = Array2::zeros((ny, nx));
    for j in 0..ny {
        for i in 0..nx {
            let mut acc = 0.0;
            for (t, w) in k.iter().enumerate() {
                acc += w * img[[j, reflect_index(i as isize + t as isize - r, nx)]];
            }
            rows[[j, i]] = acc;
        }
    }
    let mut out = Array2::zeros((ny, nx));
    for j in 0..ny {
        for i in 0..nx {
            let mut acc = 0.0;
            for (t, w) in k.iter().enumerate() {
                acc += w * rows[[reflect_index(j as isize + t as isize - r, ny), i]];
            }
            out[[j, i]] = acc;
        }
    }
    Ok(out)
}

pub fn gaussian_filter(img: &TwoChannelImage, cfg: &GaussianConfig) -> Result<TwoChannelImage, FilterError> {
    Ok(TwoChannelImage::new(gaussian_channel(&img.re, cfg)?, gaussian_channel(&img.im, cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_sums_to_one() {
        let k = gaussian_kernel(7, 1.0).unwrap();
        assert!((k.sum() - 1.0).abs() < 1e-12);
        assert!(gaussian_kernel(6, 1.0).is_err());
        assert!(gaussian_kernel(7, 0.0).is_err());
    }
}
