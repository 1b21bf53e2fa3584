//! Windowed Fourier filtering.
//!
//! The image is expanded over Gaussian windows modulated to every frequency of a rectangular
//! lattice. Coefficients weaker than `threshold_mult * sigma` are zeroed and the image is
//! resynthesized with the same windows. With the window normalized to unit energy, white noise of
//! per-channel deviation `sigma` yields coefficients of the same deviation, so the threshold is a
//! plain multiple of the noise level.
//!
//! Both the analysis and the synthesis are convolutions, carried out as products in the DFT
//! domain of the reflect-padded image. The window spectrum is evaluated in closed form at
//! `omega - xi`, so lattice frequencies need not fall on DFT bins.

use ndarray::{s, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{estimate_noise_sigma, reflect_pad, FilterError};
use crate::fft::{fft2, ifft2, next_fast_len, signed_index};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WffConfig {
    /// Window standard deviation, pixels. The window is truncated at three deviations.
    pub window_sigma: f64,
    /// Frequency lattice bounds and step, rad/pixel, applied to both axes.
    pub freq_lo: f64,
    pub freq_hi: f64,
    pub freq_step: f64,
    pub threshold_mult: f64,
    /// Noise level; the mean of both channels' estimates when absent.
    pub sigma: Option<f64>,
}

impl Default for WffConfig {
    fn default() -> Self {
        WffConfig {
            window_sigma: 10.0,
            freq_lo: -std::f64::consts::FRAC_PI_2,
            freq_hi: std::f64::consts::FRAC_PI_2,
            freq_step: 0.1,
            threshold_mult: 3.0,
            sigma: None,
        }
    }
}

impl WffConfig {
    pub fn validate(&self) -> Result<(), FilterError> {
        if !(self.window_sigma > 0.0) {
            return Err(FilterError::Parameter(format!("wff window sigma {} must be positive", self.window_sigma)));
        }
        if !(self.threshold_mult >= 0.0) {
            return Err(FilterError::Parameter(format!(
                "wff threshold multiplier {} must be non-negative",
                self.threshold_mult
            )));
        }
        if !(self.freq_step > 0.0) {
            return Err(FilterError::Parameter(format!("wff frequency step {} must be positive", self.freq_step)));
        }
        if !(self.freq_lo < self.freq_hi) {
            return Err(FilterError::EmptyLattice);
        }
        Ok(())
    }

    /// `freq_lo + m * freq_step` for every `m` that stays within `freq_hi`.
    pub fn lattice(&self) -> Vec<f64> {
        let n = ((self.freq_hi - self.freq_lo) / self.freq_step + 1e-9).floor() as usize + 1;
        (0..n).map(|m| self.freq_lo + m as f64 * self.freq_step).collect()
    }

    pub fn radius(&self) -> usize {
        (3.0 * self.window_sigma).ceil() as usize
    }
}

/// 1D window taps on `-r..=r`, scaled so the 2D outer product has unit energy.
fn window_taps(sigma: f64, r: usize) -> Vec<f64> {
    let r = r as isize;
    let mut g: Vec<f64> = (-r..=r).map(|t| (-((t * t) as f64) / (2.0 * sigma * sigma)).exp()).collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    g.iter_mut().for_each(|v| *v /= norm);
    g
}

/// DTFT of the symmetric taps, real.
fn window_spectrum(taps: &[f64], omega: f64) -> f64 {
    let r = taps.len() / 2;
    let mut acc = taps[r];
    for t in 1..=r {
        acc += 2.0 * taps[r + t] * (omega * t as f64).cos();
    }
    acc
}

pub fn wff_filter(field: &Array2<Complex64>, cfg: &WffConfig) -> Result<Array2<Complex64>, FilterError> {
    cfg.validate()?;
    let lattice = cfg.lattice();
    if lattice.is_empty() {
        return Err(FilterError::EmptyLattice);
    }
    let (ny, nx) = field.dim();
    let re = field.mapv(|z| z.re);
    let im = field.mapv(|z| z.im);
    let sigma = match cfg.sigma {
        Some(s) => s,
        None => 0.5 * (estimate_noise_sigma(&re)? + estimate_noise_sigma(&im)?),
    };
    let threshold = cfg.threshold_mult * sigma;

    let r = cfg.radius();
    let taps = window_taps(cfg.window_sigma, r);
    // Analysis reaches r pixels past the border and synthesis another r.
    let pad = 2 * r;
    let (pre, pim) = (reflect_pad(&re, pad, pad), reflect_pad(&im, pad, pad));
    let (py, px) = pre.dim();
    let (fy, fx) = (next_fast_len(py), next_fast_len(px));
    let mut padded = Array2::<Complex64>::zeros((fy, fx));
    for ((j, i), z) in padded.slice_mut(s![..py, ..px]).indexed_iter_mut() {
        *z = Complex64::new(pre[[j, i]], pim[[j, i]]);
    }
    let spectrum = fft2(&padded);

    let two_pi = 2.0 * std::f64::consts::PI;
    let omega_x: Vec<f64> = (0..fx).map(|m| two_pi * signed_index(m, fx) / fx as f64).collect();
    let omega_y: Vec<f64> = (0..fy).map(|m| two_pi * signed_index(m, fy) / fy as f64).collect();
    let gx: Vec<Vec<f64>> = lattice
        .iter()
        .map(|&xi| omega_x.iter().map(|&w| window_spectrum(&taps, w - xi)).collect())
        .collect();
    let gy: Vec<Vec<f64>> = lattice
        .iter()
        .map(|&xi| omega_y.iter().map(|&w| window_spectrum(&taps, w - xi)).collect())
        .collect();
    // Frame response at zero frequency; the synthesis is divided by it.
    let partition_1d: f64 = lattice.iter().map(|&xi| window_spectrum(&taps, -xi).powi(2)).sum();
    let partition = partition_1d * partition_1d;

    let mut acc = Array2::<Complex64>::zeros((fy, fx));
    let mut band = Array2::<Complex64>::zeros((fy, fx));
    for gyv in &gy {
        for gxv in &gx {
            ndarray::Zip::indexed(&mut band).and(&spectrum).for_each(|(j, i), b, &f| {
                *b = f * (gyv[j] * gxv[i]);
            });
            let mut coeffs = ifft2(&band);
            coeffs.mapv_inplace(|z| if z.norm() < threshold { Complex64::new(0.0, 0.0) } else { z });
            let kept = fft2(&coeffs);
            ndarray::Zip::indexed(&mut acc).and(&kept).for_each(|(j, i), a, &k| {
                *a += k * (gyv[j] * gxv[i]);
            });
        }
    }
    let out = ifft2(&acc);
    let inv = 1.0 / partition;
    Ok(out.slice(s![pad..pad + ny, pad..pad + nx]).mapv(|z| z * inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_bounds() {
        let cfg = WffConfig::default();
        let l = cfg.lattice();
        assert_eq!(l.len(), 32);
        assert!(l[31] <= cfg.freq_hi);
        let bad = WffConfig { freq_lo: 1.0, freq_hi: 1.0, ..cfg };
        assert_eq!(bad.validate(), Err(FilterError::EmptyLattice));
    }

    #[test]
    fn taps_have_unit_energy() {
        let t = window_taps(10.0, 30);
        let e1: f64 = t.iter().map(|v| v * v).sum();
        assert!((e1 - 1.0).abs() < 1e-12);
    }
}
