//! Wavenumber-cone band-pass filter.
//!
//! Propagating sound at angular frequency `omega` lives on the circle `|kappa| = omega / c` of the
//! spatial wavenumber plane. Each complex image is transformed, multiplied by a radial Butterworth
//! band-pass centered on that circle and transformed back. The mask is real and non-negative, so
//! no phase is introduced.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FilterError;
use crate::fft::{fft2, ifft2, signed_index};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StbpfConfig {
    /// Sound speed.
    pub c: f64,
    /// Pixel pitch.
    pub dx: f64,
    pub order: u32,
    pub lo_ratio: f64,
    pub hi_ratio: f64,
}

impl StbpfConfig {
    /// Unit sound speed on the standard 128-pixel unit square, so that `omega == k`.
    pub fn harmonic() -> Self {
        StbpfConfig {
            c: 1.0,
            dx: 1.0 / 128.0,
            order: 4,
            lo_ratio: 0.5,
            hi_ratio: 1.2,
        }
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        if !(self.c > 0.0) || !(self.dx > 0.0) {
            return Err(FilterError::Parameter(format!("stbpf c {} and dx {} must be positive", self.c, self.dx)));
        }
        if self.order < 1 {
            return Err(FilterError::Parameter("stbpf order must be at least 1".into()));
        }
        if !(self.lo_ratio > 0.0 && self.lo_ratio < self.hi_ratio) {
            return Err(FilterError::Parameter(format!(
                "stbpf ratios need 0 < lo ({}) < hi ({})",
                self.lo_ratio, self.hi_ratio
            )));
        }
        Ok(())
    }
}

/// `|LP|^2 = 1 / (1 + (kappa/kc)^(2n))`.
pub fn butterworth_lp_gain2(kappa: f64, kc: f64, order: u32) -> f64 {
    1.0 / (1.0 + (kappa / kc).powi(2 * order as i32))
}

/// `|HP|^2 = (kappa/kc)^(2n) / (1 + (kappa/kc)^(2n))`.
pub fn butterworth_hp_gain2(kappa: f64, kc: f64, order: u32) -> f64 {
    let r = (kappa / kc).powi(2 * order as i32);
    if r.is_infinite() {
        1.0
    } else {
        r / (1.0 + r)
    }
}

/// Amplitude gain at radial wavenumber `kappa`.
///
/// For `k_bin > 0` this is `sqrt(|HP|^2 |LP|^2)` with cutoffs `lo_ratio k_bin` and
/// `hi_ratio k_bin`. The zero-frequency bin has no cone; it is low-passed with the cutoff of the
/// first non-zero bin (`k_first`), or reduced to its spatial mean when that is unknown.
pub fn stbpf_gain(kappa: f64, k_bin: f64, k_first: Option<f64>, cfg: &StbpfConfig) -> f64 {
    if k_bin > 0.0 {
        let hp = butterworth_hp_gain2(kappa, cfg.lo_ratio * k_bin, cfg.order);
        let lp = butterworth_lp_gain2(kappa, cfg.hi_ratio * k_bin, cfg.order);
        (hp * lp).sqrt()
    } else {
        match k_first {
            Some(kf) if kf > 0.0 => butterworth_lp_gain2(kappa, cfg.hi_ratio * kf, cfg.order).sqrt(),
            _ => {
                if kappa == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Applies the radial mask; `k_bin` is the acoustic wavenumber of the image's frequency.
pub fn stbpf_filter(
    field: &Array2<Complex64>,
    k_bin: f64,
    k_first: Option<f64>,
    cfg: &StbpfConfig,
) -> Result<Array2<Complex64>, FilterError> {
    cfg.validate()?;
    if !(k_bin >= 0.0) || !k_bin.is_finite() {
        return Err(FilterError::Parameter(format!("bin wavenumber {k_bin} must be non-negative")));
    }
    let (ny, nx) = field.dim();
    let mut spectrum = fft2(field);
    let two_pi = 2.0 * std::f64::consts::PI;
    let kx: Vec<f64> = (0..nx).map(|m| two_pi * signed_index(m, nx) / (nx as f64 * cfg.dx)).collect();
    let ky: Vec<f64> = (0..ny).map(|m| two_pi * signed_index(m, ny) / (ny as f64 * cfg.dx)).collect();
    for ((j, i), z) in spectrum.indexed_iter_mut() {
        let kappa = kx[i].hypot(ky[j]);
        *z *= stbpf_gain(kappa, k_bin, k_first, cfg);
    }
    Ok(ifft2(&spectrum))
}
