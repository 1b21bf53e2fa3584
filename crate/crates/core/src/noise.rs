//! Noise models for clean complex fields.
//!
//! White noise is independent `N(0, sigma^2)` on the real and imaginary channels. Its standard
//! deviation is drawn from `U(0, WHITE_SIGMA_FRACTION * A]`. The nominal endpoint is `0.1 A`; it
//! is calibrated to 0.18 so that the dataset-level SNR lands near a mean of -12 dB with a spread
//! of about 9 dB.
//!
//! Speckle is a correlated surrogate: a white circular complex Gaussian image blurred channel-wise
//! by an isotropic Gaussian of standard deviation `corr_len` pixels (periodic convolution),
//! rescaled to unit per-channel standard deviation and multiplied by `amp`. It reproduces the
//! spatially correlated look of speckle-corrupted measurements; it is not a physical specklegram
//! model.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::fft::{fft2, ifft2};

/// Upper end of the white-noise standard deviation draw, as a fraction of the field amplitude.
pub const WHITE_SIGMA_FRACTION: f64 = 0.18;
/// Upper end of the speckle amplitude draw, as a fraction of the field amplitude.
pub const SPECKLE_AMP_FRACTION: f64 = 0.2;
/// Range of the speckle correlation length draw, pixels.
pub const SPECKLE_CORR_RANGE: (f64, f64) = (2.0, 8.0);
/// Saturation value returned by [`snr_db`] when the noise power is zero.
pub const SNR_CAP_DB: f64 = 99.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    White,
    #[serde(rename = "white+speckle")]
    WhiteSpeckle,
}

impl std::str::FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "white" => Ok(NoiseKind::White),
            "white+speckle" => Ok(NoiseKind::WhiteSpeckle),
            other => Err(format!("unknown noise kind {other:?} (expected white or white+speckle)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Per-channel standard deviation of the white component.
    pub white_sigma: f64,
    pub speckle_amp: f64,
    /// Speckle correlation length, pixels.
    pub speckle_corr_len: f64,
}

impl NoiseSpec {
    pub fn white(sigma: f64) -> Self {
        NoiseSpec {
            kind: NoiseKind::White,
            white_sigma: sigma,
            speckle_amp: 0.0,
            speckle_corr_len: 0.0,
        }
    }

    /// Draws the noise parameters of one dataset sample.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, kind: NoiseKind, amplitude: f64) -> Self {
        let white_sigma = sample_white_sigma(rng, amplitude);
        match kind {
            NoiseKind::White => NoiseSpec::white(white_sigma),
            NoiseKind::WhiteSpeckle => {
                let speckle_amp = (1.0 - rng.random::<f64>()) * SPECKLE_AMP_FRACTION * amplitude;
                let speckle_corr_len = rng.random_range(SPECKLE_CORR_RANGE.0..=SPECKLE_CORR_RANGE.1);
                NoiseSpec {
                    kind,
                    white_sigma,
                    speckle_amp,
                    speckle_corr_len,
                }
            }
        }
    }

    /// Applies this noise to `field`, drawing from `rng`.
    pub fn apply<R: Rng + ?Sized>(&self, field: &Array2<Complex64>, rng: &mut R) -> Array2<Complex64> {
        let noisy = add_white(field, self.white_sigma, rng);
        match self.kind {
            NoiseKind::White => noisy,
            NoiseKind::WhiteSpeckle => add_speckle(&noisy, self.speckle_amp, self.speckle_corr_len, rng),
        }
    }
}

/// Uniform draw on `(0, WHITE_SIGMA_FRACTION * A]`.
pub fn sample_white_sigma<R: Rng + ?Sized>(rng: &mut R, amplitude: f64) -> f64 {
    debug_assert!(amplitude > 0.0);
    // random::<f64>() is in [0, 1); flipping it excludes zero and includes the endpoint.
    (1.0 - rng.random::<f64>()) * WHITE_SIGMA_FRACTION * amplitude
}

pub fn add_white<R: Rng + ?Sized>(field: &Array2<Complex64>, sigma: f64, rng: &mut R) -> Array2<Complex64> {
    if sigma == 0.0 {
        return field.clone();
    }
    field.mapv(|z| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        z + sigma * Complex64::new(re, im)
    })
}

/// Zero-mean correlated complex noise with unit per-channel standard deviation.
pub fn speckle_pattern<R: Rng + ?Sized>(shape: (usize, usize), corr_len: f64, rng: &mut R) -> Array2<Complex64> {
    let (ny, nx) = shape;
    let white = Array2::from_shape_simple_fn((ny, nx), || {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    // Periodic Gaussian blur: multiply by the transfer function of the sampled kernel.
    let kernel_1d = |n: usize| -> Vec<f64> {
        let mut k: Vec<f64> = (0..n)
            .map(|i| {
                let d = i.min(n - i) as f64;
                (-d * d / (2.0 * corr_len * corr_len)).exp()
            })
            .collect();
        let s: f64 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= s);
        k
    };
    let ky = kernel_1d(ny);
    let kx = kernel_1d(nx);
    let kernel = Array2::from_shape_fn((ny, nx), |(j, i)| Complex64::new(ky[j] * kx[i], 0.0));
    let transfer = fft2(&kernel);
    let mut spectrum = fft2(&white);
    spectrum.zip_mut_with(&transfer, |s, t| *s *= t);
    let blurred = ifft2(&spectrum);
    // The kernel is real and even, so re and im stay independent; rescale each to unit std.
    let n = (ny * nx) as f64;
    let mean = blurred.sum() / n;
    let var_re = blurred.iter().map(|z| (z.re - mean.re).powi(2)).sum::<f64>() / n;
    let var_im = blurred.iter().map(|z| (z.im - mean.im).powi(2)).sum::<f64>() / n;
    let (sr, si) = (var_re.sqrt().max(f64::MIN_POSITIVE), var_im.sqrt().max(f64::MIN_POSITIVE));
    blurred.mapv(|z| Complex64::new((z.re - mean.re) / sr, (z.im - mean.im) / si))
}

pub fn add_speckle<R: Rng + ?Sized>(
    field: &Array2<Complex64>,
    amp: f64,
    corr_len: f64,
    rng: &mut R,
) -> Array2<Complex64> {
    if amp == 0.0 {
        return field.clone();
    }
    let pattern = speckle_pattern(field.dim(), corr_len.max(1.0), rng);
    field + &pattern.mapv(|z| z * amp)
}

/// `10 log10(sum |clean|^2 / sum |noisy - clean|^2)`, saturating at [`SNR_CAP_DB`].
pub fn snr_db(clean: &Array2<Complex64>, noisy: &Array2<Complex64>) -> f64 {
    assert_eq!(clean.dim(), noisy.dim(), "snr_db needs equal shapes");
    let signal: f64 = clean.iter().map(|z| z.norm_sqr()).sum();
    let noise: f64 = clean.iter().zip(noisy.iter()).map(|(c, n)| (n - c).norm_sqr()).sum();
    if noise == 0.0 {
        return SNR_CAP_DB;
    }
    (10.0 * (signal / noise).log10()).min(SNR_CAP_DB)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn white_sigma_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let s = sample_white_sigma(&mut rng, 0.1);
            assert!(s > 0.0 && s <= WHITE_SIGMA_FRACTION * 0.1);
        }
    }

    #[test]
    fn zero_amplitudes_are_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Array2::from_elem((4, 4), Complex64::new(1.0, -2.0));
        assert_eq!(add_white(&f, 0.0, &mut rng), f);
        assert_eq!(add_speckle(&f, 0.0, 3.0, &mut rng), f);
    }

    #[test]
    fn snr_closed_forms() {
        let clean = Array2::from_elem((4, 4), Complex64::new(1.0, 0.0));
        assert_eq!(snr_db(&clean, &clean), SNR_CAP_DB);
        let noisy = clean.mapv(|z| z + Complex64::new(0.0, 1.0));
        assert!(snr_db(&clean, &noisy).abs() < 1e-12);
        let louder = clean.mapv(|z| z * 10.0);
        let noisy_louder = &louder + &(&noisy - &clean);
        assert!((snr_db(&louder, &noisy_louder) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn noise_kind_parses() {
        assert_eq!("white".parse::<NoiseKind>().unwrap(), NoiseKind::White);
        assert_eq!("white+speckle".parse::<NoiseKind>().unwrap(), NoiseKind::WhiteSpeckle);
        assert!("pink".parse::<NoiseKind>().is_err());
        let json = serde_json::to_string(&NoiseKind::WhiteSpeckle).unwrap();
        assert_eq!(json, "\"white+speckle\"");
    }
}
