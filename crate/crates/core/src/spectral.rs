//! Frequency-domain denoising of field sequences.
//!
//! A real `(time, y, x)` sequence is transformed along time at every pixel. Only the
//! non-negative bins `0..=n_t/2` are kept; the negative half is implied by conjugate symmetry.
//! Each stored bin is normalized by its largest channel magnitude, handed to a [`Denoiser`] as a
//! two-channel (real, imaginary) image, rescaled, and the sequence is rebuilt by the inverse
//! transform.
//!
//! Transform convention: `Psi[b] = sum_m Phi[m] exp(-2 pi i b m / n_t)` forward, `1/n_t` on the
//! inverse. The frame count may be any length of at least two.

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::fft::{plan_forward, plan_inverse};
use crate::sim::{FieldSequence, Grid2D};

/// Bins whose largest channel magnitude is at or below this are passed through untouched.
pub const SKIP_THRESHOLD: f64 = 1e-12;
/// Imaginary residue on the DC / Nyquist bins that is discarded without complaint.
pub const REAL_BIN_ABS_TOL: f64 = 1e-9;
/// Imaginary residue, relative to the bin's peak magnitude, above which reconstruction fails.
pub const REAL_BIN_REL_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("sequence needs at least 2 frames, got {0}")]
    TooShort(usize),
    #[error("non-finite sample in input")]
    NonFinite,
    #[error("bin {bin} must be real but carries imaginary part {imag:e} (bin peak {peak:e})")]
    SymmetryViolation { bin: usize, imag: f64, peak: f64 },
    #[error("stack is inconsistent: {0}")]
    InvalidStack(String),
    #[error("denoiser changed the image shape from {expected:?} to {found:?}")]
    ShapeChanged { expected: (usize, usize), found: (usize, usize) },
    #[error("denoiser produced non-finite values")]
    NonFiniteOutput,
    #[error("bin {bin}: {source}")]
    Method {
        bin: usize,
        #[source]
        source: Box<crate::Error>,
    },
}

/// Real / imaginary channel pair; the unit every denoiser consumes and produces.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoChannelImage {
    pub re: Array2<f64>,
    pub im: Array2<f64>,
}

impl TwoChannelImage {
    pub fn new(re: Array2<f64>, im: Array2<f64>) -> Self {
        assert_eq!(re.dim(), im.dim(), "channels must share a shape");
        TwoChannelImage { re, im }
    }

    pub fn zeros(shape: (usize, usize)) -> Self {
        TwoChannelImage {
            re: Array2::zeros(shape),
            im: Array2::zeros(shape),
        }
    }

    pub fn from_complex(field: &Array2<Complex64>) -> Self {
        TwoChannelImage {
            re: field.mapv(|z| z.re),
            im: field.mapv(|z| z.im),
        }
    }

    pub fn to_complex(&self) -> Array2<Complex64> {
        let mut out = Array2::zeros(self.re.dim());
        ndarray::Zip::from(&mut out)
            .and(&self.re)
            .and(&self.im)
            .for_each(|o, &r, &i| *o = Complex64::new(r, i));
        out
    }

    pub fn dim(&self) -> (usize, usize) {
        self.re.dim()
    }

    /// Largest absolute value over both channels.
    pub fn max_abs(&self) -> f64 {
        self.re
            .iter()
            .chain(self.im.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.re.iter().chain(self.im.iter()).all(|v| v.is_finite())
    }

    /// Applies `f` to each channel independently.
    pub fn map_channels(&self, mut f: impl FnMut(&Array2<f64>) -> Array2<f64>) -> Self {
        TwoChannelImage::new(f(&self.re), f(&self.im))
    }

    pub fn scaled(&self, s: f64) -> Self {
        TwoChannelImage::new(self.re.mapv(|v| v * s), self.im.mapv(|v| v * s))
    }
}

/// Which frequency bin an image came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinInfo {
    pub index: usize,
    /// Angular frequency of the bin, rad per time unit.
    pub omega: f64,
    /// Angular frequency of the first non-zero bin, when the image came from a sequence.
    pub first_omega: Option<f64>,
}

impl BinInfo {
    /// A stand-alone harmonic field of wavenumber `k` in units where the sound speed is one.
    pub fn harmonic(k: f64) -> Self {
        BinInfo {
            index: 1,
            omega: k,
            first_omega: None,
        }
    }
}

/// Denoising of one single-frequency two-channel image.
///
/// Implementations must be callable from several worker threads at once.
pub trait Denoiser: Send + Sync {
    fn name(&self) -> &str;

    fn denoise(&self, image: &TwoChannelImage, bin: &BinInfo) -> Result<TwoChannelImage, crate::Error>;
}

impl<D: Denoiser + ?Sized> Denoiser for Box<D> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn denoise(&self, image: &TwoChannelImage, bin: &BinInfo) -> Result<TwoChannelImage, crate::Error> {
        (**self).denoise(image, bin)
    }
}

/// Single-frequency complex amplitude image.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub data: Array2<Complex64>,
    pub bin_index: usize,
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralStack {
    /// Bins `0..=n_t/2`.
    pub bins: Vec<ComplexField>,
    pub n_t: usize,
    pub dt: f64,
    pub grid: Grid2D,
}

impl SpectralStack {
    pub fn bin_omega(b: usize, n_t: usize, dt: f64) -> f64 {
        2.0 * std::f64::consts::PI * b as f64 / (n_t as f64 * dt)
    }

    /// `sum |Psi|^2` over the full (mirrored) spectrum.
    pub fn full_spectrum_energy(&self) -> f64 {
        let nyquist = if self.n_t % 2 == 0 { Some(self.n_t / 2) } else { None };
        self.bins
            .iter()
            .map(|bin| {
                let e: f64 = bin.data.iter().map(|z| z.norm_sqr()).sum();
                if bin.bin_index == 0 || Some(bin.bin_index) == nyquist {
                    e
                } else {
                    2.0 * e
                }
            })
            .sum()
    }

    fn bin_info(&self, index: usize) -> BinInfo {
        BinInfo {
            index,
            omega: Self::bin_omega(index, self.n_t, self.dt),
            first_omega: Some(Self::bin_omega(1, self.n_t, self.dt)),
        }
    }

    fn is_real_bin(&self, index: usize) -> bool {
        index == 0 || (self.n_t % 2 == 0 && index == self.n_t / 2)
    }
}

pub fn decompose(seq: &FieldSequence) -> Result<SpectralStack, SpectralError> {
    let (n_t, ny, nx) = seq.data.dim();
    if n_t < 2 {
        return Err(SpectralError::TooShort(n_t));
    }
    if seq.data.iter().any(|v| !v.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let half = n_t / 2;
    let mut bins: Vec<Array2<Complex64>> = (0..=half).map(|_| Array2::zeros((ny, nx))).collect();
    let fft = plan_forward(n_t);
    let mut buf = vec![Complex64::new(0.0, 0.0); n_t];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for j in 0..ny {
        for i in 0..nx {
            for (m, b) in buf.iter_mut().enumerate() {
                *b = Complex64::new(seq.data[[m, j, i]], 0.0);
            }
            fft.process_with_scratch(&mut buf, &mut scratch);
            for (b, bin) in bins.iter_mut().enumerate() {
                bin[[j, i]] = buf[b];
            }
        }
    }
    Ok(SpectralStack {
        bins: bins
            .into_iter()
            .enumerate()
            .map(|(b, data)| ComplexField {
                data,
                bin_index: b,
                omega: SpectralStack::bin_omega(b, n_t, seq.dt),
            })
            .collect(),
        n_t,
        dt: seq.dt,
        grid: seq.grid,
    })
}

pub fn reconstruct(stack: &SpectralStack) -> Result<FieldSequence, SpectralError> {
    let n_t = stack.n_t;
    if n_t < 2 {
        return Err(SpectralError::TooShort(n_t));
    }
    let half = n_t / 2;
    if stack.bins.len() != half + 1 {
        return Err(SpectralError::InvalidStack(format!(
            "{} bins stored, {} expected for {n_t} frames",
            stack.bins.len(),
            half + 1
        )));
    }
    let (ny, nx) = (stack.grid.ny, stack.grid.nx);
    for (b, bin) in stack.bins.iter().enumerate() {
        if bin.data.dim() != (ny, nx) {
            return Err(SpectralError::InvalidStack(format!("bin {b} has shape {:?}", bin.data.dim())));
        }
        if bin.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        if stack.is_real_bin(b) {
            let peak = bin.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            let imag = bin.data.iter().fold(0.0_f64, |m, z| m.max(z.im.abs()));
            if imag > REAL_BIN_ABS_TOL && imag > REAL_BIN_REL_TOL * peak {
                return Err(SpectralError::SymmetryViolation { bin: b, imag, peak });
            }
        }
    }
    let ifft = plan_inverse(n_t);
    let mut buf = vec![Complex64::new(0.0, 0.0); n_t];
    let mut scratch = vec![Complex64::new(0.0, 0.0); ifft.get_inplace_scratch_len()];
    let scale = 1.0 / n_t as f64;
    let mut data = Array3::zeros((n_t, ny, nx));
    for j in 0..ny {
        for i in 0..nx {
            buf[0] = Complex64::new(stack.bins[0].data[[j, i]].re, 0.0);
            for b in 1..n_t {
                buf[b] = if b <= half {
                    let z = stack.bins[b].data[[j, i]];
                    if stack.is_real_bin(b) {
                        Complex64::new(z.re, 0.0)
                    } else {
                        z
                    }
                } else {
                    stack.bins[n_t - b].data[[j, i]].conj()
                };
            }
            ifft.process_with_scratch(&mut buf, &mut scratch);
            for m in 0..n_t {
                data[[m, j, i]] = buf[m].re * scale;
            }
        }
    }
    FieldSequence::new(data, stack.dt, stack.grid)
        .map_err(|e| SpectralError::InvalidStack(e.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub field: Array2<Complex64>,
    pub scale: f64,
    /// Set when the field is too small to normalize; `field` is then the input unchanged.
    pub skipped: bool,
}

/// Divides by the largest channel magnitude `max(|Re|, |Im|)` over all pixels.
pub fn normalize(field: &Array2<Complex64>) -> Normalized {
    let scale = field
        .iter()
        .fold(0.0_f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale > SKIP_THRESHOLD {
        let inv = 1.0 / scale;
        Normalized {
            field: field.mapv(|z| z * inv),
            scale,
            skipped: false,
        }
    } else {
        Normalized {
            field: field.clone(),
            scale: 1.0,
            skipped: true,
        }
    }
}

pub fn denormalize(field: &Array2<Complex64>, scale: f64) -> Array2<Complex64> {
    field.mapv(|z| z * scale)
}

/// Normalize, denoise and rescale one complex image.
pub fn denoise_field(
    field: &Array2<Complex64>,
    bin: &BinInfo,
    method: &dyn Denoiser,
) -> Result<Array2<Complex64>, SpectralError> {
    let norm = normalize(field);
    if norm.skipped {
        return Ok(norm.field);
    }
    let input = TwoChannelImage::from_complex(&norm.field);
    let out = method.denoise(&input, bin).map_err(|e| SpectralError::Method {
        bin: bin.index,
        source: Box::new(e),
    })?;
    if out.dim() != input.dim() {
        return Err(SpectralError::ShapeChanged {
            expected: input.dim(),
            found: out.dim(),
        });
    }
    if !out.is_finite() {
        return Err(SpectralError::NonFiniteOutput);
    }
    Ok(denormalize(&out.to_complex(), norm.scale))
}

/// Denoises every stored bin independently and rebuilds the sequence.
///
/// The DC and Nyquist bins of a real sequence are real; the denoised image for those bins is
/// projected onto its real channel before reconstruction. All other bins are mirrored by
/// conjugation, so the output is real for any denoiser.
pub fn denoise_sequence(seq: &FieldSequence, method: &dyn Denoiser) -> Result<FieldSequence, SpectralError> {
    let stack = decompose(seq)?;
    let processed: Result<Vec<ComplexField>, SpectralError> = stack
        .bins
        .par_iter()
        .map(|bin| {
            let info = stack.bin_info(bin.bin_index);
            let mut data = denoise_field(&bin.data, &info, method)?;
            if stack.is_real_bin(bin.bin_index) {
                data.mapv_inplace(|z| Complex64::new(z.re, 0.0));
            }
            Ok(ComplexField {
                data,
                bin_index: bin.bin_index,
                omega: bin.omega,
            })
        })
        .collect();
    let out = SpectralStack {
        bins: processed?,
        ..stack
    };
    reconstruct(&out)
}
