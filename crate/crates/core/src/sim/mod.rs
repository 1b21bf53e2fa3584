//! Ground-truth sound fields.
//!
//! Harmonic fields are superpositions of 2D point-source Green's functions
//! `A * sum_i a_i * (j/4) * H0(2)(k |r_i - r|)` sampled on pixel centers of a square measurement
//! area centered on the origin. Transient fields come from the staggered-grid solver in [`fdtd`].

pub mod fdtd;
pub mod special;

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fdtd::{fdtd_pulse, simulate_pulse, Fdtd2d, GaussianPulse, PulseSimulation};
pub use special::{bessel_j0, bessel_j1, bessel_y0, bessel_y1, hankel2_0, SpecialError};

/// Wavenumber range used when sampling scenes (shortest wavelength 0.156, longest 5 side lengths).
pub const K_RANGE: (f64, f64) = (1.26, 40.2);
/// Relative source amplitude range; the first source is pinned to 1.
pub const SOURCE_AMPLITUDE_RANGE: (f64, f64) = (0.1, 1.0);
/// Sources are drawn from `[-10, 10]^2` minus the `[-0.5, 0.5]^2` measurement square.
pub const SOURCE_OUTER: f64 = 10.0;
pub const SOURCE_INNER: f64 = 0.5;
/// Overall field amplitude.
pub const FIELD_AMPLITUDE: f64 = 0.1;
/// Closest admissible distance between a pixel center and a source.
pub const MIN_SOURCE_DISTANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid grid {nx}x{ny} with side {side}")]
    InvalidGrid { nx: usize, ny: usize, side: f64 },
    #[error("source count {0} outside 1..=10")]
    SourceCount(usize),
    #[error("source {index} lies {distance:e} from a pixel center; field is singular there")]
    Singularity { index: usize, distance: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("simulation unstable at step {step}: |p| reached {max_abs:e}")]
    Unstable { step: usize, max_abs: f64 },
    #[error(transparent)]
    Special(#[from] SpecialError),
}

/// Pixel grid over the measurement area. Pixels are square with pitch `side / nx`; the area is
/// centered on the origin and pixel `i` sits at `(i + 0.5) * dx - extent / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub side: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, side: f64) -> Result<Self, SimError> {
        if nx < 2 || ny < 2 || !(side > 0.0) || !side.is_finite() {
            return Err(SimError::InvalidGrid { nx, ny, side });
        }
        Ok(Grid2D { nx, ny, side })
    }

    /// The 128 x 128 unit square used for the synthetic datasets.
    pub fn standard() -> Self {
        Grid2D { nx: 128, ny: 128, side: 1.0 }
    }

    pub fn square(n: usize) -> Result<Self, SimError> {
        Grid2D::new(n, n, 1.0)
    }

    pub fn dx(&self) -> f64 {
        self.side / self.nx as f64
    }

    pub fn x_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx() - 0.5 * self.side
    }

    pub fn y_center(&self, j: usize) -> f64 {
        let dx = self.dx();
        (j as f64 + 0.5) * dx - 0.5 * dx * self.ny as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    /// Relative amplitude.
    pub a: f64,
    pub x: f64,
    pub y: f64,
}

/// A harmonic point-source scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    /// Acoustic wavenumber, radians per unit length.
    pub k: f64,
    /// Overall amplitude.
    pub amplitude: f64,
    pub sources: Vec<PointSource>,
}

impl SourceConfig {
    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }
}

/// Draws a scene from the dataset distribution: `k ~ U[1.26, 40.2]`, `a_1 = 1`,
/// `a_i ~ U[0.1, 1]` for `i > 1`, positions uniform on `[-10, 10]^2` with the measurement square
/// `|x| < 0.5 && |y| < 0.5` rejected and redrawn.
pub fn sample_source_config<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<SourceConfig, SimError> {
    if !(1..=10).contains(&n) {
        return Err(SimError::SourceCount(n));
    }
    let k = rng.random_range(K_RANGE.0..=K_RANGE.1);
    let sources = (0..n)
        .map(|i| {
            let a = if i == 0 {
                1.0
            } else {
                rng.random_range(SOURCE_AMPLITUDE_RANGE.0..=SOURCE_AMPLITUDE_RANGE.1)
            };
            loop {
                let x = rng.random_range(-SOURCE_OUTER..=SOURCE_OUTER);
                let y = rng.random_range(-SOURCE_OUTER..=SOURCE_OUTER);
                if x.abs() >= SOURCE_INNER || y.abs() >= SOURCE_INNER {
                    return PointSource { a, x, y };
                }
            }
        })
        .collect();
    Ok(SourceConfig {
        k,
        amplitude: FIELD_AMPLITUDE,
        sources,
    })
}

/// Complex pressure of the scene on the grid, shape `(ny, nx)`.
pub fn synth_harmonic_field(config: &SourceConfig, grid: &Grid2D) -> Result<Array2<Complex64>, SimError> {
    if !(config.k > 0.0) || !config.k.is_finite() {
        return Err(SimError::Parameter(format!("wavenumber {} must be positive", config.k)));
    }
    let xs: Vec<f64> = (0..grid.nx).map(|i| grid.x_center(i)).collect();
    let ys: Vec<f64> = (0..grid.ny).map(|j| grid.y_center(j)).collect();
    for (index, s) in config.sources.iter().enumerate() {
        // Nearest pixel center along each axis gives the minimum distance.
        let dx = xs.iter().map(|x| (x - s.x).abs()).fold(f64::INFINITY, f64::min);
        let dy = ys.iter().map(|y| (y - s.y).abs()).fold(f64::INFINITY, f64::min);
        let distance = dx.hypot(dy);
        if distance < MIN_SOURCE_DISTANCE {
            return Err(SimError::Singularity { index, distance });
        }
    }
    let quarter_j = Complex64::new(0.0, 0.25);
    let mut field = Array2::zeros((grid.ny, grid.nx));
    for ((j, i), value) in field.indexed_iter_mut() {
        let mut sum = Complex64::new(0.0, 0.0);
        for s in &config.sources {
            let r = (xs[i] - s.x).hypot(ys[j] - s.y);
            let (j0, y0) = special::j0_y0(config.k * r);
            sum += s.a * Complex64::new(j0, -y0);
        }
        *value = config.amplitude * quarter_j * sum;
    }
    Ok(field)
}

/// Constants of the acousto-optic phase-pressure relation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcoustoOpticConstants {
    /// Optical wavenumber `2 pi / lambda`, rad/m.
    pub optical_wavenumber: f64,
    /// Static refractive index of air.
    pub n0: f64,
    /// Specific heat ratio.
    pub gamma: f64,
    /// Static pressure, Pa.
    pub p0: f64,
}

impl AcoustoOpticConstants {
    /// Typical air values for light of the given vacuum wavelength in meters.
    pub fn air(wavelength: f64) -> Self {
        AcoustoOpticConstants {
            optical_wavenumber: 2.0 * std::f64::consts::PI / wavelength,
            n0: 1.000279,
            gamma: 1.40,
            p0: 101_325.0,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let ok = self.optical_wavenumber > 0.0 && self.n0 > 1.0 && self.gamma > 0.0 && self.p0 > 0.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::Parameter(format!("invalid acousto-optic constants {self:?}")))
        }
    }

    /// Phase shift per unit pressure path integral, rad / (Pa m).
    pub fn coefficient(&self) -> f64 {
        self.optical_wavenumber * (self.n0 - 1.0) / (self.gamma * self.p0)
    }
}

/// Optical phase shift (rad) produced by a pressure line integral (Pa m).
pub fn pressure_to_phase(pressure_path_integral: f64, optics: &AcoustoOpticConstants) -> f64 {
    optics.coefficient() * pressure_path_integral
}

/// Real `(time, y, x)` stack of phase or pressure samples.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSequence {
    pub data: Array3<f64>,
    /// Frame interval.
    pub dt: f64,
    pub grid: Grid2D,
}

impl FieldSequence {
    pub fn new(data: Array3<f64>, dt: f64, grid: Grid2D) -> Result<Self, SimError> {
        let (nt, ny, nx) = data.dim();
        if nt < 2 {
            return Err(SimError::Parameter(format!("sequence needs at least 2 frames, got {nt}")));
        }
        if ny != grid.ny || nx != grid.nx {
            return Err(SimError::Parameter(format!(
                "frame shape {ny}x{nx} does not match grid {}x{}",
                grid.ny, grid.nx
            )));
        }
        if !(dt > 0.0) {
            return Err(SimError::Parameter(format!("frame interval {dt} must be positive")));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Parameter("sequence contains non-finite samples".into()));
        }
        Ok(FieldSequence { data, dt, grid })
    }

    pub fn n_frames(&self) -> usize {
        self.data.dim().0
    }
}
