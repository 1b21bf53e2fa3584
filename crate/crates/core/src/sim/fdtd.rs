//! 2D acoustic FDTD on a staggered grid with leapfrog time stepping.
//!
//! Pressure lives on cell centers, `vx` on vertical faces and `vy` on horizontal faces. Density
//! is normalized to one, so the update is
//!
//! ```text
//! v^{n+1/2} = v^{n-1/2} - (dt/dx) grad p^n
//! p^{n+1}   = p^n - c^2 (dt/dx) div v^{n+1/2}
//! ```
//!
//! The outer walls are rigid (normal velocity zero). For this scheme the quantity
//! `sum p^n^2 + c^2 sum v^{n-1/2} . v^{n+1/2}` is conserved exactly, which is what
//! [`Fdtd2d::energy`] reports.

use ndarray::{s, Array2, Array3};

use super::{FieldSequence, Grid2D, SimError};

/// Largest stable Courant number `c dt / dx` in 2D.
pub const MAX_COURANT: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug)]
pub struct Fdtd2d {
    nx: usize,
    ny: usize,
    c: f64,
    courant: f64,
    p: Array2<f64>,
    vx: Array2<f64>,
    vy: Array2<f64>,
    vx_prev: Array2<f64>,
    vy_prev: Array2<f64>,
    steps: usize,
}

impl Fdtd2d {
    /// `courant` is `c dt / dx`.
    pub fn new(nx: usize, ny: usize, c: f64, courant: f64) -> Result<Self, SimError> {
        if nx < 2 || ny < 2 {
            return Err(SimError::Parameter(format!("fdtd grid {nx}x{ny} too small")));
        }
        if !(c > 0.0) {
            return Err(SimError::Parameter(format!("sound speed {c} must be positive")));
        }
        if !(courant > 0.0) || courant > MAX_COURANT + 1e-12 {
            return Err(SimError::Parameter(format!(
                "courant number {courant} outside (0, 1/sqrt(2)]"
            )));
        }
        Ok(Fdtd2d {
            nx,
            ny,
            c,
            courant,
            p: Array2::zeros((ny, nx)),
            vx: Array2::zeros((ny, nx + 1)),
            vy: Array2::zeros((ny + 1, nx)),
            vx_prev: Array2::zeros((ny, nx + 1)),
            vy_prev: Array2::zeros((ny + 1, nx)),
            steps: 0,
        })
    }

    pub fn pressure(&self) -> &Array2<f64> {
        &self.p
    }

    pub fn pressure_mut(&mut self) -> &mut Array2<f64> {
        &mut self.p
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advances velocities by half a step; the pressure update completes the step.
    fn update_velocity(&mut self) {
        // dt / dx = courant / c
        let tau = self.courant / self.c;
        std::mem::swap(&mut self.vx, &mut self.vx_prev);
        std::mem::swap(&mut self.vy, &mut self.vy_prev);
        let (ny, nx) = (self.ny, self.nx);
        for j in 0..ny {
            self.vx[[j, 0]] = 0.0;
            self.vx[[j, nx]] = 0.0;
            for i in 1..nx {
                self.vx[[j, i]] = self.vx_prev[[j, i]] - tau * (self.p[[j, i]] - self.p[[j, i - 1]]);
            }
        }
        for i in 0..nx {
            self.vy[[0, i]] = 0.0;
            self.vy[[ny, i]] = 0.0;
        }
        for j in 1..ny {
            for i in 0..nx {
                self.vy[[j, i]] = self.vy_prev[[j, i]] - tau * (self.p[[j, i]] - self.p[[j - 1, i]]);
            }
        }
    }

    fn update_pressure(&mut self) {
        let coef = self.c * self.courant;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let div = self.vx[[j, i + 1]] - self.vx[[j, i]] + self.vy[[j + 1, i]] - self.vy[[j, i]];
                self.p[[j, i]] -= coef * div;
            }
        }
    }

    fn leapfrog_energy(&self) -> f64 {
        let c2 = self.c * self.c;
        let pe: f64 = self.p.iter().map(|v| v * v).sum();
        let ke: f64 = self.vx.iter().zip(self.vx_prev.iter()).map(|(a, b)| a * b).sum::<f64>()
            + self.vy.iter().zip(self.vy_prev.iter()).map(|(a, b)| a * b).sum::<f64>();
        pe + c2 * ke
    }

    /// Advances one full step and returns the conserved energy of the state before the step.
    pub fn step(&mut self) -> f64 {
        self.update_velocity();
        let energy = self.leapfrog_energy();
        self.update_pressure();
        self.steps += 1;
        energy
    }

    /// Conserved energy of the current pressure state (peeks half a step ahead).
    pub fn energy(&self) -> f64 {
        let mut probe = self.clone();
        probe.update_velocity();
        probe.leapfrog_energy()
    }
}

/// Initial Gaussian pressure pulse `amplitude * exp(-|r - center|^2 / (2 width^2))` with zero
/// velocity. Coordinates are physical, in the measurement grid's frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianPulse {
    pub center: (f64, f64),
    pub width: f64,
    pub amplitude: f64,
}

#[derive(Clone, Debug)]
pub struct PulseSimulation {
    pub sequence: FieldSequence,
    /// Conserved energy per frame over the whole padded domain.
    pub energy: Vec<f64>,
    /// Padding added on every side, in pixels.
    pub padding: usize,
}

/// Pulse propagation cropped to `grid`, one step per frame.
pub fn fdtd_pulse(
    grid: &Grid2D,
    c: f64,
    cfl: f64,
    n_t: usize,
    pulse: &GaussianPulse,
) -> Result<FieldSequence, SimError> {
    simulate_pulse(grid, c, cfl, n_t, pulse).map(|run| run.sequence)
}

/// As [`fdtd_pulse`], also returning the per-frame energy.
pub fn simulate_pulse(
    grid: &Grid2D,
    c: f64,
    cfl: f64,
    n_t: usize,
    pulse: &GaussianPulse,
) -> Result<PulseSimulation, SimError> {
    let dx = grid.dx();
    if cfl > MAX_COURANT + 1e-12 {
        return Err(SimError::Parameter(format!("cfl {cfl} exceeds 1/sqrt(2)")));
    }
    if pulse.width < 2.0 * dx {
        return Err(SimError::Parameter(format!(
            "pulse width {} is below two pixels ({})",
            pulse.width,
            2.0 * dx
        )));
    }
    if n_t < 2 {
        return Err(SimError::Parameter(format!("need at least 2 frames, got {n_t}")));
    }
    // Distance travelled over the run plus the Gaussian tail.
    let padding = (n_t as f64 * cfl).ceil() as usize + (4.0 * pulse.width / dx).ceil() as usize + 2;
    let nx = grid.nx + 2 * padding;
    let ny = grid.ny + 2 * padding;
    let mut solver = Fdtd2d::new(nx, ny, c, cfl)?;
    {
        let p = solver.pressure_mut();
        let inv = 1.0 / (2.0 * pulse.width * pulse.width);
        for ((j, i), v) in p.indexed_iter_mut() {
            let x = grid.x_center(0) + (i as f64 - padding as f64) * dx;
            let y = grid.y_center(0) + (j as f64 - padding as f64) * dx;
            let r2 = (x - pulse.center.0).powi(2) + (y - pulse.center.1).powi(2);
            *v = pulse.amplitude * (-r2 * inv).exp();
        }
    }
    let limit = 1e6 * pulse.amplitude.abs();
    let mut frames = Array3::zeros((n_t, grid.ny, grid.nx));
    let mut energy = Vec::with_capacity(n_t);
    for m in 0..n_t {
        let p = solver.pressure();
        let max_abs = p.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if !max_abs.is_finite() || (max_abs > limit && max_abs > 0.0) {
            return Err(SimError::Unstable { step: m, max_abs });
        }
        frames
            .slice_mut(s![m, .., ..])
            .assign(&p.slice(s![padding..padding + grid.ny, padding..padding + grid.nx]));
        energy.push(solver.step());
    }
    let dt = cfl * dx / c;
    Ok(PulseSimulation {
        sequence: FieldSequence::new(frames, dt, *grid)?,
        energy,
        padding,
    })
}
