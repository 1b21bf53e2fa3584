//! Noisy pulse sequence denoised bin by bin with the space-time band-pass filter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sfd::filters::StbpfConfig;
use sfd::methods::Stbpf;
use sfd::sim::{simulate_pulse, FieldSequence, GaussianPulse, Grid2D};
use sfd::spectral::{decompose, denoise_sequence};

fn rms(a: &ndarray::Array3<f64>, b: &ndarray::Array3<f64>) -> f64 {
    (a.iter().zip(b.iter()).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid2D::square(64)?;
    let pulse = GaussianPulse { center: (0.0, 0.0), width: 0.06, amplitude: 1.0 };
    let clean = simulate_pulse(&grid, 1.0, 0.5, 96, &pulse)?.sequence;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let normal = Normal::new(0.0, 0.05)?;
    let noisy = FieldSequence::new(clean.data.mapv(|v| v + normal.sample(&mut rng)), clean.dt, grid)?;
    let stack = decompose(&noisy)?;
    println!("{} frames -> {} bins, top omega {:.1}", noisy.n_frames(), stack.bins.len(), stack.bins.last().unwrap().omega);
    let cfg = StbpfConfig { c: 1.0, dx: grid.dx(), ..StbpfConfig::harmonic() };
    let out = denoise_sequence(&noisy, &Stbpf(cfg))?;
    println!("rms error: noisy {:.4}, filtered {:.4}", rms(&noisy.data, &clean.data), rms(&out.data, &clean.data));
    Ok(())
}
