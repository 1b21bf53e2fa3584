//! Writes a small white-noise dataset and prints the SNR of each sample.
//!
//! `cargo run --release --example generate_dataset [out_dir]`

use sfd::dataset::{generate_dataset, load_sample, DatasetConfig};
use sfd::noise::{snr_db, NoiseKind};
use sfd::sim::Grid2D;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("sfd_dataset"));
    let cfg = DatasetConfig {
        count_per_n: 4,
        n_values: vec![1, 3, 5],
        global_seed: 2024,
        noise: Some(NoiseKind::White),
        grid: Grid2D::standard(),
    };
    let manifest = generate_dataset(&cfg, &out, true)?;
    for record in &manifest.samples {
        let (clean, noisy) = load_sample(&out, record)?;
        let sigma = record.noise.map_or(0.0, |n| n.white_sigma);
        println!(
            "{}  k {:6.2}  sigma {:.4}  SNR {:6.2} dB",
            record.id,
            record.k,
            sigma,
            snr_db(&clean, noisy.as_ref().unwrap())
        );
    }
    println!("wrote {} samples under {}", manifest.samples.len(), out.display());
    Ok(())
}
