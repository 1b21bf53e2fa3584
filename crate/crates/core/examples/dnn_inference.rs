//! Loads a weight bundle, checks its reference pair and denoises a field with it.
//!
//! `cargo run --release --example dnn_inference [bundle.sfdw]`; defaults to the random test fixture.

use std::path::PathBuf;

use sfd::dataset::generate_sample;
use sfd::metrics::psnr_db;
use sfd::nn::{load_weights, DnnDenoiser, NafNet};
use sfd::noise::NoiseKind;
use sfd::sim::Grid2D;
use sfd::spectral::{denoise_field, BinInfo, TwoChannelImage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arg = std::env::args().nth(1).map(PathBuf::from);
    let fixture = arg.is_none();
    let path = arg.unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/desk_random.sfdw"));
    let (arch, bundle) = load_weights(&path)?;
    println!(
        "width {}, {} blocks, {} parameters, input multiple {}",
        arch.width,
        arch.total_blocks(),
        arch.parameter_count(),
        arch.size_multiple()
    );
    let net = NafNet::from_bundle(&bundle)?;
    if let Some(pair) = &bundle.reference {
        let out = net.forward(&pair.input)?;
        let err = out.iter().zip(pair.output.iter()).fold(0.0f32, |m, (a, b)| m.max((a - b).abs()));
        println!("reference pair {:?}: max abs error {err:.2e}", pair.input.dim());
    }
    let sample = generate_sample("demo".into(), 5, 2, Some(NoiseKind::White), &Grid2D::standard())?;
    let clean = TwoChannelImage::from_complex(&sample.clean);
    let noisy = sample.noisy.as_ref().unwrap();
    let t0 = std::time::Instant::now();
    let est = denoise_field(noisy, &BinInfo::harmonic(sample.scene.k), &DnnDenoiser::new(net))?;
    println!(
        "128x128 field in {:.0} ms: noisy {:.2} dB, network {:.2} dB",
        t0.elapsed().as_secs_f64() * 1e3,
        psnr_db(&clean, &TwoChannelImage::from_complex(noisy))?,
        psnr_db(&clean, &TwoChannelImage::from_complex(&est))?
    );
    if fixture {
        println!("the fixture bundle holds random weights; pass a trained bundle to see denoising");
    }
    Ok(())
}
