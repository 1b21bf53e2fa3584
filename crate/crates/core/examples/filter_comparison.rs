//! Every classical method on one noisy harmonic field, scored by PSNR and SSIM.

use sfd::dataset::generate_sample;
use sfd::methods::{build_method, MethodKind, MethodParams};
use sfd::metrics::{psnr_db, ssim};
use sfd::noise::NoiseKind;
use sfd::sim::Grid2D;
use sfd::spectral::{denoise_field, BinInfo, TwoChannelImage};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sample = generate_sample("demo".into(), 11, 3, Some(NoiseKind::White), &Grid2D::standard())?;
    let noisy = sample.noisy.as_ref().unwrap();
    let clean = TwoChannelImage::from_complex(&sample.clean);
    let bin = BinInfo::harmonic(sample.scene.k);
    println!("k = {:.2}, sigma = {:.4}", sample.scene.k, sample.noise.unwrap().white_sigma);
    let params = MethodParams::default();
    for kind in [MethodKind::Identity, MethodKind::Median, MethodKind::Gaussian, MethodKind::Nlm, MethodKind::Wff, MethodKind::Stbpf] {
        let method = build_method(kind, &params)?;
        let t0 = std::time::Instant::now();
        let est = TwoChannelImage::from_complex(&denoise_field(noisy, &bin, method.as_ref())?);
        println!(
            "{:<9} PSNR {:6.2} dB  SSIM {:.3}  {:>7.1} ms",
            kind.name(),
            psnr_db(&clean, &est)?,
            ssim(&clean, &est)?,
            t0.elapsed().as_secs_f64() * 1e3
        );
    }
    Ok(())
}
