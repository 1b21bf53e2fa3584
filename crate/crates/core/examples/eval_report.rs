//! Per-source-count PSNR and SSIM table for a few methods on a generated dataset.

use sfd::dataset::{generate_dataset, DatasetConfig};
use sfd::methods::{build_method, MethodKind, MethodParams};
use sfd::metrics::evaluate_dataset;
use sfd::noise::NoiseKind;
use sfd::sim::Grid2D;
use sfd::spectral::Denoiser;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::temp_dir().join("sfd_eval_example");
    let cfg = DatasetConfig {
        count_per_n: 10,
        n_values: vec![1, 2, 3, 4, 5],
        global_seed: 9,
        noise: Some(NoiseKind::White),
        grid: Grid2D::standard(),
    };
    let manifest = generate_dataset(&cfg, &root, true)?;
    let params = MethodParams::default();
    let kinds = [MethodKind::Identity, MethodKind::Median, MethodKind::Gaussian, MethodKind::Stbpf];
    let methods = kinds.iter().map(|&k| build_method(k, &params)).collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&dyn Denoiser> = methods.iter().map(|m| m.as_ref()).collect();
    let report = evaluate_dataset(&manifest, &root, &refs, serde_json::to_value(kinds.map(|k| params.describe(k)))?);
    print!("{}", report.to_table());
    let out = root.join("report.json");
    report.write(&out)?;
    println!("report written to {}", out.display());
    Ok(())
}
