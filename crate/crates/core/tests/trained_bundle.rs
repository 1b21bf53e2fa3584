//! Checks an externally trained bundle named by `SFD_TRAINED_BUNDLE`; skipped when unset.

use std::path::PathBuf;

use rayon::prelude::*;
use sfd::dataset::{generate_sample, sample_id, sample_seed};
use sfd::methods::{Gaussian, Identity};
use sfd::metrics::psnr_db;
use sfd::nn::{load_weights, DnnDenoiser, NafNet};
use sfd::noise::NoiseKind;
use sfd::sim::Grid2D;
use sfd::spectral::{denoise_field, BinInfo, Denoiser, TwoChannelImage};

const HELD_OUT_SEED: u64 = 777_001;

#[test]
fn trained_bundle_beats_gaussian() {
    let Some(path) = std::env::var_os("SFD_TRAINED_BUNDLE").map(PathBuf::from) else {
        eprintln!("SFD_TRAINED_BUNDLE not set; skipping");
        return;
    };
    let (arch, bundle) = load_weights(&path).unwrap();
    if let Some(pair) = &bundle.reference {
        let out = NafNet::from_bundle(&bundle).unwrap().forward(&pair.input).unwrap();
        let err = out.iter().zip(pair.output.iter()).fold(0.0f32, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-4, "reference pair error {err}");
    }
    let dnn = DnnDenoiser::new(NafNet::from_bundle(&bundle).unwrap());
    let gauss = Gaussian(Default::default());
    let grid = Grid2D::standard();
    let slots: Vec<(usize, usize)> = (1..=5).flat_map(|n| (0..20).map(move |i| (n, i))).collect();
    let scores: Vec<[f64; 3]> = slots
        .into_par_iter()
        .map(|(n, i)| {
            let s = generate_sample(sample_id(n, i), sample_seed(HELD_OUT_SEED, n, i), n, Some(NoiseKind::White), &grid)
                .unwrap();
            let clean = TwoChannelImage::from_complex(&s.clean);
            let bin = BinInfo::harmonic(s.scene.k);
            let methods: [&dyn Denoiser; 3] = [&Identity, &gauss, &dnn];
            methods.map(|m| {
                let est = denoise_field(s.noisy.as_ref().unwrap(), &bin, m).unwrap();
                psnr_db(&clean, &TwoChannelImage::from_complex(&est)).unwrap()
            })
        })
        .collect();
    let mean = |k: usize| scores.iter().map(|s| s[k]).sum::<f64>() / scores.len() as f64;
    let (noisy, g, d) = (mean(0), mean(1), mean(2));
    println!("{} blocks, {} held-out fields: noisy {noisy:.2}, gaussian {g:.2}, dnn {d:.2} dB", arch.total_blocks(), scores.len());
    assert!(d >= g + 3.0, "dnn {d:.2} dB does not beat gaussian {g:.2} dB by 3 dB");
}
