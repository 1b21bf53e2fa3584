use std::sync::Mutex;

use ndarray::{Array2, Array3};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfd::methods::{Identity, ZeroMap};
use sfd::sim::{FieldSequence, Grid2D};
use sfd::spectral::*;

fn random_sequence(rng: &mut ChaCha8Rng, n_t: usize, n: usize) -> FieldSequence {
    let data = Array3::from_shape_simple_fn((n_t, n, n), || rng.random_range(-1.0..1.0));
    FieldSequence::new(data, 0.01, Grid2D::square(n).unwrap()).unwrap()
}

fn max_diff(a: &Array3<f64>, b: &Array3<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Records every bin it sees and applies a bin-dependent gain.
struct Recorder(Mutex<Vec<BinInfo>>);

impl Denoiser for Recorder {
    fn name(&self) -> &str {
        "recorder"
    }

    fn denoise(&self, image: &TwoChannelImage, bin: &BinInfo) -> Result<TwoChannelImage, sfd::Error> {
        self.0.lock().unwrap().push(*bin);
        Ok(image.scaled(1.0 / (1.0 + bin.index as f64)))
    }
}

struct Shrinker;

impl Denoiser for Shrinker {
    fn name(&self) -> &str {
        "shrink"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, sfd::Error> {
        Ok(TwoChannelImage::zeros((image.dim().0, image.dim().1 + 1)))
    }
}

#[test]
fn round_trip_random_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..40 {
        let n_t = 2 + rng.random_range(0..60) + (i % 2);
        let seq = random_sequence(&mut rng, n_t, 3);
        let back = reconstruct(&decompose(&seq).unwrap()).unwrap();
        assert!(max_diff(&seq.data, &back.data) <= 1e-9, "n_t = {n_t}");
    }
    let seq = random_sequence(&mut rng, 1000, 2);
    let back = reconstruct(&decompose(&seq).unwrap()).unwrap();
    assert!(max_diff(&seq.data, &back.data) <= 1e-9);
}

#[test]
fn bin_count_and_frequencies() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n_t in [2, 7, 8] {
        let stack = decompose(&random_sequence(&mut rng, n_t, 2)).unwrap();
        assert_eq!(stack.bins.len(), n_t / 2 + 1);
        for (b, bin) in stack.bins.iter().enumerate() {
            assert_eq!(bin.bin_index, b);
            let want = 2.0 * std::f64::consts::PI * b as f64 / (n_t as f64 * 0.01);
            assert!((bin.omega - want).abs() < 1e-12);
        }
    }
}

#[test]
fn pure_tone_lands_in_one_bin() {
    let (n_t, b) = (32, 5);
    let data = Array3::from_shape_fn((n_t, 2, 2), |(m, j, i)| {
        let ph = (j + i) as f64;
        (2.0 * std::f64::consts::PI * (b * m) as f64 / n_t as f64 + ph).cos()
    });
    let stack = decompose(&FieldSequence::new(data, 1.0, Grid2D::square(2).unwrap()).unwrap()).unwrap();
    for bin in &stack.bins {
        let e: f64 = bin.data.iter().map(|z| z.norm_sqr()).sum();
        if bin.bin_index == b {
            // cos = (e^{i.} + e^{-i.}) / 2 puts n_t / 2 at +b for unit amplitude.
            let z = bin.data[[0, 1]];
            assert!((z - Complex64::from_polar(n_t as f64 / 2.0, 1.0)).norm() < 1e-10);
        } else {
            assert!(e < 1e-18, "bin {} carries {e}", bin.bin_index);
        }
    }
}

#[test]
fn parseval() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n_t in [9, 16] {
        let seq = random_sequence(&mut rng, n_t, 4);
        let time: f64 = seq.data.iter().map(|v| v * v).sum();
        let freq = decompose(&seq).unwrap().full_spectrum_energy();
        assert!((freq - n_t as f64 * time).abs() < 1e-9 * freq);
    }
}

proptest! {
    #[test]
    fn decompose_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_sequence(&mut rng, 6, 2);
        let y = random_sequence(&mut rng, 6, 2);
        let combo = FieldSequence::new(&x.data * a + &y.data * b, x.dt, x.grid).unwrap();
        let (sx, sy, sc) = (decompose(&x).unwrap(), decompose(&y).unwrap(), decompose(&combo).unwrap());
        for ((bx, by), bc) in sx.bins.iter().zip(&sy.bins).zip(&sc.bins) {
            for ((zx, zy), zc) in bx.data.iter().zip(by.data.iter()).zip(bc.data.iter()) {
                prop_assert!((zx * a + zy * b - zc).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn normalization_bounds_channels(re in prop::collection::vec(-50.0f64..50.0, 9), im in prop::collection::vec(-50.0f64..50.0, 9)) {
        let f = Array2::from_shape_fn((3, 3), |(j, i)| Complex64::new(re[3 * j + i], im[3 * j + i]));
        let n = normalize(&f);
        if !n.skipped {
            let peak = n.field.iter().fold(0.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
            prop_assert!((peak - 1.0).abs() < 1e-12);
            let back = denormalize(&n.field, n.scale);
            for (x, y) in back.iter().zip(f.iter()) {
                prop_assert!((x - y).norm() <= 1e-12 * n.scale);
            }
        }
    }
}

#[test]
fn identity_sequence_is_unchanged_and_zero_map_zeroes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let seq = random_sequence(&mut rng, 12, 5);
    let out = denoise_sequence(&seq, &Identity).unwrap();
    assert!(max_diff(&out.data, &seq.data) < 1e-12);
    let zero = denoise_sequence(&seq, &ZeroMap).unwrap();
    assert!(zero.data.iter().all(|v| v.abs() < 1e-15));
}

#[test]
fn every_bin_is_visited_once_with_its_frequency() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let seq = random_sequence(&mut rng, 10, 3);
    let rec = Recorder(Mutex::new(Vec::new()));
    let out = denoise_sequence(&seq, &rec).unwrap();
    let mut seen = rec.0.into_inner().unwrap();
    seen.sort_by_key(|b| b.index);
    assert_eq!(seen.iter().map(|b| b.index).collect::<Vec<_>>(), (0..=5).collect::<Vec<_>>());
    let w1 = 2.0 * std::f64::consts::PI / (10.0 * 0.01);
    for b in &seen {
        assert!((b.omega - w1 * b.index as f64).abs() < 1e-9);
        assert_eq!(b.first_omega, Some(w1));
    }
    // Bins are independent, so the result equals per-bin processing in any order.
    let mut stack = decompose(&seq).unwrap();
    for bin in stack.bins.iter_mut().rev() {
        bin.data.mapv_inplace(|z| z / (1.0 + bin.bin_index as f64));
    }
    let manual = reconstruct(&stack).unwrap();
    assert!(max_diff(&manual.data, &out.data) < 1e-12);
}

#[test]
fn thread_count_does_not_change_output() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let seq = random_sequence(&mut rng, 16, 8);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| denoise_sequence(&seq, &Recorder(Mutex::new(Vec::new()))).unwrap())
    };
    assert_eq!(run(1).data, run(4).data);
}

#[test]
fn errors_are_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let seq = random_sequence(&mut rng, 6, 3);
    assert!(matches!(denoise_sequence(&seq, &Shrinker), Err(SpectralError::ShapeChanged { .. })));

    let mut stack = decompose(&seq).unwrap();
    stack.bins.pop();
    assert!(matches!(reconstruct(&stack), Err(SpectralError::InvalidStack(_))));

    let mut stack = decompose(&seq).unwrap();
    stack.bins[3].data[[0, 0]].im = 5.0;
    assert!(matches!(reconstruct(&stack), Err(SpectralError::SymmetryViolation { bin: 3, .. })));

    let mut stack = decompose(&seq).unwrap();
    stack.bins[1].data[[1, 1]].re = f64::NAN;
    assert!(matches!(reconstruct(&stack), Err(SpectralError::NonFinite)));
}

#[test]
fn tiny_fields_skip_normalization() {
    let f = Array2::from_elem((4, 4), Complex64::new(1e-13, 0.0));
    let out = denoise_field(&f, &BinInfo::harmonic(3.0), &ZeroMap).unwrap();
    assert_eq!(out, f);
}
