use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sfd::filters::gaussian::gaussian_channel;
use sfd::filters::median::median_channel;
use sfd::filters::*;
use sfd::sim::{synth_harmonic_field, Grid2D, PointSource, SourceConfig};
use sfd::spectral::TwoChannelImage;

const GAUSS_7_SIGMA_1: [[f64; 7]; 7] = [
    [1.9651916124031896e-05, 0.00023940934949726983, 0.00107295826497866, 0.0017690091140438213, 0.00107295826497866, 0.00023940934949726983, 1.9651916124031896e-05],
    [0.00023940934949726983, 0.0029166029543864374, 0.013071307583189404, 0.021550942848268258, 0.013071307583189404, 0.0029166029543864374, 0.00023940934949726983],
    [0.00107295826497866, 0.013071307583189404, 0.05858153633060701, 0.09658462501856413, 0.05858153633060701, 0.013071307583189404, 0.00107295826497866],
    [0.0017690091140438213, 0.021550942848268258, 0.09658462501856413, 0.15924112569070245, 0.09658462501856413, 0.021550942848268258, 0.0017690091140438213],
    [0.00107295826497866, 0.013071307583189404, 0.05858153633060701, 0.09658462501856413, 0.05858153633060701, 0.013071307583189404, 0.00107295826497866],
    [0.00023940934949726983, 0.0029166029543864374, 0.013071307583189404, 0.021550942848268258, 0.013071307583189404, 0.0029166029543864374, 0.00023940934949726983],
    [1.9651916124031896e-05, 0.00023940934949726983, 0.00107295826497866, 0.0017690091140438213, 0.00107295826497866, 0.00023940934949726983, 1.9651916124031896e-05],
];

/// Mirror reflection that excludes the edge sample, written out case by case.
fn mirror(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
    }
}

fn window(img: &Array2<f64>, j: usize, i: usize, r: isize) -> Vec<f64> {
    let (ny, nx) = img.dim();
    let mut v = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            v.push(img[[mirror(j as isize + dy, ny), mirror(i as isize + dx, nx)]]);
        }
    }
    v
}

fn brute_median(img: &Array2<f64>, k: usize) -> Array2<f64> {
    Array2::from_shape_fn(img.dim(), |(j, i)| {
        let mut v = window(img, j, i, (k / 2) as isize);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    })
}

fn noise(rng: &mut ChaCha8Rng, shape: (usize, usize), sigma: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn(shape, || sigma * rng.sample::<f64, _>(StandardNormal))
}

fn correlation(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    let dot: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    dot.norm() / (na * nb)
}

#[test]
fn gaussian_kernel_golden_table() {
    let k = gaussian_kernel(7, 1.0).unwrap();
    for j in 0..7 {
        for i in 0..7 {
            assert!((k[[j, i]] - GAUSS_7_SIGMA_1[j][i]).abs() < 1e-15);
        }
    }
    assert!((k.sum() - 1.0).abs() < 1e-12);
    assert!((gaussian_kernel(7, 4.0).unwrap().sum() - 1.0).abs() < 1e-12);
}

#[test]
fn gaussian_impulse_constant_and_ramp() {
    let cfg = GaussianConfig { ksize: 7, sigma: 1.0 };
    let mut impulse = Array2::zeros((15, 15));
    impulse[[7, 7]] = 1.0;
    let out = gaussian_channel(&impulse, &cfg).unwrap();
    for j in 0..7 {
        for i in 0..7 {
            assert!((out[[4 + j, 4 + i]] - GAUSS_7_SIGMA_1[j][i]).abs() < 1e-15);
        }
    }
    let c = Array2::from_elem((9, 11), -2.5);
    assert!(gaussian_channel(&c, &cfg).unwrap().iter().all(|v| (v + 2.5).abs() < 1e-12));
    let ramp = Array2::from_shape_fn((16, 16), |(j, i)| 0.3 * j as f64 - 0.7 * i as f64);
    let out = gaussian_channel(&ramp, &GaussianConfig::default()).unwrap();
    for j in 3..13 {
        for i in 3..13 {
            assert!((out[[j, i]] - ramp[[j, i]]).abs() < 1e-12);
        }
    }
    assert_eq!(gaussian_kernel(6, 1.0), Err(FilterError::KernelSize(6)));
    assert!(GaussianConfig { ksize: 7, sigma: 0.0 }.validate().is_err());
}

#[test]
fn median_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let img = Array2::from_shape_simple_fn((13, 10), || rng.random_range(-1.0..1.0));
    for k in [1, 3, 7] {
        assert_eq!(median_channel(&img, k).unwrap(), brute_median(&img, k));
    }
}

#[test]
fn median_checkerboard_spike_constant() {
    let board = Array2::from_shape_fn((12, 12), |(j, i)| if (i + j) % 2 == 0 { 1.0 } else { -1.0 });
    let out = median_channel(&board, 7).unwrap();
    assert_eq!(out, brute_median(&board, 7));
    // 25 cells share the center's parity against 24 of the other, everywhere.
    assert_eq!(out, board);
    let mut spike = Array2::zeros((9, 9));
    spike[[4, 4]] = 100.0;
    assert!(median_channel(&spike, 7).unwrap().iter().all(|&v| v == 0.0));
    let c = Array2::from_elem((8, 8), 3.0);
    assert_eq!(median_filter(&TwoChannelImage::new(c.clone(), c.clone()), &MedianConfig::default()).unwrap().re, c);
}

#[test]
fn noise_sigma_estimator() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let est = estimate_noise_sigma(&noise(&mut rng, (128, 128), 0.01)).unwrap();
    assert!((est - 0.01).abs() < 0.05 * 0.01, "estimate {est}");
    assert_eq!(estimate_noise_sigma(&Array2::from_elem((5, 5), 7.0)).unwrap(), 0.0);
    assert!(matches!(estimate_noise_sigma(&Array2::zeros((2, 9))), Err(FilterError::TooSmall { .. })));

    let scene = SourceConfig { k: 3.0, amplitude: 0.1, sources: vec![PointSource { a: 1.0, x: 3.0, y: -2.0 }] };
    let clean = synth_harmonic_field(&scene, &Grid2D::standard()).unwrap().mapv(|z| z.re);
    let mean = clean.mean().unwrap();
    let std = (clean.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / clean.len() as f64).sqrt();
    assert!(estimate_noise_sigma(&clean).unwrap() <= 0.1 * std);
}

#[test]
fn nlm_constant_and_box_limit() {
    let c = Array2::from_elem((12, 12), 0.25);
    assert!(nlm_channel(&c, 7, 23, 0.1, 0.0).unwrap().iter().all(|v| (v - 0.25).abs() < 1e-15));

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let img = Array2::from_shape_simple_fn((16, 14), || rng.random_range(0.0..1.0));
    let (patch, search) = (3, 5);
    let out = nlm_channel(&img, patch, search, 1e6, 0.0).unwrap();
    let boxed = Array2::from_shape_fn(img.dim(), |(j, i)| {
        let w = window(&img, j, i, (search / 2) as isize);
        w.iter().sum::<f64>() / w.len() as f64
    });
    for (a, b) in out.iter().zip(boxed.iter()) {
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn nlm_preserves_an_edge() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sigma = 0.02;
    let clean = Array2::from_shape_fn((32, 32), |(_, i)| if i < 16 { 0.0 } else { 1.0 });
    let noisy = &clean + &noise(&mut rng, (32, 32), sigma);
    let cfg = NlmConfig { sigma: Some(sigma), ..NlmConfig::default() };
    let out = nlm_filter(&TwoChannelImage::new(noisy.clone(), noisy), &cfg).unwrap().re;
    for j in 0..32 {
        for i in [14, 15, 16, 17] {
            assert!((out[[j, i]] - clean[[j, i]]).abs() < 0.05, "({j}, {i}) = {}", out[[j, i]]);
        }
    }
}

#[test]
fn wff_zero_plane_wave_and_frame() {
    let cfg = WffConfig::default();
    let zero = Array2::<Complex64>::zeros((32, 32));
    assert!(wff_filter(&zero, &WffConfig { sigma: Some(0.0), ..cfg }).unwrap().iter().all(|z| z.norm() == 0.0));

    let wave = Array2::from_shape_fn((32, 32), |(j, i)| Complex64::from_polar(1.0, 0.5 * i as f64 - 0.3 * j as f64));
    let out = wff_filter(&wave, &cfg).unwrap();
    assert!(correlation(&out, &wave) >= 0.99);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let waves: Vec<(f64, f64, Complex64)> = (0..8)
        .map(|_| {
            let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), amp)
        })
        .collect();
    let smooth = Array2::from_shape_fn((32, 32), |(j, i)| {
        waves.iter().map(|&(wx, wy, a)| a * Complex64::from_polar(1.0, wx * i as f64 + wy * j as f64)).sum::<Complex64>()
    });
    // A lattice covering the whole band makes the windowed frame tight.
    let full = WffConfig { threshold_mult: 0.0, freq_lo: -PI, freq_hi: PI - 0.05, ..cfg };
    let c = correlation(&wff_filter(&smooth, &full).unwrap(), &smooth);
    assert!(c >= 0.999, "full-band frame correlation {c}");
    // The default lattice stops at pi/2; the mirrored border has energy beyond it, the interior
    // does not.
    let out = wff_filter(&smooth, &WffConfig { threshold_mult: 0.0, ..cfg }).unwrap();
    let inner = |a: &Array2<Complex64>| a.slice(ndarray::s![8..24, 8..24]).to_owned();
    let c = correlation(&inner(&out), &inner(&smooth));
    assert!(c >= 0.999, "interior frame correlation {c}");

    let empty = WffConfig { freq_lo: 1.0, freq_hi: -1.0, ..cfg };
    assert_eq!(wff_filter(&wave, &empty), Err(FilterError::EmptyLattice));
}

#[test]
fn butterworth_stages_at_cutoff() {
    for kc in [0.3, 7.0, 250.0] {
        let lp = 10.0 * butterworth_lp_gain2(kc, kc, 4).log10();
        let hp = 10.0 * butterworth_hp_gain2(kc, kc, 4).log10();
        assert!((lp + 3.0103).abs() < 0.05 && (hp + 3.0103).abs() < 0.05);
    }
}

#[test]
fn on_cone_plane_wave_gain() {
    let cfg = StbpfConfig::harmonic();
    let n = 64;
    let cfg = StbpfConfig { dx: 1.0 / n as f64, ..cfg };
    let m = 6;
    let wave = Array2::from_shape_fn((n, n), |(_, i)| Complex64::from_polar(1.0, 2.0 * PI * (m * i) as f64 / n as f64));
    let k = 2.0 * PI * m as f64;
    let out = stbpf_filter(&wave, k, None, &cfg).unwrap();
    let golden = 1.0 / (1.0 + (1.0_f64 / 1.2).powi(8)) * (2.0_f64.powi(8) / (1.0 + 2.0_f64.powi(8)));
    assert!((golden - 0.8081573735535522).abs() < 1e-15);
    for (o, w) in out.iter().zip(wave.iter()) {
        assert!(((o / w).norm_sqr() - golden).abs() < 1e-6);
    }
    assert!((stbpf_gain(k, k, None, &cfg).powi(2) - golden).abs() < 1e-12);
}

#[test]
fn stbpf_removes_constants_and_is_phase_covariant() {
    let cfg = StbpfConfig::harmonic();
    let c = Array2::from_elem((16, 16), Complex64::new(2.0, -1.0));
    assert!(stbpf_filter(&c, 30.0, None, &cfg).unwrap().iter().all(|z| z.norm() < 1e-12));
    assert_eq!(stbpf_gain(0.0, 30.0, None, &cfg), 0.0);

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let f = Array2::from_shape_simple_fn((24, 24), || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let rot = Complex64::from_polar(1.0, 0.83);
    let a = stbpf_filter(&f.mapv(|z| z * rot), 40.0, None, &cfg).unwrap();
    let b = stbpf_filter(&f, 40.0, None, &cfg).unwrap().mapv(|z| z * rot);
    for (x, y) in a.iter().zip(b.iter()) {
        assert!((x - y).norm() < 1e-12);
    }
    assert!(stbpf_filter(&f, -1.0, None, &cfg).is_err());
}

#[test]
fn stbpf_white_noise_passband_fraction() {
    let cfg = StbpfConfig::harmonic();
    let n = 128;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let white = Array2::from_shape_simple_fn((n, n), || {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let k = 100.0;
    let out = stbpf_filter(&white, k, None, &cfg).unwrap();
    let ratio = out.iter().map(|z| z.norm_sqr()).sum::<f64>() / white.iter().map(|z| z.norm_sqr()).sum::<f64>();
    // Expected energy fraction: the integral of the analytic gain^2 over the sampled wavenumber
    // square, done radially since the passband lies well inside it.
    let g2 = |kappa: f64| {
        let lp = 1.0 / (1.0 + (kappa / (1.2 * k)).powi(8));
        let r = (kappa / (0.5 * k)).powi(8);
        lp * r / (1.0 + r)
    };
    let steps = 200_000;
    let top = 4.0 * k;
    let h = top / steps as f64;
    let radial: f64 = (0..steps).map(|s| (s as f64 + 0.5) * h).map(|r| g2(r) * r * h).sum();
    let nyquist = PI / cfg.dx;
    assert!(top < nyquist);
    let annulus = 2.0 * PI * radial / (2.0 * nyquist).powi(2);
    assert!((ratio - annulus).abs() < 0.1 * annulus, "ratio {ratio} vs annulus {annulus}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn filters_preserve_shape_and_finiteness(ny in 8usize..20, nx in 8usize..20, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let img = TwoChannelImage::new(
            Array2::from_shape_simple_fn((ny, nx), || rng.random_range(-1.0..1.0)),
            Array2::from_shape_simple_fn((ny, nx), || rng.random_range(-1.0..1.0)),
        );
        let outs = [
            gaussian_filter(&img, &GaussianConfig::default()).unwrap(),
            median_filter(&img, &MedianConfig::default()).unwrap(),
            nlm_filter(&img, &NlmConfig { patch: 3, search: 5, ..NlmConfig::default() }).unwrap(),
            TwoChannelImage::from_complex(&stbpf_filter(&img.to_complex(), 50.0, None, &StbpfConfig::harmonic()).unwrap()),
        ];
        for o in &outs {
            prop_assert_eq!(o.dim(), (ny, nx));
            prop_assert!(o.is_finite());
        }
    }

    #[test]
    fn reflect_index_matches_mirror(i in -200isize..200, n in 1usize..30) {
        let want = if n == 1 { 0 } else { mirror(i, n) };
        prop_assert_eq!(reflect_index(i, n), want);
    }
}
