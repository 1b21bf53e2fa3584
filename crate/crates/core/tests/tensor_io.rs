use ndarray::{Array2, Array3};
use num_complex::{Complex32, Complex64};
use proptest::prelude::*;
use sfd::io::manifest::{manifest_root, SCHEMA_VERSION};
use sfd::io::tensor::{decode, encode, MAGIC};
use sfd::io::{read_tensor, render_heatmap, sidecar_path, write_tensor, DType, DatasetManifest, ManifestError, Tensor, TensorData, TensorError};
use sfd::sim::Grid2D;

fn shape_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 1..=4)
}

fn data_for(dtype: u8, n: usize, seed: &[f64]) -> TensorData {
    let v = |i: usize| seed[i % seed.len()] * (i as f64 + 1.0);
    match dtype {
        0 => TensorData::F32((0..n).map(|i| v(i) as f32).collect()),
        1 => TensorData::F64((0..n).map(v).collect()),
        2 => TensorData::C64((0..n).map(|i| Complex32::new(v(i) as f32, -v(i + 1) as f32)).collect()),
        _ => TensorData::C128((0..n).map(|i| Complex64::new(v(i), v(i + 3).sin())).collect()),
    }
}

proptest! {
    #[test]
    fn round_trip_every_dtype(shape in shape_strategy(), dtype in 0u8..4, seed in prop::collection::vec(-1e6f64..1e6, 1..8)) {
        let n = shape.iter().product();
        let t = Tensor::new(shape.clone(), data_for(dtype, n, &seed)).unwrap();
        let bytes = encode(&t);
        prop_assert_eq!(bytes.len(), 6 + 8 * shape.len() + n * t.dtype().size());
        let back = decode(&bytes).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn truncation_and_extension_rejected(shape in shape_strategy(), dtype in 0u8..4, cut in 1usize..9) {
        let n = shape.iter().product();
        let bytes = encode(&Tensor::new(shape, data_for(dtype, n, &[0.5])).unwrap());
        let short = &bytes[..bytes.len() - cut.min(bytes.len() - 1)];
        prop_assert!(decode(short).is_err());
        let mut long = bytes.clone();
        long.extend(std::iter::repeat_n(0u8, cut));
        let rejected = matches!(decode(&long), Err(TensorError::LengthMismatch { .. }));
        prop_assert!(rejected);
    }
}

#[test]
fn header_layout() {
    let t = Tensor::new(vec![2, 3], TensorData::F64((0..6).map(f64::from).collect())).unwrap();
    let b = encode(&t);
    assert_eq!(&b[..4], MAGIC);
    assert_eq!(b[4], DType::F64.code());
    assert_eq!(b[5], 2);
    assert_eq!(u64::from_le_bytes(b[6..14].try_into().unwrap()), 2);
    assert_eq!(u64::from_le_bytes(b[14..22].try_into().unwrap()), 3);
    assert_eq!(f64::from_le_bytes(b[22 + 8 * 5..22 + 8 * 6].try_into().unwrap()), 5.0);
}

#[test]
fn bad_inputs() {
    let mut b = encode(&Tensor::new(vec![1], TensorData::F32(vec![1.0])).unwrap());
    b[0] = b'X';
    assert!(matches!(decode(&b), Err(TensorError::BadMagic { .. })));
    b[0] = b'S';
    b[4] = 9;
    assert!(matches!(decode(&b), Err(TensorError::UnknownDtype(9))));
    assert!(matches!(Tensor::new(vec![2, 0], TensorData::F32(vec![])), Err(TensorError::InvalidShape(_))));
    assert!(matches!(
        Tensor::new(vec![3], TensorData::F32(vec![1.0])),
        Err(TensorError::DataLength { expected: 3, found: 1, .. })
    ));
    assert!(decode(&[]).is_err());
}

#[test]
fn typed_views() {
    let dir = tempfile::tempdir().unwrap();
    let real = Array3::from_shape_fn((2, 3, 4), |(t, y, x)| (t * 100 + y * 10 + x) as f64);
    let p = dir.path().join("seq.sfd");
    write_tensor(&p, &Tensor::from_real3(&real)).unwrap();
    let back = read_tensor(&p).unwrap();
    assert_eq!(back.to_real3().unwrap(), real);
    assert!(back.to_complex2().is_err());
    assert!(!back.is_complex());

    let field = Array2::from_shape_fn((3, 2), |(y, x)| Complex64::new(y as f64, -(x as f64)));
    let t = Tensor::from_complex2(&field);
    assert_eq!(t.dtype(), DType::C128);
    assert_eq!(t.to_complex2().unwrap(), field);
    assert!(t.to_real2().is_err());

    let missing = read_tensor(dir.path().join("absent.sfd"));
    assert!(matches!(missing, Err(TensorError::Io { .. })));
}

#[test]
fn manifest_round_trip_and_paths() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = DatasetManifest::new(7, Grid2D::standard());
    assert_eq!(m.schema_version, SCHEMA_VERSION);
    m.samples.push(sfd::io::SampleRecord {
        id: "n1_00000".into(),
        seed: 11,
        n_sources: 1,
        k: 3.0,
        amplitude: 0.1,
        sources: vec![sfd::sim::PointSource { a: 1.0, x: 2.0, y: -3.0 }],
        noise: None,
        clean_path: "clean/n1_00000.sfd".into(),
        noisy_path: None,
    });
    let path = dir.path().join("manifest.json");
    m.write(&path).unwrap();
    assert_eq!(DatasetManifest::read(&path).unwrap(), m);
    assert_eq!(manifest_root(&path), dir.path());
    assert!(matches!(m.validate_paths(dir.path()), Err(ManifestError::MissingFile { .. })));
    std::fs::create_dir(dir.path().join("clean")).unwrap();
    std::fs::write(dir.path().join("clean/n1_00000.sfd"), b"").unwrap();
    m.validate_paths(dir.path()).unwrap();

    let future = m.to_json().replace(&format!("\"schema_version\": {SCHEMA_VERSION}"), "\"schema_version\": 99");
    assert!(matches!(DatasetManifest::from_json(&future), Err(ManifestError::Version(99))));
    assert!(DatasetManifest::from_json("{").is_err());
}

#[test]
fn heatmap_png_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f.png");
    let field = Array2::from_shape_fn((5, 7), |(y, x)| x as f64 - y as f64);
    render_heatmap(&field, &p, (-4.0, 6.0)).unwrap();
    let decoder = png::Decoder::new(std::io::BufReader::new(std::fs::File::open(&p).unwrap()));
    let mut reader = decoder.read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    assert_eq!((info.width, info.height), (7, 5));
    // Pixel (y, x) = (0, 0) holds 0, which maps to white.
    assert_eq!(&buf[..3], &[255, 255, 255]);
    assert!(render_heatmap(&field, &p, (1.0, 1.0)).is_err());
    assert_eq!(sidecar_path(&p).file_name().unwrap(), "f.png.prov.json");
}
