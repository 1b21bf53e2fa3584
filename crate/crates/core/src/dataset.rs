//! Reproducible harmonic-field datasets.
//!
//! Every sample owns a seed derived from the global seed, its source count and its index within
//! that count, so a sample does not change when other source counts are added or removed. The
//! scene and the noise parameters are drawn from stream 0 of a ChaCha8 generator seeded with it;
//! the noise realization comes from stream 1.
//!
//! On disk a dataset is `manifest.json` plus `clean/{id}.sfd` and, when noise is requested,
//! `noisy/{id}.sfd`, each a `(ny, nx)` c128 tensor. Ids look like `n3_00042`.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::io::{read_tensor, write_tensor, DatasetManifest, ManifestError, SampleRecord, Tensor, TensorError};
use crate::noise::{NoiseKind, NoiseSpec};
use crate::sim::{sample_source_config, synth_harmonic_field, Grid2D, SimError, SourceConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("source count {0} outside 1..=10")]
    InvalidSourceCount(usize),
    #[error("{0} already exists; pass --force to overwrite")]
    Exists(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("sample {id}: {reason}")]
    Sample { id: String, reason: String },
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th sample with `n_sources` sources.
pub fn sample_seed(global_seed: u64, n_sources: usize, index: usize) -> u64 {
    splitmix64(splitmix64(global_seed ^ splitmix64(n_sources as u64)) ^ index as u64)
}

pub fn sample_id(n_sources: usize, index: usize) -> String {
    format!("n{n_sources}_{index:05}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetConfig {
    pub count_per_n: usize,
    pub n_values: Vec<usize>,
    pub global_seed: u64,
    pub noise: Option<NoiseKind>,
    pub grid: Grid2D,
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        match self.n_values.iter().find(|n| !(1..=10).contains(*n)) {
            Some(&n) => Err(DatasetError::InvalidSourceCount(n)),
            None => Ok(()),
        }
    }

    /// `(n_sources, index)` of every sample in manifest order.
    pub fn slots(&self) -> Vec<(usize, usize)> {
        self.n_values
            .iter()
            .flat_map(|&n| (0..self.count_per_n).map(move |i| (n, i)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedSample {
    pub id: String,
    pub seed: u64,
    pub scene: SourceConfig,
    pub clean: Array2<Complex64>,
    pub noise: Option<NoiseSpec>,
    pub noisy: Option<Array2<Complex64>>,
}

/// Builds one sample from its seed alone.
pub fn generate_sample(
    id: String,
    seed: u64,
    n_sources: usize,
    noise: Option<NoiseKind>,
    grid: &Grid2D,
) -> Result<GeneratedSample, DatasetError> {
    let mut params = ChaCha8Rng::seed_from_u64(seed);
    let scene = sample_source_config(&mut params, n_sources)?;
    let clean = synth_harmonic_field(&scene, grid)?;
    let spec = noise.map(|kind| NoiseSpec::sample(&mut params, kind, scene.amplitude));
    let noisy = spec.map(|s| {
        let mut realization = ChaCha8Rng::seed_from_u64(seed);
        realization.set_stream(1);
        s.apply(&clean, &mut realization)
    });
    Ok(GeneratedSample { id, seed, scene, clean, noise: spec, noisy })
}

/// Generates the samples of `cfg` in memory, in manifest order.
pub fn generate_samples(cfg: &DatasetConfig) -> Result<Vec<GeneratedSample>, DatasetError> {
    cfg.validate()?;
    cfg.slots()
        .into_par_iter()
        .map(|(n, i)| generate_sample(sample_id(n, i), sample_seed(cfg.global_seed, n, i), n, cfg.noise, &cfg.grid))
        .collect()
}

/// Rebuilds a manifest record's fields from its stored seed and parameters.
pub fn regenerate(record: &SampleRecord, grid: &Grid2D) -> Result<GeneratedSample, DatasetError> {
    let kind = record.noise.map(|s| s.kind);
    let sample = generate_sample(record.id.clone(), record.seed, record.n_sources, kind, grid)?;
    if sample.scene.sources != record.sources || sample.scene.k != record.k {
        return Err(DatasetError::Sample {
            id: record.id.clone(),
            reason: "stored scene differs from the one its seed produces".into(),
        });
    }
    Ok(sample)
}

fn create_dir(path: &Path) -> Result<(), DatasetError> {
    std::fs::create_dir_all(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `cfg` as a dataset under `out_dir` and returns the manifest.
pub fn generate_dataset(cfg: &DatasetConfig, out_dir: &Path, force: bool) -> Result<DatasetManifest, DatasetError> {
    cfg.validate()?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    if manifest_path.exists() && !force {
        return Err(DatasetError::Exists(manifest_path.display().to_string()));
    }
    create_dir(&out_dir.join("clean"))?;
    if cfg.noise.is_some() {
        create_dir(&out_dir.join("noisy"))?;
    }
    let records: Result<Vec<SampleRecord>, DatasetError> = cfg
        .slots()
        .into_par_iter()
        .map(|(n, i)| {
            let id = sample_id(n, i);
            let s = generate_sample(id.clone(), sample_seed(cfg.global_seed, n, i), n, cfg.noise, &cfg.grid)?;
            let clean_path = format!("clean/{id}.sfd");
            write_tensor(out_dir.join(&clean_path), &Tensor::from_complex2(&s.clean))?;
            let noisy_path = match &s.noisy {
                Some(noisy) => {
                    let p = format!("noisy/{id}.sfd");
                    write_tensor(out_dir.join(&p), &Tensor::from_complex2(noisy))?;
                    Some(p)
                }
                None => None,
            };
            Ok(SampleRecord {
                id,
                seed: s.seed,
                n_sources: n,
                k: s.scene.k,
                amplitude: s.scene.amplitude,
                sources: s.scene.sources,
                noise: s.noise,
                clean_path,
                noisy_path,
            })
        })
        .collect();
    let mut manifest = DatasetManifest::new(cfg.global_seed, cfg.grid);
    manifest.samples = records?;
    manifest.write(&manifest_path)?;
    Ok(manifest)
}

/// Clean field and, when present, the noisy twin of a manifest record.
pub fn load_sample(
    root: &Path,
    record: &SampleRecord,
) -> Result<(Array2<Complex64>, Option<Array2<Complex64>>), DatasetError> {
    let load = |rel: &str| -> Result<Array2<Complex64>, DatasetError> {
        let path: PathBuf = root.join(rel);
        Ok(read_tensor(&path)?.to_complex2()?)
    };
    let clean = load(&record.clean_path)?;
    let noisy = record.noisy_path.as_deref().map(load).transpose()?;
    Ok((clean, noisy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_independent_of_other_counts() {
        let a = sample_seed(7, 3, 10);
        assert_eq!(a, sample_seed(7, 3, 10));
        assert_ne!(a, sample_seed(7, 3, 11));
        assert_ne!(a, sample_seed(7, 4, 10));
        assert_ne!(a, sample_seed(8, 3, 10));
    }

    #[test]
    fn invalid_counts_rejected() {
        let cfg = DatasetConfig {
            count_per_n: 1,
            n_values: vec![0],
            global_seed: 0,
            noise: None,
            grid: Grid2D::square(8).unwrap(),
        };
        assert!(matches!(cfg.validate(), Err(DatasetError::InvalidSourceCount(0))));
    }
}
