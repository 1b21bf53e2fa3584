//! Dataset manifests: UTF-8 JSON documents describing every generated sample.
//!
//! Field names are part of the on-disk contract:
//!
//! ```text
//! schema_version   integer, currently 1
//! toolkit_version  crate version that produced the files
//! global_seed      u64
//! grid             { nx, ny, side }
//! samples[]        { id, seed, n_sources, k, amplitude,
//!                    sources[] { a, x, y },
//!                    noise { kind, white_sigma, speckle_amp, speckle_corr_len } | null,
//!                    clean_path, noisy_path | null }
//! ```
//!
//! Paths are relative to the directory holding the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::noise::NoiseSpec;
use crate::sim::{Grid2D, PointSource};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported manifest schema version {0}")]
    Version(u32),
    #[error("sample {id}: referenced file {path} does not exist")]
    MissingFile { id: String, path: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub id: String,
    pub seed: u64,
    pub n_sources: usize,
    pub k: f64,
    pub amplitude: f64,
    pub sources: Vec<PointSource>,
    pub noise: Option<NoiseSpec>,
    pub clean_path: String,
    pub noisy_path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub toolkit_version: String,
    pub global_seed: u64,
    pub grid: Grid2D,
    pub samples: Vec<SampleRecord>,
}

impl DatasetManifest {
    pub fn new(global_seed: u64, grid: Grid2D) -> Self {
        DatasetManifest {
            schema_version: SCHEMA_VERSION,
            toolkit_version: crate::VERSION.to_string(),
            global_seed,
            grid,
            samples: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ManifestError> {
        let m: DatasetManifest = serde_json::from_str(text)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(ManifestError::Version(m.schema_version));
        }
        Ok(m)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), ManifestError> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, ManifestError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Checks that every referenced tensor file exists under `root`.
    pub fn validate_paths(&self, root: impl AsRef<Path>) -> Result<(), ManifestError> {
        let root = root.as_ref();
        for s in &self.samples {
            for p in std::iter::once(&s.clean_path).chain(s.noisy_path.iter()) {
                if !root.join(p).is_file() {
                    return Err(ManifestError::MissingFile {
                        id: s.id.clone(),
                        path: p.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Directory that manifest-relative paths are resolved against.
pub fn manifest_root(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}
