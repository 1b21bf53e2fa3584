//! Persistence: tensor files, dataset manifests, heatmap rendering and provenance sidecars.

pub mod heatmap;
pub mod manifest;
pub mod tensor;

use std::path::{Path, PathBuf};

use serde::Serialize;

pub use heatmap::{render_heatmap, HeatmapError};
pub use manifest::{DatasetManifest, ManifestError, SampleRecord};
pub use tensor::{read_tensor, write_tensor, DType, Tensor, TensorData, TensorError};

/// Path of the provenance sidecar written next to `artifact`.
pub fn sidecar_path(artifact: &Path) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".prov.json");
    artifact.with_file_name(name)
}

/// Provenance record attached to every artifact the command line writes.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub toolkit_version: &'static str,
    pub command: String,
    pub method: Option<String>,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
}

impl Provenance {
    pub fn new(command: &str) -> Self {
        Provenance {
            tool: "sfd",
            toolkit_version: crate::VERSION,
            command: command.to_string(),
            method: None,
            params: serde_json::Value::Null,
            seed: None,
            inputs: Vec::new(),
        }
    }

    pub fn write_for(&self, artifact: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("provenance serializes");
        text.push('\n');
        std::fs::write(sidecar_path(artifact), text)
    }
}
