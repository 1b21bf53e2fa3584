//! Weight bundle container.
//!
//! ```text
//! magic       8 bytes  "SFDWGT01"
//! header_len  u64 LE
//! header      header_len bytes of UTF-8 JSON
//! blob        little-endian f32 tensors, row-major, at the offsets listed in the header
//! ```
//!
//! The header holds `format_version` (1), `arch` (an [`ArchDescriptor`]), `tensors` and
//! `reference` (each a list of `{name, shape, dtype: "f32", offset, nbytes}`), `blob_len`,
//! `checksum` (`{algorithm: "sha256", hex}` over the whole blob) and free-form `metadata`.
//! `reference` is either empty or holds an `input` / `output` pair of shape `(1, 2, H, W)` or
//! `(2, H, W)` produced by the exporting framework, for parity checks.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::{Array3, Array4};
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ArchDescriptor, NnError};

pub const BUNDLE_MAGIC: &[u8; 8] = b"SFDWGT01";
pub const BUNDLE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct ParamTensor {
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

impl ParamTensor {
    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        ParamTensor { shape, data: vec![0.0; n] }
    }

    pub fn to_array4(&self) -> Result<Array4<f32>, NnError> {
        let s = &self.shape;
        if s.len() != 4 {
            return Err(NnError::Shape(format!("expected a 4D tensor, got {s:?}")));
        }
        Array4::from_shape_vec((s[0], s[1], s[2], s[3]), self.data.clone()).map_err(|e| NnError::Shape(e.to_string()))
    }
}

/// Input and output of the exporting framework on one image.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferencePair {
    pub input: Array3<f32>,
    pub output: Array3<f32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightBundle {
    pub arch: ArchDescriptor,
    pub tensors: BTreeMap<String, ParamTensor>,
    pub reference: Option<ReferencePair>,
    pub metadata: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
    dtype: String,
    offset: u64,
    nbytes: u64,
}

#[derive(Serialize, Deserialize)]
struct Checksum {
    algorithm: String,
    hex: String,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    arch: ArchDescriptor,
    tensors: Vec<TensorEntry>,
    #[serde(default)]
    reference: Vec<TensorEntry>,
    blob_len: u64,
    checksum: Checksum,
    #[serde(default)]
    metadata: serde_json::Value,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn append(blob: &mut Vec<u8>, entries: &mut Vec<TensorEntry>, name: &str, shape: &[usize], data: &[f32]) {
    let offset = blob.len() as u64;
    for v in data {
        blob.extend_from_slice(&v.to_le_bytes());
    }
    entries.push(TensorEntry {
        name: name.to_string(),
        shape: shape.to_vec(),
        dtype: "f32".to_string(),
        offset,
        nbytes: (data.len() * 4) as u64,
    });
}

fn read_entry(blob: &[u8], e: &TensorEntry) -> Result<Vec<f32>, NnError> {
    if e.dtype != "f32" {
        return Err(NnError::Header(format!("tensor {} has dtype {}, only f32 is supported", e.name, e.dtype)));
    }
    let count: usize = e.shape.iter().product();
    if e.nbytes != (count * 4) as u64 {
        return Err(NnError::Header(format!(
            "tensor {} declares {} bytes for shape {:?}",
            e.name, e.nbytes, e.shape
        )));
    }
    let start = e.offset as usize;
    let end = start
        .checked_add(e.nbytes as usize)
        .filter(|&end| end <= blob.len())
        .ok_or_else(|| NnError::Header(format!("tensor {} lies outside the blob", e.name)))?;
    Ok(blob[start..end]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

fn reference_image(e: &TensorEntry, data: Vec<f32>) -> Result<Array3<f32>, NnError> {
    let dims: Vec<usize> = match e.shape.as_slice() {
        [1, c, h, w] | [c, h, w] => vec![*c, *h, *w],
        other => return Err(NnError::Header(format!("reference {} has shape {other:?}", e.name))),
    };
    Array3::from_shape_vec((dims[0], dims[1], dims[2]), data).map_err(|err| NnError::Header(err.to_string()))
}

impl WeightBundle {
    /// All parameters zero apart from the layer-norm scales, which are one.
    pub fn zeros(arch: &ArchDescriptor) -> Self {
        let tensors = arch
            .parameters()
            .into_iter()
            .map(|(name, shape)| {
                let mut t = ParamTensor::zeros(shape);
                if name.ends_with("norm1.weight") || name.ends_with("norm2.weight") {
                    t.data.iter_mut().for_each(|v| *v = 1.0);
                }
                (name, t)
            })
            .collect();
        WeightBundle {
            arch: arch.clone(),
            tensors,
            reference: None,
            metadata: serde_json::Value::Null,
        }
    }

    /// Uniform `(-1/sqrt(fan_in), 1/sqrt(fan_in))` weights and small random residual scales.
    pub fn random<R: Rng + ?Sized>(arch: &ArchDescriptor, rng: &mut R) -> Self {
        let mut bundle = WeightBundle::zeros(arch);
        for (name, t) in bundle.tensors.iter_mut() {
            let fan_in = if t.shape.len() == 4 { t.shape[1] * t.shape[2] * t.shape[3] } else { t.shape[0] };
            let bound = 1.0 / (fan_in.max(1) as f32).sqrt();
            let is_norm_scale = name.ends_with("norm1.weight") || name.ends_with("norm2.weight");
            for v in t.data.iter_mut() {
                let u: f32 = rng.random_range(-1.0..1.0);
                *v = if is_norm_scale {
                    1.0 + 0.1 * u
                } else if name.ends_with("beta") || name.ends_with("gamma") {
                    0.5 * u
                } else {
                    bound * u
                };
            }
        }
        bundle
    }

    /// Copy with every parameter multiplied by `s`.
    pub fn scaled(&self, s: f32) -> Self {
        let mut out = self.clone();
        for t in out.tensors.values_mut() {
            t.data.iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    /// Checks the tensor table against the architecture's parameter enumeration.
    pub fn validate(&self) -> Result<(), NnError> {
        self.arch.validate()?;
        let expected = self.arch.parameters();
        for (name, shape) in &expected {
            match self.tensors.get(name) {
                None => return Err(NnError::MissingTensor(name.clone())),
                Some(t) if &t.shape != shape => {
                    return Err(NnError::ShapeMismatch {
                        name: name.clone(),
                        expected: shape.clone(),
                        found: t.shape.clone(),
                    })
                }
                Some(t) if t.data.len() != shape.iter().product::<usize>() => {
                    return Err(NnError::Header(format!("tensor {name} holds {} values", t.data.len())))
                }
                Some(_) => {}
            }
        }
        if self.tensors.len() != expected.len() {
            let known: std::collections::HashSet<&str> = expected.iter().map(|(n, _)| n.as_str()).collect();
            if let Some(extra) = self.tensors.keys().find(|k| !known.contains(k.as_str())) {
                return Err(NnError::ExtraTensor(extra.clone()));
            }
        }
        Ok(())
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut blob = Vec::new();
        let mut tensors = Vec::new();
        for (name, t) in &self.tensors {
            append(&mut blob, &mut tensors, name, &t.shape, &t.data);
        }
        let mut reference = Vec::new();
        if let Some(pair) = &self.reference {
            for (name, img) in [("input", &pair.input), ("output", &pair.output)] {
                let (c, h, w) = img.dim();
                let data: Vec<f32> = img.iter().copied().collect();
                append(&mut blob, &mut reference, name, &[1, c, h, w], &data);
            }
        }
        let header = Header {
            format_version: BUNDLE_VERSION,
            arch: self.arch.clone(),
            tensors,
            reference,
            blob_len: blob.len() as u64,
            checksum: Checksum {
                algorithm: "sha256".into(),
                hex: sha256_hex(&blob),
            },
            metadata: self.metadata.clone(),
        };
        let header = serde_json::to_vec(&header).expect("header serializes");
        let mut out = Vec::with_capacity(16 + header.len() + blob.len());
        out.extend_from_slice(BUNDLE_MAGIC);
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        out.extend_from_slice(&blob);
        out
    }

    /// Parses, verifies the checksum and validates against the embedded architecture.
    pub fn decode(bytes: &[u8]) -> Result<Self, NnError> {
        if bytes.len() < 16 {
            return Err(NnError::Truncated { expected: 16, found: bytes.len() });
        }
        if &bytes[..8] != BUNDLE_MAGIC {
            return Err(NnError::BadMagic);
        }
        let header_len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
        let header_end = 16usize
            .checked_add(header_len)
            .filter(|&e| e <= bytes.len())
            .ok_or(NnError::Truncated { expected: 16 + header_len, found: bytes.len() })?;
        let header: Header =
            serde_json::from_slice(&bytes[16..header_end]).map_err(|e| NnError::Header(e.to_string()))?;
        if header.format_version != BUNDLE_VERSION {
            return Err(NnError::Header(format!("unsupported bundle version {}", header.format_version)));
        }
        let blob = &bytes[header_end..];
        if blob.len() as u64 != header.blob_len {
            return Err(NnError::Truncated {
                expected: header_end + header.blob_len as usize,
                found: bytes.len(),
            });
        }
        if header.checksum.algorithm != "sha256" {
            return Err(NnError::Header(format!("unknown checksum algorithm {}", header.checksum.algorithm)));
        }
        let found = sha256_hex(blob);
        if !found.eq_ignore_ascii_case(&header.checksum.hex) {
            return Err(NnError::Checksum {
                expected: header.checksum.hex,
                found,
            });
        }
        let mut tensors = BTreeMap::new();
        for e in &header.tensors {
            let data = read_entry(blob, e)?;
            if tensors.insert(e.name.clone(), ParamTensor { shape: e.shape.clone(), data }).is_some() {
                return Err(NnError::DuplicateTensor(e.name.clone()));
            }
        }
        let reference = match header.reference.as_slice() {
            [] => None,
            entries => {
                let find = |n: &str| {
                    entries
                        .iter()
                        .find(|e| e.name == n)
                        .ok_or_else(|| NnError::Header(format!("reference pair lacks {n}")))
                };
                let (ie, oe) = (find("input")?, find("output")?);
                let input = reference_image(ie, read_entry(blob, ie)?)?;
                let output = reference_image(oe, read_entry(blob, oe)?)?;
                if input.dim() != output.dim() {
                    return Err(NnError::Header("reference input and output differ in shape".into()));
                }
                Some(ReferencePair { input, output })
            }
        };
        let bundle = WeightBundle {
            arch: header.arch,
            tensors,
            reference,
            metadata: header.metadata,
        };
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn write(&self, path: &Path) -> Result<(), NnError> {
        std::fs::write(path, self.encode()).map_err(|source| NnError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Reads and fully validates a bundle.
pub fn load_weights(path: &Path) -> Result<(ArchDescriptor, WeightBundle), NnError> {
    let bytes = std::fs::read(path).map_err(|source| NnError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let bundle = WeightBundle::decode(&bytes)?;
    Ok((bundle.arch.clone(), bundle))
}
