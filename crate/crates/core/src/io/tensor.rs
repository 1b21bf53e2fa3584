//! Minimal binary tensor container.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! offset  size        field
//! 0       4           magic, ASCII "SFD1"
//! 4       1           dtype code: 1 = f32, 2 = f64, 3 = c64 (f32 re/im pairs), 4 = c128 (f64 re/im pairs)
//! 5       1           ndim
//! 6       8 * ndim    shape, u64 per axis, outermost first
//! ...     payload     row-major scalars, innermost axis last, complex values interleaved (re, im)
//! ```
//!
//! The payload length must equal `dtype.size() * product(shape)` exactly; readers reject
//! both truncated and over-long files.

use std::fs;
use std::path::Path;

use ndarray::{Array2, Array3, ArrayD, IxDyn};
use num_complex::{Complex32, Complex64};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"SFD1";

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic {found:?}, expected \"SFD1\"")]
    BadMagic { found: [u8; 4] },
    #[error("unknown dtype code {0}")]
    UnknownDtype(u8),
    #[error("payload length mismatch: expected {expected} bytes, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid shape {0:?}: need at least one axis and every extent >= 1")]
    InvalidShape(Vec<usize>),
    #[error("shape {shape:?} holds {expected} elements but data has {found}")]
    DataLength {
        shape: Vec<usize>,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DType {
    F32 = 1,
    F64 = 2,
    C64 = 3,
    C128 = 4,
}

impl DType {
    pub fn from_code(code: u8) -> Result<Self, TensorError> {
        match code {
            1 => Ok(DType::F32),
            2 => Ok(DType::F64),
            3 => Ok(DType::C64),
            4 => Ok(DType::C128),
            other => Err(TensorError::UnknownDtype(other)),
        }
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    /// Bytes per element.
    pub fn size(self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 | DType::C64 => 8,
            DType::C128 => 16,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DType::F32 => "f32",
            DType::F64 => "f64",
            DType::C64 => "c64",
            DType::C128 => "c128",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    F64(Vec<f64>),
    C64(Vec<Complex32>),
    C128(Vec<Complex64>),
}

impl TensorData {
    pub fn dtype(&self) -> DType {
        match self {
            TensorData::F32(_) => DType::F32,
            TensorData::F64(_) => DType::F64,
            TensorData::C64(_) => DType::C64,
            TensorData::C128(_) => DType::C128,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::F64(v) => v.len(),
            TensorData::C64(v) => v.len(),
            TensorData::C128(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A shaped, typed tensor as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: TensorData,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: TensorData) -> Result<Self, TensorError> {
        if shape.is_empty() || shape.len() > u8::MAX as usize || shape.contains(&0) {
            return Err(TensorError::InvalidShape(shape));
        }
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(TensorError::DataLength {
                shape,
                expected,
                found: data.len(),
            });
        }
        Ok(Tensor { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dtype(&self) -> DType {
        self.data.dtype()
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub fn into_data(self) -> TensorData {
        self.data
    }

    pub fn from_real2(a: &Array2<f64>) -> Self {
        let shape = a.shape().to_vec();
        Tensor::new(shape, TensorData::F64(a.iter().copied().collect()))
            .expect("ndarray shapes are valid")
    }

    pub fn from_real3(a: &Array3<f64>) -> Self {
        let shape = a.shape().to_vec();
        Tensor::new(shape, TensorData::F64(a.iter().copied().collect()))
            .expect("ndarray shapes are valid")
    }

    pub fn from_complex2(a: &Array2<Complex64>) -> Self {
        let shape = a.shape().to_vec();
        Tensor::new(shape, TensorData::C128(a.iter().copied().collect()))
            .expect("ndarray shapes are valid")
    }

    /// Any real tensor widened to f64.
    pub fn to_real_dyn(&self) -> Result<ArrayD<f64>, TensorError> {
        let values: Vec<f64> = match &self.data {
            TensorData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            TensorData::F64(v) => v.clone(),
            _ => {
                return Err(TensorError::Unexpected {
                    expected: "real tensor".into(),
                    found: self.dtype().name().into(),
                })
            }
        };
        Ok(ArrayD::from_shape_vec(IxDyn(&self.shape), values).expect("length checked on construction"))
    }

    /// Any tensor widened to complex f64 (real tensors get a zero imaginary part).
    pub fn to_complex_dyn(&self) -> ArrayD<Complex64> {
        let values: Vec<Complex64> = match &self.data {
            TensorData::F32(v) => v.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect(),
            TensorData::F64(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            TensorData::C64(v) => v.iter().map(|z| Complex64::new(z.re as f64, z.im as f64)).collect(),
            TensorData::C128(v) => v.clone(),
        };
        ArrayD::from_shape_vec(IxDyn(&self.shape), values).expect("length checked on construction")
    }

    pub fn to_real3(&self) -> Result<Array3<f64>, TensorError> {
        self.expect_ndim(3)?;
        Ok(self.to_real_dyn()?.into_dimensionality().expect("ndim checked"))
    }

    pub fn to_real2(&self) -> Result<Array2<f64>, TensorError> {
        self.expect_ndim(2)?;
        Ok(self.to_real_dyn()?.into_dimensionality().expect("ndim checked"))
    }

    pub fn to_complex2(&self) -> Result<Array2<Complex64>, TensorError> {
        self.expect_ndim(2)?;
        Ok(self.to_complex_dyn().into_dimensionality().expect("ndim checked"))
    }

    pub fn is_complex(&self) -> bool {
        matches!(self.dtype(), DType::C64 | DType::C128)
    }

    fn expect_ndim(&self, ndim: usize) -> Result<(), TensorError> {
        if self.shape.len() != ndim {
            return Err(TensorError::Unexpected {
                expected: format!("{ndim}-dimensional tensor"),
                found: format!("shape {:?}", self.shape),
            });
        }
        Ok(())
    }
}

/// Serializes a tensor into the container byte layout.
pub fn encode(tensor: &Tensor) -> Vec<u8> {
    let dtype = tensor.dtype();
    let n: usize = tensor.shape.iter().product();
    let mut out = Vec::with_capacity(6 + 8 * tensor.shape.len() + n * dtype.size());
    out.extend_from_slice(MAGIC);
    out.push(dtype.code());
    out.push(tensor.shape.len() as u8);
    for &extent in &tensor.shape {
        out.extend_from_slice(&(extent as u64).to_le_bytes());
    }
    match &tensor.data {
        TensorData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        TensorData::F64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        TensorData::C64(v) => v.iter().for_each(|z| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }),
        TensorData::C128(v) => v.iter().for_each(|z| {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }),
    }
    out
}

/// Parses the container byte layout.
pub fn decode(bytes: &[u8]) -> Result<Tensor, TensorError> {
    if bytes.len() < 6 {
        if bytes.len() >= 4 && &bytes[..4] != MAGIC {
            return Err(TensorError::BadMagic {
                found: bytes[..4].try_into().unwrap(),
            });
        }
        return Err(TensorError::LengthMismatch {
            expected: 6,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if &magic != MAGIC {
        return Err(TensorError::BadMagic { found: magic });
    }
    let dtype = DType::from_code(bytes[4])?;
    let ndim = bytes[5] as usize;
    let header_len = 6 + 8 * ndim;
    if bytes.len() < header_len {
        return Err(TensorError::LengthMismatch {
            expected: header_len,
            found: bytes.len(),
        });
    }
    let shape: Vec<usize> = bytes[6..header_len]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    if shape.is_empty() || shape.contains(&0) {
        return Err(TensorError::InvalidShape(shape));
    }
    let count = shape
        .iter()
        .try_fold(1usize, |acc, &e| acc.checked_mul(e))
        .ok_or_else(|| TensorError::InvalidShape(shape.clone()))?;
    let payload = &bytes[header_len..];
    let expected = count
        .checked_mul(dtype.size())
        .ok_or_else(|| TensorError::InvalidShape(shape.clone()))?;
    if payload.len() != expected {
        return Err(TensorError::LengthMismatch {
            expected,
            found: payload.len(),
        });
    }
    let data = match dtype {
        DType::F32 => TensorData::F32(
            payload
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        DType::F64 => TensorData::F64(
            payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        ),
        DType::C64 => TensorData::C64(
            payload
                .chunks_exact(8)
                .map(|c| {
                    Complex32::new(
                        f32::from_le_bytes(c[..4].try_into().unwrap()),
                        f32::from_le_bytes(c[4..].try_into().unwrap()),
                    )
                })
                .collect(),
        ),
        DType::C128 => TensorData::C128(
            payload
                .chunks_exact(16)
                .map(|c| {
                    Complex64::new(
                        f64::from_le_bytes(c[..8].try_into().unwrap()),
                        f64::from_le_bytes(c[8..].try_into().unwrap()),
                    )
                })
                .collect(),
        ),
    };
    Tensor::new(shape, data)
}

pub fn write_tensor(path: impl AsRef<Path>, tensor: &Tensor) -> Result<(), TensorError> {
    let path = path.as_ref();
    fs::write(path, encode(tensor)).map_err(|source| TensorError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor, TensorError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| TensorError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&bytes)
}
