//! PNG heatmaps with a blue-white-red diverging colormap.
//!
//! Array row 0 is written as the top image row.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use ndarray::Array2;
use thiserror::Error;

/// Number of colormap entries; odd so that the pivot lands on an exact white entry.
pub const COLORMAP_LEN: usize = 257;

#[derive(Debug, Error)]
pub enum HeatmapError {
    #[error("invalid range ({lo}, {hi}): lo must be below hi")]
    InvalidRange { lo: f64, hi: f64 },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("png encoding failed: {0}")]
    Encode(#[from] png::EncodingError),
}

/// Colormap entry `i` of [`COLORMAP_LEN`]: blue at 0, white at the center, red at the end.
pub fn colormap_entry(i: usize) -> [u8; 3] {
    let center = (COLORMAP_LEN - 1) / 2;
    let i = i.min(COLORMAP_LEN - 1);
    if i <= center {
        let f = i as f64 / center as f64;
        let c = (255.0 * f).round() as u8;
        [c, c, 255]
    } else {
        let f = (i - center) as f64 / center as f64;
        let c = (255.0 * (1.0 - f)).round() as u8;
        [255, c, c]
    }
}

/// Maps a value to a colormap index. Values are clipped to `[lo, hi]`; when the range straddles
/// zero the two halves are scaled independently so that 0 maps to white.
pub fn colormap_index(value: f64, lo: f64, hi: f64) -> usize {
    let v = if value.is_nan() { 0.5 * (lo + hi) } else { value.clamp(lo, hi) };
    let t = if lo < 0.0 && hi > 0.0 {
        if v < 0.0 {
            0.5 * (v - lo) / -lo
        } else {
            0.5 + 0.5 * v / hi
        }
    } else {
        (v - lo) / (hi - lo)
    };
    ((t * (COLORMAP_LEN - 1) as f64).round() as usize).min(COLORMAP_LEN - 1)
}

/// RGB pixels for `field`, row-major, three bytes per pixel.
pub fn colorize(field: &Array2<f64>, lo: f64, hi: f64) -> Result<Vec<u8>, HeatmapError> {
    if !(lo < hi) {
        return Err(HeatmapError::InvalidRange { lo, hi });
    }
    let lut: Vec<[u8; 3]> = (0..COLORMAP_LEN).map(colormap_entry).collect();
    let mut rgb = Vec::with_capacity(field.len() * 3);
    for &v in field.iter() {
        rgb.extend_from_slice(&lut[colormap_index(v, lo, hi)]);
    }
    Ok(rgb)
}

pub fn render_heatmap(
    field: &Array2<f64>,
    path: impl AsRef<Path>,
    range: (f64, f64),
) -> Result<(), HeatmapError> {
    let path = path.as_ref();
    let rgb = colorize(field, range.0, range.1)?;
    let (rows, cols) = field.dim();
    let io_err = |source| HeatmapError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), cols as u32, rows as u32);
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&rgb)?;
    writer.finish()?;
    Ok(())
}
