//! Tensor primitives on `(channels, height, width)` f32 arrays.
//!
//! Every reduction runs in a fixed loop order. Parallelism is over output channels only, and
//! each channel is produced by one worker, so results do not depend on the thread count.

use ndarray::{Array3, Array4, Axis, Zip};
use rayon::prelude::*;

use super::NnError;

/// 2D cross-correlation with zero padding.
///
/// `weight` is `(c_out, c_in / groups, kh, kw)`; output extent is
/// `(h + 2 padding - kh) / stride + 1` per axis.
pub fn conv2d(
    input: &Array3<f32>,
    weight: &Array4<f32>,
    bias: Option<&[f32]>,
    stride: usize,
    padding: usize,
    groups: usize,
) -> Result<Array3<f32>, NnError> {
    let (c_in, h, w) = input.dim();
    let (c_out, cpg, kh, kw) = weight.dim();
    if groups == 0 || c_in % groups != 0 || c_out % groups != 0 || cpg != c_in / groups {
        return Err(NnError::Shape(format!(
            "conv2d: input has {c_in} channels, weight {:?}, groups {groups}",
            weight.dim()
        )));
    }
    if stride == 0 || h + 2 * padding < kh || w + 2 * padding < kw {
        return Err(NnError::Shape(format!(
            "conv2d: kernel {kh}x{kw} stride {stride} does not fit {h}x{w} with padding {padding}"
        )));
    }
    if let Some(b) = bias {
        if b.len() != c_out {
            return Err(NnError::Shape(format!("conv2d: bias length {} for {c_out} outputs", b.len())));
        }
    }
    let oh = (h + 2 * padding - kh) / stride + 1;
    let ow = (w + 2 * padding - kw) / stride + 1;
    let input = input.as_standard_layout();
    let src = input.as_slice().expect("standard layout");
    let weight = weight.as_standard_layout();
    let wts = weight.as_slice().expect("standard layout");
    let cout_per_group = c_out / groups;

    let mut out = vec![0.0f32; c_out * oh * ow];
    out.par_chunks_mut(oh * ow).enumerate().for_each(|(co, plane)| {
        let b = bias.map_or(0.0, |b| b[co]);
        plane.iter_mut().for_each(|v| *v = b);
        let g = co / cout_per_group;
        for cl in 0..cpg {
            let ci = g * cpg + cl;
            let chan = &src[ci * h * w..(ci + 1) * h * w];
            for ky in 0..kh {
                for kx in 0..kw {
                    let wv = wts[((co * cpg + cl) * kh + ky) * kw + kx];
                    if wv == 0.0 {
                        continue;
                    }
                    if kx >= w + padding {
                        continue;
                    }
                    // Output columns whose input column lands inside the image.
                    let ox_lo = padding.saturating_sub(kx).div_ceil(stride);
                    let ox_hi = ((w + padding - kx - 1) / stride + 1).min(ow);
                    if ox_lo >= ox_hi {
                        continue;
                    }
                    for oy in 0..oh {
                        let iy = (oy * stride + ky) as isize - padding as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        let row = &chan[iy as usize * w..(iy as usize + 1) * w];
                        let orow = &mut plane[oy * ow..(oy + 1) * ow];
                        for ox in ox_lo..ox_hi {
                            orow[ox] += wv * row[ox * stride + kx - padding];
                        }
                    }
                }
            }
        }
    });
    Ok(Array3::from_shape_vec((c_out, oh, ow), out).expect("shape"))
}

/// `out[i] = x[i] * x[i + c]` for `2c` input channels.
pub fn simple_gate(x: &Array3<f32>) -> Result<Array3<f32>, NnError> {
    let c2 = x.dim().0;
    if c2 % 2 != 0 {
        return Err(NnError::Shape(format!("simple_gate needs an even channel count, got {c2}")));
    }
    let c = c2 / 2;
    let (a, b) = x.view().split_at(Axis(0), c);
    Ok(Zip::from(&a).and(&b).map_collect(|p, q| p * q))
}

/// Channel-wise layer normalization at every pixel (biased variance).
pub fn layer_norm2d(x: &Array3<f32>, weight: &[f32], bias: &[f32], eps: f32) -> Result<Array3<f32>, NnError> {
    let (c, h, w) = x.dim();
    if weight.len() != c || bias.len() != c {
        return Err(NnError::Shape(format!("layer_norm2d: {c} channels, affine {}/{}", weight.len(), bias.len())));
    }
    let mut out = Array3::zeros((c, h, w));
    let inv_c = 1.0 / c as f32;
    for y in 0..h {
        for xx in 0..w {
            let mut mu = 0.0f32;
            for k in 0..c {
                mu += x[[k, y, xx]];
            }
            mu *= inv_c;
            let mut var = 0.0f32;
            for k in 0..c {
                let d = x[[k, y, xx]] - mu;
                var += d * d;
            }
            var *= inv_c;
            let inv_std = 1.0 / (var + eps).sqrt();
            for k in 0..c {
                out[[k, y, xx]] = (x[[k, y, xx]] - mu) * inv_std * weight[k] + bias[k];
            }
        }
    }
    Ok(out)
}

/// Rearranges `(4c, h, w)` into `(c, 2h, 2w)`: `out[k, 2y+i, 2x+j] = in[4k + 2i + j, y, x]`.
pub fn pixel_shuffle2(x: &Array3<f32>) -> Result<Array3<f32>, NnError> {
    let (c4, h, w) = x.dim();
    if c4 % 4 != 0 {
        return Err(NnError::Shape(format!("pixel_shuffle needs a multiple of 4 channels, got {c4}")));
    }
    let c = c4 / 4;
    Ok(Array3::from_shape_fn((c, 2 * h, 2 * w), |(k, yy, xx)| {
        x[[4 * k + 2 * (yy % 2) + xx % 2, yy / 2, xx / 2]]
    }))
}

/// Spatial mean of every channel.
pub fn global_avg_pool(x: &Array3<f32>) -> Vec<f32> {
    let (_, h, w) = x.dim();
    let n = (h * w) as f32;
    x.outer_iter().map(|plane| plane.iter().sum::<f32>() / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_shuffle_layout() {
        let x = Array3::from_shape_fn((4, 1, 1), |(k, _, _)| k as f32);
        let y = pixel_shuffle2(&x).unwrap();
        assert_eq!(y.dim(), (1, 2, 2));
        assert_eq!(y.iter().copied().collect::<Vec<_>>(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn gate_rejects_odd() {
        assert!(simple_gate(&Array3::zeros((3, 2, 2))).is_err());
    }

    #[test]
    fn strided_conv_shape() {
        let x = Array3::from_elem((2, 8, 6), 1.0f32);
        let w = Array4::from_elem((4, 2, 2, 2), 0.5f32);
        let y = conv2d(&x, &w, None, 2, 0, 1).unwrap();
        assert_eq!(y.dim(), (4, 4, 3));
        assert!(y.iter().all(|&v| (v - 4.0).abs() < 1e-6));
    }
}
