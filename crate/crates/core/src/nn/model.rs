use std::path::Path;

use ndarray::{s, Array3, Array4};

use super::ops::{conv2d, global_avg_pool, layer_norm2d, pixel_shuffle2, simple_gate};
use super::{load_weights, ArchDescriptor, NnError, WeightBundle};
use crate::filters::reflect_index;
use crate::spectral::{BinInfo, Denoiser, TwoChannelImage};

pub const LAYER_NORM_EPS: f32 = 1e-6;

#[derive(Clone, Debug)]
struct Conv {
    weight: Array4<f32>,
    bias: Option<Vec<f32>>,
    stride: usize,
    padding: usize,
    groups: usize,
}

impl Conv {
    fn load(b: &WeightBundle, prefix: &str, bias: bool, stride: usize, padding: usize, groups: usize) -> Result<Self, NnError> {
        let weight = param(b, &format!("{prefix}.weight"))?.to_array4()?;
        let bias = if bias { Some(param(b, &format!("{prefix}.bias"))?.data.clone()) } else { None };
        Ok(Conv { weight, bias, stride, padding, groups })
    }

    fn apply(&self, x: &Array3<f32>) -> Result<Array3<f32>, NnError> {
        conv2d(x, &self.weight, self.bias.as_deref(), self.stride, self.padding, self.groups)
    }
}

fn param<'a>(b: &'a WeightBundle, name: &str) -> Result<&'a super::ParamTensor, NnError> {
    b.tensors.get(name).ok_or_else(|| NnError::MissingTensor(name.to_string()))
}

#[derive(Clone, Debug)]
struct NafBlock {
    norm1: (Vec<f32>, Vec<f32>),
    conv1: Conv,
    conv2: Conv,
    sca: Conv,
    conv3: Conv,
    beta: Vec<f32>,
    norm2: (Vec<f32>, Vec<f32>),
    conv4: Conv,
    conv5: Conv,
    gamma: Vec<f32>,
}

impl NafBlock {
    fn load(b: &WeightBundle, prefix: &str, c: usize) -> Result<Self, NnError> {
        let vec = |n: &str| param(b, &format!("{prefix}.{n}")).map(|t| t.data.clone());
        Ok(NafBlock {
            norm1: (vec("norm1.weight")?, vec("norm1.bias")?),
            conv1: Conv::load(b, &format!("{prefix}.conv1"), true, 1, 0, 1)?,
            conv2: Conv::load(b, &format!("{prefix}.conv2"), true, 1, 1, 2 * c)?,
            sca: Conv::load(b, &format!("{prefix}.sca.1"), true, 1, 0, 1)?,
            conv3: Conv::load(b, &format!("{prefix}.conv3"), true, 1, 0, 1)?,
            beta: vec("beta")?,
            norm2: (vec("norm2.weight")?, vec("norm2.bias")?),
            conv4: Conv::load(b, &format!("{prefix}.conv4"), true, 1, 0, 1)?,
            conv5: Conv::load(b, &format!("{prefix}.conv5"), true, 1, 0, 1)?,
            gamma: vec("gamma")?,
        })
    }

    fn forward(&self, inp: &Array3<f32>) -> Result<Array3<f32>, NnError> {
        let x = layer_norm2d(inp, &self.norm1.0, &self.norm1.1, LAYER_NORM_EPS)?;
        let x = self.conv1.apply(&x)?;
        let x = self.conv2.apply(&x)?;
        let mut x = simple_gate(&x)?;
        // Simplified channel attention: pooled descriptor through a 1x1 conv, used as a scale.
        let pooled = global_avg_pool(&x);
        let pooled = Array3::from_shape_vec((pooled.len(), 1, 1), pooled).expect("shape");
        let attn = self.sca.apply(&pooled)?;
        for (k, mut plane) in x.outer_iter_mut().enumerate() {
            let a = attn[[k, 0, 0]];
            plane.mapv_inplace(|v| v * a);
        }
        let x = self.conv3.apply(&x)?;
        let mut y = inp.clone();
        add_scaled(&mut y, &x, &self.beta);

        let x = layer_norm2d(&y, &self.norm2.0, &self.norm2.1, LAYER_NORM_EPS)?;
        let x = self.conv4.apply(&x)?;
        let x = simple_gate(&x)?;
        let x = self.conv5.apply(&x)?;
        add_scaled(&mut y, &x, &self.gamma);
        Ok(y)
    }
}

/// `y += x * scale[channel]`.
fn add_scaled(y: &mut Array3<f32>, x: &Array3<f32>, scale: &[f32]) {
    for (k, (mut yp, xp)) in y.outer_iter_mut().zip(x.outer_iter()).enumerate() {
        let s = scale[k];
        yp.zip_mut_with(&xp, |a, b| *a += b * s);
    }
}

/// The U-shaped two-channel denoiser, ready for inference.
#[derive(Clone, Debug)]
pub struct NafNet {
    arch: ArchDescriptor,
    intro: Conv,
    encoders: Vec<Vec<NafBlock>>,
    downs: Vec<Conv>,
    middle: Vec<NafBlock>,
    ups: Vec<Conv>,
    decoders: Vec<Vec<NafBlock>>,
    ending: Conv,
}

impl NafNet {
    pub fn from_bundle(bundle: &WeightBundle) -> Result<Self, NnError> {
        bundle.validate()?;
        let arch = bundle.arch.clone();
        let intro = Conv::load(bundle, "intro", true, 1, 1, 1)?;
        let ending = Conv::load(bundle, "ending", true, 1, 1, 1)?;
        let mut chan = arch.width;
        let mut encoders = Vec::new();
        let mut downs = Vec::new();
        for (s, &n) in arch.enc_blocks.iter().enumerate() {
            encoders.push(
                (0..n)
                    .map(|b| NafBlock::load(bundle, &format!("encoders.{s}.{b}"), chan))
                    .collect::<Result<Vec<_>, _>>()?,
            );
            downs.push(Conv::load(bundle, &format!("downs.{s}"), true, 2, 0, 1)?);
            chan *= 2;
        }
        let middle = (0..arch.middle_blocks)
            .map(|b| NafBlock::load(bundle, &format!("middle_blks.{b}"), chan))
            .collect::<Result<Vec<_>, _>>()?;
        let mut ups = Vec::new();
        let mut decoders = Vec::new();
        for (s, &n) in arch.dec_blocks.iter().enumerate() {
            ups.push(Conv::load(bundle, &format!("ups.{s}.0"), false, 1, 0, 1)?);
            chan /= 2;
            decoders.push(
                (0..n)
                    .map(|b| NafBlock::load(bundle, &format!("decoders.{s}.{b}"), chan))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        Ok(NafNet { arch, intro, encoders, downs, middle, ups, decoders, ending })
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        let (_, bundle) = load_weights(path)?;
        NafNet::from_bundle(&bundle)
    }

    pub fn arch(&self) -> &ArchDescriptor {
        &self.arch
    }

    /// Forward pass on a `(2, H, W)` image whose extents are multiples of `2^stages`.
    pub fn forward_exact(&self, inp: &Array3<f32>) -> Result<Array3<f32>, NnError> {
        let (c, h, w) = inp.dim();
        let m = self.arch.size_multiple();
        if c != self.arch.in_channels {
            return Err(NnError::Shape(format!("expected {} channels, got {c}", self.arch.in_channels)));
        }
        if h == 0 || w == 0 || h % m != 0 || w % m != 0 {
            return Err(NnError::Dimension { h, w, multiple: m });
        }
        let mut x = self.intro.apply(inp)?;
        let mut skips = Vec::with_capacity(self.encoders.len());
        for (blocks, down) in self.encoders.iter().zip(&self.downs) {
            for b in blocks {
                x = b.forward(&x)?;
            }
            skips.push(x.clone());
            x = down.apply(&x)?;
        }
        for b in &self.middle {
            x = b.forward(&x)?;
        }
        for ((blocks, up), skip) in self.decoders.iter().zip(&self.ups).zip(skips.iter().rev()) {
            x = pixel_shuffle2(&up.apply(&x)?)?;
            x += skip;
            for b in blocks {
                x = b.forward(&x)?;
            }
        }
        let mut out = self.ending.apply(&x)?;
        out += inp;
        Ok(out)
    }

    /// Forward pass on any extent: reflect-pads up to the next multiple and crops back.
    pub fn forward(&self, inp: &Array3<f32>) -> Result<Array3<f32>, NnError> {
        let (c, h, w) = inp.dim();
        let m = self.arch.size_multiple();
        let (ph, pw) = (h.div_ceil(m) * m, w.div_ceil(m) * m);
        if (ph, pw) == (h, w) {
            return self.forward_exact(inp);
        }
        if h < 2 || w < 2 {
            return Err(NnError::Dimension { h, w, multiple: m });
        }
        let padded = Array3::from_shape_fn((c, ph, pw), |(k, y, x)| {
            inp[[k, reflect_index(y as isize, h), reflect_index(x as isize, w)]]
        });
        let out = self.forward_exact(&padded)?;
        Ok(out.slice(s![.., ..h, ..w]).to_owned())
    }

    /// f64 two-channel wrapper around [`NafNet::forward`]; computation is in f32.
    pub fn denoise_image(&self, img: &TwoChannelImage) -> Result<TwoChannelImage, NnError> {
        let (h, w) = img.dim();
        let inp = Array3::from_shape_fn((2, h, w), |(k, y, x)| {
            (if k == 0 { img.re[[y, x]] } else { img.im[[y, x]] }) as f32
        });
        let out = self.forward(&inp)?;
        Ok(TwoChannelImage::new(
            out.slice(s![0, .., ..]).mapv(f64::from),
            out.slice(s![1, .., ..]).mapv(f64::from),
        ))
    }
}

/// `forward(arch, weights, img)`: validates the bundle against `arch` and runs one image.
pub fn forward(arch: &ArchDescriptor, weights: &WeightBundle, img: &TwoChannelImage) -> Result<TwoChannelImage, NnError> {
    if &weights.arch != arch {
        return Err(NnError::Arch(format!("bundle architecture {:?} differs from {arch:?}", weights.arch)));
    }
    NafNet::from_bundle(weights)?.denoise_image(img)
}

/// The network as a per-bin [`Denoiser`].
pub struct DnnDenoiser {
    net: NafNet,
}

impl DnnDenoiser {
    pub fn new(net: NafNet) -> Self {
        DnnDenoiser { net }
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        NafNet::load(path).map(DnnDenoiser::new)
    }

    pub fn net(&self) -> &NafNet {
        &self.net
    }
}

impl Denoiser for DnnDenoiser {
    fn name(&self) -> &str {
        "dnn"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, crate::Error> {
        Ok(self.net.denoise_image(image)?)
    }
}
