//! Architecture descriptor and the parameter enumeration shared with the exporter.
//!
//! Names follow the PyTorch `state_dict` of the reference NAFNet implementation:
//!
//! ```text
//! intro.{weight,bias}                       (width, 2, 3, 3)
//! encoders.{s}.{b}.<block>                  block at stage width width * 2^s
//! downs.{s}.{weight,bias}                   (2c, c, 2, 2)
//! middle_blks.{b}.<block>
//! ups.{s}.0.weight                          (2c, c, 1, 1), no bias, then pixel shuffle
//! decoders.{s}.{b}.<block>
//! ending.{weight,bias}                      (2, width, 3, 3)
//! ```
//!
//! and inside a block of width `c`:
//!
//! ```text
//! norm1.{weight,bias} (c)       conv1 (2c, c, 1, 1)    conv2 (2c, 1, 3, 3) depthwise
//! sca.1 (c, c, 1, 1)            conv3 (c, c, 1, 1)     beta  (1, c, 1, 1)
//! norm2.{weight,bias} (c)       conv4 (2c, c, 1, 1)    conv5 (c, c, 1, 1)  gamma (1, c, 1, 1)
//! ```
//!
//! All convolutions except `ups` carry a bias of length `c_out`.

use serde::{Deserialize, Serialize};

use super::NnError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchDescriptor {
    pub width: usize,
    pub enc_blocks: Vec<usize>,
    pub middle_blocks: usize,
    pub dec_blocks: Vec<usize>,
    #[serde(default = "two")]
    pub in_channels: usize,
    #[serde(default = "two")]
    pub out_channels: usize,
}

fn two() -> usize {
    2
}

impl Default for ArchDescriptor {
    fn default() -> Self {
        ArchDescriptor::desk()
    }
}

impl ArchDescriptor {
    /// Small configuration trainable on a workstation: width 16, ten blocks.
    pub fn desk() -> Self {
        ArchDescriptor {
            width: 16,
            enc_blocks: vec![1, 1, 2],
            middle_blocks: 2,
            dec_blocks: vec![1, 1, 2],
            in_channels: 2,
            out_channels: 2,
        }
    }

    /// Width 32 with 32 blocks. The reference implementation's default split has 12 middle
    /// blocks (36 in total); the middle stage is shortened to reach 32.
    pub fn full() -> Self {
        ArchDescriptor {
            width: 32,
            enc_blocks: vec![2, 2, 4, 8],
            middle_blocks: 8,
            dec_blocks: vec![2, 2, 2, 2],
            in_channels: 2,
            out_channels: 2,
        }
    }

    pub fn stages(&self) -> usize {
        self.enc_blocks.len()
    }

    /// Spatial extents must be multiples of this.
    pub fn size_multiple(&self) -> usize {
        1 << self.stages()
    }

    pub fn total_blocks(&self) -> usize {
        self.enc_blocks.iter().sum::<usize>() + self.middle_blocks + self.dec_blocks.iter().sum::<usize>()
    }

    pub fn validate(&self) -> Result<(), NnError> {
        if self.width == 0 {
            return Err(NnError::Arch("width must be positive".into()));
        }
        if self.enc_blocks.len() != self.dec_blocks.len() {
            return Err(NnError::Arch(format!(
                "{} encoder stages but {} decoder stages",
                self.enc_blocks.len(),
                self.dec_blocks.len()
            )));
        }
        if self.in_channels != 2 || self.out_channels != 2 {
            return Err(NnError::Arch(format!(
                "two-channel images only, got {} in / {} out",
                self.in_channels, self.out_channels
            )));
        }
        if self.stages() > 16 {
            return Err(NnError::Arch(format!("{} stages is too deep", self.stages())));
        }
        Ok(())
    }

    /// Every parameter with its shape, in registration order.
    pub fn parameters(&self) -> Vec<(String, Vec<usize>)> {
        let mut out = Vec::new();
        let w = self.width;
        out.push(("intro.weight".to_string(), vec![w, self.in_channels, 3, 3]));
        out.push(("intro.bias".to_string(), vec![w]));
        out.push(("ending.weight".to_string(), vec![self.out_channels, w, 3, 3]));
        out.push(("ending.bias".to_string(), vec![self.out_channels]));
        let mut chan = w;
        for (s, &n) in self.enc_blocks.iter().enumerate() {
            for b in 0..n {
                block_parameters(&format!("encoders.{s}.{b}"), chan, &mut out);
            }
            chan *= 2;
        }
        let deepest = chan;
        for (s, &n) in self.dec_blocks.iter().enumerate() {
            chan /= 2;
            for b in 0..n {
                block_parameters(&format!("decoders.{s}.{b}"), chan, &mut out);
            }
        }
        for b in 0..self.middle_blocks {
            block_parameters(&format!("middle_blks.{b}"), deepest, &mut out);
        }
        chan = deepest;
        for s in 0..self.dec_blocks.len() {
            out.push((format!("ups.{s}.0.weight"), vec![2 * chan, chan, 1, 1]));
            chan /= 2;
        }
        chan = w;
        for s in 0..self.enc_blocks.len() {
            out.push((format!("downs.{s}.weight"), vec![2 * chan, chan, 2, 2]));
            out.push((format!("downs.{s}.bias"), vec![2 * chan]));
            chan *= 2;
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.parameters().iter().map(|(_, s)| s.iter().product::<usize>()).sum()
    }
}

fn block_parameters(prefix: &str, c: usize, out: &mut Vec<(String, Vec<usize>)>) {
    let mut push = |name: &str, shape: Vec<usize>| out.push((format!("{prefix}.{name}"), shape));
    push("beta", vec![1, c, 1, 1]);
    push("gamma", vec![1, c, 1, 1]);
    push("conv1.weight", vec![2 * c, c, 1, 1]);
    push("conv1.bias", vec![2 * c]);
    push("conv2.weight", vec![2 * c, 1, 3, 3]);
    push("conv2.bias", vec![2 * c]);
    push("conv3.weight", vec![c, c, 1, 1]);
    push("conv3.bias", vec![c]);
    push("sca.1.weight", vec![c, c, 1, 1]);
    push("sca.1.bias", vec![c]);
    push("conv4.weight", vec![2 * c, c, 1, 1]);
    push("conv4.bias", vec![2 * c]);
    push("conv5.weight", vec![c, c, 1, 1]);
    push("conv5.bias", vec![c]);
    push("norm1.weight", vec![c]);
    push("norm1.bias", vec![c]);
    push("norm2.weight", vec![c]);
    push("norm2.bias", vec![c]);
}
