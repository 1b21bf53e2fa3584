//! [`Denoiser`] implementations for every method and a name-based selector.

use std::path::PathBuf;

use serde::Serialize;

use crate::filters::{
    gaussian_filter, median_filter, nlm_filter, stbpf_filter, wff_filter, GaussianConfig, MedianConfig, NlmConfig,
    StbpfConfig, WffConfig,
};
use crate::nn::DnnDenoiser;
use crate::spectral::{BinInfo, Denoiser, TwoChannelImage};
use crate::Error;

/// Returns its input; the "noisy" baseline.
pub struct Identity;

impl Denoiser for Identity {
    fn name(&self) -> &str {
        "identity"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, Error> {
        Ok(image.clone())
    }
}

/// Returns zeros of the input shape.
pub struct ZeroMap;

impl Denoiser for ZeroMap {
    fn name(&self) -> &str {
        "zero"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, Error> {
        Ok(TwoChannelImage::zeros(image.dim()))
    }
}

pub struct Gaussian(pub GaussianConfig);

impl Denoiser for Gaussian {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, Error> {
        Ok(gaussian_filter(image, &self.0)?)
    }
}

pub struct Median(pub MedianConfig);

impl Denoiser for Median {
    fn name(&self) -> &str {
        "median"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, Error> {
        Ok(median_filter(image, &self.0)?)
    }
}

pub struct Nlm(pub NlmConfig);

impl Denoiser for Nlm {
    fn name(&self) -> &str {
        "nlm"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, Error> {
        Ok(nlm_filter(image, &self.0)?)
    }
}

pub struct Wff(pub WffConfig);

impl Denoiser for Wff {
    fn name(&self) -> &str {
        "wff"
    }

    fn denoise(&self, image: &TwoChannelImage, _bin: &BinInfo) -> Result<TwoChannelImage, Error> {
        Ok(TwoChannelImage::from_complex(&wff_filter(&image.to_complex(), &self.0)?))
    }
}

/// Band-pass around `|kappa| = omega / c` for the bin being processed.
pub struct Stbpf(pub StbpfConfig);

impl Denoiser for Stbpf {
    fn name(&self) -> &str {
        "stbpf"
    }

    fn denoise(&self, image: &TwoChannelImage, bin: &BinInfo) -> Result<TwoChannelImage, Error> {
        let c = self.0.c;
        let k_bin = bin.omega / c;
        let k_first = bin.first_omega.map(|w| w / c);
        Ok(TwoChannelImage::from_complex(&stbpf_filter(&image.to_complex(), k_bin, k_first, &self.0)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    Gaussian,
    Median,
    Nlm,
    Wff,
    Stbpf,
    Dnn,
    Identity,
    Zero,
}

impl MethodKind {
    pub const ALL: [MethodKind; 8] = [
        MethodKind::Gaussian,
        MethodKind::Median,
        MethodKind::Nlm,
        MethodKind::Wff,
        MethodKind::Stbpf,
        MethodKind::Dnn,
        MethodKind::Identity,
        MethodKind::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Gaussian => "gaussian",
            MethodKind::Median => "median",
            MethodKind::Nlm => "nlm",
            MethodKind::Wff => "wff",
            MethodKind::Stbpf => "stbpf",
            MethodKind::Dnn => "dnn",
            MethodKind::Identity => "identity",
            MethodKind::Zero => "zero",
        }
    }
}

impl std::str::FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = MethodKind::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method {s:?}; expected one of {}", names.join(", "))
            })
    }
}

impl std::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters for every method; only the selected method's entry is used.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodParams {
    pub gaussian: GaussianConfig,
    pub median: MedianConfig,
    pub nlm: NlmConfig,
    pub wff: WffConfig,
    pub stbpf: StbpfConfig,
    pub weights: Option<PathBuf>,
}

impl Default for MethodParams {
    fn default() -> Self {
        MethodParams {
            gaussian: GaussianConfig::default(),
            median: MedianConfig::default(),
            nlm: NlmConfig::default(),
            wff: WffConfig::default(),
            stbpf: StbpfConfig::harmonic(),
            weights: None,
        }
    }
}

impl MethodParams {
    /// The parameters that matter for `kind`, for provenance records.
    pub fn describe(&self, kind: MethodKind) -> serde_json::Value {
        let v = match kind {
            MethodKind::Gaussian => serde_json::to_value(self.gaussian),
            MethodKind::Median => serde_json::to_value(self.median),
            MethodKind::Nlm => serde_json::to_value(self.nlm),
            MethodKind::Wff => serde_json::to_value(self.wff),
            MethodKind::Stbpf => serde_json::to_value(self.stbpf),
            MethodKind::Dnn => serde_json::to_value(serde_json::json!({
                "weights": self.weights.as_ref().map(|p| p.display().to_string()),
            })),
            MethodKind::Identity | MethodKind::Zero => Ok(serde_json::json!({})),
        };
        v.expect("parameters serialize")
    }
}

/// Instantiates `kind`. The network needs `params.weights`.
pub fn build_method(kind: MethodKind, params: &MethodParams) -> Result<Box<dyn Denoiser>, Error> {
    Ok(match kind {
        MethodKind::Gaussian => {
            params.gaussian.validate()?;
            Box::new(Gaussian(params.gaussian))
        }
        MethodKind::Median => Box::new(Median(params.median)),
        MethodKind::Nlm => Box::new(Nlm(params.nlm)),
        MethodKind::Wff => {
            params.wff.validate()?;
            Box::new(Wff(params.wff))
        }
        MethodKind::Stbpf => {
            params.stbpf.validate()?;
            Box::new(Stbpf(params.stbpf))
        }
        MethodKind::Dnn => {
            let path = params
                .weights
                .as_ref()
                .ok_or_else(|| Error::Usage("method dnn requires --weights".into()))?;
            Box::new(DnnDenoiser::load(path)?)
        }
        MethodKind::Identity => Box::new(Identity),
        MethodKind::Zero => Box::new(ZeroMap),
    })
}
