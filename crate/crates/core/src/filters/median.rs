use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{check_odd, reflect_index, FilterError};
use crate::spectral::TwoChannelImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MedianConfig {
    pub ksize: usize,
}

impl Default for MedianConfig {
    fn default() -> Self {
        MedianConfig { ksize: 7 }
    }
}

pub fn median_channel(img: &Array2<f64>, ksize: usize) -> Result<Array2<f64>, FilterError> {
    check_odd(ksize)?;
    let r = (ksize / 2) as isize;
    let (ny, nx) = img.dim();
    let mut window = Vec::with_capacity(ksize * ksize);
    let mid = ksize * ksize / 2;
    let mut out = Array2::zeros((ny, nx));
    for j in 0..ny {
        for i in 0..nx {
            window.clear();
            for dj in -r..=r {
                let sj = reflect_index(j as isize + dj, ny);
                for di in -r..=r {
                    window.push(img[[sj, reflect_index(i as isize + di, nx)]]);
                }
            }
            let (_, m, _) = window.select_nth_unstable_by(mid, f64::total_cmp);
            out[[j, i]] = *m;
        }
    }
    Ok(out)
}

pub fn median_filter(img: &TwoChannelImage, cfg: &MedianConfig) -> Result<TwoChannelImage, FilterError> {
    Ok(TwoChannelImage::new(
        median_channel(&img.re, cfg.ksize)?,
        median_channel(&img.im, cfg.ksize)?,
    ))
}
