//! Immerkær's fast noise-variance estimate.
//!
//! The 3x3 operator `[[1,-2,1],[-2,4,-2],[1,-2,1]]` is the difference of two Laplacians and
//! vanishes on locally planar content, so what it sees is mostly noise:
//! `sigma = sqrt(pi/2) / (6 (W-2)(H-2)) * sum |I * L|` over interior pixels.

use ndarray::Array2;

use super::FilterError;

pub fn estimate_noise_sigma(img: &Array2<f64>) -> Result<f64, FilterError> {
    let (ny, nx) = img.dim();
    if ny < 3 || nx < 3 {
        return Err(FilterError::TooSmall { ny, nx, min: 3 });
    }
    let mut total = 0.0;
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let corners = img[[j - 1, i - 1]] + img[[j - 1, i + 1]] + img[[j + 1, i - 1]] + img[[j + 1, i + 1]];
            let edges = img[[j - 1, i]] + img[[j + 1, i]] + img[[j, i - 1]] + img[[j, i + 1]];
            total += (corners - 2.0 * edges + 4.0 * img[[j, i]]).abs();
        }
    }
    let n = ((ny - 2) * (nx - 2)) as f64;
    Ok((std::f64::consts::PI / 2.0).sqrt() * total / (6.0 * n))
}
