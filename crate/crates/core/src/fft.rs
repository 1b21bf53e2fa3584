//! Thin helpers over `rustfft`.
//!
//! Convention everywhere in the crate: unnormalized forward transform with `exp(-i ...)`,
//! inverse scaled by `1/n`.

use std::cell::RefCell;
use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

pub fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

fn transform_axis(data: &mut Array2<Complex64>, axis: Axis, fft: &Arc<dyn Fft<f64>>) {
    let mut buf = vec![Complex64::new(0.0, 0.0); data.len_of(axis)];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for mut lane in data.lanes_mut(axis) {
        buf.iter_mut().zip(lane.iter()).for_each(|(b, v)| *b = *v);
        fft.process_with_scratch(&mut buf, &mut scratch);
        lane.iter_mut().zip(buf.iter()).for_each(|(v, b)| *v = *b);
    }
}

/// Unnormalized 2D forward DFT.
pub fn fft2(input: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = input.to_owned();
    let (ny, nx) = out.dim();
    transform_axis(&mut out, Axis(1), &plan_forward(nx));
    transform_axis(&mut out, Axis(0), &plan_forward(ny));
    out
}

/// 2D inverse DFT scaled by `1 / (ny nx)`.
pub fn ifft2(input: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = input.to_owned();
    let (ny, nx) = out.dim();
    transform_axis(&mut out, Axis(1), &plan_inverse(nx));
    transform_axis(&mut out, Axis(0), &plan_inverse(ny));
    let scale = 1.0 / (ny * nx) as f64;
    out.mapv_inplace(|z| z * scale);
    out
}

/// Signed DFT frequency index of bin `m` for length `n`, in `[-n/2, n/2)`.
pub fn signed_index(m: usize, n: usize) -> f64 {
    if m < n.div_ceil(2) {
        m as f64
    } else {
        m as f64 - n as f64
    }
}

/// Smallest length `>= n` whose prime factors are 2, 3 and 5.
pub fn next_fast_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}
