//! In-place radix-2 FFT over `Complex64` buffers.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Forward DFT, `X_k = sum_n x_n e^{-j 2 pi k n / N}`. Length must be a power of two.
pub fn fft(buf: &mut [Complex64]) -> Result<()> {
    transform(buf, -1.0)
}

/// Inverse DFT including the `1/N` factor.
pub fn ifft(buf: &mut [Complex64]) -> Result<()> {
    transform(buf, 1.0)?;
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
    Ok(())
}

fn transform(buf: &mut [Complex64], sign: f64) -> Result<()> {
    let n = buf.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::domain("math", "FFT length must be a nonzero power of two"));
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) };
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<Complex64> = (0..half)
            .map(|k| Complex64::from_polar(1.0, sign * 2.0 * PI * k as f64 / len as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * twiddles[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
    Ok(())
}

/// Signed frequency in Hz of DFT bin `k` for an `n`-point transform.
pub fn bin_frequency(k: usize, n: usize, sample_rate_hz: f64) -> f64 {
    let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
    k * sample_rate_hz / n as f64
}
