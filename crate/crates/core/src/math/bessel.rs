//! Bessel functions of the first kind for integer order.
//!
//! Small and moderate arguments use Miller's backward recurrence normalized by
//! `J0 + 2 * sum J_2k = 1`; large arguments use the Hankel asymptotic expansion.

use num_traits::Float;

const ASYMPTOTIC_THRESHOLD: f64 = 25.0;

/// `J_n(x)` for integer order `n >= 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(n, -x);
        return if n % 2 == 1 { -v } else { v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x >= ASYMPTOTIC_THRESHOLD && (n as f64) < 0.25 * x {
        return hankel_asymptotic(n, x);
    }
    miller(n, x)
}

/// `J_0(x)`.
pub fn j0(x: f64) -> f64 {
    bessel_j(0, x)
}

/// `J_1(x)`.
pub fn j1(x: f64) -> f64 {
    bessel_j(1, x)
}

fn miller(n: u32, x: f64) -> f64 {
    let big = 1.0e250;
    let top = (n as f64).max(x);
    // Start order, even, comfortably above max(n, x).
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as u32;
    start += start % 2;

    let two_over_x = 2.0 / x;
    let mut j_next = 0.0; // J_{k+1}
    let mut j_cur = 1.0e-300; // J_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    let mut k = start;
    while k > 0 {
        let j_prev = (k as f64) * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        k -= 1;
        // j_cur now holds the (unnormalized) J_k
        if k == n {
            wanted = j_cur;
        }
        if k % 2 == 0 && k != 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > big {
            j_cur /= big;
            j_next /= big;
            norm /= big;
            wanted /= big;
        }
    }
    norm += j_cur;
    wanted / norm
}

fn hankel_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n as f64) * (n as f64);
    let chi = x - ((n as f64) / 2.0 + 0.25) * core::f64::consts::PI;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev_mag = f64::INFINITY;
    let mut k = 0u32;
    loop {
        let mag = term.abs();
        if mag > prev_mag || k > 60 {
            break;
        }
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if mag < 1e-18 {
            break;
        }
        prev_mag = mag;
        k += 1;
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / ((k as f64) * 8.0 * x);
    }
    (2.0 / (core::f64::consts::PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}
