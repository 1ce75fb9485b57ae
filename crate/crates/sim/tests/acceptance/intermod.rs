//! Two-tone test through the memory polynomial, measured with an FFT.

use std::f64::consts::PI;

use hts_core::impairments::{apply_memory_polynomial, BasebandSignal, MemoryPolynomialModel};
use hts_core::Complex64;
use rustfft::FftPlanner;

use crate::{Checks, Outcome};

const N: usize = 4096;
const K1: usize = 400;
const K2: usize = 440;
const AMPLITUDE: f64 = 0.5;

/// Magnitude spectrum of the steady-state output, tones on exact bins.
fn spectrum(model: &MemoryPolynomialModel) -> Vec<f64> {
    let skip = model.memory_depth();
    let x: Vec<Complex64> = (0..N + skip)
        .map(|n| {
            let t = n as f64 / N as f64;
            Complex64::from_polar(AMPLITUDE, 2.0 * PI * K1 as f64 * t) + Complex64::from_polar(AMPLITUDE, 2.0 * PI * K2 as f64 * t)
        })
        .collect();
    let sig = BasebandSignal::new(x, N as f64, 1e9).unwrap();
    let y = apply_memory_polynomial(&sig, model);
    let mut buf: Vec<Complex64> = y.samples[skip..].to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(N).process(&mut buf);
    buf.iter().map(|v| v.norm() / N as f64).collect()
}

fn response(taps: &[Complex64], k: i64) -> Complex64 {
    taps.iter()
        .enumerate()
        .map(|(m, a)| a * Complex64::from_polar(1.0, -2.0 * PI * (k * m as i64) as f64 / N as f64))
        .sum()
}

fn dbc(line: f64, carrier: f64) -> f64 {
    20.0 * (line.max(1e-300) / carrier).log10()
}

pub fn run() -> Outcome {
    let mut checks = Checks::default();
    let a = vec![Complex64::new(1.0, 0.0), Complex64::new(0.1, -0.05)];
    let b = vec![Complex64::new(-0.08, 0.02), Complex64::new(0.02, 0.01)];
    let im_low = 2 * K1 - K2;
    let im_high = 2 * K2 - K1;

    let with_b = spectrum(&MemoryPolynomialModel::new(a.clone(), b.clone()).unwrap());
    let carrier = with_b[K1];
    // x = A(e1 + e2): |x|^2 x holds A^3 e1^2 e2* at 2f1 - f2 (and its mirror), filtered by the b taps
    let mut measured = Vec::new();
    for k in [im_low, im_high] {
        let want = AMPLITUDE.powi(3) * response(&b, k as i64).norm();
        let got = with_b[k];
        measured.push(dbc(got, carrier));
        checks.check(((got - want) / want).abs() < 1e-9, || format!("IM3 line at bin {k}: {got:e} vs predicted {want:e}"));
        checks.check(dbc(got, carrier) > -60.0, || format!("IM3 line at bin {k} not detected: {:.1} dBc", dbc(got, carrier)));
    }

    let linear = spectrum(&MemoryPolynomialModel::new(a, vec![Complex64::new(0.0, 0.0); 2]).unwrap());
    let carrier_lin = linear[K1];
    let mut floor = f64::NEG_INFINITY;
    for k in [im_low, im_high] {
        let level = dbc(linear[k], carrier_lin);
        floor = floor.max(level);
        checks.check(level < -100.0, || format!("b = 0: residual line at bin {k} is {level:.1} dBc"));
    }
    checks.finish(|_| format!("IM3 at {:.1} / {:.1} dBc with b taps, {floor:.0} dBc without", measured[0], measured[1]))
}
