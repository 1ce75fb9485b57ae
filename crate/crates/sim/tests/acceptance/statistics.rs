//! Monte-Carlo statistics at fixed seeds.

use hts_core::channel::{clarke_rho, draw_rician, estimate_csi, generate_channel_process, RicianParams};
use hts_core::impairments::{synthesize_phase_noise, PhaseNoiseProfile};
use hts_core::rng::{derive_stream, Purpose};
use hts_core::Complex64;
use rustfft::FftPlanner;

use crate::{Checks, Outcome};

const DRAWS: usize = 100_000;

pub fn run() -> Outcome {
    let mut checks = Checks::default();
    rician(&mut checks);
    csi(&mut checks);
    phase_noise_slope(&mut checks);
    checks.finish(|n| format!("{n} statistics within tolerance"))
}

fn rician(checks: &mut Checks) {
    for (i, k) in [0.0, 1.0, 10.0, 100.0].into_iter().enumerate() {
        let los = Complex64::from_polar(1.0, 0.3 * i as f64);
        let p = RicianParams::new(k, los).unwrap();
        let mut rng = derive_stream(300 + i as u64, Purpose::Fading, 0);
        let power = (0..DRAWS).map(|_| draw_rician(&p, &mut rng).norm_sqr()).sum::<f64>() / DRAWS as f64;
        checks.check((power - 1.0).abs() <= 0.02, || format!("Rician K={k}: E|h|^2 = {power}"));
    }
}

/// `E = H_hat[n] - H[n-D]`, per-part variance against `1 - rho^2`.
fn csi(checks: &mut Checks) {
    let (rows, cols) = (10, 10);
    let (fd, ts) = (200.0, 1e-4);
    for d in [1u32, 4, 10] {
        let rho = clarke_rho(fd, d, ts);
        let len = DRAWS / (rows * cols) + d as usize;
        let mut rng = derive_stream(310, Purpose::Csi, d as u64);
        let process = generate_channel_process(rows, cols, len, d, rho, &mut rng).unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        for n in d as usize..len {
            let est = estimate_csi(&process, n, d, fd, ts, &mut rng).unwrap();
            let e = &est.h_hat - &process[n - d as usize];
            for v in e.iter() {
                sum += v.re * v.re + v.im * v.im;
                count += 2;
            }
        }
        let var = sum / count as f64;
        let want = 1.0 - rho * rho;
        checks.check(((var - want) / want).abs() <= 0.03, || format!("CSI D={d}: error variance {var} vs 1 - rho^2 = {want}"));
    }
}

/// Averaged one-sided periodogram of a pure `h2 / f^2` phase process; the fitted
/// log-log slope over three decades must be -20 dB/decade within 2 dB.
fn phase_noise_slope(checks: &mut Checks) {
    let n = 1 << 14;
    let fs = 1e6;
    let profile = PhaseNoiseProfile::new([0.0, 0.0, 1e-3, 0.0, 0.0]).unwrap();
    let mut avg = vec![0.0; n / 2];
    let realizations = 16;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    for r in 0..realizations {
        let mut rng = derive_stream(320, Purpose::PhaseNoise, r);
        let phi = synthesize_phase_noise(&profile, n, fs, &mut rng).unwrap();
        let mut buf: Vec<Complex64> = phi.iter().map(|p| Complex64::new(*p, 0.0)).collect();
        fft.process(&mut buf);
        for k in 1..n / 2 {
            avg[k] += 2.0 * buf[k].norm_sqr() / (fs * n as f64) / realizations as f64;
        }
    }
    // least-squares fit of 10 log10 S against log10 f, about three decades of bins
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, s) in avg.iter().enumerate().take(8000).skip(8) {
        let x = (k as f64 * fs / n as f64).log10();
        let y = 10.0 * s.log10();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        m += 1.0;
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    checks.check((slope + 20.0).abs() <= 2.0, || format!("h2 periodogram slope {slope:.2} dB/decade, expected -20 +/- 2"));
    // level check at one frequency: within 1 dB of h2 / f^2 on the averaged estimate
    let k = 100;
    let f = k as f64 * fs / n as f64;
    let band: f64 = avg[k - 5..=k + 5].iter().zip(k - 5..=k + 5).map(|(s, j)| s * (j as f64).powi(2)).sum::<f64>() / 11.0;
    let level = band / (k as f64).powi(2);
    let want = 1e-3 / (f * f);
    let err_db = 10.0 * (level / want).log10();
    checks.check(err_db.abs() <= 1.0, || format!("h2 periodogram level off by {err_db:.2} dB at {f:.1} Hz"));
}
