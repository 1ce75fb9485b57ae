//! MVDR output power against distortionless perturbations; ZF residual interference.

use hts_core::array::{beamform_weights, design_precoder, PowerNorm, PrecoderDesign};
use hts_core::rng::{complex_normal, derive_stream, uniform, Purpose};
use hts_core::{CMatrix, CVector, Complex64, RngStream};

use crate::{Checks, Outcome};

const PROBES: usize = 1000;

fn random_matrix(rng: &mut RngStream, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng, 1.0))
}

fn power(w: &CVector, r: &CMatrix) -> f64 {
    w.dotc(&(r * w)).re
}

pub fn run() -> Outcome {
    let mut checks = Checks::default();
    let mut covariances = 0;
    for m in 1..=8 {
        for rep in 0..6 {
            let mut rng = derive_stream(500 + m as u64, Purpose::User, rep);
            let a = random_matrix(&mut rng, m, m);
            // eigenvalue spread up to ~1e4 through a random diagonal floor
            let floor = 10f64.powf(-4.0 * uniform(&mut rng));
            let r = &a * a.adjoint() + CMatrix::identity(m, m) * Complex64::new(floor, 0.0);
            let a0 = CVector::from_fn(m, |_, _| complex_normal(&mut rng, 1.0));
            let w = match beamform_weights(&r, &a0) {
                Ok(mv) => mv.w,
                Err(e) => {
                    checks.check(false, || format!("M={m} #{rep}: {e}"));
                    continue;
                }
            };
            covariances += 1;
            let gain = w.dotc(&a0);
            checks.check((gain - Complex64::new(1.0, 0.0)).norm() < 1e-9, || format!("M={m} #{rep}: w^H a0 = {gain}"));
            let p0 = power(&w, &r);
            let a0n = a0.dotc(&a0).re;
            let mut beaten = 0;
            for _ in 0..PROBES {
                let u = CVector::from_fn(m, |_, _| complex_normal(&mut rng, 1.0));
                // remove the a0 component so (w + v)^H a0 stays 1
                let v = &u - &a0 * (a0.dotc(&u) / a0n);
                // with one element the constraint leaves no freedom
                if v.norm() < 1e-8 * u.norm() {
                    continue;
                }
                let scale = 10f64.powf(-3.0 + 4.0 * uniform(&mut rng)) * w.norm() / v.norm().max(1e-300);
                let probe = &w + v * Complex64::new(scale, 0.0);
                if power(&probe, &r) < p0 * (1.0 - 1e-12) {
                    beaten += 1;
                }
            }
            checks.check(beaten == 0, || format!("M={m} #{rep}: {beaten} of {PROBES} perturbations had lower output power"));
        }
    }

    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let mut rng = derive_stream(550, Purpose::User, i);
        let k = 2 + (uniform(&mut rng) * 7.0) as usize % 7;
        let m = k + (uniform(&mut rng) * (9 - k) as f64) as usize % (9 - k);
        let h = random_matrix(&mut rng, k, m);
        let p = design_precoder(&h, PrecoderDesign::ZeroForcing, PowerNorm::SumPower(k as f64), 1.0).unwrap();
        let hw = &h * &p.w;
        let diag_min = (0..k).map(|j| hw[(j, j)].norm()).fold(f64::INFINITY, f64::min);
        let off_max = (0..k)
            .flat_map(|r| (0..k).filter(move |c| *c != r).map(move |c| (r, c)))
            .map(|(r, c)| hw[(r, c)].norm())
            .fold(0.0, f64::max);
        let residual = off_max / diag_min;
        worst = worst.max(residual);
        checks.check(residual < 1e-9, || format!("ZF channel #{i} ({k}x{m}): residual interference {residual:e}"));
    }
    checks.finish(|_| format!("{covariances} covariances x {PROBES} probes, worst ZF residual {worst:.1e}"))
}
