//! Closed-form Doppler against the range rate of explicit satellite and terminal positions.

use hts_core::impairments::{doppler_shift, DopplerGeometry};

use crate::{Checks, Outcome};

const C: f64 = 299_792_458.0;
const R_E: f64 = 6_371_000.0;
const MU: f64 = 3.986_004_418e14;

type V = [f64; 3];

fn dist(a: V, b: V) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Circular orbit in the x-y plane, closest approach on the x axis at t = 0.
/// The terminal sits in the x-z plane at the central angle that gives the
/// requested maximum elevation.
struct Pass {
    rs: f64,
    ws: f64,
    terminal: V,
}

impl Pass {
    fn new(altitude: f64, max_elevation: f64) -> Self {
        let rs = R_E + altitude;
        let ws = (MU / (rs * rs * rs)).sqrt();
        // elevation e at central angle psi: tan e = (cos psi - re/rs) / sin psi
        let mut lo = 0.0;
        let mut hi = std::f64::consts::FRAC_PI_2;
        for _ in 0..200 {
            let psi = 0.5 * (lo + hi);
            if elevation_at(psi, rs) > max_elevation {
                lo = psi;
            } else {
                hi = psi;
            }
        }
        let psi = 0.5 * (lo + hi);
        Pass { rs, ws, terminal: [R_E * psi.cos(), 0.0, R_E * psi.sin()] }
    }

    fn satellite(&self, t: f64) -> V {
        [self.rs * (self.ws * t).cos(), self.rs * (self.ws * t).sin(), 0.0]
    }

    fn elevation(&self, t: f64) -> f64 {
        let s = self.satellite(t);
        let d = [s[0] - self.terminal[0], s[1] - self.terminal[1], s[2] - self.terminal[2]];
        let up = [self.terminal[0] / R_E, self.terminal[1] / R_E, self.terminal[2] / R_E];
        let sin_e = (d[0] * up[0] + d[1] * up[1] + d[2] * up[2]) / dist(s, self.terminal);
        sin_e.asin()
    }

    /// `-f0/c * d|P_s - P_t|/dt` by a central difference.
    fn range_rate_doppler(&self, t: f64, f0: f64) -> f64 {
        let h = 1e-3;
        let rate = (dist(self.satellite(t + h), self.terminal) - dist(self.satellite(t - h), self.terminal)) / (2.0 * h);
        -f0 / C * rate
    }
}

fn elevation_at(psi: f64, rs: f64) -> f64 {
    ((psi.cos() - R_E / rs) / psi.sin()).atan()
}

pub fn run() -> Outcome {
    let mut checks = Checks::default();
    let f0 = 2e9;
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    for max_el_deg in [10.0, 20.0, 45.0, 70.0, 89.0] {
        let pass = Pass::new(600e3, f64::to_radians(max_el_deg));
        let g = DopplerGeometry::new(f0, pass.ws, pass.rs, f64::to_radians(max_el_deg)).unwrap();
        let peak = (0..2000)
            .map(|i| pass.range_rate_doppler(i as f64 * 0.5, f0).abs())
            .fold(0.0, f64::max);
        for i in -1200..=1200 {
            let t = i as f64 * 0.5;
            if pass.elevation(t) < f64::to_radians(10.0) - 1e-9 {
                continue;
            }
            let got = doppler_shift(t, &g).unwrap();
            let want = pass.range_rate_doppler(t, f0);
            // relative where the shift is appreciable, against the pass peak near zero crossing
            let scale = want.abs().max(0.01 * peak);
            let err = (got - want).abs() / scale;
            worst = worst.max(err);
            samples += 1;
            checks.check(err <= 0.005, || format!("max elevation {max_el_deg} deg, t = {t} s: {got} Hz vs {want} Hz"));
        }
    }
    checks.check(samples > 100, || format!("only {samples} samples above 10 deg elevation"));
    checks.finish(|_| format!("{samples} samples above 10 deg, worst relative error {worst:.2e}"))
}
