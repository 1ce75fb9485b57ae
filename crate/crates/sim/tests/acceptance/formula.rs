//! Library formulas against straight-line reimplementations on random instances.

use std::f64::consts::PI;

use hts_core::channel::clarke_rho;
use hts_core::impairments::{apply_iq_imbalance, doppler_shift, BasebandSignal, DopplerGeometry, IqImbalance};
use hts_core::multibeam::{
    offered_capacity_frequency, offered_capacity_time, slots_per_beam, system_throughput, GatewayRole, GatewayTopology,
    IlluminationMatrix, LinkState, SinrVector,
};
use hts_core::rng::{complex_normal, derive_stream, uniform, Purpose};
use hts_core::{Complex64, RngStream};

use crate::{rel_close, Checks, Outcome};

const INSTANCES: usize = 200;
const TOL: f64 = 1e-9;
const C: f64 = 299_792_458.0;
const R_E: f64 = 6_371_000.0;
const MU: f64 = 3.986_004_418e14;

fn range(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

fn int(rng: &mut RngStream, lo: usize, hi: usize) -> usize {
    lo + (uniform(rng) * (hi - lo + 1) as f64) as usize % (hi - lo + 1)
}

fn oracle_throughput(b: f64, kf: u32, sinr: &[f64]) -> f64 {
    let mut sum = 0.0;
    for g in sinr {
        sum += (1.0 + g).ln() / 2f64.ln();
    }
    b / kf as f64 * sum
}

/// `J0(x) = (1/pi) int_0^pi cos(x sin t) dt`; the trapezoid rule is spectrally
/// accurate on this periodic integrand.
fn oracle_j0(x: f64) -> f64 {
    let n = 1024;
    let h = PI / n as f64;
    let mut s = 0.5 * (1.0 + (x * PI.sin()).cos());
    for i in 1..n {
        s += (x * (i as f64 * h).sin()).cos();
    }
    s * h / PI
}

fn oracle_doppler(t: f64, f0: f64, ws: f64, rs: f64, th: f64) -> f64 {
    let eta = ((R_E / rs * th.cos()).acos() - th).cos();
    let num = ws * R_E * rs * (ws * t).sin() * eta;
    let den = (R_E * R_E + rs * rs - 2.0 * R_E * rs * (ws * t).cos() * eta).sqrt();
    -(f0 / C) * num / den
}

/// Rails form of the I/Q imbalance, evaluated sample by sample.
fn oracle_iq(x: Complex64, ea: f64, ep: f64) -> Complex64 {
    let (xi, xq) = (x.re, x.im);
    let (c, s) = ((ep / 2.0).cos(), (ep / 2.0).sin());
    Complex64::new((1.0 + ea) * (xi * c - xq * s), (1.0 - ea) * (xq * c - xi * s))
}

pub fn run() -> Outcome {
    let mut checks = Checks::default();
    throughput(&mut checks);
    slots(&mut checks);
    gateways(&mut checks);
    doppler(&mut checks);
    clarke(&mut checks);
    iq(&mut checks);
    checks.finish(|n| format!("{n} comparisons at 1e-9 relative, {INSTANCES} instances per formula"))
}

fn throughput(checks: &mut Checks) {
    let mut rng = derive_stream(101, Purpose::User, 0);
    for i in 0..INSTANCES {
        let b = 10f64.powf(range(&mut rng, 6.0, 10.0));
        let kf = int(&mut rng, 1, 8) as u32;
        let n = int(&mut rng, 1, 16);
        let sinr: Vec<f64> = (0..n).map(|_| 10f64.powf(range(&mut rng, -3.0, 3.0))).collect();
        let got = system_throughput(b, kf, &SinrVector::new(sinr.clone()).unwrap()).unwrap();
        let want = oracle_throughput(b, kf, &sinr);
        checks.check(rel_close(got, want, TOL), || format!("system_throughput #{i}: {got} vs {want}"));
    }
}

fn random_matrix(rng: &mut RngStream, slots: usize, beams: usize) -> Vec<Vec<bool>> {
    (0..slots).map(|_| (0..beams).map(|_| uniform(rng) < 0.4).collect()).collect()
}

fn slots(checks: &mut Checks) {
    let mut rng = derive_stream(102, Purpose::User, 0);
    for i in 0..INSTANCES {
        let (nt, nb) = (int(&mut rng, 1, 40), int(&mut rng, 1, 12));
        let rows = random_matrix(&mut rng, nt, nb);
        let t = IlluminationMatrix::from_rows(&rows, 1e-3, None).unwrap();
        let got = slots_per_beam(&t);
        let mut want = vec![0usize; nb];
        for row in &rows {
            for (j, lit) in row.iter().enumerate() {
                if *lit {
                    want[j] += 1;
                }
            }
        }
        checks.check(got == want, || format!("slots_per_beam #{i}: {got:?} vs {want:?}"));
    }
}

fn gateways(checks: &mut Checks) {
    let mut rng = derive_stream(103, Purpose::User, 0);
    for i in 0..INSTANCES {
        let (g, m) = (int(&mut rng, 1, 6), int(&mut rng, 1, 8));
        let window = 64u32;
        let cf: Vec<Vec<f64>> = (0..g).map(|_| (0..m).map(|_| range(&mut rng, 0.0, 2e9)).collect()).collect();
        let ct: Vec<Vec<f64>> = (0..g).map(|_| (0..m).map(|_| range(&mut rng, 0.0, 3e9)).collect()).collect();
        let x: Vec<Vec<u32>> = (0..g).map(|_| (0..m).map(|_| int(&mut rng, 0, window as usize / m) as u32).collect()).collect();
        let ts = range(&mut rng, 1e-4, 1e-2);
        let mut topo = GatewayTopology::new(vec![GatewayRole::Active; g], vec![f64::INFINITY; g], cf.clone(), ct.clone(), x.clone(), ts, window).unwrap();
        let clear: Vec<bool> = (0..g).map(|_| uniform(&mut rng) < 0.7).collect();
        topo.states = clear.iter().map(|c| if *c { LinkState::Clear } else { LinkState::Faded }).collect();
        for j in 0..m {
            let mut want_f = 0.0;
            let mut want_t = 0.0;
            for gw in 0..g {
                if clear[gw] {
                    want_f += cf[gw][j];
                    want_t += ct[gw][j] * x[gw][j] as f64 * ts;
                }
            }
            let got_f = offered_capacity_frequency(&topo, j).unwrap();
            let got_t = offered_capacity_time(&topo, j).unwrap();
            checks.check(rel_close(got_f, want_f, TOL), || format!("capacity (frequency) #{i}/{j}: {got_f} vs {want_f}"));
            checks.check(rel_close(got_t.bits_per_window, want_t, TOL), || {
                format!("capacity (time) #{i}/{j}: {} vs {want_t}", got_t.bits_per_window)
            });
            let avg = want_t / (window as f64 * ts);
            checks.check(rel_close(got_t.average_bps, avg, TOL), || format!("capacity (time, mean) #{i}/{j}: {} vs {avg}", got_t.average_bps));
        }
    }
}

fn doppler(checks: &mut Checks) {
    let mut rng = derive_stream(104, Purpose::User, 0);
    for i in 0..INSTANCES {
        let rs = R_E + range(&mut rng, 3.0e5, 3.6e7);
        let ws = (MU / (rs * rs * rs)).sqrt();
        let th = range(&mut rng, 1.0, 90.0).to_radians();
        let f0 = range(&mut rng, 1e9, 3e10);
        let t = range(&mut rng, -900.0, 900.0);
        let g = DopplerGeometry::new(f0, ws, rs, th).unwrap();
        let got = doppler_shift(t, &g).unwrap();
        let want = oracle_doppler(t, f0, ws, rs, th);
        checks.check(rel_close(got, want, TOL), || format!("doppler_shift #{i}: {got} vs {want}"));
    }
}

fn clarke(checks: &mut Checks) {
    let mut rng = derive_stream(105, Purpose::User, 0);
    for i in 0..INSTANCES {
        let fd = range(&mut rng, 0.0, 1000.0);
        let d = int(&mut rng, 0, 20) as u32;
        let ts = 10f64.powf(range(&mut rng, -5.0, -3.0));
        let got = clarke_rho(fd, d, ts);
        let want = oracle_j0(2.0 * PI * fd * d as f64 * ts);
        checks.check(rel_close(got, want, TOL), || format!("clarke_rho #{i} (fd={fd}, D={d}, Ts={ts}): {got} vs {want}"));
    }
}

fn iq(checks: &mut Checks) {
    let mut rng = derive_stream(106, Purpose::User, 0);
    for i in 0..INSTANCES {
        let ea = range(&mut rng, -0.3, 0.3);
        let ep = range(&mut rng, -0.5, 0.5);
        let imb = IqImbalance { amplitude: ea, phase_rad: ep };
        // eta and eta' read off the rails form at x = 1 and x = j
        let y1 = oracle_iq(Complex64::new(1.0, 0.0), ea, ep);
        let yj = oracle_iq(Complex64::new(0.0, 1.0), ea, ep) / Complex64::new(0.0, 1.0);
        let eta = (y1 + yj) / 2.0;
        let eta_img = (y1 - yj) / 2.0;
        for (name, got, want) in [("eta", imb.eta(), eta), ("eta'", imb.eta_image(), eta_img)] {
            let ok = (got - want).norm() <= TOL * want.norm().max(f64::MIN_POSITIVE) || got == want;
            checks.check(ok, || format!("{name} #{i}: {got} vs {want}"));
        }
        let x: Vec<Complex64> = (0..64).map(|_| complex_normal(&mut rng, 1.0)).collect();
        let sig = BasebandSignal::new(x.clone(), 1e6, 1e9).unwrap();
        let y = apply_iq_imbalance(&sig, &imb);
        let worst = y
            .samples
            .iter()
            .zip(&x)
            .map(|(got, xi)| {
                let want = oracle_iq(*xi, ea, ep);
                (got - want).norm() / want.norm()
            })
            .fold(0.0, f64::max);
        checks.check(worst <= TOL, || format!("eta x + eta' x* vs rails #{i}: worst relative error {worst:e}"));
    }
}
