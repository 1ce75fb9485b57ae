//! Multi-antenna processing: array-fed-reflector response, MVDR receive
//! beamforming, and ZF/RZF transmit precoding.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math::linalg::{frobenius, hermitian_part, hermitian_pd_inverse, CMatrix, CVector, MAX_CONDITION};
use crate::multibeam::{sinr_from_channel, SinrVector};
use crate::rng::complex_normal;

const MODULE: &str = "array";

/// Diagonal loading applied when a covariance fails the condition guard, relative to `trace(R)/M`.
pub const DIAGONAL_LOADING: f64 = 1e-6;

/// One row of a tabulated AFR grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedSample {
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub feed: usize,
    pub gain: f64,
    pub phase_rad: f64,
}

/// Per-feed amplitude and phase tabulated on a regular (phi, theta) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AfrGrid {
    phi_deg: Vec<f64>,
    theta_deg: Vec<f64>,
    feeds: usize,
    // index: (feed * n_phi + i_phi) * n_theta + i_theta
    gain: Vec<f64>,
    phase: Vec<f64>,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

impl AfrGrid {
    /// Every (phi, theta, feed) combination must appear exactly once.
    pub fn from_samples(samples: &[FeedSample]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain(MODULE, "AFR grid is empty"));
        }
        let phi = sorted_unique(samples.iter().map(|s| s.phi_deg).collect());
        let theta = sorted_unique(samples.iter().map(|s| s.theta_deg).collect());
        let feeds = samples.iter().map(|s| s.feed).max().unwrap_or(0) + 1;
        let cells = feeds * phi.len() * theta.len();
        if samples.len() != cells {
            return Err(Error::domain(
                MODULE,
                format!("AFR grid has {} rows, a full {}x{}x{} grid needs {cells}", samples.len(), feeds, phi.len(), theta.len()),
            ));
        }
        let mut gain = alloc::vec![f64::NAN; cells];
        let mut phase = alloc::vec![f64::NAN; cells];
        for s in samples {
            if !(s.gain >= 0.0) || !s.phase_rad.is_finite() {
                return Err(Error::domain(MODULE, "feed gains must be >= 0 and phases finite"));
            }
            let ip = phi.iter().position(|p| *p == s.phi_deg).unwrap_or(0);
            let it = theta.iter().position(|t| *t == s.theta_deg).unwrap_or(0);
            let idx = (s.feed * phi.len() + ip) * theta.len() + it;
            if !gain[idx].is_nan() {
                return Err(Error::domain(MODULE, "duplicate AFR grid entry"));
            }
            gain[idx] = s.gain;
            phase[idx] = s.phase_rad;
        }
        Ok(Self {
            phi_deg: phi,
            theta_deg: theta,
            feeds,
            gain,
            phase,
        })
    }

    pub fn feeds(&self) -> usize {
        self.feeds
    }

    fn at(&self, feed: usize, ip: usize, it: usize) -> (f64, f64) {
        let idx = (feed * self.phi_deg.len() + ip) * self.theta_deg.len() + it;
        (self.gain[idx], self.phase[idx])
    }
}

/// Lower cell index and fractional offset of `x` along `axis`.
fn locate(axis: &[f64], x: f64) -> Option<(usize, f64)> {
    let n = axis.len();
    if n == 1 {
        return (x == axis[0]).then_some((0, 0.0));
    }
    if !(x >= axis[0] && x <= axis[n - 1]) {
        return None;
    }
    let i = axis.partition_point(|v| *v <= x).saturating_sub(1).min(n - 2);
    Some((i, (x - axis[i]) / (axis[i + 1] - axis[i])))
}

/// Array response `a(phi, theta) = [g_1 e^{j Psi_1}, ..., g_M e^{j Psi_M}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AfrResponse {
    pub gains: Vec<f64>,
    pub phases: Vec<f64>,
}

impl AfrResponse {
    pub fn from_parts(gains: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        if gains.len() != phases.len() {
            return Err(Error::dims(MODULE, "feed phases", gains.len(), phases.len()));
        }
        Ok(Self { gains, phases })
    }

    pub fn vector(&self) -> CVector {
        CVector::from_iterator(
            self.gains.len(),
            self.gains.iter().zip(&self.phases).map(|(g, p)| Complex64::from_polar(*g, *p)),
        )
    }
}

/// Bilinear interpolation of feed gains and unwrapped feed phases.
pub fn afr_response(grid: &AfrGrid, phi_deg: f64, theta_deg: f64) -> Result<AfrResponse> {
    let out_of_grid = || Error::OutOfGrid { phi_deg, theta_deg };
    let (ip, fp) = locate(&grid.phi_deg, phi_deg).ok_or_else(out_of_grid)?;
    let (it, ft) = locate(&grid.theta_deg, theta_deg).ok_or_else(out_of_grid)?;
    let ip1 = (ip + 1).min(grid.phi_deg.len() - 1);
    let it1 = (it + 1).min(grid.theta_deg.len() - 1);
    let mut gains = Vec::with_capacity(grid.feeds);
    let mut phases = Vec::with_capacity(grid.feeds);
    for feed in 0..grid.feeds {
        let (g00, p00) = grid.at(feed, ip, it);
        let (g10, p10) = grid.at(feed, ip1, it);
        let (g01, p01) = grid.at(feed, ip, it1);
        let (g11, p11) = grid.at(feed, ip1, it1);
        let unwrap = |p: f64| p - 2.0 * PI * ((p - p00) / (2.0 * PI)).round();
        let (p10, p01, p11) = (unwrap(p10), unwrap(p01), unwrap(p11));
        let bilinear = |v00: f64, v10: f64, v01: f64, v11: f64| {
            (1.0 - fp) * (1.0 - ft) * v00 + fp * (1.0 - ft) * v10 + (1.0 - fp) * ft * v01 + fp * ft * v11
        };
        gains.push(bilinear(g00, g10, g01, g11));
        phases.push(bilinear(p00, p10, p01, p11));
    }
    Ok(AfrResponse { gains, phases })
}

/// One interfering source: steering vector, channel gain, transmitted symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub steering: CVector,
    pub gain: Complex64,
    pub symbol: Complex64,
}

/// Received vector with the terms it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSnapshot {
    pub y: CVector,
    pub desired: CVector,
    pub interference: Vec<CVector>,
    pub noise: CVector,
}

/// `y = h0 a0 s0 + sum_k h_k a_k s_k + z`, `z ~ CN(0, noise_var I)`.
pub fn synthesize_snapshot<R: Rng + ?Sized>(
    desired: &Source,
    interferers: &[Source],
    noise_var: f64,
    rng: &mut R,
) -> Result<ReceivedSnapshot> {
    let m = desired.steering.len();
    for i in interferers {
        if i.steering.len() != m {
            return Err(Error::dims(MODULE, "interferer steering vector", m, i.steering.len()));
        }
    }
    if !(noise_var >= 0.0) {
        return Err(Error::domain(MODULE, "noise variance must be >= 0"));
    }
    let term = |s: &Source| &s.steering * (s.gain * s.symbol);
    let desired_term = term(desired);
    let interference: Vec<CVector> = interferers.iter().map(term).collect();
    let noise = if noise_var > 0.0 {
        CVector::from_fn(m, |_, _| complex_normal(rng, noise_var))
    } else {
        CVector::zeros(m)
    };
    let mut y = desired_term.clone();
    for t in &interference {
        y += t;
    }
    y += &noise;
    Ok(ReceivedSnapshot {
        y,
        desired: desired_term,
        interference,
        noise,
    })
}

/// MVDR weights and whether diagonal loading had to be applied.
#[derive(Debug, Clone, PartialEq)]
pub struct MvdrWeights {
    pub w: CVector,
    /// Loading added to the diagonal, when the condition guard tripped.
    pub loading: Option<f64>,
}

/// `w = R^{-1} a0 / (a0^H R^{-1} a0)`.
///
/// A covariance with condition number above [`MAX_CONDITION`] is loaded with
/// `DIAGONAL_LOADING * trace(R) / M` on the diagonal; if that still fails the
/// guard, `SingularCovariance` is returned.
pub fn beamform_weights(r: &CMatrix, a0: &CVector) -> Result<MvdrWeights> {
    let m = r.nrows();
    if r.ncols() != m {
        return Err(Error::dims(MODULE, "covariance columns", m, r.ncols()));
    }
    if a0.len() != m {
        return Err(Error::dims(MODULE, "steering vector", m, a0.len()));
    }
    let scale = frobenius(r);
    if !(scale > 0.0) {
        return Err(Error::SingularCovariance { condition: f64::INFINITY });
    }
    if frobenius(&(r - r.adjoint())) > 1e-9 * scale {
        return Err(Error::domain(MODULE, "covariance must be Hermitian"));
    }
    let r = hermitian_part(r);
    let (inv, loading) = match hermitian_pd_inverse(&r, MAX_CONDITION) {
        (Some(inv), _) => (inv, None),
        (None, _) => {
            let eps = DIAGONAL_LOADING * r.trace().re / m as f64;
            let loaded = &r + CMatrix::identity(m, m) * Complex64::new(eps, 0.0);
            match hermitian_pd_inverse(&loaded, MAX_CONDITION) {
                (Some(inv), _) => (inv, Some(eps)),
                (None, condition) => return Err(Error::SingularCovariance { condition }),
            }
        }
    };
    let ra = &inv * a0;
    let denom = a0.dotc(&ra);
    if !(denom.re > 0.0) {
        return Err(Error::domain(MODULE, "steering vector has no energy in the covariance metric"));
    }
    Ok(MvdrWeights { w: ra / denom, loading })
}

/// Beamformer output `w^H y`.
pub fn beamform_output(w: &CVector, y: &CVector) -> Result<Complex64> {
    if w.len() != y.len() {
        return Err(Error::dims(MODULE, "received vector", w.len(), y.len()));
    }
    Ok(w.dotc(y))
}

/// Output SINR of weights `w` for a desired steering vector with power `p0`
/// against interference-plus-noise covariance `r_in`.
pub fn output_sinr(w: &CVector, a0: &CVector, p0: f64, r_in: &CMatrix) -> f64 {
    let signal = p0 * w.dotc(a0).norm_sqr();
    let ipn = w.dotc(&(r_in * w)).re;
    signal / ipn
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrecoderDesign {
    ZeroForcing,
    /// `alpha = None` uses the default `K * noise power`.
    RegularizedZeroForcing { alpha: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerNorm {
    /// `trace(W W^H) = P_tot`.
    SumPower(f64),
    /// Largest row norm squared equals `P_f`; uniform scaling keeps the beam pattern.
    PerFeed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    /// `M x K`.
    pub w: CMatrix,
    pub design: PrecoderDesign,
    pub power: PowerNorm,
    /// Regularizer actually used (0 for ZF).
    pub alpha: f64,
}

/// Design `W` for the `K x M` channel `H`:
/// ZF `H^H (H H^H)^{-1}` or RZF `H^H (H H^H + alpha I)^{-1}`, then power-normalized.
pub fn design_precoder(h: &CMatrix, design: PrecoderDesign, power: PowerNorm, noise_var: f64) -> Result<Precoder> {
    let (k, m) = h.shape();
    if k == 0 {
        return Err(Error::domain(MODULE, "channel has no users"));
    }
    if k > m {
        return Err(Error::domain(MODULE, format!("{k} users exceed {m} feeds")));
    }
    let budget = match power {
        PowerNorm::SumPower(p) | PowerNorm::PerFeed(p) => p,
    };
    if !(budget > 0.0) {
        return Err(Error::domain(MODULE, "power budget must be > 0"));
    }
    let alpha = match design {
        PrecoderDesign::ZeroForcing => 0.0,
        PrecoderDesign::RegularizedZeroForcing { alpha: Some(a) } => a,
        PrecoderDesign::RegularizedZeroForcing { alpha: None } => k as f64 * noise_var,
    };
    if !(alpha >= 0.0) {
        return Err(Error::domain(MODULE, "regularizer must be >= 0"));
    }
    let gram = hermitian_part(&(h * h.adjoint())) + CMatrix::identity(k, k) * Complex64::new(alpha, 0.0);
    let inv = match hermitian_pd_inverse(&gram, MAX_CONDITION) {
        (Some(inv), _) => inv,
        (None, condition) => return Err(Error::RankDeficient { condition }),
    };
    let w0 = h.adjoint() * inv;
    let c = match power {
        PowerNorm::SumPower(p) => (p / w0.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt(),
        PowerNorm::PerFeed(p) => {
            let max_row = (0..m)
                .map(|i| w0.row(i).iter().map(|v| v.norm_sqr()).sum::<f64>())
                .fold(0.0, f64::max);
            (p / max_row).sqrt()
        }
    };
    Ok(Precoder {
        w: w0 * Complex64::new(c, 0.0),
        design,
        power,
        alpha,
    })
}

/// `y = H W x + z`.
pub fn precoded_transmit<R: Rng + ?Sized>(h: &CMatrix, w: &CMatrix, x: &CVector, noise_var: f64, rng: &mut R) -> Result<CVector> {
    if h.ncols() != w.nrows() {
        return Err(Error::dims(MODULE, "precoder rows", h.ncols(), w.nrows()));
    }
    if x.len() != w.ncols() {
        return Err(Error::dims(MODULE, "symbol vector", w.ncols(), x.len()));
    }
    crate::channel::mjp_transmit(h, &(w * x), noise_var, rng)
}

/// Per-user SINR of unit-power streams through `H W`.
pub fn precoded_sinr(h: &CMatrix, w: &CMatrix, noise_var: f64) -> Result<SinrVector> {
    if h.ncols() != w.nrows() {
        return Err(Error::dims(MODULE, "precoder rows", h.ncols(), w.nrows()));
    }
    let eff = h * w;
    let ones = alloc::vec![1.0; eff.ncols()];
    sinr_from_channel(&eff, &ones, noise_var)
}
