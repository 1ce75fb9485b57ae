//! Channel models: Rician fading, satellite beam gain, the multibeam channel
//! `H = Phi B`, the multicarrier intercarrier-interference matrix, the joint
//! processing input-output relation, and delayed/imperfect CSI.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;

use crate::consts::SPEED_OF_LIGHT_M_S;
use crate::error::{Error, Result};
use crate::geometry;
use crate::math::bessel::{bessel_j, j0};
use crate::math::linalg::{CMatrix, CVector};
use crate::rng::{complex_normal, normal, uniform};
use crate::scenario::{BeamDef, FadingConfig, MulticarrierStructure, SatelliteDef, UserDef};

const MODULE: &str = "channel";

/// Rician factors are capped here so the pure line-of-sight limit stays finite.
pub const RICIAN_K_CAP: f64 = 1e12;

/// `u = BEAM_GAIN_U_SCALE * sin(theta) / sin(theta_3dB)` puts the -3 dB point at `theta_3dB`.
pub const BEAM_GAIN_U_SCALE: f64 = 2.07123;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianParams {
    k_factor: f64,
    los: Complex64,
}

impl RicianParams {
    /// `k_factor` is linear; `los` must have unit modulus.
    pub fn new(k_factor: f64, los: Complex64) -> Result<Self> {
        if !(k_factor >= 0.0) {
            return Err(Error::domain(MODULE, "Rician factor must be >= 0"));
        }
        if (los.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::domain(MODULE, "line-of-sight component must have unit modulus"));
        }
        Ok(Self {
            k_factor: k_factor.min(RICIAN_K_CAP),
            los,
        })
    }

    pub fn k_factor(&self) -> f64 {
        self.k_factor
    }

    pub fn los(&self) -> Complex64 {
        self.los
    }
}

/// `h = sqrt(K/(K+1)) l + sqrt(1/(K+1)) g`, `g ~ CN(0, 1)`.
pub fn draw_rician<R: Rng + ?Sized>(params: &RicianParams, rng: &mut R) -> Complex64 {
    let k = params.k_factor;
    let g = complex_normal(rng, 1.0);
    // the cap stands for pure line of sight; g is still drawn to keep streams aligned
    if k >= RICIAN_K_CAP {
        return params.los;
    }
    params.los * (k / (k + 1.0)).sqrt() + g * (1.0 / (k + 1.0)).sqrt()
}

/// Tapered-aperture satellite beam pattern
/// `G = G_max [J1(u)/(2u) + 36 J3(u)/u^3]^2`, `u = 2.07123 sin(theta)/sin(theta_3dB)`.
///
/// Angles in radians, gains linear.
pub fn beam_gain(theta_off: f64, theta_3db: f64, peak_gain: f64) -> Result<f64> {
    if !(0.0..PI / 2.0).contains(&theta_off) {
        return Err(Error::domain(MODULE, format!("off-axis angle {theta_off} rad outside [0, pi/2)")));
    }
    if !(theta_3db > 0.0 && theta_3db < PI / 2.0) {
        return Err(Error::domain(MODULE, "half-power angle must lie in (0, pi/2)"));
    }
    if !(peak_gain > 0.0) || !peak_gain.is_finite() {
        return Err(Error::domain(MODULE, "peak gain must be finite and > 0"));
    }
    if theta_off == 0.0 {
        return Ok(peak_gain);
    }
    let u = BEAM_GAIN_U_SCALE * theta_off.sin() / theta_3db.sin();
    let shape = if u < 1e-3 {
        // J1(u)/(2u) = 1/4 - u^2/32 + u^4/768, 36 J3(u)/u^3 = 3/4 - 3u^2/64 + 3u^4/2560
        let u2 = u * u;
        1.0 - 5.0 * u2 / 64.0 + (1.0 / 768.0 + 3.0 / 2560.0) * u2 * u2
    } else {
        bessel_j(1, u) / (2.0 * u) + 36.0 * bessel_j(3, u) / (u * u * u)
    };
    Ok(peak_gain * shape * shape)
}

/// Convert dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Multibeam channel `H = Phi B` between `K` users and `M` beams.
#[derive(Debug, Clone, PartialEq)]
pub struct MultibeamChannel {
    /// `K x M` complex channel.
    pub h: CMatrix,
    /// Diagonal of the `K x K` phase matrix `Phi`, unit modulus.
    pub phase: Vec<Complex64>,
    /// `K x M` real amplitude gains `B`.
    pub gain: DMatrix<f64>,
}

impl MultibeamChannel {
    /// Assemble from `Phi` and `B`; `H` is their exact product.
    pub fn from_parts(phase: Vec<Complex64>, gain: DMatrix<f64>) -> Result<Self> {
        if phase.len() != gain.nrows() {
            return Err(Error::dims(MODULE, "phase diagonal", gain.nrows(), phase.len()));
        }
        let h = CMatrix::from_fn(gain.nrows(), gain.ncols(), |k, m| phase[k] * gain[(k, m)]);
        Ok(Self { h, phase, gain })
    }

    pub fn users(&self) -> usize {
        self.h.nrows()
    }

    pub fn beams(&self) -> usize {
        self.h.ncols()
    }

    /// `Phi` as a dense diagonal matrix.
    pub fn phase_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_vec(self.phase.clone()))
    }
}

/// Off-axis angle of `user` from the boresight of `beam`, seen from the satellite.
pub fn off_axis_angle(sat: &SatelliteDef, beam: &BeamDef, user: &UserDef) -> f64 {
    let s = sat.position();
    let u = geometry::surface_point(user.lat_deg.to_radians(), user.lon_deg.to_radians());
    let c = geometry::surface_point(beam.center_lat_deg.to_radians(), beam.center_lon_deg.to_radians());
    geometry::angle_between(geometry::sub(u, s), geometry::sub(c, s))
}

/// Build `H = Phi B` for `K` users and `M` beams of one satellite.
///
/// `B[k][m] = sqrt(G_tx(theta_km) G_rx(k)) c / (4 pi d_k f)` with `G_rx` the
/// terminal G/T (so noise power is `k_B * bandwidth`). Per-user randomness is drawn
/// in a fixed order: propagation phase, Rician coefficient, shadowing. Rician
/// magnitude and shadowing scale row `k` of `B`; the Rician phase joins `Phi`.
pub fn build_multibeam_channel<R: Rng + ?Sized>(
    sat: &SatelliteDef,
    beams: &[BeamDef],
    users: &[UserDef],
    freq_hz: f64,
    fading: &FadingConfig,
    rng: &mut R,
) -> Result<MultibeamChannel> {
    if !(freq_hz > 0.0) {
        return Err(Error::domain(MODULE, "frequency must be > 0"));
    }
    let rician = match fading.rician_k {
        Some(k) => Some(RicianParams::new(k, Complex64::new(1.0, 0.0))?),
        None => None,
    };
    let s = sat.position();
    let mut gain = DMatrix::<f64>::zeros(users.len(), beams.len());
    let mut phase = Vec::with_capacity(users.len());
    for (k, user) in users.iter().enumerate() {
        let u = geometry::surface_point(user.lat_deg.to_radians(), user.lon_deg.to_radians());
        if geometry::elevation(u, s) <= 0.0 {
            return Err(Error::Geometry(format!("user `{}` sees satellite `{}` below the horizon", user.id, sat.id)));
        }
        let d = geometry::norm(geometry::sub(s, u));
        let g_rx = db_to_linear(user.rx_g_over_t_db_per_k);
        let free_space = SPEED_OF_LIGHT_M_S / (4.0 * PI * d * freq_hz);
        for (m, beam) in beams.iter().enumerate() {
            let theta = off_axis_angle(sat, beam, user);
            let g_tx = beam_gain(
                theta,
                beam.half_power_beamwidth_deg.to_radians(),
                db_to_linear(beam.peak_gain_dbi),
            )?;
            gain[(k, m)] = (g_tx * g_rx).sqrt() * free_space;
        }

        let mut p = if fading.random_phase {
            Complex64::from_polar(1.0, 2.0 * PI * uniform(rng))
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut scale = 1.0;
        if let Some(params) = &rician {
            let h = draw_rician(params, rng);
            scale *= h.norm();
            if h.norm() > 0.0 {
                p *= h / h.norm();
            }
        }
        if let Some(sigma_db) = fading.shadowing_sigma_db {
            scale *= 10f64.powf(sigma_db * normal(rng) / 20.0);
        }
        for m in 0..beams.len() {
            gain[(k, m)] *= scale;
        }
        phase.push(p);
    }
    MultibeamChannel::from_parts(phase, gain)
}

/// Joint-processing relation `y = H x + z`, `z ~ CN(0, noise_var I)`.
pub fn mjp_transmit<R: Rng + ?Sized>(h: &CMatrix, x: &CVector, noise_var: f64, rng: &mut R) -> Result<CVector> {
    if x.len() != h.ncols() {
        return Err(Error::dims(MODULE, "transmit vector", h.ncols(), x.len()));
    }
    if !(noise_var >= 0.0) {
        return Err(Error::domain(MODULE, "noise variance must be >= 0"));
    }
    let mut y = h * x;
    if noise_var > 0.0 {
        for v in y.iter_mut() {
            *v += complex_normal(rng, noise_var);
        }
    }
    Ok(y)
}

/// Multicarrier channel with adjacent-carrier leakage `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticarrierChannel {
    pub h: CMatrix,
    pub mu: f64,
    pub coefficients: Vec<Complex64>,
    pub structure: MulticarrierStructure,
}

/// Whether carriers `i != j` interfere under `structure`.
pub fn carriers_coupled(structure: MulticarrierStructure, i: usize, j: usize) -> bool {
    match structure {
        MulticarrierStructure::Tridiagonal => i.abs_diff(j) == 1,
        MulticarrierStructure::PairedBlocks => i != j && i / 2 == j / 2,
    }
}

/// Diagonal `h_i`, coupled off-diagonal entries `mu * h_j` (column carrier), zero elsewhere.
pub fn build_multicarrier_channel<R: Rng + ?Sized>(
    carriers: usize,
    mu: f64,
    rician: &RicianParams,
    structure: MulticarrierStructure,
    rng: &mut R,
) -> Result<MulticarrierChannel> {
    if carriers == 0 {
        return Err(Error::domain(MODULE, "at least one carrier is required"));
    }
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::domain(MODULE, format!("correlation amplitude {mu} outside [0, 1)")));
    }
    let coefficients: Vec<Complex64> = (0..carriers).map(|_| draw_rician(rician, rng)).collect();
    Ok(multicarrier_from_coefficients(&coefficients, mu, structure))
}

/// Deterministic part of [`build_multicarrier_channel`].
pub fn multicarrier_from_coefficients(coefficients: &[Complex64], mu: f64, structure: MulticarrierStructure) -> MulticarrierChannel {
    let m = coefficients.len();
    let h = CMatrix::from_fn(m, m, |i, j| {
        if i == j {
            coefficients[j]
        } else if carriers_coupled(structure, i, j) {
            coefficients[j] * mu
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    MulticarrierChannel {
        h,
        mu,
        coefficients: coefficients.to_vec(),
        structure,
    }
}

/// Clarke correlation `rho = J0(2 pi f_d D T_s)`.
pub fn clarke_rho(doppler_hz: f64, delay_symbols: u32, symbol_time_s: f64) -> f64 {
    j0(2.0 * PI * doppler_hz * delay_symbols as f64 * symbol_time_s)
}

/// Unit-power channel sequence whose lag-`delay` autocorrelation is `rho`:
/// `H[n] = rho H[n-D] + sqrt(1 - rho^2) W[n]`, entries `CN(0, 1)`.
///
/// This is an AR(1) recursion at stride `D`; the first `D` matrices are i.i.d.
/// With `D = 0` the sequence is i.i.d.
pub fn generate_channel_process<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    len: usize,
    delay: u32,
    rho: f64,
    rng: &mut R,
) -> Result<Vec<CMatrix>> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::domain(MODULE, "correlation must lie in [-1, 1]"));
    }
    let d = delay as usize;
    let innovation = (1.0 - rho * rho).max(0.0).sqrt();
    let mut seq: Vec<CMatrix> = Vec::with_capacity(len);
    for n in 0..len {
        let w = CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng, 1.0));
        let h = if d == 0 || n < d {
            w
        } else {
            &seq[n - d] * Complex64::new(rho, 0.0) + w * Complex64::new(innovation, 0.0)
        };
        seq.push(h);
    }
    Ok(seq)
}

/// Delayed, noisy channel estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiEstimate {
    pub h_hat: CMatrix,
    pub delay: u32,
    /// Error variance per real and per imaginary part.
    pub error_variance: f64,
    pub rho: f64,
}

/// `H_hat[n] = H[n - D] + E[n]` with `E` entries Gaussian of variance `1 - rho^2`
/// on each of the real and imaginary parts.
pub fn estimate_csi<R: Rng + ?Sized>(
    process: &[CMatrix],
    n: usize,
    delay: u32,
    doppler_hz: f64,
    symbol_time_s: f64,
    rng: &mut R,
) -> Result<CsiEstimate> {
    if !(symbol_time_s > 0.0) {
        return Err(Error::domain(MODULE, "symbol time must be > 0"));
    }
    let d = delay as usize;
    if n >= process.len() || n < d {
        return Err(Error::domain(MODULE, format!("time index {n} with delay {d} outside process of length {}", process.len())));
    }
    let rho = clarke_rho(doppler_hz, delay, symbol_time_s);
    let error_variance = 1.0 - rho * rho;
    if error_variance < 0.0 {
        return Err(Error::domain(MODULE, "negative CSI error variance"));
    }
    let past = &process[n - d];
    let sd = error_variance.sqrt();
    let h_hat = if error_variance == 0.0 {
        past.clone()
    } else {
        CMatrix::from_fn(past.nrows(), past.ncols(), |i, j| {
            past[(i, j)] + Complex64::new(sd * normal(rng), sd * normal(rng))
        })
    };
    Ok(CsiEstimate {
        h_hat,
        delay,
        error_variance,
        rho,
    })
}
