//! Baseband impairment models and the ordered impairment chain.
//!
//! Signals are value objects; every operation returns a new [`BasebandSignal`].
//! Time of sample `n` is `n / sample_rate`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::consts::{EARTH_RADIUS_M, SPEED_OF_LIGHT_M_S};
use crate::error::{Error, Result};
use crate::math::fft;
use crate::rng::normal;

const MODULE: &str = "impairments";

/// Largest `|f_d / f_0|` accepted by the time-domain Doppler resampler.
pub const MAX_DOPPLER_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct BasebandSignal {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
    /// RF center frequency the baseband refers to (metadata).
    pub center_freq_hz: f64,
}

impl BasebandSignal {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64, center_freq_hz: f64) -> Result<Self> {
        if !(sample_rate_hz > 0.0) || !sample_rate_hz.is_finite() {
            return Err(Error::domain(MODULE, "sample rate must be finite and > 0"));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::domain(MODULE, "signal contains non-finite samples"));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
            center_freq_hz,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean power `mean |x|^2`.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
            center_freq_hz: self.center_freq_hz,
        }
    }

    fn time(&self, n: usize) -> f64 {
        n as f64 / self.sample_rate_hz
    }
}

fn check_nyquist(freq_hz: f64, sample_rate_hz: f64) -> Result<()> {
    if !(freq_hz.abs() < sample_rate_hz / 2.0) {
        return Err(Error::NyquistViolation {
            freq_hz,
            sample_rate_hz,
        });
    }
    Ok(())
}

/// Composite multicarrier signal `S = sum_m s_m e^{j(2 pi f_m t + theta_m)} / sqrt(M)`.
pub fn compose_multicarrier(signals: &[BasebandSignal], offsets_hz: &[f64], phases_rad: &[f64]) -> Result<BasebandSignal> {
    let m = signals.len();
    if m == 0 {
        return Err(Error::domain(MODULE, "at least one carrier is required"));
    }
    if offsets_hz.len() != m {
        return Err(Error::dims(MODULE, "carrier offsets", m, offsets_hz.len()));
    }
    if phases_rad.len() != m {
        return Err(Error::dims(MODULE, "carrier phases", m, phases_rad.len()));
    }
    let first = &signals[0];
    for s in signals {
        if s.len() != first.len() {
            return Err(Error::dims(MODULE, "carrier length", first.len(), s.len()));
        }
        if s.sample_rate_hz != first.sample_rate_hz {
            return Err(Error::domain(MODULE, "carriers must share one sample rate"));
        }
    }
    for &f in offsets_hz {
        check_nyquist(f, first.sample_rate_hz)?;
    }
    let norm = 1.0 / (m as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); first.len()];
    for ((s, &f), &theta) in signals.iter().zip(offsets_hz).zip(phases_rad) {
        for (n, (o, x)) in out.iter_mut().zip(&s.samples).enumerate() {
            let arg = 2.0 * PI * f * first.time(n) + theta;
            *o += x * Complex64::from_polar(norm, arg);
        }
    }
    Ok(first.with_samples(out))
}

/// Odd-order polynomial HPA of order `2J + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpaModel {
    /// `gamma_{2j+1}` for `j = 0..=J`.
    coefficients: Vec<Complex64>,
}

fn binomial(n: u64, k: u64) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

impl HpaModel {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        let m = Self { coefficients };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        match self.coefficients.first() {
            None => Err(Error::domain(MODULE, "HPA model needs gamma_1")),
            Some(g) if *g == Complex64::new(0.0, 0.0) => Err(Error::domain(MODULE, "gamma_1 must be nonzero")),
            Some(_) => Ok(()),
        }
    }

    /// Polynomial order `J`.
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Complex gain `sum_j gamma_{2j+1} C(2j+1, j) / 2^{2j} |x|^{2j}` at input amplitude `a`.
    pub fn gain(&self, amplitude: f64) -> Complex64 {
        let a2 = amplitude * amplitude;
        let mut power = 1.0;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, g) in self.coefficients.iter().enumerate() {
            let j = j as u64;
            let weight = binomial(2 * j + 1, j) / 4f64.powi(j as i32);
            acc += g * (weight * power);
            power *= a2;
        }
        acc
    }

    /// AM/AM: output amplitude versus input amplitude.
    pub fn am_am(&self, amplitude: f64) -> f64 {
        self.gain(amplitude).norm() * amplitude
    }

    /// AM/PM: output phase rotation (rad) versus input amplitude.
    pub fn am_pm(&self, amplitude: f64) -> f64 {
        self.gain(amplitude).arg()
    }
}

/// Memoryless polynomial HPA applied per sample.
pub fn apply_hpa(x: &BasebandSignal, model: &HpaModel) -> BasebandSignal {
    x.with_samples(x.samples.iter().map(|s| model.gain(s.norm()) * s).collect())
}

/// Memory polynomial with a linear and a cubic branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemoryPolynomialModel {
    /// `a_m`, `m = 0..=Q`.
    pub linear: Vec<Complex64>,
    /// `b_m`, `m = 0..=Q`.
    pub cubic: Vec<Complex64>,
}

impl MemoryPolynomialModel {
    pub fn new(linear: Vec<Complex64>, cubic: Vec<Complex64>) -> Result<Self> {
        if linear.is_empty() && cubic.is_empty() {
            return Err(Error::domain(MODULE, "memory polynomial needs at least one tap"));
        }
        Ok(Self { linear, cubic })
    }

    pub fn memory_depth(&self) -> usize {
        self.linear.len().max(self.cubic.len()).saturating_sub(1)
    }
}

/// `y[n] = sum_m a_m x[n-m] + sum_m b_m |x[n-m]|^2 x[n-m]` with zero history.
pub fn apply_memory_polynomial(x: &BasebandSignal, model: &MemoryPolynomialModel) -> BasebandSignal {
    let xs = &x.samples;
    let out = (0..xs.len())
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, a) in model.linear.iter().enumerate().take(n + 1) {
                acc += a * xs[n - m];
            }
            for (m, b) in model.cubic.iter().enumerate().take(n + 1) {
                let v = xs[n - m];
                acc += b * v * v.norm_sqr();
            }
            acc
        })
        .collect();
    x.with_samples(out)
}

/// Linear FIR stage, the IMUX/OMUX filters around the HPA.
pub fn apply_fir(x: &BasebandSignal, taps: &[Complex64]) -> BasebandSignal {
    let model = MemoryPolynomialModel {
        linear: taps.to_vec(),
        cubic: Vec::new(),
    };
    apply_memory_polynomial(x, &model)
}

/// Oscillator offset `r(t) = s(t) e^{j(phi_n - 2 pi f_n t)}`.
pub fn apply_frequency_offset(s: &BasebandSignal, offset_hz: f64, phase_rad: f64) -> Result<BasebandSignal> {
    check_nyquist(offset_hz, s.sample_rate_hz)?;
    Ok(s.with_samples(
        s.samples
            .iter()
            .enumerate()
            .map(|(n, x)| x * Complex64::from_polar(1.0, phase_rad - 2.0 * PI * offset_hz * s.time(n)))
            .collect(),
    ))
}

/// Power-law phase-noise PSD `S(f) = sum_{a=0}^{4} h_a / f^a`, one-sided, rad^2/Hz.
///
/// `h_a` carries units rad^2 * Hz^(a-1). Index 0 is white phase noise, 1 flicker
/// phase, 2 white FM, 3 flicker FM, 4 random-walk FM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseNoiseProfile {
    pub h: [f64; 5],
}

impl PhaseNoiseProfile {
    pub fn new(h: [f64; 5]) -> Result<Self> {
        if h.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(MODULE, "phase-noise coefficients must be finite and >= 0"));
        }
        Ok(Self { h })
    }

    pub fn is_silent(&self) -> bool {
        self.h.iter().all(|v| *v == 0.0)
    }

    /// `S(f)` at `f > 0`.
    pub fn psd(&self, f: f64) -> f64 {
        self.h
            .iter()
            .enumerate()
            .map(|(a, h)| if *h == 0.0 { 0.0 } else { h / f.powi(a as i32) })
            .sum()
    }
}

/// Real phase sequence with one-sided PSD `profile`, by spectral shaping of white
/// Gaussian noise. The DC bin is zero; `n_samples` must be a power of two.
pub fn synthesize_phase_noise<R: Rng + ?Sized>(
    profile: &PhaseNoiseProfile,
    n_samples: usize,
    sample_rate_hz: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if n_samples < 2 || !n_samples.is_power_of_two() {
        return Err(Error::domain(MODULE, format!("phase-noise length {n_samples} must be a power of two >= 2")));
    }
    if !(sample_rate_hz > 0.0) {
        return Err(Error::domain(MODULE, "sample rate must be > 0"));
    }
    if profile.is_silent() {
        return Ok(vec![0.0; n_samples]);
    }
    let n = n_samples;
    let half = n / 2;
    // E|X_k|^2 = S(f_k) * fs * N / 2 makes the one-sided periodogram 2|X_k|^2/(fs N) unbiased.
    let bin_scale = sample_rate_hz * n as f64 / 2.0;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..half {
        let f = k as f64 * sample_rate_hz / n as f64;
        let amp = (profile.psd(f) * bin_scale).sqrt() / 2f64.sqrt();
        let v = Complex64::new(amp * normal(rng), amp * normal(rng));
        spectrum[k] = v;
        spectrum[n - k] = v.conj();
    }
    let f_nyq = sample_rate_hz / 2.0;
    spectrum[half] = Complex64::new((profile.psd(f_nyq) * 2.0 * bin_scale).sqrt() * normal(rng), 0.0);
    fft::ifft(&mut spectrum)?;
    Ok(spectrum.into_iter().map(|c| c.re).collect())
}

/// Multiply by `e^{j phi[n]}`.
pub fn apply_phase_noise(s: &BasebandSignal, phase_rad: &[f64]) -> Result<BasebandSignal> {
    if phase_rad.len() < s.len() {
        return Err(Error::dims(MODULE, "phase sequence", s.len(), phase_rad.len()));
    }
    Ok(s.with_samples(
        s.samples
            .iter()
            .zip(phase_rad)
            .map(|(x, p)| x * Complex64::from_polar(1.0, *p))
            .collect(),
    ))
}

/// Pass geometry for the closed-form LEO Doppler curve, symmetric about the
/// instant of maximum elevation `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopplerGeometry {
    pub carrier_hz: f64,
    pub angular_velocity_rad_s: f64,
    pub earth_radius_m: f64,
    pub orbit_radius_m: f64,
    pub max_elevation_rad: f64,
}

impl DopplerGeometry {
    pub fn new(carrier_hz: f64, angular_velocity_rad_s: f64, orbit_radius_m: f64, max_elevation_rad: f64) -> Result<Self> {
        let g = Self {
            carrier_hz,
            angular_velocity_rad_s,
            earth_radius_m: EARTH_RADIUS_M,
            orbit_radius_m,
            max_elevation_rad,
        };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) || !(self.angular_velocity_rad_s > 0.0) {
            return Err(Error::domain(MODULE, "carrier and angular velocity must be > 0"));
        }
        if !(self.orbit_radius_m >= self.earth_radius_m) {
            return Err(Error::domain(MODULE, "orbit radius must be >= Earth radius"));
        }
        if !(self.max_elevation_rad > 0.0 && self.max_elevation_rad <= PI / 2.0) {
            return Err(Error::domain(MODULE, "maximum elevation must lie in (0, pi/2]"));
        }
        Ok(())
    }

    /// `eta = cos(acos((r_e / r_s) cos theta_max) - theta_max)`.
    pub fn eta(&self) -> f64 {
        let ratio = self.earth_radius_m / self.orbit_radius_m;
        ((ratio * self.max_elevation_rad.cos()).acos() - self.max_elevation_rad).cos()
    }
}

/// Closed-form Doppler shift at time `t` (seconds from maximum elevation), Hz.
pub fn doppler_shift(t: f64, g: &DopplerGeometry) -> Result<f64> {
    let eta = g.eta();
    let (re, rs, w) = (g.earth_radius_m, g.orbit_radius_m, g.angular_velocity_rad_s);
    let denom_sq = re * re + rs * rs - 2.0 * re * rs * (w * t).cos() * eta;
    // The range collapses to zero only for r_s = r_e with an overhead pass.
    if !(denom_sq > 1e-9 * re * re) {
        return Err(Error::domain(MODULE, "degenerate Doppler geometry: zero slant range"));
    }
    Ok(-(g.carrier_hz / SPEED_OF_LIGHT_M_S) * w * re * rs * (w * t).sin() * eta / denom_sq.sqrt())
}

fn cubic_sample(xs: &[Complex64], u: f64) -> Complex64 {
    let i = u.floor();
    let t = u - i;
    let i = i as i64;
    let at = |k: i64| -> Complex64 {
        if k < 0 || k >= xs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            xs[k as usize]
        }
    };
    if t == 0.0 {
        return at(i);
    }
    let w_m1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    let w_0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    let w_1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    let w_2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    at(i - 1) * w_m1 + at(i) * w_0 + at(i + 1) * w_1 + at(i + 2) * w_2
}

/// Time-domain Doppler compression: `r[k] = s(k (1 + f_d(t_k) / f_0))` in sample units,
/// evaluated with 4-point cubic interpolation and zero outside the record.
pub fn apply_doppler_time_domain<F: Fn(f64) -> f64>(s: &BasebandSignal, doppler_hz: F, carrier_hz: f64) -> Result<BasebandSignal> {
    if !(carrier_hz > 0.0) {
        return Err(Error::domain(MODULE, "carrier frequency must be > 0"));
    }
    let mut out = Vec::with_capacity(s.len());
    for k in 0..s.len() {
        let ratio = doppler_hz(s.time(k)) / carrier_hz;
        if !(ratio.abs() < MAX_DOPPLER_RATIO) {
            return Err(Error::domain(MODULE, format!("|f_d / f_0| = {ratio:e} exceeds {MAX_DOPPLER_RATIO:e}")));
        }
        out.push(cubic_sample(&s.samples, k as f64 * (1.0 + ratio)));
    }
    Ok(s.with_samples(out))
}

/// Frequency-domain Doppler after down-conversion: `r(t) = s(t) e^{-j 2 pi f_d(t) t}`.
pub fn apply_doppler_frequency<F: Fn(f64) -> f64>(s: &BasebandSignal, doppler_hz: F, start_time_s: f64) -> Result<BasebandSignal> {
    let mut out = Vec::with_capacity(s.len());
    for (n, x) in s.samples.iter().enumerate() {
        let t = start_time_s + s.time(n);
        let fd = doppler_hz(t);
        check_nyquist(fd, s.sample_rate_hz)?;
        out.push(x * Complex64::from_polar(1.0, -2.0 * PI * fd * t));
    }
    Ok(s.with_samples(out))
}

/// I/Q amplitude and phase imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IqImbalance {
    pub amplitude: f64,
    pub phase_rad: f64,
}

impl IqImbalance {
    /// Direct-path coefficient `cos(e_phi/2) + j e_A sin(e_phi/2)`.
    pub fn eta(&self) -> Complex64 {
        let h = self.phase_rad / 2.0;
        Complex64::new(h.cos(), self.amplitude * h.sin())
    }

    /// Image coefficient `e_A cos(e_phi/2) - j sin(e_phi/2)`.
    pub fn eta_image(&self) -> Complex64 {
        let h = self.phase_rad / 2.0;
        Complex64::new(self.amplitude * h.cos(), -h.sin())
    }

    /// Image rejection ratio `|eta' / eta|^2`.
    pub fn image_ratio(&self) -> f64 {
        self.eta_image().norm_sqr() / self.eta().norm_sqr()
    }
}

/// `y = eta x + eta' x*`.
pub fn apply_iq_imbalance(x: &BasebandSignal, imb: &IqImbalance) -> BasebandSignal {
    let (eta, eta_img) = (imb.eta(), imb.eta_image());
    x.with_samples(x.samples.iter().map(|s| eta * s + eta_img * s.conj()).collect())
}

/// The same impairment written on the I and Q rails:
/// `(1+e_A)[x_I cos - x_Q sin] + j (1-e_A)[x_Q cos - x_I sin]` at half the phase error.
pub fn apply_iq_imbalance_rails(x: &BasebandSignal, imb: &IqImbalance) -> BasebandSignal {
    let (s, c) = (imb.phase_rad / 2.0).sin_cos();
    let ea = imb.amplitude;
    x.with_samples(
        x.samples
            .iter()
            .map(|v| {
                let (i, q) = (v.re, v.im);
                Complex64::new((1.0 + ea) * (i * c - q * s), (1.0 - ea) * (q * c - i * s))
            })
            .collect(),
    )
}

/// Source of the Doppler curve used by the chain stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum DopplerProfile {
    Constant {
        doppler_hz: f64,
    },
    /// Closed-form pass; the carrier is the signal's center frequency.
    Orbit {
        orbit_radius_m: f64,
        max_elevation_deg: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angular_velocity_rad_s: Option<f64>,
    },
}

impl DopplerProfile {
    fn geometry(&self, carrier_hz: f64) -> Result<Option<DopplerGeometry>> {
        match *self {
            DopplerProfile::Constant { .. } => Ok(None),
            DopplerProfile::Orbit {
                orbit_radius_m,
                max_elevation_deg,
                angular_velocity_rad_s,
            } => {
                let w = match angular_velocity_rad_s {
                    Some(w) => w,
                    None => crate::scenario::derive_orbit_rate(orbit_radius_m)?,
                };
                Ok(Some(DopplerGeometry::new(carrier_hz, w, orbit_radius_m, max_elevation_deg.to_radians())?))
            }
        }
    }

    /// Doppler curve sampled at the given times, Hz.
    fn curve(&self, carrier_hz: f64, start_time_s: f64, times: impl Iterator<Item = f64>) -> Result<Vec<f64>> {
        match (self, self.geometry(carrier_hz)?) {
            (DopplerProfile::Constant { doppler_hz }, _) => Ok(times.map(|_| *doppler_hz).collect()),
            (_, Some(g)) => times.map(|t| doppler_shift(start_time_s + t, &g)).collect(),
            (_, None) => unreachable!(),
        }
    }
}

/// One stage of an impairment chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Impairment {
    /// Linear FIR stage (IMUX or OMUX).
    Filter { taps: Vec<Complex64> },
    Hpa { coefficients: Vec<Complex64> },
    MemoryPolynomial {
        #[serde(default)]
        linear: Vec<Complex64>,
        #[serde(default)]
        cubic: Vec<Complex64>,
    },
    FrequencyOffset {
        offset_hz: f64,
        #[serde(default)]
        phase_rad: f64,
    },
    PhaseNoise { h: [f64; 5] },
    /// Carrier Doppler after down-conversion.
    DopplerShift {
        #[serde(flatten)]
        doppler: DopplerProfile,
        #[serde(default)]
        start_time_s: f64,
    },
    /// Doppler time compression/stretching by resampling.
    DopplerWarp {
        #[serde(flatten)]
        doppler: DopplerProfile,
        #[serde(default)]
        start_time_s: f64,
    },
    IqImbalance { amplitude: f64, phase_rad: f64 },
}

impl Impairment {
    /// Parameter validation independent of any signal.
    pub fn check(&self) -> Result<()> {
        match self {
            Impairment::Filter { taps } if taps.is_empty() => Err(Error::domain(MODULE, "filter needs at least one tap")),
            Impairment::Hpa { coefficients } => HpaModel::new(coefficients.clone()).map(|_| ()),
            Impairment::MemoryPolynomial { linear, cubic } => MemoryPolynomialModel::new(linear.clone(), cubic.clone()).map(|_| ()),
            Impairment::PhaseNoise { h } => PhaseNoiseProfile::new(*h).map(|_| ()),
            Impairment::IqImbalance { amplitude, phase_rad } if !amplitude.is_finite() || !phase_rad.is_finite() => {
                Err(Error::domain(MODULE, "I/Q imbalance parameters must be finite"))
            }
            Impairment::FrequencyOffset { offset_hz, phase_rad } if !offset_hz.is_finite() || !phase_rad.is_finite() => {
                Err(Error::domain(MODULE, "frequency offset parameters must be finite"))
            }
            Impairment::DopplerShift { doppler, .. } | Impairment::DopplerWarp { doppler, .. } => {
                doppler.geometry(1.0).map(|_| ())
            }
            _ => Ok(()),
        }
    }

    /// Apply this stage. Only phase noise consumes randomness.
    pub fn apply<R: Rng + ?Sized>(&self, x: &BasebandSignal, rng: &mut R) -> Result<BasebandSignal> {
        match self {
            Impairment::Filter { taps } => Ok(apply_fir(x, taps)),
            Impairment::Hpa { coefficients } => Ok(apply_hpa(x, &HpaModel::new(coefficients.clone())?)),
            Impairment::MemoryPolynomial { linear, cubic } => {
                Ok(apply_memory_polynomial(x, &MemoryPolynomialModel::new(linear.clone(), cubic.clone())?))
            }
            Impairment::FrequencyOffset { offset_hz, phase_rad } => apply_frequency_offset(x, *offset_hz, *phase_rad),
            Impairment::PhaseNoise { h } => {
                let profile = PhaseNoiseProfile::new(*h)?;
                let n = x.len().max(2).next_power_of_two();
                let phase = synthesize_phase_noise(&profile, n, x.sample_rate_hz, rng)?;
                apply_phase_noise(x, &phase)
            }
            Impairment::DopplerShift { doppler, start_time_s } => {
                let curve = doppler.curve(x.center_freq_hz, *start_time_s, (0..x.len()).map(|n| x.time(n)))?;
                apply_doppler_frequency(x, |t| curve[((t - start_time_s) * x.sample_rate_hz).round() as usize], *start_time_s)
            }
            Impairment::DopplerWarp { doppler, start_time_s } => {
                let curve = doppler.curve(x.center_freq_hz, *start_time_s, (0..x.len()).map(|n| x.time(n)))?;
                apply_doppler_time_domain(x, |t| curve[(t * x.sample_rate_hz).round() as usize], x.center_freq_hz)
            }
            Impairment::IqImbalance { amplitude, phase_rad } => Ok(apply_iq_imbalance(
                x,
                &IqImbalance {
                    amplitude: *amplitude,
                    phase_rad: *phase_rad,
                },
            )),
        }
    }
}

/// Ordered list of impairment stages, applied left to right.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ImpairmentChain {
    pub stages: Vec<Impairment>,
}

impl ImpairmentChain {
    pub fn new(stages: Vec<Impairment>) -> Self {
        Self { stages }
    }
}

/// Run every stage in order; an empty chain returns the input unchanged.
pub fn run_chain<R: Rng + ?Sized>(x: &BasebandSignal, chain: &ImpairmentChain, rng: &mut R) -> Result<BasebandSignal> {
    chain.stages.iter().try_fold(x.clone(), |acc, stage| stage.apply(&acc, rng))
}
