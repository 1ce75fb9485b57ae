//! Scenario domain types, validation, and circular-orbit rate.
//!
//! Every numeric field name carries its unit (`_hz`, `_m`, `_deg`, ...). Angles are
//! stored in degrees here because this is the configuration surface; every model
//! below takes radians.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::consts::{EARTH_MU_M3_S2, EARTH_RADIUS_M, SIDEREAL_RATE_RAD_S};
use crate::error::{Error, Result};
use crate::impairments::Impairment;

/// Relative tolerance of the per-beam bandwidth identity `B = N_i * B_c`.
pub const BANDWIDTH_IDENTITY_TOL: f64 = 1e-9;
/// Relative tolerance for a GSO rate against the sidereal rate.
pub const GSO_RATE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    Gso,
    Ngso,
}

/// Payload architecture, carried as metadata only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    Regenerative,
    DigitalTransparent,
    BentPipe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteDef {
    pub id: String,
    pub orbit_kind: OrbitKind,
    pub orbit_radius_m: f64,
    /// Derived from the orbit radius when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angular_velocity_rad_s: Option<f64>,
    pub payload_kind: PayloadKind,
    pub feeds: u32,
    /// Sub-satellite point at the scenario epoch.
    #[serde(default)]
    pub subpoint_lat_deg: f64,
    #[serde(default)]
    pub subpoint_lon_deg: f64,
}

impl SatelliteDef {
    /// Angular velocity, explicit or derived from the circular-orbit rate.
    pub fn angular_velocity(&self) -> Result<f64> {
        match self.angular_velocity_rad_s {
            Some(w) => Ok(w),
            None => derive_orbit_rate(self.orbit_radius_m),
        }
    }

    /// Earth-centred position at the scenario epoch, meters.
    pub fn position(&self) -> crate::geometry::Vec3 {
        crate::geometry::scale(
            crate::geometry::unit_from_lat_lon(
                self.subpoint_lat_deg.to_radians(),
                self.subpoint_lon_deg.to_radians(),
            ),
            self.orbit_radius_m,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamDef {
    pub id: String,
    pub satellite: String,
    pub center_lat_deg: f64,
    pub center_lon_deg: f64,
    /// Off-axis angle at which the gain is 3 dB below peak.
    pub half_power_beamwidth_deg: f64,
    pub peak_gain_dbi: f64,
    pub tx_power_w: f64,
    pub carriers: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GatewayRole {
    Active,
    Redundant,
}

/// One feeder-link to user-beam connection of a gateway.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatewayLink {
    pub beam: String,
    /// Offered capacity under frequency multiplexing.
    #[serde(default)]
    pub capacity_freq_bps: f64,
    /// Offered capacity while connected under time multiplexing.
    #[serde(default)]
    pub capacity_time_bps: f64,
    /// Slots per window the feeder link is connected to this beam.
    #[serde(default)]
    pub slots: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GatewayDef {
    pub id: String,
    pub satellite: String,
    pub role: GatewayRole,
    pub lat_deg: f64,
    pub lon_deg: f64,
    /// Per-trial probability of a deep feeder-link fade.
    #[serde(default)]
    pub fade_probability: f64,
    /// Feeder capacity available for rerouted traffic; unlimited when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feeder_capacity_bps: Option<f64>,
    #[serde(default)]
    pub links: Vec<GatewayLink>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserDef {
    pub id: String,
    pub beam: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub traffic_demand_bps: f64,
    /// Terminal figure of merit G/T.
    #[serde(default)]
    pub rx_g_over_t_db_per_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierPlan {
    pub total_bandwidth_hz: f64,
    /// Frequency reuse factor, the number of colors.
    pub reuse_factor: u32,
    pub carrier_bandwidth_hz: f64,
    /// Downlink carrier frequency used for free-space loss and Doppler.
    pub center_frequency_hz: f64,
}

impl CarrierPlan {
    /// Bandwidth of one beam, `B / K_f`.
    pub fn beam_bandwidth_hz(&self) -> f64 {
        self.total_bandwidth_hz / self.reuse_factor as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MulticarrierStructure {
    #[default]
    Tridiagonal,
    PairedBlocks,
}

/// Channel randomness switches. All disabled by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingConfig {
    /// Rician factor (linear); Rician fading is off when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rician_k: Option<f64>,
    /// Lognormal shadowing standard deviation, dB.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shadowing_sigma_db: Option<f64>,
    /// Per-user random propagation phase; `false` forces the phase matrix to identity.
    #[serde(default = "default_true")]
    pub random_phase: bool,
    /// Intercarrier correlation amplitude for the multicarrier channel.
    #[serde(default)]
    pub intercarrier_mu: f64,
    #[serde(default)]
    pub multicarrier_structure: MulticarrierStructure,
}

fn default_true() -> bool {
    true
}

impl Default for FadingConfig {
    fn default() -> Self {
        Self {
            rician_k: None,
            shadowing_sigma_db: None,
            random_phase: true,
            intercarrier_mu: 0.0,
            multicarrier_structure: MulticarrierStructure::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpairmentConfig {
    /// Ordered signal-domain impairment chain.
    #[serde(default)]
    pub chain: Vec<Impairment>,
    #[serde(default)]
    pub fading: FadingConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrecoderDesign {
    #[default]
    ZeroForcing,
    RegularizedZeroForcing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecodingConfig {
    #[serde(default)]
    pub design: PrecoderDesign,
    /// RZF regularizer; defaults to `K * noise power` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularization: Option<f64>,
    /// Total transmit power across feeds (sum-power constraint), watts.
    pub total_power_w: f64,
    /// Per-feed power limit, replacing the sum-power constraint when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_feed_power_w: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Direction {
    pub phi_deg: f64,
    pub theta_deg: f64,
    /// Received power of the source at unit array gain, watts.
    pub power_w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamformingConfig {
    /// CSV grid of per-feed responses, relative to the scenario file.
    pub afr_grid_csv: String,
    pub desired: Direction,
    #[serde(default)]
    pub interferers: Vec<Direction>,
    pub noise_power_w: f64,
    /// Snapshots used for the sample-covariance estimate.
    #[serde(default = "default_snapshots")]
    pub snapshots: u32,
}

fn default_snapshots() -> u32 {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsiConfig {
    /// Maximum Doppler spread of the channel process, Hz.
    pub doppler_hz: f64,
    pub symbol_time_s: f64,
    /// Delays swept, in symbols: `0..=max_delay_symbols`.
    pub max_delay_symbols: u32,
    #[serde(default = "default_csi_samples")]
    pub samples: u32,
}

fn default_csi_samples() -> u32 {
    20_000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMethod {
    #[default]
    KMeans,
    KMedoids,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogBeam {
    pub half_power_beamwidth_deg: f64,
    pub peak_gain_dbi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageConfig {
    pub clusters: u32,
    #[serde(default)]
    pub method: ClusterMethod,
    #[serde(default = "default_balance")]
    pub balance_tolerance: f64,
    #[serde(default = "default_containment")]
    pub demand_containment: f64,
    #[serde(default = "default_shift")]
    pub shift_threshold: f64,
    /// Convex coverage polygon as `[lat_deg, lon_deg]` vertices.
    pub polygon_deg: Vec<[f64; 2]>,
    pub catalog: Vec<CatalogBeam>,
}

fn default_balance() -> f64 {
    1.25
}
fn default_containment() -> f64 {
    0.95
}
fn default_shift() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamhoppingConfig {
    pub slots: u32,
    pub slot_duration_s: f64,
    /// Per-slot cap on illuminated beams.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_active_beams: Option<u32>,
    /// Illumination CSV relative to the scenario file; round-robin when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub illumination_csv: Option<String>,
    /// Use the beam bandwidth `B / K_f` instead of the full band.
    #[serde(default)]
    pub partial_reuse: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalConfig {
    pub sample_rate_hz: f64,
    /// Power of two.
    pub samples: u32,
    /// Samples per symbol of the abstract QPSK source on each carrier.
    #[serde(default = "default_sps")]
    pub samples_per_symbol: u32,
    /// Carrier spacing of the composite signal, Hz.
    pub carrier_spacing_hz: f64,
    /// Number of carriers in the composite; defaults to the first beam's carrier count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carriers: Option<u32>,
}

fn default_sps() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub seed: u64,
    pub monte_carlo_trials: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beamhopping: Option<BeamhoppingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precoding: Option<PrecodingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beamforming: Option<BeamformingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csi: Option<CsiConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalConfig>,
}

/// Complete declarative description of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub satellites: Vec<SatelliteDef>,
    pub beams: Vec<BeamDef>,
    #[serde(default)]
    pub gateways: Vec<GatewayDef>,
    pub users: Vec<UserDef>,
    pub carriers: CarrierPlan,
    #[serde(default)]
    pub impairments: ImpairmentConfig,
    pub simulation: SimulationConfig,
}

/// Circular Keplerian orbit rate `sqrt(mu / r^3)`.
pub fn derive_orbit_rate(orbit_radius_m: f64) -> Result<f64> {
    if !(orbit_radius_m > EARTH_RADIUS_M) {
        return Err(Error::domain(
            "scenario",
            format!("orbit radius {orbit_radius_m} m must exceed the Earth radius {EARTH_RADIUS_M} m"),
        ));
    }
    Ok((EARTH_MU_M3_S2 / (orbit_radius_m * orbit_radius_m * orbit_radius_m)).sqrt())
}

impl Scenario {
    pub fn seed(&self) -> u64 {
        self.simulation.seed
    }

    pub fn satellite(&self, id: &str) -> Option<&SatelliteDef> {
        self.satellites.iter().find(|s| s.id == id)
    }

    pub fn beam_index(&self, id: &str) -> Option<usize> {
        self.beams.iter().position(|b| b.id == id)
    }

    /// Every invariant violation, in a stable order. Empty means valid.
    pub fn diagnostics(&self) -> Vec<Error> {
        let mut out = Vec::new();
        self.check_ids(&mut out);
        for (i, s) in self.satellites.iter().enumerate() {
            check_satellite(i, s, &mut out);
        }
        for (i, b) in self.beams.iter().enumerate() {
            check_beam(i, b, &mut out);
        }
        for (i, u) in self.users.iter().enumerate() {
            let f = |n: &str| format!("users[{i}].{n}");
            if !(u.traffic_demand_bps >= 0.0) || !u.traffic_demand_bps.is_finite() {
                out.push(Error::validation(f("traffic_demand_bps"), "must be finite and >= 0"));
            }
            check_lat_lon(&f("lat_deg"), u.lat_deg, &f("lon_deg"), u.lon_deg, &mut out);
            if !u.rx_g_over_t_db_per_k.is_finite() {
                out.push(Error::validation(f("rx_g_over_t_db_per_k"), "must be finite"));
            }
        }
        for (i, g) in self.gateways.iter().enumerate() {
            let f = |n: &str| format!("gateways[{i}].{n}");
            if !(0.0..=1.0).contains(&g.fade_probability) {
                out.push(Error::validation(f("fade_probability"), "must lie in [0, 1]"));
            }
            if let Some(c) = g.feeder_capacity_bps {
                if !(c >= 0.0) {
                    out.push(Error::validation(f("feeder_capacity_bps"), "must be >= 0"));
                }
            }
            for (j, l) in g.links.iter().enumerate() {
                if !(l.capacity_freq_bps >= 0.0) || !(l.capacity_time_bps >= 0.0) {
                    out.push(Error::validation(
                        format!("gateways[{i}].links[{j}]"),
                        "capacities must be >= 0",
                    ));
                }
            }
        }
        self.check_carriers(&mut out);
        self.check_simulation(&mut out);
        out
    }

    /// Validate, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        match self.diagnostics().into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    fn check_ids(&self, out: &mut Vec<Error>) {
        fn unique<'a>(kind: &str, ids: impl Iterator<Item = &'a String>, out: &mut Vec<Error>) -> BTreeSet<&'a str> {
            let mut seen = BTreeSet::new();
            for (i, id) in ids.enumerate() {
                if !seen.insert(id.as_str()) {
                    out.push(Error::validation(format!("{kind}[{i}].id"), format!("duplicate id `{id}`")));
                }
            }
            seen
        }
        let sats = unique("satellites", self.satellites.iter().map(|s| &s.id), out);
        let beams = unique("beams", self.beams.iter().map(|b| &b.id), out);
        unique("users", self.users.iter().map(|u| &u.id), out);
        unique("gateways", self.gateways.iter().map(|g| &g.id), out);

        if self.satellites.is_empty() {
            out.push(Error::validation("satellites", "at least one satellite is required"));
        }
        if self.beams.is_empty() {
            out.push(Error::validation("beams", "at least one beam is required"));
        }
        for (i, b) in self.beams.iter().enumerate() {
            if !sats.contains(b.satellite.as_str()) {
                out.push(Error::DanglingReference {
                    field: format!("beams[{i}].satellite"),
                    id: b.satellite.clone(),
                });
            }
        }
        for (i, u) in self.users.iter().enumerate() {
            if !beams.contains(u.beam.as_str()) {
                out.push(Error::DanglingReference {
                    field: format!("users[{i}].beam"),
                    id: u.beam.clone(),
                });
            }
        }
        for (i, g) in self.gateways.iter().enumerate() {
            if !sats.contains(g.satellite.as_str()) {
                out.push(Error::DanglingReference {
                    field: format!("gateways[{i}].satellite"),
                    id: g.satellite.clone(),
                });
            }
            for (j, l) in g.links.iter().enumerate() {
                if !beams.contains(l.beam.as_str()) {
                    out.push(Error::DanglingReference {
                        field: format!("gateways[{i}].links[{j}].beam"),
                        id: l.beam.clone(),
                    });
                }
            }
        }
    }

    fn check_carriers(&self, out: &mut Vec<Error>) {
        let c = &self.carriers;
        if !(c.total_bandwidth_hz > 0.0) {
            out.push(Error::validation("carriers.total_bandwidth_hz", "must be > 0"));
        }
        if c.reuse_factor == 0 {
            out.push(Error::validation("carriers.reuse_factor", "must be >= 1"));
        }
        if !(c.carrier_bandwidth_hz > 0.0) {
            out.push(Error::validation("carriers.carrier_bandwidth_hz", "must be > 0"));
        }
        if !(c.center_frequency_hz > 0.0) {
            out.push(Error::validation("carriers.center_frequency_hz", "must be > 0"));
        }
        if c.reuse_factor == 0 || !(c.total_bandwidth_hz > 0.0) {
            return;
        }
        // Per-beam bandwidth identity B_i = B / K_f = N_i * B_c / K_f.
        let k = c.reuse_factor as f64;
        let beam_bw = c.total_bandwidth_hz / k;
        for (i, b) in self.beams.iter().enumerate() {
            let from_carriers = b.carriers as f64 * c.carrier_bandwidth_hz / k;
            if ((beam_bw - from_carriers) / beam_bw).abs() > BANDWIDTH_IDENTITY_TOL {
                out.push(Error::validation(
                    format!("beams[{i}].carriers"),
                    format!(
                        "bandwidth identity B/K_f = N_i*B_c/K_f violated: {} Hz / {} != {} * {} Hz / {}",
                        c.total_bandwidth_hz, c.reuse_factor, b.carriers, c.carrier_bandwidth_hz, c.reuse_factor
                    ),
                ));
            }
        }
    }

    fn check_simulation(&self, out: &mut Vec<Error>) {
        let s = &self.simulation;
        if s.monte_carlo_trials == 0 {
            out.push(Error::validation("simulation.monte_carlo_trials", "must be >= 1"));
        }
        if let Some(f) = &self.impairments.fading.rician_k {
            if !(*f >= 0.0) {
                out.push(Error::validation("impairments.fading.rician_k", "must be >= 0"));
            }
        }
        if let Some(sd) = self.impairments.fading.shadowing_sigma_db {
            if !(sd >= 0.0) {
                out.push(Error::validation("impairments.fading.shadowing_sigma_db", "must be >= 0"));
            }
        }
        let mu = self.impairments.fading.intercarrier_mu;
        if !(0.0..1.0).contains(&mu) {
            out.push(Error::validation("impairments.fading.intercarrier_mu", "must lie in [0, 1)"));
        }
        for (i, stage) in self.impairments.chain.iter().enumerate() {
            if let Err(e) = stage.check() {
                out.push(Error::validation(format!("impairments.chain[{i}]"), format!("{e}")));
            }
        }
        if let Some(bh) = &s.beamhopping {
            if bh.slots == 0 {
                out.push(Error::validation("simulation.beamhopping.slots", "must be >= 1"));
            }
            if !(bh.slot_duration_s > 0.0) {
                out.push(Error::validation("simulation.beamhopping.slot_duration_s", "must be > 0"));
            }
            if bh.max_active_beams == Some(0) {
                out.push(Error::validation("simulation.beamhopping.max_active_beams", "must be >= 1"));
            }
        }
        if let Some(p) = &s.precoding {
            if !(p.total_power_w > 0.0) {
                out.push(Error::validation("simulation.precoding.total_power_w", "must be > 0"));
            }
        }
        if let Some(c) = &s.csi {
            if !(c.symbol_time_s > 0.0) {
                out.push(Error::validation("simulation.csi.symbol_time_s", "must be > 0"));
            }
            if !(c.doppler_hz >= 0.0) {
                out.push(Error::validation("simulation.csi.doppler_hz", "must be >= 0"));
            }
        }
        if let Some(c) = &s.coverage {
            if c.clusters == 0 || c.clusters as usize > self.users.len() {
                out.push(Error::validation("simulation.coverage.clusters", "must lie in [1, number of users]"));
            }
            if !(c.balance_tolerance >= 1.0) {
                out.push(Error::validation("simulation.coverage.balance_tolerance", "must be >= 1"));
            }
            if c.polygon_deg.len() < 3 {
                out.push(Error::validation("simulation.coverage.polygon_deg", "needs at least 3 vertices"));
            }
            if c.catalog.is_empty() {
                out.push(Error::validation("simulation.coverage.catalog", "needs at least one beam"));
            }
        }
        if let Some(sig) = &s.signal {
            if !(sig.sample_rate_hz > 0.0) {
                out.push(Error::validation("simulation.signal.sample_rate_hz", "must be > 0"));
            }
            if sig.samples == 0 || !sig.samples.is_power_of_two() {
                out.push(Error::validation("simulation.signal.samples", "must be a power of two"));
            }
            if sig.samples_per_symbol == 0 {
                out.push(Error::validation("simulation.signal.samples_per_symbol", "must be >= 1"));
            }
        }
    }
}

fn check_lat_lon(lat_field: &str, lat: f64, lon_field: &str, lon: f64, out: &mut Vec<Error>) {
    if !(-90.0..=90.0).contains(&lat) {
        out.push(Error::validation(lat_field, "latitude must lie in [-90, 90] deg"));
    }
    if !(-180.0..=360.0).contains(&lon) {
        out.push(Error::validation(lon_field, "longitude must lie in [-180, 360] deg"));
    }
}

fn check_satellite(i: usize, s: &SatelliteDef, out: &mut Vec<Error>) {
    let f = |n: &str| format!("satellites[{i}].{n}");
    if !(s.orbit_radius_m > EARTH_RADIUS_M) {
        out.push(Error::validation(f("orbit_radius_m"), "must exceed the Earth radius"));
        return;
    }
    if s.feeds == 0 {
        out.push(Error::validation(f("feeds"), "must be >= 1"));
    }
    check_lat_lon(&f("subpoint_lat_deg"), s.subpoint_lat_deg, &f("subpoint_lon_deg"), s.subpoint_lon_deg, out);
    let rate = match s.angular_velocity() {
        Ok(w) => w,
        Err(_) => return,
    };
    match s.orbit_kind {
        OrbitKind::Ngso => {
            if !(rate > 0.0) {
                out.push(Error::validation(f("angular_velocity_rad_s"), "must be > 0 for NGSO"));
            }
        }
        OrbitKind::Gso => {
            if ((rate - SIDEREAL_RATE_RAD_S) / SIDEREAL_RATE_RAD_S).abs() > GSO_RATE_TOL {
                out.push(Error::validation(
                    f("angular_velocity_rad_s"),
                    format!("GSO rate {rate:e} rad/s inconsistent with the sidereal rate"),
                ));
            }
        }
    }
}

fn check_beam(i: usize, b: &BeamDef, out: &mut Vec<Error>) {
    let f = |n: &str| format!("beams[{i}].{n}");
    if !(b.half_power_beamwidth_deg > 0.0 && b.half_power_beamwidth_deg < 90.0) {
        out.push(Error::validation(f("half_power_beamwidth_deg"), "must lie in (0, 90)"));
    }
    if !b.peak_gain_dbi.is_finite() {
        out.push(Error::validation(f("peak_gain_dbi"), "must be finite"));
    }
    if !(b.tx_power_w > 0.0) {
        out.push(Error::validation(f("tx_power_w"), "must be > 0"));
    }
    if b.carriers == 0 {
        out.push(Error::validation(f("carriers"), "must be >= 1"));
    }
    check_lat_lon(&f("center_lat_deg"), b.center_lat_deg, &f("center_lon_deg"), b.center_lon_deg, out);
}
