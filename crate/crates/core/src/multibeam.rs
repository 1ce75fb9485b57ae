//! System-level capacity: frequency-reuse throughput, beamhopping schedules,
//! and smart-gateway diversity.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::math::linalg::CMatrix;

const MODULE: &str = "multibeam";

/// Per-beam SINR (linear).
#[derive(Debug, Clone, PartialEq)]
pub struct SinrVector(Vec<f64>);

impl SinrVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(MODULE, format!("SINR entry {i} = {v} must be finite and >= 0")));
        }
        Ok(SinrVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `C = (B / K_f) * sum_i log2(1 + gamma_i)`, bits/s.
pub fn system_throughput(bandwidth_hz: f64, reuse_factor: u32, sinr: &SinrVector) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::domain(MODULE, "bandwidth must be > 0"));
    }
    if reuse_factor == 0 {
        return Err(Error::domain(MODULE, "reuse factor must be >= 1"));
    }
    let spectral: f64 = sinr.0.iter().map(|g| (1.0 + g).log2()).sum();
    Ok(bandwidth_hz / reuse_factor as f64 * spectral)
}

/// `gamma_k = |H_kk|^2 p_k / (sum_{j != k} |H_kj|^2 p_j + noise)` for a square channel
/// where user `k` is served by stream `k`.
pub fn sinr_from_channel(h: &CMatrix, power: &[f64], noise_power: f64) -> Result<SinrVector> {
    if !(noise_power > 0.0) {
        return Err(Error::domain(MODULE, "noise power must be > 0"));
    }
    let k = h.nrows();
    if h.ncols() != k {
        return Err(Error::dims(MODULE, "channel columns", k, h.ncols()));
    }
    if power.len() != k {
        return Err(Error::dims(MODULE, "power vector", k, power.len()));
    }
    if power.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::domain(MODULE, "transmit powers must be >= 0"));
    }
    let values = (0..k)
        .map(|row| {
            let mut interference = noise_power;
            for col in 0..k {
                if col != row {
                    interference += h[(row, col)].norm_sqr() * power[col];
                }
            }
            h[(row, row)].norm_sqr() * power[row] / interference
        })
        .collect();
    SinrVector::new(values)
}

/// Binary beamhopping schedule: rows are time slots, columns are beams.
#[derive(Debug, Clone, PartialEq)]
pub struct IlluminationMatrix {
    slots: usize,
    beams: usize,
    cells: Vec<bool>,
    slot_duration_s: f64,
    max_active: Option<usize>,
}

impl IlluminationMatrix {
    /// Build from row-major slot rows. Every row must have the same length and
    /// respect `max_active` when given.
    pub fn from_rows(rows: &[Vec<bool>], slot_duration_s: f64, max_active: Option<usize>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::domain(MODULE, "illumination matrix needs at least one slot"));
        }
        if !(slot_duration_s > 0.0) {
            return Err(Error::domain(MODULE, "slot duration must be > 0"));
        }
        let beams = rows[0].len();
        let mut cells = Vec::with_capacity(rows.len() * beams);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != beams {
                return Err(Error::dims(MODULE, "illumination row", beams, row.len()));
            }
            let active = row.iter().filter(|v| **v).count();
            if let Some(cap) = max_active {
                if active > cap {
                    return Err(Error::domain(
                        MODULE,
                        format!("slot {t} illuminates {active} beams, cap is {cap}"),
                    ));
                }
            }
            cells.extend_from_slice(row);
        }
        Ok(Self {
            slots: rows.len(),
            beams,
            cells,
            slot_duration_s,
            max_active,
        })
    }

    /// Round-robin schedule lighting `active` consecutive beams per slot.
    pub fn round_robin(slots: usize, beams: usize, active: usize, slot_duration_s: f64) -> Result<Self> {
        if active == 0 || active > beams {
            return Err(Error::domain(MODULE, "active beams per slot must lie in [1, beams]"));
        }
        let rows: Vec<Vec<bool>> = (0..slots)
            .map(|t| {
                let mut row = vec![false; beams];
                for a in 0..active {
                    row[(t * active + a) % beams] = true;
                }
                row
            })
            .collect();
        Self::from_rows(&rows, slot_duration_s, Some(active))
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn beams(&self) -> usize {
        self.beams
    }

    pub fn slot_duration_s(&self) -> f64 {
        self.slot_duration_s
    }

    pub fn max_active(&self) -> Option<usize> {
        self.max_active
    }

    pub fn is_lit(&self, slot: usize, beam: usize) -> bool {
        self.cells[slot * self.beams + beam]
    }
}

/// `N_{i,t}`: slots assigned to each beam (column sums).
pub fn slots_per_beam(t: &IlluminationMatrix) -> Vec<usize> {
    let mut counts = vec![0usize; t.beams];
    for slot in 0..t.slots {
        for (beam, c) in counts.iter_mut().enumerate() {
            if t.is_lit(slot, beam) {
                *c += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReuseMode {
    /// Every illuminated beam uses the whole band.
    FullReuse,
    /// Every illuminated beam uses `B / K_f`.
    PartialReuse(u32),
}

/// Per-beam beamhopping capacity `(N_{i,t} / N_t) * B_eff * log2(1 + gamma_i)`, bits/s.
pub fn beamhop_capacity(t: &IlluminationMatrix, sinr: &SinrVector, bandwidth_hz: f64, mode: ReuseMode) -> Result<Vec<f64>> {
    if sinr.len() != t.beams {
        return Err(Error::dims(MODULE, "SINR vector", t.beams, sinr.len()));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::domain(MODULE, "bandwidth must be > 0"));
    }
    let effective = match mode {
        ReuseMode::FullReuse => bandwidth_hz,
        ReuseMode::PartialReuse(0) => return Err(Error::domain(MODULE, "reuse factor must be >= 1")),
        ReuseMode::PartialReuse(k) => bandwidth_hz / k as f64,
    };
    let n_t = t.slots as f64;
    Ok(slots_per_beam(t)
        .into_iter()
        .zip(sinr.as_slice())
        .map(|(n, g)| n as f64 / n_t * effective * (1.0 + g).log2())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GatewayRole {
    Active,
    Redundant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkState {
    Clear,
    Faded,
}

/// Smart-gateway topology: `N` active plus `P` redundant gateways serving `M` beams.
///
/// Row `i` of each table belongs to gateway `i`. Redundant gateways start with
/// empty rows and receive traffic only through [`switch_gateways`].
#[derive(Debug, Clone, PartialEq)]
pub struct GatewayTopology {
    pub roles: Vec<GatewayRole>,
    pub states: Vec<LinkState>,
    /// Capacity available to each gateway for carrying traffic, bits/s.
    pub feeder_capacity_bps: Vec<f64>,
    /// Frequency-multiplexed offered capacity `C_F[i][j]`, bits/s.
    pub capacity_freq: Vec<Vec<f64>>,
    /// Time-multiplexed offered capacity `C_T[i][j]`, bits/s while connected.
    pub capacity_time: Vec<Vec<f64>>,
    /// Slots `X[i][j]` feeder link `i` is connected to beam `j`.
    pub slots: Vec<Vec<u32>>,
    pub slot_duration_s: f64,
    /// Schedule window in slots.
    pub window_slots: u32,
    /// Per-beam outage flag set by [`switch_gateways`].
    pub outage: Vec<bool>,
}

impl GatewayTopology {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        roles: Vec<GatewayRole>,
        feeder_capacity_bps: Vec<f64>,
        capacity_freq: Vec<Vec<f64>>,
        capacity_time: Vec<Vec<f64>>,
        slots: Vec<Vec<u32>>,
        slot_duration_s: f64,
        window_slots: u32,
    ) -> Result<Self> {
        let g = roles.len();
        let m = capacity_freq.first().map_or(0, Vec::len);
        for (what, len) in [
            ("feeder capacities", feeder_capacity_bps.len()),
            ("C_F rows", capacity_freq.len()),
            ("C_T rows", capacity_time.len()),
            ("X rows", slots.len()),
        ] {
            if len != g {
                return Err(Error::dims(MODULE, what, g, len));
            }
        }
        for i in 0..g {
            for (what, len) in [
                ("C_F columns", capacity_freq[i].len()),
                ("C_T columns", capacity_time[i].len()),
                ("X columns", slots[i].len()),
            ] {
                if len != m {
                    return Err(Error::dims(MODULE, what, m, len));
                }
            }
            let used: u32 = slots[i].iter().sum();
            if used > window_slots {
                return Err(Error::domain(
                    MODULE,
                    format!("gateway {i} is connected {used} slots in a {window_slots}-slot window"),
                ));
            }
        }
        if !(slot_duration_s > 0.0) {
            return Err(Error::domain(MODULE, "slot duration must be > 0"));
        }
        Ok(Self {
            states: vec![LinkState::Clear; g],
            roles,
            feeder_capacity_bps,
            capacity_freq,
            capacity_time,
            slots,
            slot_duration_s,
            window_slots,
            outage: vec![false; m],
        })
    }

    pub fn gateways(&self) -> usize {
        self.roles.len()
    }

    pub fn beams(&self) -> usize {
        self.outage.len()
    }

    pub fn active_count(&self) -> usize {
        self.roles.iter().filter(|r| **r == GatewayRole::Active).count()
    }

    pub fn redundant_count(&self) -> usize {
        self.gateways() - self.active_count()
    }

    fn freq_load(&self, i: usize) -> f64 {
        self.capacity_freq[i].iter().sum()
    }

    fn slot_load(&self, i: usize) -> u32 {
        self.slots[i].iter().sum()
    }

    fn carries_traffic(&self, i: usize) -> bool {
        self.capacity_freq[i].iter().any(|c| *c > 0.0)
            || self.capacity_time[i].iter().zip(&self.slots[i]).any(|(c, x)| *c > 0.0 && *x > 0)
    }

    fn check_beam(&self, j: usize) -> Result<()> {
        if j >= self.beams() {
            return Err(Error::Index {
                module: MODULE,
                index: j,
                len: self.beams(),
            });
        }
        Ok(())
    }
}

/// Frequency multiplexing: `B_j = sum_i C_F[i][j]` over gateways in the clear.
pub fn offered_capacity_frequency(g: &GatewayTopology, j: usize) -> Result<f64> {
    g.check_beam(j)?;
    Ok((0..g.gateways())
        .filter(|&i| g.states[i] == LinkState::Clear)
        .map(|i| g.capacity_freq[i][j])
        .sum())
}

/// Time-multiplexed offered capacity of one beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCapacity {
    /// `sum_i C_T[i][j] * X[i][j] * T_s`, bits per window.
    pub bits_per_window: f64,
    /// The same volume averaged over the window duration, bits/s.
    pub average_bps: f64,
}

/// Time multiplexing: `B_j = sum_i C_T[i][j] X[i][j] T_s` over gateways in the clear.
pub fn offered_capacity_time(g: &GatewayTopology, j: usize) -> Result<WindowCapacity> {
    g.check_beam(j)?;
    let bits: f64 = (0..g.gateways())
        .filter(|&i| g.states[i] == LinkState::Clear)
        .map(|i| g.capacity_time[i][j] * g.slots[i][j] as f64 * g.slot_duration_s)
        .sum();
    let window = g.window_slots as f64 * g.slot_duration_s;
    Ok(WindowCapacity {
        bits_per_window: bits,
        average_bps: if window > 0.0 { bits / window } else { 0.0 },
    })
}

/// Independent Bernoulli fade draws, one per gateway, in gateway order.
pub fn draw_fades<R: Rng + ?Sized>(fade_probability: &[f64], rng: &mut R) -> Vec<bool> {
    fade_probability
        .iter()
        .map(|&p| crate::rng::uniform(rng) < p)
        .collect()
}

/// Apply a fade pattern and reroute traffic of faded active gateways.
///
/// Each faded active gateway, in index order, hands its whole load to the clear
/// redundant gateway with the most residual feeder capacity that can absorb
/// both its capacity and slot load. When none can, the beams it was serving are
/// flagged in outage and its contribution is lost.
pub fn switch_gateways(g: &GatewayTopology, fades: &[bool]) -> Result<GatewayTopology> {
    if fades.len() != g.gateways() {
        return Err(Error::dims(MODULE, "fade pattern", g.gateways(), fades.len()));
    }
    let mut out = g.clone();
    for (state, &faded) in out.states.iter_mut().zip(fades) {
        *state = if faded { LinkState::Faded } else { LinkState::Clear };
    }
    out.outage.iter_mut().for_each(|o| *o = false);

    for i in 0..out.gateways() {
        if out.roles[i] != GatewayRole::Active || out.states[i] != LinkState::Faded || !out.carries_traffic(i) {
            continue;
        }
        let load = out.freq_load(i);
        let slot_load = out.slot_load(i);
        let mut best: Option<(usize, f64)> = None;
        for r in 0..out.gateways() {
            if out.roles[r] != GatewayRole::Redundant || out.states[r] != LinkState::Clear {
                continue;
            }
            let residual = out.feeder_capacity_bps[r] - out.freq_load(r);
            let slots_left = out.window_slots.saturating_sub(out.slot_load(r));
            if residual < load || slots_left < slot_load {
                continue;
            }
            if best.is_none_or(|(_, b)| residual > b) {
                best = Some((r, residual));
            }
        }
        match best {
            Some((r, _)) => {
                for j in 0..out.beams() {
                    let cf = core::mem::take(&mut out.capacity_freq[i][j]);
                    out.capacity_freq[r][j] += cf;
                    let x = core::mem::take(&mut out.slots[i][j]);
                    let ct = core::mem::take(&mut out.capacity_time[i][j]);
                    if x > 0 {
                        // A redundant row holds one C_T per beam; moved traffic keeps
                        // its volume by folding the rate into the slot-weighted mean.
                        let prev_x = out.slots[r][j];
                        let prev_ct = out.capacity_time[r][j];
                        let total = prev_x + x;
                        out.capacity_time[r][j] = (prev_ct * prev_x as f64 + ct * x as f64) / total as f64;
                        out.slots[r][j] = total;
                    } else if out.slots[r][j] == 0 {
                        out.capacity_time[r][j] = ct;
                    }
                }
            }
            None => {
                for j in 0..out.beams() {
                    if out.capacity_freq[i][j] > 0.0 || (out.slots[i][j] > 0 && out.capacity_time[i][j] > 0.0) {
                        out.outage[j] = true;
                    }
                }
            }
        }
    }
    Ok(out)
}
