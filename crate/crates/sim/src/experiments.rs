//! Named Monte-Carlo pipelines. Each trial draws from its own derived
//! random streams, so results do not depend on scheduling.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use hts_core::array::{
    afr_response, beamform_weights, design_precoder, output_sinr, precoded_sinr, synthesize_snapshot, PowerNorm, PrecoderDesign, Source,
};
use hts_core::channel::{build_multibeam_channel, clarke_rho, estimate_csi, generate_channel_process};
use hts_core::consts::BOLTZMANN_J_K;
use hts_core::coverage::{CoveragePlanner, CoverageUser};
use hts_core::impairments::{compose_multicarrier, run_chain, BasebandSignal, ImpairmentChain};
use hts_core::multibeam::{
    beamhop_capacity, draw_fades, offered_capacity_frequency, offered_capacity_time, sinr_from_channel, slots_per_beam, switch_gateways,
    system_throughput, GatewayRole, GatewayTopology, IlluminationMatrix, ReuseMode, SinrVector,
};
use hts_core::rng::{derive_stream, uniform, Purpose};
use hts_core::scenario::{self, BeamDef, SatelliteDef, Scenario, UserDef};
use hts_core::{CMatrix, CVector, Complex64, RngStream};
use rayon::prelude::*;

use crate::error::{Result, SimError};
use crate::formats;
use crate::results::{col, Metadata, ResultTable, Value};
use crate::scenario_io::LoadedScenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Experiment {
    MultibeamThroughput,
    Beamhopping,
    GatewayDiversity,
    PrecodingSinr,
    BeamformingSinr,
    ImpairmentChainEval,
    CsiSensitivity,
    CoveragePlan,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::MultibeamThroughput,
        Experiment::Beamhopping,
        Experiment::GatewayDiversity,
        Experiment::PrecodingSinr,
        Experiment::BeamformingSinr,
        Experiment::ImpairmentChainEval,
        Experiment::CsiSensitivity,
        Experiment::CoveragePlan,
    ];

    /// File stem of the experiment's outputs.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::MultibeamThroughput => "multibeam_throughput",
            Experiment::Beamhopping => "beamhopping",
            Experiment::GatewayDiversity => "gateway_diversity",
            Experiment::PrecodingSinr => "precoding_sinr",
            Experiment::BeamformingSinr => "beamforming_sinr",
            Experiment::ImpairmentChainEval => "impairment_chain_eval",
            Experiment::CsiSensitivity => "csi_sensitivity",
            Experiment::CoveragePlan => "coverage_plan",
        }
    }

    /// Whether the scenario carries what this experiment needs.
    pub fn check_sections(self, s: &Scenario) -> Result<()> {
        let sim = &s.simulation;
        let missing = |section| Err(SimError::MissingSection { experiment: self.name(), section });
        match self {
            Experiment::Beamhopping if sim.beamhopping.is_none() => missing("beamhopping"),
            Experiment::PrecodingSinr if sim.precoding.is_none() => missing("precoding"),
            Experiment::BeamformingSinr if sim.beamforming.is_none() => missing("beamforming"),
            Experiment::ImpairmentChainEval if sim.signal.is_none() => missing("signal"),
            Experiment::CsiSensitivity if sim.csi.is_none() => missing("csi"),
            Experiment::CoveragePlan if sim.coverage.is_none() => missing("coverage"),
            Experiment::GatewayDiversity if s.gateways.is_empty() => Err(SimError::Validation(vec![hts_core::Error::Validation {
                field: "gateways".into(),
                reason: "gateway diversity needs at least one gateway".into(),
            }])),
            _ => Ok(()),
        }
    }
}

/// Overrides applied on top of the scenario's simulation section.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    /// Worker threads; the global pool when `None`.
    pub workers: Option<usize>,
}

/// Extra file emitted next to the result table.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub experiment: Experiment,
    pub meta: Metadata,
    pub table: ResultTable,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    pub fn csv(&self) -> String {
        self.table.to_csv(&self.meta)
    }

    /// Write the table and artifacts into `dir`, each atomically.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
        let mut written = Vec::new();
        let table = dir.join(format!("{}.csv", self.experiment.name()));
        crate::results::write_atomic(&table, self.csv().as_bytes())?;
        written.push(table);
        for a in &self.artifacts {
            let p = dir.join(&a.file_name);
            crate::results::write_atomic(&p, &a.bytes)?;
            written.push(p);
        }
        Ok(written)
    }
}

/// Run one experiment on a validated scenario.
pub fn run(loaded: &LoadedScenario, experiment: Experiment, opts: RunOptions) -> Result<RunOutput> {
    let s = &loaded.scenario;
    experiment.check_sections(s)?;
    let ctx = Ctx {
        loaded,
        seed: opts.seed.unwrap_or(s.simulation.seed),
        trials: opts.trials.unwrap_or(s.simulation.monte_carlo_trials),
        workers: opts.workers,
    };
    let (table, artifacts) = match experiment {
        Experiment::MultibeamThroughput => multibeam_throughput(&ctx)?,
        Experiment::Beamhopping => beamhopping(&ctx)?,
        Experiment::GatewayDiversity => gateway_diversity(&ctx)?,
        Experiment::PrecodingSinr => precoding(&ctx)?,
        Experiment::BeamformingSinr => beamforming(&ctx)?,
        Experiment::ImpairmentChainEval => impairment_chain(&ctx)?,
        Experiment::CsiSensitivity => csi_sensitivity(&ctx)?,
        Experiment::CoveragePlan => coverage_plan(&ctx)?,
    };
    Ok(RunOutput {
        experiment,
        meta: Metadata {
            experiment: experiment.name().into(),
            scenario_sha256: loaded.digest.clone(),
            seed: ctx.seed,
            trials: ctx.trials,
        },
        table,
        artifacts,
    })
}

struct Ctx<'a> {
    loaded: &'a LoadedScenario,
    seed: u64,
    trials: u32,
    workers: Option<usize>,
}

type Rows = Vec<Vec<Value>>;

impl Ctx<'_> {
    fn scenario(&self) -> &Scenario {
        &self.loaded.scenario
    }

    /// Evaluate `f` for every trial, results in trial order.
    fn map_trials<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> Result<T> + Sync,
    {
        let run = || (0..self.trials as u64).into_par_iter().map(&f).collect::<Result<Vec<T>>>();
        match self.workers {
            Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build().expect("thread pool").install(run),
            None => run(),
        }
    }

    /// Evaluate `f` for every trial and concatenate its rows in trial order.
    fn trials<F>(&self, f: F) -> Result<Rows>
    where
        F: Fn(u64) -> Result<Rows> + Sync,
    {
        Ok(self.map_trials(f)?.into_iter().flatten().collect())
    }
}

fn table(columns: Vec<crate::results::Column>, rows: Rows) -> ResultTable {
    let mut t = ResultTable::new(columns);
    for r in rows {
        t.push(r);
    }
    t
}

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Satellite of the first beam, its beams, and the users attached to them.
struct Link<'a> {
    sat: &'a SatelliteDef,
    beams: Vec<&'a BeamDef>,
    users: Vec<&'a UserDef>,
}

fn primary_link(s: &Scenario) -> Link<'_> {
    let sat = s.satellite(&s.beams[0].satellite).expect("validated reference");
    let beams: Vec<&BeamDef> = s.beams.iter().filter(|b| b.satellite == sat.id).collect();
    let users = s.users.iter().filter(|u| beams.iter().any(|b| b.id == u.beam)).collect();
    Link { sat, beams, users }
}

fn beam_bandwidth(s: &Scenario) -> f64 {
    s.carriers.total_bandwidth_hz / s.carriers.reuse_factor as f64
}

fn noise_power(s: &Scenario) -> f64 {
    BOLTZMANN_J_K * beam_bandwidth(s)
}

/// Beams of the primary satellite paired with their first listed user.
fn representatives(link: &Link<'_>) -> Result<(Vec<BeamDef>, Vec<UserDef>)> {
    let users: Vec<UserDef> = link
        .beams
        .iter()
        .filter_map(|b| link.users.iter().find(|u| u.beam == b.id).map(|u| (*u).clone()))
        .collect();
    if users.len() != link.beams.len() {
        return Err(hts_core::Error::Validation {
            field: "users".into(),
            reason: "every beam of the satellite needs at least one user".into(),
        }
        .into());
    }
    Ok((link.beams.iter().map(|b| (*b).clone()).collect(), users))
}

/// Per-beam SINR with one representative user per beam.
///
/// Beam `j` uses frequency color `j mod K_f`; only beams of the same color interfere.
fn serving_sinr(s: &Scenario, seed: u64, trial: u64) -> Result<SinrVector> {
    let link = primary_link(s);
    let (beams, users) = representatives(&link)?;
    let mut rng = derive_stream(seed, Purpose::Channel, trial);
    let ch = build_multibeam_channel(link.sat, &beams, &users, s.carriers.center_frequency_hz, &s.impairments.fading, &mut rng)?;
    let k_f = s.carriers.reuse_factor as usize;
    let masked = CMatrix::from_fn(users.len(), beams.len(), |k, j| if k % k_f == j % k_f { ch.h[(k, j)] } else { Complex64::new(0.0, 0.0) });
    let power: Vec<f64> = beams.iter().map(|b| b.tx_power_w).collect();
    Ok(sinr_from_channel(&masked, &power, noise_power(s))?)
}

fn multibeam_throughput(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let s = ctx.scenario();
    let rows = ctx.trials(|trial| {
        let sinr = serving_sinr(s, ctx.seed, trial)?;
        let c = system_throughput(s.carriers.total_bandwidth_hz, s.carriers.reuse_factor, &sinr)?;
        let g = sinr.as_slice();
        let min = g.iter().copied().fold(f64::INFINITY, f64::min);
        let max = g.iter().copied().fold(0.0, f64::max);
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        Ok(vec![vec![trial_value(trial), g.len().into(), db(min).into(), db(mean).into(), db(max).into(), c.into()]])
    })?;
    let cols = vec![
        col("trial", "1"),
        col("beams", "1"),
        col("sinr_min", "dB"),
        col("sinr_mean", "dB"),
        col("sinr_max", "dB"),
        col("system_throughput", "bit/s"),
    ];
    Ok((table(cols, rows), Vec::new()))
}

fn trial_value(trial: u64) -> Value {
    Value::Int(trial as i64)
}

fn illumination(ctx: &Ctx, beams: usize) -> Result<IlluminationMatrix> {
    let bh = ctx.scenario().simulation.beamhopping.as_ref().expect("checked section");
    let cap = bh.max_active_beams.map(|c| c as usize);
    match &bh.illumination_csv {
        Some(rel) => {
            let rows = formats::read_illumination_csv(&ctx.loaded.resolve(rel))?;
            let t = IlluminationMatrix::from_rows(&rows, bh.slot_duration_s, cap)?;
            if t.beams() != beams {
                return Err(hts_core::Error::DimensionMismatch {
                    module: "multibeam",
                    what: "illumination columns".into(),
                    expected: beams,
                    actual: t.beams(),
                }
                .into());
            }
            Ok(t)
        }
        None => Ok(IlluminationMatrix::round_robin(bh.slots as usize, beams, cap.unwrap_or(beams).min(beams), bh.slot_duration_s)?),
    }
}

fn beamhopping(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let s = ctx.scenario();
    let bh = s.simulation.beamhopping.as_ref().expect("checked section");
    let n_beams = primary_link(s).beams.len();
    let t = illumination(ctx, n_beams)?;
    let lit = slots_per_beam(&t);
    let (mode, bw) = if bh.partial_reuse {
        (ReuseMode::PartialReuse(s.carriers.reuse_factor), s.carriers.total_bandwidth_hz)
    } else {
        (ReuseMode::FullReuse, s.carriers.total_bandwidth_hz)
    };
    let rows = ctx.trials(|trial| {
        let sinr = serving_sinr(s, ctx.seed, trial)?;
        let cap = beamhop_capacity(&t, &sinr, bw, mode)?;
        Ok((0..n_beams)
            .map(|j| vec![trial_value(trial), j.into(), lit[j].into(), db(sinr.as_slice()[j]).into(), cap[j].into()])
            .collect())
    })?;
    let cols = vec![col("trial", "1"), col("beam", "1"), col("slots_lit", "1"), col("sinr", "dB"), col("capacity", "bit/s")];
    let artifacts = vec![Artifact {
        file_name: "beamhopping_illumination.csv".into(),
        bytes: formats::illumination_csv(&(0..t.slots()).map(|i| (0..t.beams()).map(|j| t.is_lit(i, j)).collect()).collect::<Vec<_>>())
            .into_bytes(),
    }];
    Ok((table(cols, rows), artifacts))
}

/// Gateway tables indexed by scenario gateway order and scenario beam order.
fn gateway_topology(s: &Scenario) -> Result<GatewayTopology> {
    let m = s.beams.len();
    let g = s.gateways.len();
    let mut cf = vec![vec![0.0; m]; g];
    let mut ct = vec![vec![0.0; m]; g];
    let mut x = vec![vec![0u32; m]; g];
    for (i, gw) in s.gateways.iter().enumerate() {
        for l in &gw.links {
            let j = s.beam_index(&l.beam).expect("validated reference");
            cf[i][j] += l.capacity_freq_bps;
            ct[i][j] = l.capacity_time_bps;
            x[i][j] += l.slots;
        }
    }
    let roles = s
        .gateways
        .iter()
        .map(|gw| match gw.role {
            scenario::GatewayRole::Active => GatewayRole::Active,
            scenario::GatewayRole::Redundant => GatewayRole::Redundant,
        })
        .collect();
    let feeder = s.gateways.iter().map(|gw| gw.feeder_capacity_bps.unwrap_or(f64::INFINITY)).collect();
    let (slot_duration, window) = match &s.simulation.beamhopping {
        Some(bh) => (bh.slot_duration_s, bh.slots),
        None => (1.0, x.iter().map(|r| r.iter().sum::<u32>()).max().unwrap_or(0).max(1)),
    };
    Ok(GatewayTopology::new(roles, feeder, cf, ct, x, slot_duration, window)?)
}

fn gateway_diversity(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let s = ctx.scenario();
    let topo = gateway_topology(s)?;
    let probs: Vec<f64> = s.gateways.iter().map(|g| g.fade_probability).collect();
    let rows = ctx.trials(|trial| {
        let mut rng = derive_stream(ctx.seed, Purpose::Gateways, trial);
        let fades = draw_fades(&probs, &mut rng);
        let faded = fades.iter().filter(|f| **f).count();
        let after = switch_gateways(&topo, &fades)?;
        (0..topo.beams())
            .map(|j| {
                let time = offered_capacity_time(&after, j)?;
                Ok(vec![
                    trial_value(trial),
                    j.into(),
                    faded.into(),
                    after.outage[j].into(),
                    offered_capacity_frequency(&after, j)?.into(),
                    time.average_bps.into(),
                    time.bits_per_window.into(),
                ])
            })
            .collect()
    })?;
    let cols = vec![
        col("trial", "1"),
        col("beam", "1"),
        col("faded_gateways", "1"),
        col("outage", "bool"),
        col("capacity_freq", "bit/s"),
        col("capacity_time", "bit/s"),
        col("volume_time", "bit/window"),
    ];
    Ok((table(cols, rows), Vec::new()))
}

fn precoding(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let s = ctx.scenario();
    let cfg = s.simulation.precoding.as_ref().expect("checked section");
    let link = primary_link(s);
    let (beams, users) = representatives(&link)?;
    let design = match cfg.design {
        scenario::PrecoderDesign::ZeroForcing => PrecoderDesign::ZeroForcing,
        scenario::PrecoderDesign::RegularizedZeroForcing => PrecoderDesign::RegularizedZeroForcing { alpha: cfg.regularization },
    };
    let power = match cfg.per_feed_power_w {
        Some(p) => PowerNorm::PerFeed(p),
        None => PowerNorm::SumPower(cfg.total_power_w),
    };
    let noise = noise_power(s);
    let bw = beam_bandwidth(s);
    let rows = ctx.trials(|trial| {
        let mut rng = derive_stream(ctx.seed, Purpose::Channel, trial);
        let ch = build_multibeam_channel(link.sat, &beams, &users, s.carriers.center_frequency_hz, &s.impairments.fading, &mut rng)?;
        let p = design_precoder(&ch.h, design, power, noise)?;
        let sinr = precoded_sinr(&ch.h, &p.w, noise)?;
        // full reuse without precoding, same total power split evenly
        let k = users.len();
        let per_stream = cfg.total_power_w / k as f64;
        let base = sinr_from_channel(&ch.h, &vec![per_stream; k], noise)?;
        Ok((0..k)
            .map(|u| {
                let g = sinr.as_slice()[u];
                vec![trial_value(trial), u.into(), db(g).into(), db(base.as_slice()[u]).into(), (bw * (1.0 + g).log2()).into()]
            })
            .collect())
    })?;
    let cols = vec![
        col("trial", "1"),
        col("user", "1"),
        col("sinr_precoded", "dB"),
        col("sinr_unprecoded", "dB"),
        col("rate_precoded", "bit/s"),
    ];
    Ok((table(cols, rows), Vec::new()))
}

fn qpsk(rng: &mut RngStream) -> Complex64 {
    let q = (uniform(rng) * 4.0).floor().min(3.0);
    Complex64::from_polar(1.0, PI / 4.0 + q * PI / 2.0)
}

fn beamforming(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let s = ctx.scenario();
    let cfg = s.simulation.beamforming.as_ref().expect("checked section");
    let grid = formats::read_afr_grid(&ctx.loaded.resolve(&cfg.afr_grid_csv))?;
    let a0 = afr_response(&grid, cfg.desired.phi_deg, cfg.desired.theta_deg)?.vector();
    let interferers: Vec<(CVector, f64)> = cfg
        .interferers
        .iter()
        .map(|d| Ok((afr_response(&grid, d.phi_deg, d.theta_deg)?.vector(), d.power_w)))
        .collect::<Result<_>>()?;
    let m = a0.len();
    let noise = cfg.noise_power_w;
    let mut r_true = CMatrix::identity(m, m) * Complex64::new(noise, 0.0);
    for (a, p) in &interferers {
        r_true += a * a.adjoint() * Complex64::new(*p, 0.0);
    }
    let p0 = cfg.desired.power_w;
    let optimum = {
        let w = beamform_weights(&r_true, &a0)?;
        output_sinr(&w.w, &a0, p0, &r_true)
    };
    let matched = output_sinr(&(&a0 / Complex64::new(a0.norm_squared(), 0.0)), &a0, p0, &r_true);
    let rows = ctx.trials(|trial| {
        let mut sym = derive_stream(ctx.seed, Purpose::Symbols, trial);
        let mut noise_rng = derive_stream(ctx.seed, Purpose::Snapshot, trial);
        let mut phases = derive_stream(ctx.seed, Purpose::Fading, trial);
        let gains: Vec<Complex64> = std::iter::once(p0)
            .chain(interferers.iter().map(|i| i.1))
            .map(|p| Complex64::from_polar(p.sqrt(), 2.0 * PI * uniform(&mut phases)))
            .collect();
        let mut r_hat = CMatrix::zeros(m, m);
        for _ in 0..cfg.snapshots {
            let desired = Source { steering: a0.clone(), gain: gains[0], symbol: qpsk(&mut sym) };
            let others: Vec<Source> = interferers
                .iter()
                .zip(&gains[1..])
                .map(|((a, _), g)| Source { steering: a.clone(), gain: *g, symbol: qpsk(&mut sym) })
                .collect();
            let snap = synthesize_snapshot(&desired, &others, noise, &mut noise_rng)?;
            let ipn = &snap.y - &snap.desired;
            r_hat += &ipn * ipn.adjoint();
        }
        r_hat /= Complex64::new(cfg.snapshots as f64, 0.0);
        let w = beamform_weights(&r_hat, &a0)?;
        let sinr = output_sinr(&w.w, &a0, p0, &r_true);
        Ok(vec![vec![trial_value(trial), db(sinr).into(), db(optimum).into(), db(matched).into(), w.loading.is_some().into()]])
    })?;
    let cols = vec![
        col("trial", "1"),
        col("sinr_mvdr", "dB"),
        col("sinr_optimum", "dB"),
        col("sinr_matched_filter", "dB"),
        col("diagonal_loading", "bool"),
    ];
    Ok((table(cols, rows), Vec::new()))
}

/// Composite multicarrier QPSK test signal with rectangular pulses.
fn test_signal(s: &Scenario, trial: u64, seed: u64) -> Result<BasebandSignal> {
    let sig = s.simulation.signal.as_ref().expect("checked section");
    let carriers = sig.carriers.unwrap_or(s.beams[0].carriers).max(1) as usize;
    let n = sig.samples as usize;
    let sps = sig.samples_per_symbol as usize;
    let mut rng = derive_stream(seed, Purpose::Symbols, trial);
    let mut parts = Vec::with_capacity(carriers);
    for _ in 0..carriers {
        let mut samples = Vec::with_capacity(n);
        while samples.len() < n {
            let x = qpsk(&mut rng);
            samples.extend(std::iter::repeat_n(x, sps.min(n - samples.len())));
        }
        parts.push(BasebandSignal::new(samples, sig.sample_rate_hz, s.carriers.center_frequency_hz)?);
    }
    let mid = (carriers as f64 - 1.0) / 2.0;
    let offsets: Vec<f64> = (0..carriers).map(|m| (m as f64 - mid) * sig.carrier_spacing_hz).collect();
    Ok(compose_multicarrier(&parts, &offsets, &vec![0.0; carriers])?)
}

fn papr_db(x: &BasebandSignal) -> f64 {
    let peak = x.samples.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    db(peak / x.power())
}

fn impairment_chain(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let s = ctx.scenario();
    let chain = ImpairmentChain::new(s.impairments.chain.clone());
    let stem = Experiment::ImpairmentChainEval.name();
    let outputs = ctx.map_trials(|trial| {
        let x = test_signal(s, trial, ctx.seed)?;
        let mut rng = derive_stream(ctx.seed, Purpose::PhaseNoise, trial);
        let y = run_chain(&x, &chain, &mut rng)?;
        Ok((x, y))
    })?;
    let mut rows = Vec::with_capacity(outputs.len());
    for (trial, (x, y)) in outputs.iter().enumerate() {
        // best complex gain aligning input to output
        let xy: Complex64 = x.samples.iter().zip(&y.samples).map(|(a, b)| a.conj() * b).sum();
        let xx: f64 = x.samples.iter().map(|a| a.norm_sqr()).sum();
        let alpha = xy / xx;
        let err: f64 = x.samples.iter().zip(&y.samples).map(|(a, b)| (b - alpha * a).norm_sqr()).sum();
        let nmse = err / (alpha.norm_sqr() * xx);
        rows.push(vec![
            trial.into(),
            db(nmse).into(),
            db(alpha.norm_sqr()).into(),
            papr_db(x).into(),
            papr_db(y).into(),
            db(y.power() / x.power()).into(),
        ]);
    }
    let mut artifacts = Vec::new();
    if let Some((x, y)) = outputs.first() {
        for (suffix, sig) in [("input", x), ("output", y)] {
            let name = format!("{stem}_trial0_{suffix}.bin");
            artifacts.push(Artifact { file_name: format!("{name}.toml"), bytes: formats::waveform_sidecar(sig).into_bytes() });
            artifacts.push(Artifact { file_name: name, bytes: formats::waveform_bytes(sig) });
        }
    }
    let cols = vec![
        col("trial", "1"),
        col("nmse", "dB"),
        col("linear_gain", "dB"),
        col("papr_in", "dB"),
        col("papr_out", "dB"),
        col("power_ratio", "dB"),
    ];
    Ok((table(cols, rows), artifacts))
}

fn csi_sensitivity(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let cfg = ctx.scenario().simulation.csi.as_ref().expect("checked section");
    let n = cfg.samples as usize;
    let rows = ctx.trials(|trial| {
        (0..=cfg.max_delay_symbols)
            .map(|d| {
                let rho = clarke_rho(cfg.doppler_hz, d, cfg.symbol_time_s);
                let mut rng = derive_stream(ctx.seed, Purpose::Csi, (trial << 16) | d as u64);
                let process = generate_channel_process(1, 1, n + d as usize, d, rho, &mut rng)?;
                let mut err = 0.0;
                let (mut cross, mut p_hat, mut p_true) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
                let mut variance = 0.0;
                for t in d as usize..process.len() {
                    let est = estimate_csi(&process, t, d, cfg.doppler_hz, cfg.symbol_time_s, &mut rng)?;
                    variance = est.error_variance;
                    let (h_hat, past, now) = (est.h_hat[(0, 0)], process[t - d as usize][(0, 0)], process[t][(0, 0)]);
                    err += (h_hat - past).norm_sqr() / 2.0;
                    cross += h_hat * now.conj();
                    p_hat += h_hat.norm_sqr();
                    p_true += now.norm_sqr();
                }
                let count = (process.len() - d as usize) as f64;
                let corr = cross.norm() / (p_hat * p_true).sqrt();
                Ok(vec![
                    trial_value(trial),
                    d.into(),
                    rho.into(),
                    variance.into(),
                    (err / count).into(),
                    corr.into(),
                    (rho.abs() / (1.0 + 2.0 * variance).sqrt()).into(),
                ])
            })
            .collect()
    })?;
    let cols = vec![
        col("trial", "1"),
        col("delay", "symbols"),
        col("rho", "1"),
        col("error_variance", "1"),
        col("empirical_error_variance", "1"),
        col("empirical_correlation", "1"),
        col("predicted_correlation", "1"),
    ];
    Ok((table(cols, rows), Vec::new()))
}

fn coverage_plan(ctx: &Ctx) -> Result<(ResultTable, Vec<Artifact>)> {
    let s = ctx.scenario();
    let cfg = s.simulation.coverage.as_ref().expect("checked section");
    let sat = primary_link(s).sat;
    let planner = CoveragePlanner {
        clusters: cfg.clusters as usize,
        method: cfg.method,
        balance_tolerance: cfg.balance_tolerance,
        demand_containment: cfg.demand_containment,
        shift_threshold: cfg.shift_threshold,
        polygon_deg: cfg.polygon_deg.clone(),
        catalog: cfg.catalog.clone(),
        satellite: sat.position(),
    };
    let users: Vec<CoverageUser> = s
        .users
        .iter()
        .map(|u| CoverageUser { id: u.id.clone(), lat_deg: u.lat_deg, lon_deg: u.lon_deg, demand_bps: u.traffic_demand_bps })
        .collect();
    let plans = ctx.map_trials(|trial| Ok(planner.plan(&users, &mut derive_stream(ctx.seed, Purpose::Clustering, trial))?))?;
    let mut rows = Vec::new();
    for (trial, plan) in plans.iter().enumerate() {
        for (c, b) in plan.beams.beams.iter().enumerate() {
            let cell = &plan.tessellation.cells[c];
            rows.push(vec![
                trial.into(),
                c.into(),
                plan.clusters.clusters[c].members.len().into(),
                b.demand_bps.into(),
                b.center_deg[0].into(),
                b.center_deg[1].into(),
                b.half_power_beamwidth_deg.into(),
                db(b.peak_gain).into(),
                b.containment.into(),
                (cell.area_m2() / 1e6).into(),
            ]);
        }
    }
    let mut artifacts = Vec::new();
    if let Some(first) = plans.first() {
        artifacts.push(Artifact { file_name: "coverage_plan_beams.toml".into(), bytes: formats::beam_plan_toml(&first.beams).into_bytes() });
        artifacts.push(Artifact {
            file_name: "coverage_plan_footprints.csv".into(),
            bytes: formats::footprints_csv(&first.tessellation).into_bytes(),
        });
    }
    let cols = vec![
        col("trial", "1"),
        col("cluster", "1"),
        col("users", "1"),
        col("demand", "bit/s"),
        col("center_lat", "deg"),
        col("center_lon", "deg"),
        col("half_power_beamwidth", "deg"),
        col("peak_gain", "dBi"),
        col("containment", "1"),
        col("cell_area", "km2"),
    ];
    Ok((table(cols, rows), artifacts))
}
