//! On-disk formats: illumination matrices, channel matrices, AFR grids,
//! waveforms and coverage plans.

use std::fs;
use std::path::Path;

use hts_core::array::{AfrGrid, FeedSample};
use hts_core::coverage::{BeamPlan, Tessellation};
use hts_core::impairments::BasebandSignal;
use hts_core::{CMatrix, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

fn reader(path: &Path, headers: bool) -> Result<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> SimError {
    let line = e.position().map(|p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => SimError::io(path, io),
        kind => SimError::parse(path, line, format!("{kind:?}")),
    }
}

fn field<T: std::str::FromStr>(path: &Path, rec: &csv::StringRecord, i: usize, what: &str) -> Result<T> {
    let line = rec.position().map(|p| p.line() as usize);
    let raw = rec.get(i).ok_or_else(|| SimError::parse(path, line, format!("missing column `{what}`")))?;
    raw.parse().map_err(|_| SimError::parse(path, line, format!("column `{what}`: cannot parse `{raw}`")))
}

/// Illumination matrix: one row per slot, one 0/1 column per beam, no header.
pub fn read_illumination_csv(path: &Path) -> Result<Vec<Vec<bool>>> {
    let mut rows = Vec::new();
    for rec in reader(path, false)?.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let row = (0..rec.len())
            .map(|i| match field::<u8>(path, &rec, i, "illumination")? {
                0 => Ok(false),
                1 => Ok(true),
                v => Err(SimError::parse(path, rec.position().map(|p| p.line() as usize), format!("entry {v} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn illumination_csv(rows: &[Vec<bool>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|b| if *b { "1" } else { "0" }).collect::<Vec<_>>().join(",") + "\n")
        .collect()
}

/// Channel matrix as CSV: one row per matrix row, `re_j,im_j` column pairs.
pub fn channel_csv(h: &CMatrix) -> String {
    let mut out = (0..h.ncols()).map(|j| format!("re_{j},im_{j}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for i in 0..h.nrows() {
        let row: Vec<String> = (0..h.ncols()).map(|j| format!("{},{}", h[(i, j)].re, h[(i, j)].im)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_channel_csv(path: &Path) -> Result<CMatrix> {
    let mut rd = reader(path, true)?;
    let cols = rd.headers().map_err(|e| csv_error(path, e))?.len();
    if cols % 2 != 0 {
        return Err(SimError::parse(path, Some(1), "channel CSV needs re/im column pairs"));
    }
    let mut values = Vec::new();
    let mut rows = 0;
    for rec in rd.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        for j in 0..cols / 2 {
            values.push(Complex64::new(field(path, &rec, 2 * j, "re")?, field(path, &rec, 2 * j + 1, "im")?));
        }
        rows += 1;
    }
    Ok(CMatrix::from_row_slice(rows, cols / 2, &values))
}

#[derive(Debug, Deserialize)]
struct AfrRow {
    phi_deg: f64,
    theta_deg: f64,
    feed: usize,
    gain: f64,
    phase_rad: f64,
}

/// AFR grid with header `phi_deg,theta_deg,feed,gain,phase_rad`.
pub fn read_afr_grid(path: &Path) -> Result<AfrGrid> {
    let mut samples = Vec::new();
    let mut rd = reader(path, true)?;
    for row in rd.deserialize() {
        let r: AfrRow = row.map_err(|e| csv_error(path, e))?;
        samples.push(FeedSample {
            phi_deg: r.phi_deg,
            theta_deg: r.theta_deg,
            feed: r.feed,
            gain: r.gain,
            phase_rad: r.phase_rad,
        });
    }
    Ok(AfrGrid::from_samples(&samples)?)
}

/// Sidecar describing an interleaved waveform file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformMeta {
    pub sample_rate_hz: f64,
    pub center_freq_hz: f64,
    pub samples: usize,
    pub format: String,
}

pub const WAVEFORM_FORMAT: &str = "complex-f64-le-interleaved";

/// Interleaved `re, im` little-endian f64 samples.
pub fn waveform_bytes(s: &BasebandSignal) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * s.len());
    for v in &s.samples {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn waveform_sidecar(s: &BasebandSignal) -> String {
    toml::to_string(&WaveformMeta {
        sample_rate_hz: s.sample_rate_hz,
        center_freq_hz: s.center_freq_hz,
        samples: s.len(),
        format: WAVEFORM_FORMAT.into(),
    })
    .expect("waveform metadata serializes")
}

/// Sidecar path for a waveform file: `<file>.toml`.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut p = path.as_os_str().to_owned();
    p.push(".toml");
    p.into()
}

pub fn write_waveform(path: &Path, s: &BasebandSignal) -> Result<()> {
    crate::results::write_atomic(path, &waveform_bytes(s))?;
    crate::results::write_atomic(&sidecar_path(path), waveform_sidecar(s).as_bytes())
}

pub fn read_waveform(path: &Path) -> Result<BasebandSignal> {
    let meta_path = sidecar_path(path);
    let text = fs::read_to_string(&meta_path).map_err(|e| SimError::io(&meta_path, e))?;
    let meta: WaveformMeta = toml::from_str(&text).map_err(|e| SimError::parse(&meta_path, None, e.message().to_string()))?;
    if meta.format != WAVEFORM_FORMAT {
        return Err(SimError::parse(&meta_path, None, format!("unsupported waveform format `{}`", meta.format)));
    }
    let bytes = fs::read(path).map_err(|e| SimError::io(path, e))?;
    if bytes.len() != 16 * meta.samples {
        return Err(SimError::parse(path, None, format!("expected {} samples, file holds {} bytes", meta.samples, bytes.len())));
    }
    let samples = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok(BasebandSignal::new(samples, meta.sample_rate_hz, meta.center_freq_hz)?)
}

/// Beam plan as TOML: `[[beams]]` per cluster and `[[users]]` with gains.
pub fn beam_plan_toml(plan: &BeamPlan) -> String {
    toml::to_string(plan).expect("beam plans serialize")
}

/// Footprint polygons as `cell,vertex,lat_deg,lon_deg` rows.
pub fn footprints_csv(t: &Tessellation) -> String {
    let mut out = String::from("cell,vertex,lat_deg,lon_deg\n");
    for c in &t.cells {
        for (i, v) in c.vertices_deg.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", c.cluster, i, v[0], v[1]));
        }
    }
    out
}
