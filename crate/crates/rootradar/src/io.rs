//! File formats: session configuration (TOML), B-scan matrices (CSV with a
//! sidecar header line), surface profiles and extracted patterns (CSV),
//! inversion results (TOML), and PGM heatmap rendering.
//!
//! All writes go through a temp-file-then-rename step so an interrupted run
//! never leaves a truncated artifact behind.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forward::{AcquisitionConfig, MediumParams, TargetParams};
use crate::geometry::GprSystem;
use crate::inversion::{PatternFit, PsoConfig, SearchBounds};
use crate::preprocess::Radargram;
use crate::roi::{ExtractedPattern, Observation};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Malformed {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: header declares {expected} {what}, found {got}")]
    DimensionMismatch {
        path: PathBuf,
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("referenced file does not exist: {0}")]
    MissingFile(PathBuf),
}

/// Writes `bytes` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let wrap = |source| IoError::Write {
        path: path.to_path_buf(),
        source,
    };
    fs::write(&tmp, bytes).map_err(wrap)?;
    fs::rename(&tmp, path).map_err(wrap)
}

fn read_to_string(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })
}

// --- Surface profiles --------------------------------------------------------

/// Loads raw surface points from a two-column CSV `(x_m, y_m)`; a single
/// non-numeric header line is allowed.
pub fn load_surface_csv(path: &Path) -> Result<Vec<(f64, f64)>, IoError> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(IoError::Malformed {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected 2 comma-separated fields, got {}", fields.len()),
            });
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => out.push((x, y)),
            _ if idx == 0 => continue, // header row
            _ => {
                return Err(IoError::Malformed {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("cannot parse '{line}' as two numbers"),
                })
            }
        }
    }
    Ok(out)
}

/// Writes surface points as a two-column CSV with a header row.
pub fn save_surface_csv(path: &Path, points: &[(f64, f64)]) -> Result<(), IoError> {
    let mut text = String::from("x_m,y_m\n");
    for (x, y) in points {
        text.push_str(&format!("{x},{y}\n"));
    }
    atomic_write(path, text.as_bytes())
}

// --- B-scan matrices ----------------------------------------------------------

/// Saves a radargram: one sidecar header line
/// `# dt_s=<v> n_traces=<v> n_samples=<v>`, then the amplitude matrix, row i
/// = time sample i, comma-separated. Amplitudes are written in shortest
/// round-trip form, so save/load is bit-exact.
pub fn save_bscan(path: &Path, r: &Radargram) -> Result<(), IoError> {
    let (n, m) = (r.n_samples(), r.n_traces());
    let mut text = format!(
        "# dt_s={} n_traces={} n_samples={}\n",
        r.sample_interval, m, n
    );
    for i in 0..n {
        for j in 0..m {
            if j > 0 {
                text.push(',');
            }
            text.push_str(&format!("{}", r.samples[(i, j)]));
        }
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}

/// Loads a radargram saved by `save_bscan`. The track and the time-zero
/// index are not part of the format; the loaded radargram carries
/// `time_zero_index = 0` and no positions.
pub fn load_bscan(path: &Path) -> Result<Radargram, IoError> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| IoError::Malformed {
        path: path.to_path_buf(),
        line: 1,
        msg: "empty file".into(),
    })?;
    let header = header.trim();
    if !header.starts_with('#') {
        return Err(IoError::Malformed {
            path: path.to_path_buf(),
            line: 1,
            msg: "missing '# dt_s=... n_traces=... n_samples=...' header".into(),
        });
    }
    let mut dt = None;
    let mut n_traces = None;
    let mut n_samples = None;
    for field in header.trim_start_matches('#').split_whitespace() {
        let Some((key, value)) = field.split_once('=') else {
            continue;
        };
        match key {
            "dt_s" => dt = value.parse::<f64>().ok(),
            "n_traces" => n_traces = value.parse::<usize>().ok(),
            "n_samples" => n_samples = value.parse::<usize>().ok(),
            _ => {}
        }
    }
    let (Some(dt), Some(m), Some(n)) = (dt, n_traces, n_samples) else {
        return Err(IoError::Malformed {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("header missing or unparsable fields: '{header}'"),
        });
    };

    let mut samples = DMatrix::zeros(n, m);
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if rows >= n {
            return Err(IoError::DimensionMismatch {
                path: path.to_path_buf(),
                what: "rows (n_samples)",
                expected: n,
                got: rows + 1,
            });
        }
        let mut cols = 0usize;
        for field in line.split(',') {
            if cols >= m {
                cols += 1;
                continue;
            }
            samples[(rows, cols)] = field.trim().parse::<f64>().map_err(|_| {
                IoError::Malformed {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("cannot parse amplitude '{}' in column {}", field, cols + 1),
                }
            })?;
            cols += 1;
        }
        if cols != m {
            return Err(IoError::DimensionMismatch {
                path: path.to_path_buf(),
                what: "columns (n_traces)",
                expected: m,
                got: cols,
            });
        }
        rows += 1;
    }
    if rows != n {
        return Err(IoError::DimensionMismatch {
            path: path.to_path_buf(),
            what: "rows (n_samples)",
            expected: n,
            got: rows,
        });
    }
    Ok(Radargram {
        samples,
        sample_interval: dt,
        trace_positions: None,
        time_zero_index: 0,
    })
}

// --- Extracted patterns --------------------------------------------------------

/// Writes one extracted pattern as CSV `(x_a_m, y_a_m, t_a_s)`.
pub fn save_pattern_csv(path: &Path, pattern: &ExtractedPattern) -> Result<(), IoError> {
    let mut text = String::from("x_a_m,y_a_m,t_a_s\n");
    for obs in &pattern.observations {
        text.push_str(&format!("{},{},{}\n", obs.x_a, obs.y_a, obs.travel_time));
    }
    atomic_write(path, text.as_bytes())
}

/// Loads a pattern CSV written by `save_pattern_csv`.
pub fn load_pattern_csv(path: &Path) -> Result<ExtractedPattern, IoError> {
    let text = read_to_string(path)?;
    let mut observations = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(IoError::Malformed {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) => observations.push(Observation {
                x_a: v[0],
                y_a: v[1],
                travel_time: v[2],
            }),
            Err(_) if idx == 0 => continue, // header row
            Err(_) => {
                return Err(IoError::Malformed {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("cannot parse '{line}' as three numbers"),
                })
            }
        }
    }
    Ok(ExtractedPattern::from_observations(observations))
}

// --- Results ------------------------------------------------------------------

/// One fitted target as stored in the results file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultEntry {
    pub x_c_m: f64,
    pub y_c_m: f64,
    pub r_m: f64,
    pub final_cost_s2: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub wall_time_s: f64,
}

impl ResultEntry {
    pub fn from_fit(fit: &PatternFit) -> Self {
        Self {
            x_c_m: fit.estimate.x_c,
            y_c_m: fit.estimate.y_c,
            r_m: fit.estimate.radius,
            final_cost_s2: fit.estimate.final_cost,
            iterations: fit.estimate.iterations,
            evaluations: fit.estimate.evaluations,
            wall_time_s: fit.wall_time.as_secs_f64(),
        }
    }

    pub fn target(&self) -> TargetParams {
        TargetParams::new(self.x_c_m, self.y_c_m, self.r_m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
struct ResultsFile {
    #[serde(default)]
    target: Vec<ResultEntry>,
}

/// Writes fitted targets to a structured-text results file.
pub fn save_results(path: &Path, entries: &[ResultEntry]) -> Result<(), IoError> {
    let file = ResultsFile {
        target: entries.to_vec(),
    };
    let text = toml::to_string_pretty(&file).expect("results serialize");
    atomic_write(path, text.as_bytes())
}

/// Loads a results file written by `save_results`.
pub fn load_results(path: &Path) -> Result<Vec<ResultEntry>, IoError> {
    let text = read_to_string(path)?;
    let file: ResultsFile = toml::from_str(&text).map_err(|e| IoError::Malformed {
        path: path.to_path_buf(),
        line: e.span().map(|s| text[..s.start].lines().count()).unwrap_or(0),
        msg: e.message().to_string(),
    })?;
    Ok(file.target)
}

// --- Heatmaps -----------------------------------------------------------------

/// Renders a radargram as a binary PGM (P5) image, rows = time samples,
/// columns = traces, amplitudes mapped linearly to [0, 255] with zero at 128.
pub fn render_heatmap(r: &Radargram, path: &Path) -> Result<(), IoError> {
    let (n, m) = (r.n_samples(), r.n_traces());
    let max_abs = r.samples.amax();
    let mut bytes = Vec::with_capacity(32 + n * m);
    bytes.extend_from_slice(format!("P5\n{m} {n}\n255\n").as_bytes());
    for i in 0..n {
        for j in 0..m {
            let v = if max_abs > 0.0 {
                128.0 + 127.0 * r.samples[(i, j)] / max_abs
            } else {
                128.0
            };
            bytes.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    atomic_write(path, &bytes)
}

/// Writes extracted patterns as plain-text pixel polylines (`column row` per
/// observation, one `# region k` block per pattern) for plotting over the
/// matching heatmap.
pub fn write_pattern_overlay(
    patterns: &[ExtractedPattern],
    r: &Radargram,
    wavelet_delay: f64,
    path: &Path,
) -> Result<(), IoError> {
    let mut text = String::new();
    for (k, pattern) in patterns.iter().enumerate() {
        text.push_str(&format!("# region {k}\n"));
        if let Some(region) = &pattern.source_region {
            let mut col_iter = region.segments.iter().map(|s| s.column);
            let mut cols: Vec<usize> = Vec::new();
            for c in &mut col_iter {
                if cols.last() != Some(&c) {
                    cols.push(c);
                }
            }
            for (obs, col) in pattern.observations.iter().zip(cols) {
                let row = ((obs.travel_time + wavelet_delay) / r.sample_interval).round()
                    + r.time_zero_index as f64;
                text.push_str(&format!("{col} {row}\n"));
            }
        }
        text.push('\n');
    }
    atomic_write(path, text.as_bytes())
}

// --- Session configuration -----------------------------------------------------

fn default_resolution() -> f64 {
    0.001
}
fn default_arc_samples() -> usize {
    10_000
}

/// Acquisition-track block, required for AHF surveys.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrackConfig {
    pub x_start_m: f64,
    pub x_end_m: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TargetConfig {
    pub x_c_m: f64,
    pub y_c_m: f64,
    pub r_m: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SynthConfig {
    pub wavelet_center_freq_hz: f64,
    pub noise_sigma: f64,
    pub coupling_time_s: f64,
    pub coupling_amp: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            wavelet_center_freq_hz: 1.0e9,
            noise_sigma: 0.0,
            coupling_time_s: 1.0e-9,
            coupling_amp: 1.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub time_zero_threshold: f64,
    pub f_low_hz: f64,
    pub f_high_hz: f64,
    pub gain_alpha: f64,
    /// Dominant singular values to remove; when absent defaults to 3 for WB
    /// and 6 for AHF (resolved at load time).
    pub svd_k_dominant: Option<usize>,
    pub svd_k_noise: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            time_zero_threshold: 0.05,
            f_low_hz: 0.4e9,
            f_high_hz: 3.4e9,
            gain_alpha: 1.0,
            svd_k_dominant: None,
            svd_k_noise: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RoiConfig {
    pub amp_frac: f64,
    pub min_segment: usize,
    pub min_shared: usize,
    pub min_region_pixels: usize,
    pub wavelet_delay_s: f64,
}

impl Default for RoiConfig {
    fn default() -> Self {
        Self {
            amp_frac: 0.3,
            min_segment: 2,
            min_shared: 1,
            min_region_pixels: 50,
            wavelet_delay_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub x_min_m: f64,
    pub x_max_m: f64,
    pub y_min_m: f64,
    pub y_max_m: f64,
    pub r_min_m: f64,
    pub r_max_m: f64,
}

impl BoundsConfig {
    pub fn to_bounds(self) -> SearchBounds {
        SearchBounds {
            x_range: (self.x_min_m, self.x_max_m),
            y_range: (self.y_min_m, self.y_max_m),
            r_range: (self.r_min_m, self.r_max_m),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SessionPsoConfig {
    pub n_particles: usize,
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub max_iters: usize,
    pub tol_s2: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsConfig>,
}

impl Default for SessionPsoConfig {
    fn default() -> Self {
        let d = PsoConfig::default();
        Self {
            n_particles: d.n_particles,
            phi0: d.phi0,
            phi1: d.phi1,
            phi2: d.phi2,
            max_iters: d.max_iters,
            tol_s2: d.tol,
            seed: d.seed,
            bounds: None,
        }
    }
}

/// A complete, self-describing processing session.
///
/// Paths are interpreted relative to the directory of the session file
/// (`surface_csv`) or the output directory (`bscan_csv`). Loading resolves
/// every optional default, so a saved session always spells out the full
/// parameter set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionConfig {
    pub system: String,
    /// Reference height above the highest surface point, meters. Documentary:
    /// scene y coordinates are already relative to H_0.
    pub h0_m: f64,
    pub eps: f64,
    pub sample_interval_s: f64,
    pub n_samples: usize,
    pub scan_step_m: f64,
    pub surface_csv: String,
    pub bscan_csv: String,
    #[serde(default = "default_resolution")]
    pub surface_resolution_m: f64,
    #[serde(default = "default_arc_samples")]
    pub arc_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track: Option<TrackConfig>,
    #[serde(default)]
    pub targets: Vec<TargetConfig>,
    #[serde(default)]
    pub synth: SynthConfig,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    #[serde(default)]
    pub roi: RoiConfig,
    #[serde(default)]
    pub pso: SessionPsoConfig,
}

impl SessionConfig {
    pub fn gpr_system(&self) -> Result<GprSystem, IoError> {
        match self.system.as_str() {
            "WB" => Ok(GprSystem::Wb),
            "AHF" => Ok(GprSystem::Ahf),
            other => Err(IoError::Malformed {
                path: PathBuf::new(),
                line: 0,
                msg: format!("system must be \"WB\" or \"AHF\", got \"{other}\""),
            }),
        }
    }

    pub fn medium(&self) -> MediumParams {
        MediumParams::new(self.eps)
    }

    pub fn acquisition(&self) -> AcquisitionConfig {
        AcquisitionConfig {
            sample_interval: self.sample_interval_s,
            n_samples: self.n_samples,
            wavelet_center_freq: self.synth.wavelet_center_freq_hz,
            noise_sigma: self.synth.noise_sigma,
            coupling_time: self.synth.coupling_time_s,
            coupling_amp: self.synth.coupling_amp,
        }
    }

    pub fn pso_config(&self) -> PsoConfig {
        PsoConfig {
            n_particles: self.pso.n_particles,
            phi0: self.pso.phi0,
            phi1: self.pso.phi1,
            phi2: self.pso.phi2,
            max_iters: self.pso.max_iters,
            tol: self.pso.tol_s2,
            seed: self.pso.seed,
        }
    }

    pub fn target_params(&self) -> Vec<TargetParams> {
        self.targets
            .iter()
            .map(|t| TargetParams::new(t.x_c_m, t.y_c_m, t.r_m))
            .collect()
    }

    /// Effective dominant-SV removal count for this session's system.
    pub fn svd_k_dominant(&self) -> usize {
        self.preprocess.svd_k_dominant.unwrap_or(match self.system.as_str() {
            "AHF" => 6,
            _ => 3,
        })
    }

    fn resolve_defaults(&mut self) {
        self.preprocess.svd_k_dominant = Some(self.svd_k_dominant());
    }
}

/// Loads and validates a session file. Returns the config (with every
/// default resolved) and the directory of the session file, against which
/// its relative paths are interpreted.
pub fn load_session(path: &Path) -> Result<(SessionConfig, PathBuf), IoError> {
    let text = read_to_string(path)?;
    let mut config: SessionConfig = toml::from_str(&text).map_err(|e| IoError::Malformed {
        path: path.to_path_buf(),
        line: e.span().map(|s| text[..s.start].lines().count()).unwrap_or(0),
        msg: e.message().to_string(),
    })?;
    config.gpr_system().map_err(|e| match e {
        IoError::Malformed { line, msg, .. } => IoError::Malformed {
            path: path.to_path_buf(),
            line,
            msg,
        },
        other => other,
    })?;
    config.resolve_defaults();
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let surface = base.join(&config.surface_csv);
    if !surface.exists() {
        return Err(IoError::MissingFile(surface));
    }
    Ok((config, base))
}

/// Saves a session with all defaults spelled out.
pub fn save_session(path: &Path, config: &SessionConfig) -> Result<(), IoError> {
    let mut config = config.clone();
    config.resolve_defaults();
    let text = toml::to_string_pretty(&config).expect("session serialize");
    atomic_write(path, text.as_bytes())
}
