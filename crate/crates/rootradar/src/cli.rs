//! Command-line pipeline: `synth | preprocess | extract | invert | eval |
//! pipeline`, all driven by a session file and an output directory.
//!
//! Every stage is re-runnable from its on-disk inputs alone; chaining the
//! stages by hand produces the same artifacts as `pipeline`. Exit codes:
//! 0 success, 1 input error, 2 processing failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::forward::{synthesize_bscan, Scene};
use crate::geometry::{
    arc_length_map, build_ahf_track, build_surface, build_wb_track, AntennaTrack, GprSystem,
    SurfaceProfile,
};
use crate::inversion::{invert_all, SearchBounds};
use crate::io::{self, IoError, ResultEntry, SessionConfig};
use crate::metrics;
use crate::preprocess::{
    bandpass, dc_remove, svd_background_removal, time_gain, time_zero_correct, Radargram,
};
use crate::roi::{binarize, c3_cluster, pick_travel_times};

/// Seed override honored above `--seed`.
pub const SEED_ENV_VAR: &str = "ROOTRADAR_SEED";

const PREPROCESSED_BSCAN: &str = "bscan_preprocessed.csv";
const RESULTS_FILE: &str = "results.toml";
const REPORT_FILE: &str = "report.csv";
const OVERLAY_FILE: &str = "patterns_overlay.txt";
const SESSION_COPY: &str = "session.toml";

#[derive(Debug)]
enum CliError {
    /// Bad arguments, missing or malformed files: exit 1.
    Input(String),
    /// A stage failed while computing or writing: exit 2.
    Processing(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Processing(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Processing(m) => m,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Write { .. } => CliError::Processing(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "rootradar",
    version,
    about = "Travel-time positioning and sizing of buried cylindrical targets \
             from common-offset GPR B-scans over non-flat ground"
)]
struct Cli {
    /// Session file describing the survey and all stage parameters.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for stage inputs and outputs.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Overrides the synthesis and swarm seeds from the session file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Chattier logging.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Synthesize a B-scan from the session's surface and targets.
    Synth,
    /// Condition the raw B-scan: time zero, band-pass, DC, gain, SVD.
    Preprocess,
    /// Extract per-target regions and pick travel times.
    Extract,
    /// Fit center and radius per extracted pattern.
    Invert,
    /// Score inversion results against the session's targets.
    Eval,
    /// Run synth, preprocess, extract, invert, and eval in order.
    Pipeline,
}

/// Parses `argv` (including the program name) and runs the requested stage.
/// Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too and are not failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    init_logging(cli.verbose);
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn init_logging(verbose: bool) {
    let level = if verbose { "debug" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .try_init();
}

struct Context {
    session: SessionConfig,
    base_dir: PathBuf,
    out_dir: PathBuf,
}

impl Context {
    fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn raw_bscan_path(&self) -> PathBuf {
        self.out_dir.join(&self.session.bscan_csv)
    }

    fn profile(&self) -> Result<SurfaceProfile, CliError> {
        let path = self.base_dir.join(&self.session.surface_csv);
        let raw = io::load_surface_csv(&path)?;
        build_surface(&raw, self.session.surface_resolution_m)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn track(&self, profile: &SurfaceProfile) -> Result<AntennaTrack, CliError> {
        match self.session.gpr_system()? {
            GprSystem::Wb => {
                let map = arc_length_map(profile, self.session.arc_samples)
                    .map_err(|e| CliError::Input(e.to_string()))?;
                build_wb_track(&map, self.session.scan_step_m)
                    .map_err(|e| CliError::Input(e.to_string()))
            }
            GprSystem::Ahf => {
                let track = self.session.track.ok_or_else(|| {
                    CliError::Input("AHF session needs a [track] block with x_start_m/x_end_m".into())
                })?;
                build_ahf_track(track.x_start_m, track.x_end_m, self.session.scan_step_m)
                    .map_err(|e| CliError::Input(e.to_string()))
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Input("missing required --config <PATH>".into()))?;
    let (mut session, base_dir) = io::load_session(config_path)?;

    if let Some(seed) = effective_seed(cli.seed)? {
        session.synth.seed = seed;
        session.pso.seed = seed;
    }

    std::fs::create_dir_all(&cli.out).map_err(|e| {
        CliError::Processing(format!("cannot create output dir {}: {e}", cli.out.display()))
    })?;
    let ctx = Context {
        session,
        base_dir,
        out_dir: cli.out.clone(),
    };

    match cli.command {
        Command::Synth => synth(&ctx),
        Command::Preprocess => preprocess(&ctx),
        Command::Extract => extract(&ctx),
        Command::Invert => invert(&ctx),
        Command::Eval => eval(&ctx),
        Command::Pipeline => {
            synth(&ctx)?;
            preprocess(&ctx)?;
            extract(&ctx)?;
            invert(&ctx)?;
            eval(&ctx)
        }
    }
}

fn effective_seed(flag: Option<u64>) -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV_VAR) {
        Ok(value) => value.parse::<u64>().map(Some).map_err(|_| {
            CliError::Input(format!("{SEED_ENV_VAR}='{value}' is not a valid seed"))
        }),
        Err(_) => Ok(flag),
    }
}

fn heatmap_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("pgm")
}

fn synth(ctx: &Context) -> Result<(), CliError> {
    let targets = ctx.session.target_params();
    if targets.is_empty() {
        return Err(CliError::Input(
            "session declares no targets; nothing to synthesize".into(),
        ));
    }
    let profile = ctx.profile()?;
    let track = ctx.track(&profile)?;
    let scene = Scene {
        surface: profile,
        targets,
    };
    let gram = synthesize_bscan(
        &scene,
        &track,
        &ctx.session.medium(),
        &ctx.session.acquisition(),
        ctx.session.synth.seed,
    );
    let path = ctx.raw_bscan_path();
    io::save_bscan(&path, &gram)?;
    io::render_heatmap(&gram, &heatmap_path(&path))?;
    io::save_session(&ctx.out(SESSION_COPY), &ctx.session)?;
    log::info!(
        "synthesized {} traces x {} samples -> {}",
        gram.n_traces(),
        gram.n_samples(),
        path.display()
    );
    Ok(())
}

fn preprocess(ctx: &Context) -> Result<(), CliError> {
    let raw = io::load_bscan(&ctx.raw_bscan_path())?;
    let p = &ctx.session.preprocess;
    let conditioned = run_preprocess_chain(&raw, p, ctx.session.svd_k_dominant())
        .map_err(|e| CliError::Input(e.to_string()))?;
    let path = ctx.out(PREPROCESSED_BSCAN);
    io::save_bscan(&path, &conditioned)?;
    io::render_heatmap(&conditioned, &heatmap_path(&path))?;
    log::info!("preprocessed B-scan -> {}", path.display());
    Ok(())
}

/// The conditioning chain in its fixed order: time zero, band-pass, DC
/// removal, time gain, SVD clutter removal.
pub fn run_preprocess_chain(
    raw: &Radargram,
    p: &io::PreprocessConfig,
    k_dominant: usize,
) -> Result<Radargram, crate::preprocess::PreprocessError> {
    let step = time_zero_correct(raw, p.time_zero_threshold)?;
    let step = bandpass(&step, p.f_low_hz, p.f_high_hz)?;
    let step = dc_remove(&step);
    let step = time_gain(&step, p.gain_alpha)?;
    svd_background_removal(&step, k_dominant, p.svd_k_noise)
}

fn pattern_path(out_dir: &Path, index: usize) -> PathBuf {
    out_dir.join(format!("pattern_{index:02}.csv"))
}

fn extract(ctx: &Context) -> Result<(), CliError> {
    let gram = io::load_bscan(&ctx.out(PREPROCESSED_BSCAN))?;
    let profile = ctx.profile()?;
    let track = ctx.track(&profile)?;
    if track.len() != gram.n_traces() {
        return Err(CliError::Input(format!(
            "track has {} positions but the B-scan has {} traces",
            track.len(),
            gram.n_traces()
        )));
    }
    let r = &ctx.session.roi;
    let mask = binarize(&gram, r.amp_frac).map_err(|e| CliError::Input(e.to_string()))?;
    let regions = c3_cluster(&mask, r.min_segment, r.min_shared, r.min_region_pixels)
        .map_err(|e| CliError::Input(e.to_string()))?;
    if regions.is_empty() {
        log::warn!("no regions found; nothing extracted");
    }
    let mut patterns = Vec::new();
    for (k, region) in regions.iter().enumerate() {
        let pattern = pick_travel_times(region, &gram, &track, r.wavelet_delay_s)
            .map_err(|e| CliError::Processing(e.to_string()))?;
        io::save_pattern_csv(&pattern_path(&ctx.out_dir, k), &pattern)?;
        patterns.push(pattern);
    }
    io::write_pattern_overlay(&patterns, &gram, r.wavelet_delay_s, &ctx.out(OVERLAY_FILE))?;
    log::info!("extracted {} pattern(s)", patterns.len());
    println!("regions: {}", patterns.len());
    Ok(())
}

fn list_pattern_files(out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(out_dir)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", out_dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("pattern_") && n.ends_with(".csv"))
                .unwrap_or(false)
        })
        .collect();
    files.sort();
    Ok(files)
}

fn invert(ctx: &Context) -> Result<(), CliError> {
    let files = list_pattern_files(&ctx.out_dir)?;
    if files.is_empty() {
        return Err(CliError::Input(format!(
            "no pattern files (pattern_*.csv) in {}",
            ctx.out_dir.display()
        )));
    }
    let mut patterns = Vec::new();
    for f in &files {
        patterns.push(io::load_pattern_csv(f)?);
    }
    let profile = ctx.profile()?;
    let system = ctx.session.gpr_system()?;
    let medium = ctx.session.medium();
    let time_window = ctx.session.n_samples as f64 * ctx.session.sample_interval_s;
    let bounds = match ctx.session.pso.bounds {
        Some(b) => b.to_bounds(),
        None => {
            let track = ctx.track(&profile)?;
            SearchBounds::defaults(&track, &profile, &medium, time_window)
        }
    };
    let fits = invert_all(
        &patterns,
        &profile,
        &medium,
        &bounds,
        &ctx.session.pso_config(),
        system,
        time_window,
    )
    .map_err(|e| CliError::Input(e.to_string()))?;

    let mut entries = Vec::new();
    let mut failures = 0;
    for (k, fit) in fits.iter().enumerate() {
        match fit {
            Ok(fit) => {
                log::info!(
                    "pattern {k}: center ({:.3}, {:.3}) m, radius {:.3} m, cost {:.3e}, {} iters, {:.2} s",
                    fit.estimate.x_c,
                    fit.estimate.y_c,
                    fit.estimate.radius,
                    fit.estimate.final_cost,
                    fit.estimate.iterations,
                    fit.wall_time.as_secs_f64()
                );
                entries.push(ResultEntry::from_fit(fit));
            }
            Err(e) => {
                failures += 1;
                log::error!("pattern {k} ({}) failed: {e}", files[k].display());
            }
        }
    }
    if entries.is_empty() {
        return Err(CliError::Processing(format!(
            "all {failures} pattern inversions failed"
        )));
    }
    io::save_results(&ctx.out(RESULTS_FILE), &entries)?;
    println!("estimates: {}", entries.len());
    Ok(())
}

fn eval(ctx: &Context) -> Result<(), CliError> {
    let entries = io::load_results(&ctx.out(RESULTS_FILE))?;
    let truths = ctx.session.target_params();
    if truths.is_empty() {
        return Err(CliError::Input(
            "session declares no targets to evaluate against".into(),
        ));
    }
    let estimates: Vec<_> = entries.iter().map(ResultEntry::target).collect();
    let timings: Vec<f64> = entries.iter().map(|e| e.wall_time_s).collect();
    let report = metrics::report(&estimates, &truths, &timings)
        .map_err(|e| CliError::Processing(e.to_string()))?;
    io::atomic_write(&ctx.out(REPORT_FILE), report.to_csv().as_bytes())?;
    print!("{report}");
    Ok(())
}
