//! Travel-time forward models for both acquisition systems, the depth
//! resolution of a frequency band, and synthetic B-scan generation.
//!
//! The synthesizer is the verification oracle for the rest of the crate: it
//! places wavelets at the exact forward-model arrival times, so a pipeline
//! that preprocesses, extracts and inverts one of its B-scans must get the
//! generating target back.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geometry::{surface_intersection, AntennaTrack, GprSystem, Point, SurfaceProfile};
use crate::preprocess::Radargram;

/// Propagation speed used throughout, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// A cylindrical target cross-section: center and radius, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetParams {
    pub x_c: f64,
    pub y_c: f64,
    pub radius: f64,
}

impl TargetParams {
    pub fn new(x_c: f64, y_c: f64, radius: f64) -> Self {
        Self { x_c, y_c, radius }
    }

    pub fn center(&self) -> Point {
        Point::new(self.x_c, self.y_c)
    }
}

/// Propagation medium: soil relative permittivity and the reference speed.
#[derive(Debug, Clone, Copy)]
pub struct MediumParams {
    pub eps: f64,
    pub c0: f64,
}

impl MediumParams {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            c0: SPEED_OF_LIGHT,
        }
    }

    /// Two-way slowness in soil, s/m.
    fn soil_two_way(&self) -> f64 {
        2.0 * self.eps.sqrt() / self.c0
    }
}

/// Synthesis knobs for the B-scan generator.
#[derive(Debug, Clone, Copy)]
pub struct AcquisitionConfig {
    /// Time spacing between samples, seconds.
    pub sample_interval: f64,
    /// Samples per trace.
    pub n_samples: usize,
    /// Center frequency of the synthesis wavelet, Hz.
    pub wavelet_center_freq: f64,
    /// Standard deviation of additive white Gaussian noise.
    pub noise_sigma: f64,
    /// Onset of the column-invariant direct-coupling band, seconds. The
    /// recorded time axis places every event this much after its nominal
    /// arrival, mimicking the instrument delay.
    pub coupling_time: f64,
    /// Peak amplitude of the coupling band.
    pub coupling_amp: f64,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self {
            sample_interval: 0.025e-9,
            n_samples: 1200,
            wavelet_center_freq: 1.0e9,
            noise_sigma: 0.0,
            coupling_time: 1.0e-9,
            coupling_amp: 1.0,
        }
    }
}

/// A surface with buried targets; everything the synthesizer needs besides
/// the track and the medium.
#[derive(Debug, Clone)]
pub struct Scene {
    pub surface: SurfaceProfile,
    pub targets: Vec<TargetParams>,
}

/// Two-way travel time for the surface-following system: the wave runs the
/// straight antenna-to-surface-of-target path entirely in soil.
///
/// `None` when the antenna lies inside the target.
pub fn travel_time_wb(
    antenna: Point,
    target: &TargetParams,
    medium: &MediumParams,
) -> Option<f64> {
    let dist = antenna.distance(&target.center());
    if dist <= target.radius {
        return None;
    }
    Some((dist - target.radius) * medium.soil_two_way())
}

/// Two-way travel time for the constant-height system: an air leg from the
/// antenna to the surface crossing, then a soil leg to the target surface,
/// both along the straight antenna-to-center ray.
///
/// `None` when the ray never enters the soil or the crossing lies inside the
/// target.
pub fn travel_time_ahf(
    profile: &SurfaceProfile,
    antenna: Point,
    target: &TargetParams,
    medium: &MediumParams,
) -> Option<f64> {
    let ground = surface_intersection(profile, antenna, target.center())?;
    let soil_dist = ground.distance(&target.center());
    if soil_dist <= target.radius {
        return None;
    }
    let t_air = 2.0 * antenna.distance(&ground) / medium.c0;
    let t_soil = (soil_dist - target.radius) * medium.soil_two_way();
    Some(t_air + t_soil)
}

/// Minimum resolvable vertical separation for a band of width `bandwidth`
/// in a medium of relative permittivity `eps`.
pub fn depth_resolution(bandwidth: f64, eps: f64) -> f64 {
    (1.0 / (2.0 * bandwidth)) * SPEED_OF_LIGHT / eps.sqrt()
}

/// Zero-phase Ricker wavelet with unit peak, evaluated at `tau` seconds from
/// its center, for center frequency `f` Hz.
pub fn ricker(tau: f64, f: f64) -> f64 {
    let a = (std::f64::consts::PI * f * tau).powi(2);
    (1.0 - 2.0 * a) * (-a).exp()
}

/// Half width of the synthesis pulse support, apex in the middle. The pulse
/// is the central lobe of the Ricker wavelet, ending exactly at its first
/// zero crossings: the waveform is positive and continuous over its support,
/// so it paints exactly one vertical run per column, leaves no side lobes
/// for the binarization mask to pick up, and keeps band-pass edge ringing
/// negligible. Travel-time picks made at the apex carry this constant delay,
/// which `pick_travel_times` subtracts via its `wavelet_delay` argument.
pub fn wavelet_half_width(center_freq: f64) -> f64 {
    1.0 / (std::f64::consts::SQRT_2 * std::f64::consts::PI * center_freq)
}

/// Synthesizes a B-scan for a scene.
///
/// Per A-scan column, a Ricker central lobe is added for each target, its
/// apex at `coupling_time + half width + travel time` on the recording axis
/// and its amplitude scaled by spreading loss `1/max(t, dt)` and by a
/// two-way beam factor, squared cosine of the ray's angle from vertical per
/// leg (transmit and receive, `cos^4` in total), which keeps far-offset
/// flanks from swamping neighbouring targets. A column-invariant coupling
/// wavelet models the direct antenna crosstalk, and white Gaussian noise is
/// added last. Targets whose arrival falls outside the window are omitted
/// from that column with a warning.
pub fn synthesize_bscan(
    scene: &Scene,
    track: &AntennaTrack,
    medium: &MediumParams,
    acq: &AcquisitionConfig,
    seed: u64,
) -> Radargram {
    let n = acq.n_samples;
    let m = track.len();
    let dt = acq.sample_interval;
    let half = wavelet_half_width(acq.wavelet_center_freq);
    let mut samples = DMatrix::zeros(n, m);

    let add_wavelet = |col: usize, apex: f64, amp: f64, samples: &mut DMatrix<f64>| {
        let lo = ((apex - half) / dt).ceil().max(0.0) as usize;
        let hi = (((apex + half) / dt).floor() as usize).min(n - 1);
        for i in lo..=hi {
            samples[(i, col)] += amp * ricker(i as f64 * dt - apex, acq.wavelet_center_freq);
        }
    };

    let mut omitted = vec![0usize; scene.targets.len()];
    let mut infeasible = vec![0usize; scene.targets.len()];
    for (j, antenna) in track.positions.iter().enumerate() {
        if acq.coupling_amp != 0.0 {
            add_wavelet(j, acq.coupling_time + half, acq.coupling_amp, &mut samples);
        }
        for (k, target) in scene.targets.iter().enumerate() {
            let t = match track.system {
                GprSystem::Wb => travel_time_wb(*antenna, target, medium),
                GprSystem::Ahf => travel_time_ahf(&scene.surface, *antenna, target, medium),
            };
            let Some(t) = t else {
                infeasible[k] += 1;
                continue;
            };
            let apex = acq.coupling_time + half + t;
            if apex > (n - 1) as f64 * dt {
                omitted[k] += 1;
                continue;
            }
            let dist = antenna.distance(&target.center());
            let beam = if dist > 0.0 {
                ((target.y_c - antenna.y) / dist).powi(4)
            } else {
                1.0
            };
            let amp = dt / t.max(dt) * beam;
            add_wavelet(j, apex, amp, &mut samples);
        }
    }
    for (k, &count) in omitted.iter().enumerate() {
        if count > 0 {
            log::warn!(
                "target {k} arrival beyond the {}-sample window in {count} of {m} columns; omitted there",
                n
            );
        }
    }
    for (k, &count) in infeasible.iter().enumerate() {
        if count > 0 {
            log::warn!("target {k} geometrically infeasible from {count} of {m} columns");
        }
    }

    if acq.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, acq.noise_sigma).expect("positive sigma");
        for j in 0..m {
            for i in 0..n {
                samples[(i, j)] += normal.sample(&mut rng);
            }
        }
    }

    Radargram {
        samples,
        sample_interval: dt,
        trace_positions: Some(track.clone()),
        time_zero_index: (acq.coupling_time / dt).round() as usize,
    }
}
