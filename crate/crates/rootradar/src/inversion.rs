//! Target fitting: travel-time misfit cost functions for both systems and a
//! bounded particle-swarm minimizer over (x_c, y_c, R).
//!
//! The swarm update follows the form
//!
//! ```text
//! v_k = phi0*v_k + phi1*V1*(q_k - q_k_best) + phi2*V2*(q_k - q_global)
//! q_k = q_k + v_k
//! ```
//!
//! with fresh uniform V1, V2 in [0, 1] drawn per coordinate, per particle,
//! per iteration (scalar draws would confine every move to the plane spanned
//! by the two attraction vectors and let the swarm collapse onto a line).
//! With the default negative phi1, phi2 this is algebraically the usual
//! attraction toward the personal and global bests with coefficients |phi1|,
//! |phi2| (see `velocity_update` and its equivalence test). Runs are bit
//! reproducible for a fixed seed.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::forward::{travel_time_ahf, travel_time_wb, MediumParams, TargetParams};
use crate::geometry::{AntennaTrack, GprSystem, Point, SurfaceProfile};
use crate::roi::ExtractedPattern;

#[derive(Debug, Error)]
pub enum InversionError {
    #[error("pattern has no observations")]
    EmptyPattern,
    #[error("no patterns to invert")]
    NoPatterns,
    #[error("invalid search bounds: {0}")]
    BadBounds(String),
    #[error("PSO needs at least 2 particles and 1 iteration")]
    BadPsoConfig,
}

/// Search box for the three fitted parameters, meters.
#[derive(Debug, Clone, Copy)]
pub struct SearchBounds {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub r_range: (f64, f64),
}

impl SearchBounds {
    /// Default box: x spans the track, y from the shallowest surface point
    /// (a target can sit anywhere below the surface at its own abscissa;
    /// infeasible candidates above locally deeper ground are priced out by
    /// the cost penalty) down to the depth the time window can reach, radius
    /// 5 mm to 30 cm.
    pub fn defaults(
        track: &AntennaTrack,
        profile: &SurfaceProfile,
        medium: &MediumParams,
        time_window: f64,
    ) -> Self {
        let (x_lo, x_hi) = track.x_extent();
        let y_lo = profile.min_depth();
        let y_hi = medium.c0 * time_window / (2.0 * medium.eps.sqrt());
        Self {
            x_range: (x_lo, x_hi),
            y_range: (y_lo, y_hi.max(y_lo + 0.1)),
            r_range: (0.005, 0.30),
        }
    }

    fn validate(&self) -> Result<(), InversionError> {
        for (name, (lo, hi)) in [
            ("x", self.x_range),
            ("y", self.y_range),
            ("r", self.r_range),
        ] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(InversionError::BadBounds(format!(
                    "{name}_range [{lo}, {hi}]"
                )));
            }
        }
        if self.r_range.0 <= 0.0 {
            return Err(InversionError::BadBounds(
                "radius lower bound must be positive".into(),
            ));
        }
        Ok(())
    }

    fn low(&self) -> [f64; 3] {
        [self.x_range.0, self.y_range.0, self.r_range.0]
    }

    fn high(&self) -> [f64; 3] {
        [self.x_range.1, self.y_range.1, self.r_range.1]
    }
}

/// Swarm configuration.
#[derive(Debug, Clone, Copy)]
pub struct PsoConfig {
    pub n_particles: usize,
    /// Inertia coefficient.
    pub phi0: f64,
    /// Personal-best coefficient (negative: see module docs).
    pub phi1: f64,
    /// Global-best coefficient (negative: see module docs).
    pub phi2: f64,
    pub max_iters: usize,
    /// Cost-improvement threshold, s^2: the run stops after
    /// `STALL_ITERATIONS` consecutive iterations improving by less than this.
    pub tol: f64,
    pub seed: u64,
}

/// Consecutive low-improvement iterations that end a run.
pub const STALL_ITERATIONS: usize = 20;

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            n_particles: 100,
            phi0: 0.5,
            phi1: -1.5,
            phi2: -1.0,
            max_iters: 500,
            tol: 1e-22,
            seed: 0,
        }
    }
}

/// A fitted target.
#[derive(Debug, Clone, Copy)]
pub struct RootEstimate {
    pub x_c: f64,
    pub y_c: f64,
    pub radius: f64,
    /// Residual sum of squares at the optimum, s^2.
    pub final_cost: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

impl RootEstimate {
    pub fn target(&self) -> TargetParams {
        TargetParams::new(self.x_c, self.y_c, self.radius)
    }
}

fn penalty(time_window: f64) -> f64 {
    (10.0 * time_window).powi(2)
}

/// Sum of squared travel-time residuals for the surface-following model.
/// Geometrically infeasible evaluations contribute `(10 * time_window)^2`
/// per observation.
pub fn cost_wb(
    pattern: &ExtractedPattern,
    candidate: &TargetParams,
    medium: &MediumParams,
    time_window: f64,
) -> Result<f64, InversionError> {
    if pattern.is_empty() {
        return Err(InversionError::EmptyPattern);
    }
    let bad = penalty(time_window);
    Ok(pattern
        .observations
        .iter()
        .map(|obs| {
            match travel_time_wb(Point::new(obs.x_a, obs.y_a), candidate, medium) {
                Some(t) => (obs.travel_time - t).powi(2),
                None => bad,
            }
        })
        .sum())
}

/// Sum of squared travel-time residuals for the constant-height model. The
/// surface profile is required because every model evaluation re-derives the
/// air–soil crossing for the candidate center.
pub fn cost_ahf(
    pattern: &ExtractedPattern,
    profile: &SurfaceProfile,
    candidate: &TargetParams,
    medium: &MediumParams,
    time_window: f64,
) -> Result<f64, InversionError> {
    if pattern.is_empty() {
        return Err(InversionError::EmptyPattern);
    }
    let bad = penalty(time_window);
    Ok(pattern
        .observations
        .iter()
        .map(|obs| {
            match travel_time_ahf(profile, Point::new(obs.x_a, obs.y_a), candidate, medium) {
                Some(t) => (obs.travel_time - t).powi(2),
                None => bad,
            }
        })
        .sum())
}

/// One velocity update step, exactly as the swarm applies it. `v1` and `v2`
/// hold the per-coordinate uniform draws.
pub fn velocity_update(
    v: [f64; 3],
    q: [f64; 3],
    personal_best: [f64; 3],
    global_best: [f64; 3],
    (phi0, phi1, phi2): (f64, f64, f64),
    v1: [f64; 3],
    v2: [f64; 3],
) -> [f64; 3] {
    let mut out = [0.0; 3];
    for d in 0..3 {
        out[d] = phi0 * v[d]
            + phi1 * v1[d] * (q[d] - personal_best[d])
            + phi2 * v2[d] * (q[d] - global_best[d]);
    }
    out
}

/// Minimizes `cost` over the bounded box and returns the best candidate along
/// with the global-best cost after every iteration (index 0 is the cost after
/// initialization).
pub fn pso_minimize_traced(
    cost: impl Fn(&TargetParams) -> f64,
    bounds: &SearchBounds,
    cfg: &PsoConfig,
) -> Result<(RootEstimate, Vec<f64>), InversionError> {
    bounds.validate()?;
    if cfg.n_particles < 2 || cfg.max_iters < 1 {
        return Err(InversionError::BadPsoConfig);
    }
    let lo = bounds.low();
    let hi = bounds.high();
    let eval = |q: &[f64; 3]| cost(&TargetParams::new(q[0], q[1], q[2]));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_particles;
    let mut q: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            let mut p = [0.0; 3];
            for d in 0..3 {
                p[d] = rng.gen_range(lo[d]..hi[d]);
            }
            p
        })
        .collect();
    let mut v: Vec<[f64; 3]> = vec![[0.0; 3]; n];
    let mut best_q = q.clone();
    let mut best_c: Vec<f64> = q.iter().map(eval).collect();
    let mut evaluations = n;

    let mut g_idx = 0;
    for k in 1..n {
        if best_c[k] < best_c[g_idx] {
            g_idx = k;
        }
    }
    let mut g_q = best_q[g_idx];
    let mut g_c = best_c[g_idx];

    let mut trace = vec![g_c];
    let mut stall = 0;
    let mut iterations = 0;

    for _ in 0..cfg.max_iters {
        iterations += 1;
        for k in 0..n {
            let v1 = [rng.gen(), rng.gen(), rng.gen()];
            let v2 = [rng.gen(), rng.gen(), rng.gen()];
            v[k] = velocity_update(
                v[k],
                q[k],
                best_q[k],
                g_q,
                (cfg.phi0, cfg.phi1, cfg.phi2),
                v1,
                v2,
            );
            for d in 0..3 {
                q[k][d] += v[k][d];
                if q[k][d] < lo[d] {
                    q[k][d] = lo[d];
                    v[k][d] = 0.0;
                } else if q[k][d] > hi[d] {
                    q[k][d] = hi[d];
                    v[k][d] = 0.0;
                }
            }
        }
        let previous_best = g_c;
        for k in 0..n {
            let c = eval(&q[k]);
            evaluations += 1;
            if c < best_c[k] {
                best_c[k] = c;
                best_q[k] = q[k];
            }
        }
        for k in 0..n {
            if best_c[k] < g_c {
                g_c = best_c[k];
                g_q = best_q[k];
            }
        }
        assert!(g_c <= previous_best, "global best regressed");
        trace.push(g_c);

        if previous_best - g_c < cfg.tol {
            stall += 1;
            if stall >= STALL_ITERATIONS {
                break;
            }
        } else {
            stall = 0;
        }
    }

    Ok((
        RootEstimate {
            x_c: g_q[0],
            y_c: g_q[1],
            radius: g_q[2],
            final_cost: g_c,
            iterations,
            evaluations,
        },
        trace,
    ))
}

/// As `pso_minimize_traced`, discarding the trace.
pub fn pso_minimize(
    cost: impl Fn(&TargetParams) -> f64,
    bounds: &SearchBounds,
    cfg: &PsoConfig,
) -> Result<RootEstimate, InversionError> {
    pso_minimize_traced(cost, bounds, cfg).map(|(est, _)| est)
}

/// One fitted pattern with its wall-clock time.
#[derive(Debug, Clone)]
pub struct PatternFit {
    pub estimate: RootEstimate,
    pub wall_time: Duration,
}

/// Runs one independent swarm per extracted pattern. Per-pattern failures
/// are reported in place; the remaining patterns still get fitted. Pattern
/// `k` uses seed `cfg.seed + k` so runs stay reproducible but decorrelated.
pub fn invert_all(
    patterns: &[ExtractedPattern],
    profile: &SurfaceProfile,
    medium: &MediumParams,
    bounds: &SearchBounds,
    cfg: &PsoConfig,
    system: GprSystem,
    time_window: f64,
) -> Result<Vec<Result<PatternFit, InversionError>>, InversionError> {
    if patterns.is_empty() {
        return Err(InversionError::NoPatterns);
    }
    Ok(patterns
        .iter()
        .enumerate()
        .map(|(k, pattern)| {
            if pattern.is_empty() {
                return Err(InversionError::EmptyPattern);
            }
            let cfg = PsoConfig {
                seed: cfg.seed.wrapping_add(k as u64),
                ..*cfg
            };
            let start = Instant::now();
            let estimate = match system {
                GprSystem::Wb => pso_minimize(
                    |cand| {
                        cost_wb(pattern, cand, medium, time_window).expect("non-empty pattern")
                    },
                    bounds,
                    &cfg,
                )?,
                GprSystem::Ahf => pso_minimize(
                    |cand| {
                        cost_ahf(pattern, profile, cand, medium, time_window)
                            .expect("non-empty pattern")
                    },
                    bounds,
                    &cfg,
                )?,
            };
            Ok(PatternFit {
                estimate,
                wall_time: start.elapsed(),
            })
        })
        .collect())
}
