//! rootradar — positioning and sizing of buried cylindrical targets (tree
//! roots) from common-offset GPR B-scans recorded over non-flat ground.
//!
//! Flat-ground GPR processing reads target positions off hyperbolic
//! reflection patterns. Over undulating terrain the patterns deform and that
//! shortcut breaks down; this crate instead fits a travel-time model that
//! carries the measured surface shape through every step. It supports two
//! acquisition styles: a wheel-based system whose antennas follow the ground
//! (WB) and an antenna-height-fixed system moved at a constant reference
//! height (AHF).
//!
//! The pipeline stages are:
//!
//! 1. **geometry** — scene coordinates, surface profile, arc-length
//!    conversion of wheel-traveled distance to antenna positions, and
//!    ray–surface intersections.
//! 2. **forward** — two-way travel-time models for both systems, depth
//!    resolution, and a synthetic B-scan generator used as the verification
//!    oracle.
//! 3. **preprocess** — time-zero correction, zero-phase band-pass, DC
//!    removal, time gain, and SVD clutter removal.
//! 4. **roi** — binarization, column-connection clustering into per-target
//!    regions, and travel-time picking.
//! 5. **inversion** — travel-time misfit cost functions minimized by a
//!    bounded particle swarm over (x_c, y_c, R).
//! 6. **metrics** — center/radius errors and a shape-discrepancy number.
//! 7. **io / cli** — session files, CSV/TOML artifacts, PGM heatmaps, and
//!    the stage-by-stage command-line pipeline.
//!
//! Everything is deterministic for a fixed seed, and all values are plain
//! immutable data, safe to share across threads.
//!
//! See the `examples/` directory for one runnable program per capability;
//! `rootradar --help` describes the CLI.

pub mod cli;
pub mod forward;
pub mod geometry;
pub mod inversion;
pub mod io;
pub mod metrics;
pub mod preprocess;
pub mod roi;

pub use forward::{
    depth_resolution, synthesize_bscan, travel_time_ahf, travel_time_wb, AcquisitionConfig,
    MediumParams, Scene, TargetParams, SPEED_OF_LIGHT,
};
pub use geometry::{
    arc_length_map, build_ahf_track, build_surface, build_wb_track, locate_wb_antenna,
    surface_intersection, AntennaTrack, ArcLengthMap, GprSystem, Point, SurfaceProfile,
};
pub use inversion::{
    cost_ahf, cost_wb, invert_all, pso_minimize, pso_minimize_traced, PatternFit, PsoConfig,
    RootEstimate, SearchBounds,
};
pub use metrics::{report, shape_discrepancy, EvalReport};
pub use preprocess::{
    bandpass, dc_remove, svd_background_removal, time_gain, time_zero_correct, Radargram,
};
pub use roi::{binarize, c3_cluster, pick_travel_times, ExtractedPattern, Observation, Region};
