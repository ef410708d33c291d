//! Round trip with the constant-height system over a 0.21 m deep valley:
//! the inversion has to re-derive the air-soil crossing for every candidate,
//! so the surface shape enters the cost function directly.
//!
//!     cargo run --example ahf_over_valley

use std::path::Path;

use rootradar::forward::{synthesize_bscan, AcquisitionConfig, MediumParams, Scene, TargetParams};
use rootradar::geometry::{build_ahf_track, build_surface, GprSystem};
use rootradar::inversion::{invert_all, PsoConfig, SearchBounds};
use rootradar::io::load_surface_csv;
use rootradar::preprocess::{svd_background_removal, time_gain, time_zero_correct};
use rootradar::roi::{binarize, c3_cluster, pick_travel_times};

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/surface_s2.csv");
    let raw = load_surface_csv(&path).expect("bundled surface");
    let profile = build_surface(&raw, 0.001).expect("profile");
    let track = build_ahf_track(0.12, 1.80, 0.02).expect("track");
    let medium = MediumParams::new(6.02);
    let truth = TargetParams::new(1.0, 0.5, 0.1);
    println!(
        "constant-height survey, {} A-scans, surface relief {:.2} m",
        track.len(),
        profile.max_depth() - profile.min_depth()
    );

    let scene = Scene {
        surface: profile.clone(),
        targets: vec![truth],
    };
    let gram = synthesize_bscan(&scene, &track, &medium, &AcquisitionConfig::default(), 0);
    let step = time_zero_correct(&gram, 0.05).expect("time zero");
    let step = time_gain(&step, 1.0).expect("gain");
    let conditioned = svd_background_removal(&step, 1, 0).expect("svd");
    let mask = binarize(&conditioned, 0.3).expect("mask");
    let regions = c3_cluster(&mask, 2, 1, 50).expect("clustering");
    let patterns: Vec<_> = regions
        .iter()
        .map(|r| pick_travel_times(r, &conditioned, &track, 2.2508e-10).expect("picks"))
        .collect();

    let window = gram.time_window();
    let bounds = SearchBounds::defaults(&track, &profile, &medium, window);
    let cfg = PsoConfig {
        seed: 42,
        ..PsoConfig::default()
    };
    let fits = invert_all(
        &patterns, &profile, &medium, &bounds, &cfg, GprSystem::Ahf, window,
    )
    .expect("inversion");
    for fit in fits.into_iter().flatten() {
        let e = fit.estimate;
        println!(
            "estimate ({:.3}, {:.3}) m radius {:.3} m after {} iterations in {:.2} s",
            e.x_c,
            e.y_c,
            e.radius,
            e.iterations,
            fit.wall_time.as_secs_f64()
        );
        println!(
            "errors   ({:.4}, {:.4}) m center, {:.4} m radius",
            (e.x_c - truth.x_c).abs(),
            (e.y_c - truth.y_c).abs(),
            (e.radius - truth.radius).abs()
        );
    }
}
