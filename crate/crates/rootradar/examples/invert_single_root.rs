//! Full in-memory round trip for one root under a swell, wheel-based
//! survey: synthesize, condition, extract, and fit, then compare against the
//! generating target.
//!
//!     cargo run --example invert_single_root

use rootradar::forward::{synthesize_bscan, AcquisitionConfig, MediumParams, Scene, TargetParams};
use rootradar::geometry::{arc_length_map, build_surface, build_wb_track, GprSystem};
use rootradar::inversion::{invert_all, PsoConfig, SearchBounds};
use rootradar::preprocess::{svd_background_removal, time_gain, time_zero_correct};
use rootradar::roi::{binarize, c3_cluster, pick_travel_times};

fn main() {
    let raw: Vec<(f64, f64)> = (0..=170)
        .map(|i| {
            let x = i as f64 * 0.01;
            (x, 0.01 + 0.05 * (1.0 - (2.0 * std::f64::consts::PI * x / 1.7).cos()))
        })
        .collect();
    let profile = build_surface(&raw, 0.001).expect("profile");
    let map = arc_length_map(&profile, 10_000).expect("arc table");
    let track = build_wb_track(&map, 0.02).expect("track");
    let medium = MediumParams::new(6.02);
    let truth = TargetParams::new(1.0, 0.5, 0.1);
    let scene = Scene {
        surface: profile.clone(),
        targets: vec![truth],
    };
    let acq = AcquisitionConfig::default();
    let gram = synthesize_bscan(&scene, &track, &medium, &acq, 7);

    let step = time_zero_correct(&gram, 0.05).expect("time zero");
    let step = time_gain(&step, 1.0).expect("gain");
    let conditioned = svd_background_removal(&step, 1, 0).expect("svd");

    let mask = binarize(&conditioned, 0.3).expect("mask");
    let regions = c3_cluster(&mask, 2, 1, 50).expect("clustering");
    let patterns: Vec<_> = regions
        .iter()
        .map(|r| pick_travel_times(r, &conditioned, &track, 2.2508e-10).expect("picks"))
        .collect();
    println!("{} region(s) extracted", patterns.len());

    let window = gram.time_window();
    let bounds = SearchBounds::defaults(&track, &profile, &medium, window);
    let cfg = PsoConfig {
        seed: 42,
        ..PsoConfig::default()
    };
    let fits = invert_all(
        &patterns, &profile, &medium, &bounds, &cfg, GprSystem::Wb, window,
    )
    .expect("inversion");

    for fit in fits.into_iter().flatten() {
        let e = fit.estimate;
        println!(
            "truth    ({:.3}, {:.3}) m, radius {:.3} m",
            truth.x_c, truth.y_c, truth.radius
        );
        println!(
            "estimate ({:.3}, {:.3}) m, radius {:.3} m   cost {:.3e} s^2, {} iterations, {:.3} s",
            e.x_c,
            e.y_c,
            e.radius,
            e.final_cost,
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
