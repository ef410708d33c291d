//! Synthesizes a B-scan for a two-root scene and writes it out as CSV plus a
//! PGM heatmap.
//!
//!     cargo run --example synthesize_bscan

use rootradar::forward::{synthesize_bscan, AcquisitionConfig, MediumParams, Scene, TargetParams};
use rootradar::geometry::{arc_length_map, build_surface, build_wb_track};
use rootradar::io::{render_heatmap, save_bscan};

fn main() {
    let raw: Vec<(f64, f64)> = (0..=200)
        .map(|i| {
            let x = i as f64 * 0.01;
            (x, 0.02 + 0.04 * (1.0 - (std::f64::consts::PI * x).cos()))
        })
        .collect();
    let surface = build_surface(&raw, 0.001).expect("profile");
    let map = arc_length_map(&surface, 10_000).expect("arc table");
    let track = build_wb_track(&map, 0.02).expect("track");

    let scene = Scene {
        surface,
        targets: vec![
            TargetParams::new(0.7, 0.35, 0.12),
            TargetParams::new(1.4, 0.55, 0.06),
        ],
    };
    let acq = AcquisitionConfig {
        noise_sigma: 0.002,
        ..AcquisitionConfig::default()
    };
    let gram = synthesize_bscan(&scene, &track, &MediumParams::new(6.02), &acq, 42);

    let dir = std::env::temp_dir().join("rootradar_synthesize_bscan");
    std::fs::create_dir_all(&dir).expect("output dir");
    let csv = dir.join("bscan.csv");
    let pgm = dir.join("bscan.pgm");
    save_bscan(&csv, &gram).expect("write csv");
    render_heatmap(&gram, &pgm).expect("write heatmap");

    println!(
        "synthesized {} traces x {} samples ({} ns window)",
        gram.n_traces(),
        gram.n_samples(),
        gram.time_window() * 1e9
    );
    println!("wrote {}", csv.display());
    println!("wrote {}", pgm.display());
}
