//! Builds the scene geometry for one of the bundled scenarios: the surface
//! profile, its arc-length parameterization, and the antenna tracks of both
//! acquisition systems.
//!
//!     cargo run --example surface_and_tracks

use std::path::Path;

use rootradar::geometry::{arc_length_map, build_ahf_track, build_surface, build_wb_track};
use rootradar::io::load_surface_csv;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/surface_s2.csv");
    let raw = load_surface_csv(&path).expect("bundled surface");
    let profile = build_surface(&raw, 0.001).expect("valid profile");

    let (x0, x1) = profile.x_extent();
    println!("surface: {} raw knots over x = [{x0}, {x1}] m", profile.knots().len());
    println!(
        "         depth range [{:.3}, {:.3}] m below the reference height",
        profile.min_depth(),
        profile.max_depth()
    );

    let map = arc_length_map(&profile, 10_000).expect("arc table");
    println!(
        "arc length of the scan path: {:.4} m (straight-line extent {:.2} m)",
        map.total_length,
        x1 - x0
    );

    let wb = build_wb_track(&map, 0.02).expect("wheel-based track");
    let ahf = build_ahf_track(0.12, 1.80, 0.02).expect("constant-height track");
    println!("wheel-based track:     {} A-scans at 0.02 m along the surface", wb.len());
    println!("constant-height track: {} A-scans at 0.02 m along x", ahf.len());

    println!("\nfirst wheel-based antenna positions (traveled s -> scene x, y):");
    for (k, p) in wb.positions.iter().take(8).enumerate() {
        println!("  s = {:>4.2} m -> ({:.4}, {:.4})", k as f64 * 0.02, p.x, p.y);
    }
}
