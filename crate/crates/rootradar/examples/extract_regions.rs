//! Region extraction on a three-root scene: binarize the conditioned B-scan,
//! cluster the mask by column connection, and pick one travel time per
//! A-scan in each region.
//!
//!     cargo run --example extract_regions

use rootradar::forward::{synthesize_bscan, AcquisitionConfig, MediumParams, Scene, TargetParams};
use rootradar::geometry::{arc_length_map, build_surface, build_wb_track};
use rootradar::preprocess::{svd_background_removal, time_gain, time_zero_correct};
use rootradar::roi::{binarize, c3_cluster, pick_travel_times};

fn main() {
    let surface = build_surface(&[(0.0, 0.01), (2.0, 0.01)], 0.001).expect("profile");
    let map = arc_length_map(&surface, 10_000).expect("arc table");
    let track = build_wb_track(&map, 0.02).expect("track");
    let medium = MediumParams::new(6.02);
    let scene = Scene {
        surface,
        targets: vec![
            TargetParams::new(0.5, 0.25, 0.15),
            TargetParams::new(1.0, 0.5, 0.1),
            TargetParams::new(1.5, 0.4, 0.08),
        ],
    };
    let acq = AcquisitionConfig::default();
    let gram = synthesize_bscan(&scene, &track, &medium, &acq, 0);

    let step = time_zero_correct(&gram, 0.05).expect("time zero");
    let step = time_gain(&step, 1.0).expect("gain");
    let conditioned = svd_background_removal(&step, 1, 0).expect("svd");

    let mask = binarize(&conditioned, 0.3).expect("mask");
    let lit = mask.iter().filter(|&&b| b).count();
    println!(
        "mask: {} of {} pixels above 30% of the global maximum",
        lit,
        mask.nrows() * mask.ncols()
    );

    let regions = c3_cluster(&mask, 2, 1, 50).expect("clustering");
    println!("regions: {}", regions.len());
    for (k, region) in regions.iter().enumerate() {
        let pattern =
            pick_travel_times(region, &conditioned, &track, 2.2508e-10).expect("picks");
        let t_min = pattern
            .observations
            .iter()
            .map(|o| o.travel_time)
            .fold(f64::INFINITY, f64::min);
        println!(
            "  region {k}: columns {:?}, {} px, {} picks, earliest arrival {:.2} ns",
            region.column_span,
            region.pixel_count,
            pattern.len(),
            t_min * 1e9
        );
    }
}
