//! Compares the two travel-time models over an undulating surface: the
//! wheel-based antennas ride the ground, the constant-height antennas fly at
//! the reference height and split each ray into an air leg and a soil leg.
//!
//!     cargo run --example travel_time_models

use rootradar::forward::{depth_resolution, travel_time_ahf, travel_time_wb, MediumParams, TargetParams};
use rootradar::geometry::{build_surface, surface_intersection, Point};

fn main() {
    // One valley, 0.21 m deep, with a root centered below it.
    let raw: Vec<(f64, f64)> = (0..=200)
        .map(|i| {
            let x = i as f64 * 0.01;
            let y = if (0.24..=1.36).contains(&x) {
                0.01 + 0.105 * (1.0 - (2.0 * std::f64::consts::PI * (x - 0.24) / 1.12).cos())
            } else {
                0.01
            };
            (x, y)
        })
        .collect();
    let profile = build_surface(&raw, 0.001).expect("profile");
    let target = TargetParams::new(1.0, 0.5, 0.1);
    let medium = MediumParams::new(6.02);

    println!("root at ({}, {}) m, radius {} m, soil permittivity {}", target.x_c, target.y_c, target.radius, medium.eps);
    println!("\n  x_a      WB (ns)   AHF (ns)   air-soil crossing");
    for k in 0..=10 {
        let x = 0.4 + 0.12 * k as f64;
        let wb_antenna = Point::new(x, profile.height_at(x).unwrap());
        let ahf_antenna = Point::new(x, 0.0);
        let t_wb = travel_time_wb(wb_antenna, &target, &medium).unwrap();
        let t_ahf = travel_time_ahf(&profile, ahf_antenna, &target, &medium).unwrap();
        let g = surface_intersection(&profile, ahf_antenna, target.center()).unwrap();
        println!(
            "  {x:>4.2}   {:>8.3}   {:>8.3}   ({:.3}, {:.3})",
            t_wb * 1e9,
            t_ahf * 1e9,
            g.x,
            g.y
        );
    }

    println!(
        "\ndepth resolution of a 3 GHz band in this soil: {:.4} m",
        depth_resolution(3.0e9, medium.eps)
    );
}
