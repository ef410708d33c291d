//! Sensitivity of the fit to travel-time noise: patterns are generated from
//! the forward model, perturbed with Gaussian noise of increasing strength,
//! and inverted; each row reports the median error over 20 seeds.
//!
//!     cargo run --release --example noise_sweep

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use rootradar::forward::{travel_time_wb, MediumParams, TargetParams};
use rootradar::geometry::{arc_length_map, build_surface, build_wb_track};
use rootradar::inversion::{cost_wb, pso_minimize, PsoConfig, SearchBounds};
use rootradar::metrics::shape_discrepancy;
use rootradar::roi::{ExtractedPattern, Observation};

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
    let window = 30e-9;
    let bounds = SearchBounds::defaults(&track, &profile, &medium, window);

    println!("sigma (ns)   median center err (m)   median radius err (m)   median shape disc");
    for sigma_ns in [0.0, 0.05, 0.1, 0.2, 0.4] {
        let mut center = Vec::new();
        let mut radius = Vec::new();
        let mut shape = Vec::new();
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noise = Normal::new(0.0, sigma_ns * 1e-9).unwrap();
            let observations: Vec<Observation> = track
                .positions
                .iter()
                .map(|p| Observation {
                    x_a: p.x,
                    y_a: p.y,
                    travel_time: travel_time_wb(*p, &truth, &medium).unwrap()
                        + if sigma_ns > 0.0 { noise.sample(&mut rng) } else { 0.0 },
                })
                .collect();
            let pattern = ExtractedPattern::from_observations(observations);
            let cfg = PsoConfig {
                seed,
                ..PsoConfig::default()
            };
            let est = pso_minimize(
                |cand| cost_wb(&pattern, cand, &medium, window).unwrap(),
                &bounds,
                &cfg,
            )
            .expect("fit");
            center.push((est.x_c - truth.x_c).hypot(est.y_c - truth.y_c));
            radius.push((est.radius - truth.radius).abs());
            shape.push(shape_discrepancy(&est.target(), &truth));
        }
        let median = |v: &mut Vec<f64>| {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            v[v.len() / 2]
        };
        println!(
            "{sigma_ns:>9.2}   {:>21.4}   {:>21.4}   {:>17.4}",
            median(&mut center),
            median(&mut radius),
            median(&mut shape)
        );
    }
}
