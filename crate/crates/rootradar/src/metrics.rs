//! Estimate quality metrics: center and radius errors plus a dimensionless
//! shape-discrepancy number, collected into a per-target report.

use std::fmt;

use thiserror::Error;

use crate::forward::TargetParams;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("cannot pair {estimates} estimates with {truths} truths (unpaired {side} indices: {unpaired:?})")]
    UnmatchedCounts {
        estimates: usize,
        truths: usize,
        side: &'static str,
        unpaired: Vec<usize>,
    },
    #[error("timings length {timings} does not match estimates length {estimates}")]
    TimingMismatch { timings: usize, estimates: usize },
    #[error("radii must be positive")]
    NonPositiveRadius,
}

/// Area of the intersection of two disks with center distance `d`.
fn lens_area(r1: f64, r2: f64, d: f64) -> f64 {
    if d >= r1 + r2 {
        return 0.0;
    }
    let small = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return std::f64::consts::PI * small * small;
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0);
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0);
    let tri = 0.5
        * ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
            .max(0.0)
            .sqrt();
    r1 * r1 * a1.acos() + r2 * r2 * a2.acos() - tri
}

/// Shape discrepancy between an estimated and a true disk: the area of their
/// symmetric difference divided by the area of the true disk. Zero for
/// identical disks; 2 for disjoint equal-radius disks.
pub fn shape_discrepancy(est: &TargetParams, truth: &TargetParams) -> f64 {
    let d = est.center().distance(&truth.center());
    let (r1, r2) = (est.radius, truth.radius);
    let inter = lens_area(r1, r2, d);
    let sym = std::f64::consts::PI * (r1 * r1 + r2 * r2) - 2.0 * inter;
    sym / (std::f64::consts::PI * r2 * r2)
}

/// Per-target row of an evaluation report.
#[derive(Debug, Clone)]
pub struct TargetReport {
    /// Index of the matched truth target.
    pub target_id: usize,
    pub center_error: f64,
    pub radius_error: f64,
    pub shape_discrepancy: f64,
    pub wall_time_s: f64,
}

/// Evaluation of a set of estimates against ground truth.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub targets: Vec<TargetReport>,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("target_id,center_error_m,radius_error_m,shape_discrepancy,wall_time_s\n");
        for t in &self.targets {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.target_id, t.center_error, t.radius_error, t.shape_discrepancy, t.wall_time_s
            ));
        }
        out
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6}  {:>14}  {:>14}  {:>12}  {:>10}",
            "target", "center err (m)", "radius err (m)", "shape disc", "time (s)"
        )?;
        for t in &self.targets {
            writeln!(
                f,
                "{:>6}  {:>14.4}  {:>14.4}  {:>12.4}  {:>10.2}",
                t.target_id, t.center_error, t.radius_error, t.shape_discrepancy, t.wall_time_s
            )?;
        }
        Ok(())
    }
}

/// Pairs estimates with truths by nearest center (greedy over the globally
/// closest pairs, which makes the result independent of input order) and
/// tabulates errors. `timings` are seconds per estimate, aligned with
/// `estimates`.
pub fn report(
    estimates: &[TargetParams],
    truths: &[TargetParams],
    timings: &[f64],
) -> Result<EvalReport, MetricsError> {
    if estimates.len() != truths.len() {
        let (side, unpaired) = if estimates.len() > truths.len() {
            ("estimate", (truths.len()..estimates.len()).collect())
        } else {
            ("truth", (estimates.len()..truths.len()).collect())
        };
        return Err(MetricsError::UnmatchedCounts {
            estimates: estimates.len(),
            truths: truths.len(),
            side,
            unpaired,
        });
    }
    if timings.len() != estimates.len() {
        return Err(MetricsError::TimingMismatch {
            timings: timings.len(),
            estimates: estimates.len(),
        });
    }
    if estimates
        .iter()
        .chain(truths.iter())
        .any(|t| t.radius <= 0.0)
    {
        return Err(MetricsError::NonPositiveRadius);
    }

    let n = estimates.len();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, est) in estimates.iter().enumerate() {
        for (j, truth) in truths.iter().enumerate() {
            pairs.push((est.center().distance(&truth.center()), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut est_used = vec![false; n];
    let mut truth_used = vec![false; n];
    let mut matched: Vec<(usize, usize)> = Vec::with_capacity(n);
    for (_, i, j) in pairs {
        if !est_used[i] && !truth_used[j] {
            est_used[i] = true;
            truth_used[j] = true;
            matched.push((i, j));
        }
    }

    matched.sort_by_key(|&(_, j)| j);
    let targets = matched
        .into_iter()
        .map(|(i, j)| TargetReport {
            target_id: j,
            center_error: estimates[i].center().distance(&truths[j].center()),
            radius_error: (estimates[i].radius - truths[j].radius).abs(),
            shape_discrepancy: shape_discrepancy(&estimates[i], &truths[j]),
            wall_time_s: timings[i],
        })
        .collect();
    Ok(EvalReport { targets })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_disks_have_zero_discrepancy() {
        let t = TargetParams::new(1.0, 0.5, 0.1);
        assert!(shape_discrepancy(&t, &t).abs() < 1e-12);
    }

    #[test]
    fn disjoint_equal_disks_score_two() {
        let a = TargetParams::new(0.0, 0.5, 0.1);
        let b = TargetParams::new(1.0, 0.5, 0.1);
        assert!((shape_discrepancy(&a, &b) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn concentric_double_radius_scores_three() {
        let truth = TargetParams::new(1.0, 0.5, 0.1);
        let est = TargetParams::new(1.0, 0.5, 0.2);
        assert!((shape_discrepancy(&est, &truth) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn discrepancy_positive_unless_identical() {
        let truth = TargetParams::new(1.0, 0.5, 0.1);
        for (dx, dr) in [(0.001, 0.0), (0.0, 0.001), (0.05, -0.02)] {
            let est = TargetParams::new(1.0 + dx, 0.5, 0.1 + dr);
            assert!(shape_discrepancy(&est, &truth) > 0.0);
        }
    }

    #[test]
    fn swapping_arguments_scales_by_area_ratio() {
        let a = TargetParams::new(0.3, 0.4, 0.08);
        let b = TargetParams::new(0.35, 0.45, 0.12);
        let ab = shape_discrepancy(&a, &b);
        let ba = shape_discrepancy(&b, &a);
        let ratio = (b.radius * b.radius) / (a.radius * a.radius);
        assert!((ba - ab * ratio).abs() < 1e-12);
    }

    #[test]
    fn discrepancy_decreases_toward_truth_center() {
        let truth = TargetParams::new(1.0, 0.5, 0.1);
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let d = 0.4 * (1.0 - k as f64 / 20.0);
            let est = TargetParams::new(1.0 + d, 0.5, 0.1);
            let s = shape_discrepancy(&est, &truth);
            assert!(s <= prev + 1e-12, "not monotone at offset {d}");
            prev = s;
        }
    }

    #[test]
    fn perfect_estimates_report_zero_errors() {
        let truths = vec![
            TargetParams::new(0.5, 0.25, 0.15),
            TargetParams::new(1.0, 0.5, 0.1),
        ];
        let rep = report(&truths, &truths, &[1.0, 2.0]).unwrap();
        for t in &rep.targets {
            assert!(t.center_error < 1e-12);
            assert!(t.radius_error < 1e-12);
            assert!(t.shape_discrepancy < 1e-12);
        }
    }

    #[test]
    fn field_root_pair_errors() {
        // Truth (0.55, 0.50, 0.031) vs estimate (0.55, 0.51, 0.030):
        // 0.010 m center error and 0.001 m radius error.
        let truth = TargetParams::new(0.55, 0.50, 0.031);
        let est = TargetParams::new(0.55, 0.51, 0.030);
        let rep = report(&[est], &[truth], &[0.0]).unwrap();
        assert!((rep.targets[0].center_error - 0.010).abs() < 1e-12);
        assert!((rep.targets[0].radius_error - 0.001).abs() < 1e-12);
    }

    #[test]
    fn matching_is_order_invariant() {
        let truths = vec![
            TargetParams::new(0.5, 0.25, 0.15),
            TargetParams::new(1.0, 0.5, 0.1),
            TargetParams::new(1.5, 0.4, 0.08),
        ];
        let estimates = vec![
            TargetParams::new(0.51, 0.23, 0.145),
            TargetParams::new(0.99, 0.52, 0.085),
            TargetParams::new(1.51, 0.42, 0.086),
        ];
        let forward = report(&estimates, &truths, &[0.0; 3]).unwrap();
        let shuffled = vec![estimates[2], estimates[0], estimates[1]];
        let reordered = report(&shuffled, &truths, &[0.0; 3]).unwrap();
        for (a, b) in forward.targets.iter().zip(&reordered.targets) {
            assert_eq!(a.target_id, b.target_id);
            assert!((a.center_error - b.center_error).abs() < 1e-15);
            assert!((a.radius_error - b.radius_error).abs() < 1e-15);
        }
    }

    #[test]
    fn unmatched_counts_are_rejected() {
        let truths = vec![
            TargetParams::new(0.5, 0.25, 0.15),
            TargetParams::new(1.0, 0.5, 0.1),
        ];
        let estimates = vec![TargetParams::new(0.5, 0.25, 0.15)];
        let err = report(&estimates, &truths, &[0.0]).unwrap_err();
        match err {
            MetricsError::UnmatchedCounts { unpaired, .. } => assert_eq!(unpaired, vec![1]),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn csv_report_has_header_and_rows() {
        let truth = TargetParams::new(1.0, 0.5, 0.1);
        let rep = report(&[truth], &[truth], &[3.5]).unwrap();
        let csv = rep.to_csv();
        assert!(csv.starts_with("target_id,center_error_m"));
        assert_eq!(csv.lines().count(), 2);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn disk() -> impl Strategy<Value = TargetParams> {
            (0.0f64..2.0, 0.0f64..1.0, 0.01f64..0.3)
                .prop_map(|(x, y, r)| TargetParams::new(x, y, r))
        }

        proptest! {
            #[test]
            fn discrepancy_nonnegative_and_zero_iff_identical(a in disk(), b in disk()) {
                let s = shape_discrepancy(&a, &b);
                prop_assert!(s >= -1e-12);
                if a == b {
                    prop_assert!(s.abs() < 1e-12);
                }
                prop_assert!(shape_discrepancy(&a, &a).abs() < 1e-12);
            }

            #[test]
            fn swapping_scales_by_area_ratio(a in disk(), b in disk()) {
                let ab = shape_discrepancy(&a, &b);
                let ba = shape_discrepancy(&b, &a);
                let ratio = (b.radius / a.radius).powi(2);
                prop_assert!((ba - ab * ratio).abs() <= 1e-9 * (1.0 + ba.abs()));
            }

            #[test]
            fn bounded_by_disjoint_value(a in disk(), b in disk()) {
                // The symmetric difference can never exceed the two full disks.
                let s = shape_discrepancy(&a, &b);
                let disjoint = (a.radius * a.radius + b.radius * b.radius)
                    / (b.radius * b.radius);
                prop_assert!(s <= disjoint + 1e-12);
            }
        }
    }
}
