//! Scene geometry: the 2-D survey coordinate system, the recorded air–soil
//! interface, arc-length parameterization of the scan path, and ray–surface
//! intersections.
//!
//! The coordinate convention is shared by every module downstream: `x` runs
//! horizontally along the scan line, `y` is the vertical distance measured
//! *downward* from the reference height `H_0`, so depths come out positive.
//! The start of the constant-height scan is the scene origin `(0, 0)`.

use thiserror::Error;

/// Errors raised by geometry construction and queries.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("surface needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("surface x coordinates must be strictly increasing (violation at index {0})")]
    NonMonotonicX(usize),
    #[error("surface y must be >= 0 (the surface lies at or below H_0), got {0} at index {1}")]
    NegativeY(f64, usize),
    #[error("surface must start at x = 0, got x = {0}")]
    FirstPointNotOrigin(f64),
    #[error("resolution must be positive and finite, got {0}")]
    BadResolution(f64),
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("need at least 2 arc-length samples, got {0}")]
    TooFewSamples(usize),
    #[error("traveled distance {s} outside [0, {total}]")]
    DistanceOutOfRange { s: f64, total: f64 },
    #[error("step must be positive, got {0}")]
    BadStep(f64),
    #[error("track range [{0}, {1}] produces no positions")]
    EmptyTrack(f64, f64),
}

/// A point in scene coordinates (meters; y positive downward from `H_0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Which acquisition system produced a track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GprSystem {
    /// Wheel-based, ground-coupled: antennas follow the surface.
    Wb,
    /// Antenna-height-fixed, air-coupled: antennas ride at `H_0` (y = 0).
    Ahf,
}

impl std::fmt::Display for GprSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GprSystem::Wb => write!(f, "WB"),
            GprSystem::Ahf => write!(f, "AHF"),
        }
    }
}

/// The air–soil interface as a densely sampled planar curve.
///
/// The curve is single-valued in `x` (the recording procedure measures
/// vertical distance from `H_0`, so overhangs cannot occur). `points` holds
/// the densified polyline with abscissa spacing at most `resolution`; the
/// raw survey knots are kept separately because the densification is
/// piecewise-linear and therefore geometrically identical to the knot
/// polyline.
#[derive(Debug, Clone)]
pub struct SurfaceProfile {
    /// Densified points; consecutive x spacing <= `resolution`.
    pub points: Vec<Point>,
    /// Target abscissa spacing of the densification, meters.
    pub resolution: f64,
    raw: Vec<Point>,
}

impl SurfaceProfile {
    /// First and last abscissa of the profile.
    pub fn x_extent(&self) -> (f64, f64) {
        (self.raw[0].x, self.raw[self.raw.len() - 1].x)
    }

    /// Largest depth of the surface below `H_0`.
    pub fn max_depth(&self) -> f64 {
        self.raw.iter().map(|p| p.y).fold(0.0, f64::max)
    }

    /// Smallest depth of the surface below `H_0`.
    pub fn min_depth(&self) -> f64 {
        self.raw.iter().map(|p| p.y).fold(f64::INFINITY, f64::min)
    }

    /// The raw survey knots the profile was built from.
    pub fn knots(&self) -> &[Point] {
        &self.raw
    }

    /// Surface depth at abscissa `x` by linear interpolation, `None` outside
    /// the profile extent.
    pub fn height_at(&self, x: f64) -> Option<f64> {
        let (x0, x1) = self.x_extent();
        if x < x0 - 1e-12 || x > x1 + 1e-12 {
            return None;
        }
        let x = x.clamp(x0, x1);
        // Index of the first knot with knot.x > x.
        let i = self.raw.partition_point(|p| p.x <= x);
        if i == 0 {
            return Some(self.raw[0].y);
        }
        if i == self.raw.len() {
            return Some(self.raw[self.raw.len() - 1].y);
        }
        let a = self.raw[i - 1];
        let b = self.raw[i];
        let t = (x - a.x) / (b.x - a.x);
        Some(a.y + t * (b.y - a.y))
    }
}

/// Builds the densified surface from raw survey points.
///
/// Raw points are reproduced exactly at their x positions; the curve is
/// piecewise-linear between them with abscissa spacing at most `resolution`.
pub fn build_surface(
    raw_points: &[(f64, f64)],
    resolution: f64,
) -> Result<SurfaceProfile, GeometryError> {
    if raw_points.len() < 2 {
        return Err(GeometryError::TooFewPoints(raw_points.len()));
    }
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(GeometryError::BadResolution(resolution));
    }
    for (i, &(x, y)) in raw_points.iter().enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::NonFinite(i));
        }
        if y < 0.0 {
            return Err(GeometryError::NegativeY(y, i));
        }
        if i > 0 && x <= raw_points[i - 1].0 {
            return Err(GeometryError::NonMonotonicX(i));
        }
    }
    if raw_points[0].0.abs() > 1e-9 {
        return Err(GeometryError::FirstPointNotOrigin(raw_points[0].0));
    }

    let raw: Vec<Point> = raw_points.iter().map(|&(x, y)| Point::new(x, y)).collect();
    let mut points = Vec::new();
    for w in raw.windows(2) {
        let (a, b) = (w[0], w[1]);
        let steps = ((b.x - a.x) / resolution).ceil().max(1.0) as usize;
        for j in 0..steps {
            let t = j as f64 / steps as f64;
            points.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    points.push(raw[raw.len() - 1]);

    Ok(SurfaceProfile {
        points,
        resolution,
        raw,
    })
}

/// Natural cubic spline over uniformly spaced knots (knot i at parameter i).
#[derive(Debug, Clone)]
struct UniformSpline {
    values: Vec<f64>,
    // Second derivatives at knots; natural boundary (zero at the ends).
    second: Vec<f64>,
}

impl UniformSpline {
    fn fit(values: &[f64]) -> Self {
        let n = values.len();
        let mut second = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the tridiagonal system 1, 4, 1.
            let m = n - 2;
            let mut diag = vec![4.0; m];
            let mut rhs: Vec<f64> = (0..m)
                .map(|i| 6.0 * (values[i] - 2.0 * values[i + 1] + values[i + 2]))
                .collect();
            for i in 1..m {
                let w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - second[i + 2]) / diag[i];
            }
        }
        Self {
            values: values.to_vec(),
            second,
        }
    }

    /// Evaluates at parameter t in [0, n-1].
    fn eval(&self, t: f64) -> f64 {
        let n = self.values.len();
        let t = t.clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let u = t - i as f64;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let b = (y1 - y0) - (2.0 * m0 + m1) / 6.0;
        y0 + u * (b + u * (m0 / 2.0 + u * (m1 - m0) / 6.0))
    }
}

/// One row of the arc-length table: curve parameter `u`, cumulative length
/// `s`, and the curve point.
#[derive(Debug, Clone, Copy)]
pub struct ArcSample {
    pub u: f64,
    pub s: f64,
    pub x: f64,
    pub y: f64,
}

/// Arc-length parameterization of a surface profile.
///
/// The curve S(u) = (x(u), y(u)), u in [0, 1], is a cubic spline through the
/// densified profile points; `samples` tabulates the cumulative chord length
/// so that s and u can be converted both ways by monotone interpolation.
#[derive(Debug, Clone)]
pub struct ArcLengthMap {
    pub samples: Vec<ArcSample>,
    pub total_length: f64,
    spline_x: UniformSpline,
    spline_y: UniformSpline,
    knot_count: usize,
}

/// Tabulates cumulative arc length over a spline fit of the profile.
pub fn arc_length_map(
    profile: &SurfaceProfile,
    n_samples: usize,
) -> Result<ArcLengthMap, GeometryError> {
    if n_samples < 2 {
        return Err(GeometryError::TooFewSamples(n_samples));
    }
    let xs: Vec<f64> = profile.points.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = profile.points.iter().map(|p| p.y).collect();
    let spline_x = UniformSpline::fit(&xs);
    let spline_y = UniformSpline::fit(&ys);
    let knot_count = xs.len();

    let t_max = (knot_count - 1) as f64;
    let mut samples = Vec::with_capacity(n_samples);
    let mut s = 0.0;
    let mut prev = Point::new(spline_x.eval(0.0), spline_y.eval(0.0));
    samples.push(ArcSample {
        u: 0.0,
        s: 0.0,
        x: prev.x,
        y: prev.y,
    });
    for j in 1..n_samples {
        let u = j as f64 / (n_samples - 1) as f64;
        let t = u * t_max;
        let p = Point::new(spline_x.eval(t), spline_y.eval(t));
        s += prev.distance(&p);
        samples.push(ArcSample {
            u,
            s,
            x: p.x,
            y: p.y,
        });
        prev = p;
    }

    Ok(ArcLengthMap {
        total_length: s,
        samples,
        spline_x,
        spline_y,
        knot_count,
    })
}

impl ArcLengthMap {
    /// Evaluates the spline curve S(u).
    pub fn point_at_u(&self, u: f64) -> Point {
        let t = u.clamp(0.0, 1.0) * (self.knot_count - 1) as f64;
        Point::new(self.spline_x.eval(t), self.spline_y.eval(t))
    }
}

/// Antenna position at traveled distance `s` along the surface, by inverse
/// interpolation of the s-u table followed by evaluating S(u).
pub fn locate_wb_antenna(map: &ArcLengthMap, s: f64) -> Result<Point, GeometryError> {
    // Sub-nanometer slack so that k*step hitting total_length survives
    // floating-point accumulation.
    const SLACK: f64 = 1e-9;
    if s < -SLACK || s > map.total_length + SLACK {
        return Err(GeometryError::DistanceOutOfRange {
            s,
            total: map.total_length,
        });
    }
    let s = s.clamp(0.0, map.total_length);
    let i = map
        .samples
        .partition_point(|row| row.s <= s)
        .clamp(1, map.samples.len() - 1);
    let (a, b) = (map.samples[i - 1], map.samples[i]);
    let u = if b.s > a.s {
        a.u + (s - a.s) / (b.s - a.s) * (b.u - a.u)
    } else {
        a.u
    };
    Ok(map.point_at_u(u))
}

/// Ordered antenna positions for one survey.
#[derive(Debug, Clone)]
pub struct AntennaTrack {
    pub system: GprSystem,
    pub positions: Vec<Point>,
    /// Nominal spacing between A-scans: along the traveled path for WB,
    /// along x for AHF.
    pub scan_step: f64,
}

impl AntennaTrack {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Horizontal extent covered by the antennas.
    pub fn x_extent(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.positions {
            lo = lo.min(p.x);
            hi = hi.max(p.x);
        }
        (lo, hi)
    }
}

/// Wheel-based track: positions at s = 0, step, 2*step, ... along the surface.
pub fn build_wb_track(map: &ArcLengthMap, step: f64) -> Result<AntennaTrack, GeometryError> {
    if !(step > 0.0) {
        return Err(GeometryError::BadStep(step));
    }
    let mut positions = Vec::new();
    let mut k = 0u64;
    loop {
        let s = k as f64 * step;
        if s > map.total_length + 1e-9 {
            break;
        }
        positions.push(locate_wb_antenna(map, s)?);
        k += 1;
    }
    if positions.is_empty() {
        return Err(GeometryError::EmptyTrack(0.0, map.total_length));
    }
    Ok(AntennaTrack {
        system: GprSystem::Wb,
        positions,
        scan_step: step,
    })
}

/// Constant-height track: positions at (x, 0) for x = x_start, x_start+step,
/// ..., <= x_end.
pub fn build_ahf_track(
    x_start: f64,
    x_end: f64,
    step: f64,
) -> Result<AntennaTrack, GeometryError> {
    if !(step > 0.0) {
        return Err(GeometryError::BadStep(step));
    }
    let mut positions = Vec::new();
    let mut k = 0u64;
    loop {
        let x = x_start + k as f64 * step;
        if x > x_end + 1e-9 {
            break;
        }
        positions.push(Point::new(x, 0.0));
        k += 1;
    }
    if positions.is_empty() {
        return Err(GeometryError::EmptyTrack(x_start, x_end));
    }
    Ok(AntennaTrack {
        system: GprSystem::Ahf,
        positions,
        scan_step: step,
    })
}

/// First crossing of the straight segment `antenna -> center` with the
/// surface polyline, i.e. the point where a rectilinear ray from a raised
/// antenna enters the soil.
///
/// Returns `None` when the segment never crosses the surface (geometrically
/// infeasible candidate); cost functions turn that into a penalty.
pub fn surface_intersection(
    profile: &SurfaceProfile,
    antenna: Point,
    center: Point,
) -> Option<Point> {
    let knots = profile.knots();
    let (lo, hi) = if antenna.x <= center.x {
        (antenna.x, center.x)
    } else {
        (center.x, antenna.x)
    };
    // Knot segments whose x-range can touch [lo, hi].
    let first = knots.partition_point(|p| p.x < lo - 1e-12).saturating_sub(1);
    let last = knots.partition_point(|p| p.x <= hi + 1e-12).min(knots.len() - 1);
    if first >= last {
        return None;
    }

    let dx = center.x - antenna.x;
    let dy = center.y - antenna.y;
    let mut best_t = f64::INFINITY;
    let mut best = None;
    for i in first..last {
        let a = knots[i];
        let b = knots[i + 1];
        let ex = b.x - a.x;
        let ey = b.y - a.y;
        let denom = dx * ey - dy * ex;
        if denom.abs() < 1e-18 {
            continue; // parallel
        }
        let rx = a.x - antenna.x;
        let ry = a.y - antenna.y;
        let t = (rx * ey - ry * ex) / denom;
        let v = (rx * dy - ry * dx) / denom;
        const EPS: f64 = 1e-12;
        if t >= -EPS && t <= 1.0 + EPS && v >= -EPS && v <= 1.0 + EPS && t < best_t {
            best_t = t;
            best = Some(Point::new(antenna.x + t * dx, antenna.y + t * dy));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(x_end: f64) -> SurfaceProfile {
        build_surface(&[(0.0, 0.0), (x_end, 0.0)], 0.001).unwrap()
    }

    #[test]
    fn build_surface_flat_point_count() {
        let p = flat(2.0);
        assert_eq!(p.points.len(), 2001);
        assert!(p.points.iter().all(|q| q.y == 0.0));
    }

    #[test]
    fn build_surface_linear_midpoint() {
        let p = build_surface(&[(0.0, 0.0), (1.0, 0.21)], 0.001).unwrap();
        assert!((p.height_at(0.5).unwrap() - 0.105).abs() < 1e-12);
    }

    #[test]
    fn build_surface_two_segment_polyline() {
        // Relief figures taken from the field setup: 0.21 m drop over 0.56 m.
        let p = build_surface(&[(0.0, 0.0), (0.56, 0.21), (2.0, 0.21)], 0.001).unwrap();
        assert!((p.height_at(0.28).unwrap() - 0.105).abs() < 1e-12);
        // Raw knots reproduced exactly.
        assert!(p.points.iter().any(|q| q.x == 0.56 && q.y == 0.21));
    }

    #[test]
    fn build_surface_rejects_bad_input() {
        assert!(matches!(
            build_surface(&[(0.0, 0.0)], 0.001),
            Err(GeometryError::TooFewPoints(1))
        ));
        assert!(matches!(
            build_surface(&[(0.0, 0.0), (0.5, 0.1), (0.4, 0.2)], 0.001),
            Err(GeometryError::NonMonotonicX(2))
        ));
        assert!(matches!(
            build_surface(&[(0.0, 0.0), (1.0, -0.1)], 0.001),
            Err(GeometryError::NegativeY(..))
        ));
        assert!(matches!(
            build_surface(&[(0.1, 0.0), (1.0, 0.1)], 0.001),
            Err(GeometryError::FirstPointNotOrigin(..))
        ));
        assert!(matches!(
            build_surface(&[(0.0, 0.0), (1.0, 0.1)], 0.0),
            Err(GeometryError::BadResolution(..))
        ));
    }

    #[test]
    fn arc_length_flat() {
        let map = arc_length_map(&flat(2.0), 10_000).unwrap();
        assert!((map.total_length - 2.0).abs() < 1e-4);
    }

    #[test]
    fn arc_length_three_four_five_slope() {
        let p = build_surface(&[(0.0, 0.0), (0.3, 0.4)], 0.001).unwrap();
        let map = arc_length_map(&p, 10_000).unwrap();
        assert!((map.total_length - 0.5).abs() < 1e-4);
    }

    #[test]
    fn arc_length_quarter_circle() {
        // Unit quarter circle y = 1 - sqrt(1 - x^2), sampled at 1 mm.
        let raw: Vec<(f64, f64)> = (0..=1000)
            .map(|i| {
                let x = i as f64 * 0.001;
                (x, 1.0 - (1.0 - x * x).max(0.0).sqrt())
            })
            .collect();
        let p = build_surface(&raw, 0.001).unwrap();
        let map = arc_length_map(&p, 20_000).unwrap();
        let quarter = std::f64::consts::FRAC_PI_2;
        assert!(
            ((map.total_length - quarter) / quarter).abs() < 1e-3,
            "total {} vs {}",
            map.total_length,
            quarter
        );
    }

    #[test]
    fn locate_on_flat_ground_is_identity() {
        let map = arc_length_map(&flat(2.0), 10_000).unwrap();
        let p = locate_wb_antenna(&map, 0.7).unwrap();
        assert!((p.x - 0.7).abs() < 1e-4);
        assert!(p.y.abs() < 1e-9);
        let origin = locate_wb_antenna(&map, 0.0).unwrap();
        assert!(origin.x.abs() < 1e-12 && origin.y.abs() < 1e-12);
    }

    #[test]
    fn locate_on_slope_midpoint() {
        let p = build_surface(&[(0.0, 0.0), (0.3, 0.4)], 0.001).unwrap();
        let map = arc_length_map(&p, 10_000).unwrap();
        let q = locate_wb_antenna(&map, 0.25).unwrap();
        assert!((q.x - 0.15).abs() < 1e-3);
        assert!((q.y - 0.20).abs() < 1e-3);
    }

    #[test]
    fn locate_rejects_out_of_range() {
        let map = arc_length_map(&flat(1.0), 1000).unwrap();
        assert!(locate_wb_antenna(&map, -0.1).is_err());
        assert!(locate_wb_antenna(&map, 1.5).is_err());
    }

    #[test]
    fn wb_track_flat_two_meters() {
        let map = arc_length_map(&flat(2.0), 10_000).unwrap();
        let track = build_wb_track(&map, 0.02).unwrap();
        assert_eq!(track.len(), 101);
        assert_eq!(track.system, GprSystem::Wb);
    }

    #[test]
    fn ahf_track_survey_span() {
        let track = build_ahf_track(0.12, 1.80, 0.02).unwrap();
        assert_eq!(track.len(), 85);
        assert!(track.positions.iter().all(|p| p.y == 0.0));
    }

    #[test]
    fn wb_track_count_tracks_curve_length() {
        // A gentle ripple pushing the curve length just past 2.0 m, so the
        // 0.02 m step yields 101 positions.
        let raw: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let x = i as f64 * 0.01;
                (x, 0.05 + 0.0113 * (1.0 - (2.0 * std::f64::consts::PI * x / 0.5).cos()))
            })
            .collect();
        let p = build_surface(&raw, 0.001).unwrap();
        let map = arc_length_map(&p, 20_000).unwrap();
        assert!(
            map.total_length >= 2.0 && map.total_length < 2.02,
            "curve length {} outside [2.00, 2.02)",
            map.total_length
        );
        let track = build_wb_track(&map, 0.02).unwrap();
        assert_eq!(track.len(), 101);
    }

    #[test]
    fn round_trip_through_arc_table() {
        let raw: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let x = i as f64 * 0.02;
                (x, 0.1 + 0.05 * (3.0 * x).sin().powi(2))
            })
            .collect();
        let p = build_surface(&raw, 0.001).unwrap();
        let map = arc_length_map(&p, 10_000).unwrap();
        for row in map.samples.iter().step_by(500) {
            let q = locate_wb_antenna(&map, row.s).unwrap();
            assert!((q.x - row.x).abs() < 1e-3);
            assert!((q.y - row.y).abs() < 1e-3);
        }
        // Monotone in x along the traveled distance.
        let mut prev_x = f64::NEG_INFINITY;
        for k in 0..=50 {
            let s = map.total_length * k as f64 / 50.0;
            let q = locate_wb_antenna(&map, s).unwrap();
            assert!(q.x >= prev_x - 1e-9);
            prev_x = q.x;
        }
    }

    #[test]
    fn total_length_never_below_x_extent() {
        let raw: Vec<(f64, f64)> = (0..=50)
            .map(|i| {
                let x = i as f64 * 0.04;
                (x, 0.02 * (5.0 * x).cos() + 0.02)
            })
            .collect();
        let p = build_surface(&raw, 0.001).unwrap();
        let map = arc_length_map(&p, 10_000).unwrap();
        let (x0, x1) = p.x_extent();
        assert!(map.total_length >= (x1 - x0) - 1e-6);
    }

    #[test]
    fn intersection_vertical_ray() {
        let p = build_surface(&[(0.0, 0.2), (2.0, 0.2)], 0.001).unwrap();
        let g = surface_intersection(&p, Point::new(0.0, 0.0), Point::new(0.0, 0.5)).unwrap();
        assert!((g.x - 0.0).abs() < 1e-9 && (g.y - 0.2).abs() < 1e-9);
    }

    #[test]
    fn intersection_oblique_ray() {
        let p = build_surface(&[(0.0, 0.2), (2.0, 0.2)], 0.001).unwrap();
        let g = surface_intersection(&p, Point::new(0.4, 0.0), Point::new(1.0, 0.8)).unwrap();
        assert!((g.x - 0.55).abs() < 1e-9 && (g.y - 0.2).abs() < 1e-9);
    }

    #[test]
    fn intersection_infeasible_above_reference() {
        let p = build_surface(&[(0.0, 0.2), (2.0, 0.2)], 0.001).unwrap();
        assert!(surface_intersection(&p, Point::new(0.0, 0.0), Point::new(0.0, -0.1)).is_none());
    }

    #[test]
    fn intersection_lies_on_segment_and_surface() {
        let raw: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let x = i as f64 * 0.02;
                (x, 0.15 + 0.08 * (2.5 * x).sin().powi(2))
            })
            .collect();
        let p = build_surface(&raw, 0.001).unwrap();
        let antenna = Point::new(0.3, 0.0);
        let center = Point::new(1.4, 0.7);
        let g = surface_intersection(&p, antenna, center).unwrap();
        // On the surface.
        assert!((g.y - p.height_at(g.x).unwrap()).abs() < 1e-9);
        // On the segment.
        let t = (g.x - antenna.x) / (center.x - antenna.x);
        let y_seg = antenna.y + t * (center.y - antenna.y);
        assert!((0.0..=1.0).contains(&t));
        assert!((g.y - y_seg).abs() < 1e-9);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn heights() -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(0.0f64..0.4, 4..25)
        }

        proptest! {
            // Any recorded profile round-trips through the arc-length table:
            // locating the traveled distance of a sample recovers the sample.
            #[test]
            fn locate_round_trips_table_samples(ys in heights()) {
                let raw: Vec<(f64, f64)> = ys
                    .iter()
                    .enumerate()
                    .map(|(i, &y)| (i as f64 * 0.05, y))
                    .collect();
                let profile = build_surface(&raw, 0.001).unwrap();
                let map = arc_length_map(&profile, 5000).unwrap();
                for row in map.samples.iter().step_by(613) {
                    let p = locate_wb_antenna(&map, row.s).unwrap();
                    prop_assert!((p.x - row.x).abs() < 1e-3);
                    prop_assert!((p.y - row.y).abs() < 1e-3);
                }
                let (x0, x1) = profile.x_extent();
                prop_assert!(map.total_length >= (x1 - x0) - 1e-6);
            }

            // A ray from the reference height to a point below the deepest
            // surface always crosses it, on both the segment and the curve.
            #[test]
            fn intersection_stays_on_both_curves(
                ys in heights(),
                antenna_x in 0.0f64..1.0,
                center_x in 0.0f64..1.0,
                depth in 0.45f64..1.0,
            ) {
                let raw: Vec<(f64, f64)> = ys
                    .iter()
                    .enumerate()
                    .map(|(i, &y)| (i as f64 / (ys.len() - 1) as f64, y))
                    .collect();
                let profile = build_surface(&raw, 0.001).unwrap();
                let antenna = Point::new(antenna_x, 0.0);
                let center = Point::new(center_x, depth);
                let g = surface_intersection(&profile, antenna, center)
                    .expect("center below the surface must be reachable");
                prop_assert!((g.y - profile.height_at(g.x).unwrap()).abs() < 1e-9);
                let d = center.distance(&antenna);
                let t = if d > 0.0 {
                    ((g.x - antenna.x) * (center.x - antenna.x)
                        + (g.y - antenna.y) * (center.y - antenna.y))
                        / (d * d)
                } else {
                    0.0
                };
                prop_assert!((-1e-9..=1.0 + 1e-9).contains(&t));
            }
        }
    }
}
