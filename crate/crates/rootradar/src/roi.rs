//! Region-of-interest extraction: binarization of a preprocessed B-scan,
//! column-connection clustering of the pixel mask, and picking one two-way
//! travel time per A-scan inside each region.
//!
//! Clustering treats each maximal vertical run of lit pixels in a column as a
//! segment and merges segments in adjacent columns whose row ranges overlap,
//! so a reflection locus snaking across the B-scan comes out as one region
//! regardless of its shape.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::geometry::AntennaTrack;
use crate::preprocess::Radargram;

#[derive(Debug, Error)]
pub enum RoiError {
    #[error("amplitude fraction must be in (0, 1), got {0}")]
    BadAmplitudeFraction(f64),
    #[error("clustering thresholds must be >= 1")]
    BadThreshold,
    #[error("region spans column {column} but the track has only {track_len} positions")]
    ColumnOutsideTrack { column: usize, track_len: usize },
    #[error("region has no populated columns")]
    EmptyRegion,
}

/// A maximal vertical run of lit pixels in one column (rows inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub column: usize,
    pub row_start: usize,
    pub row_end: usize,
}

impl Segment {
    /// Number of pixels in the run (never zero: rows are inclusive).
    pub fn len(&self) -> usize {
        self.row_end - self.row_start + 1
    }

    fn overlap(&self, other: &Segment) -> usize {
        let lo = self.row_start.max(other.row_start);
        let hi = self.row_end.min(other.row_end);
        if lo > hi {
            0
        } else {
            hi - lo + 1
        }
    }
}

/// A cluster of segments attributed to one target.
#[derive(Debug, Clone)]
pub struct Region {
    /// Segments sorted by column, then by starting row.
    pub segments: Vec<Segment>,
    pub pixel_count: usize,
    /// First and last column covered.
    pub column_span: (usize, usize),
}

/// One picked observation: antenna position and two-way travel time.
#[derive(Debug, Clone, Copy)]
pub struct Observation {
    pub x_a: f64,
    pub y_a: f64,
    pub travel_time: f64,
}

/// Per-target list of (antenna position, picked travel time) observations,
/// ordered by column.
#[derive(Debug, Clone)]
pub struct ExtractedPattern {
    pub observations: Vec<Observation>,
    /// The region the pattern was picked from; absent when the pattern was
    /// loaded from a file.
    pub source_region: Option<Region>,
}

impl ExtractedPattern {
    /// Wraps bare observations, e.g. ones loaded from a pattern file.
    pub fn from_observations(observations: Vec<Observation>) -> Self {
        Self {
            observations,
            source_region: None,
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Pixel mask: true where |amplitude| reaches `amp_frac` of the global
/// maximum |amplitude|.
pub fn binarize(r: &Radargram, amp_frac: f64) -> Result<DMatrix<bool>, RoiError> {
    if !(amp_frac > 0.0 && amp_frac < 1.0) {
        return Err(RoiError::BadAmplitudeFraction(amp_frac));
    }
    let max_abs = r.samples.amax();
    let threshold = amp_frac * max_abs;
    let mask = DMatrix::from_fn(r.n_samples(), r.n_traces(), |i, j| {
        max_abs > 0.0 && r.samples[(i, j)].abs() >= threshold
    });
    if max_abs == 0.0 {
        log::warn!("binarize: radargram is all zeros, mask is empty");
    }
    Ok(mask)
}

/// Column-connection clustering of a pixel mask.
///
/// Vertical runs shorter than `min_segment` are discarded; runs in adjacent
/// columns whose row ranges share at least `min_shared` pixels are merged
/// transitively; regions smaller than `min_region_pixels` pixels are dropped.
/// Regions come back sorted by first column.
pub fn c3_cluster(
    mask: &DMatrix<bool>,
    min_segment: usize,
    min_shared: usize,
    min_region_pixels: usize,
) -> Result<Vec<Region>, RoiError> {
    if min_segment < 1 || min_shared < 1 || min_region_pixels < 1 {
        return Err(RoiError::BadThreshold);
    }
    let (n, m) = (mask.nrows(), mask.ncols());

    // Collect qualifying segments per column.
    let mut segments: Vec<Segment> = Vec::new();
    let mut by_column: Vec<Vec<usize>> = vec![Vec::new(); m];
    for j in 0..m {
        let mut i = 0;
        while i < n {
            if mask[(i, j)] {
                let start = i;
                while i < n && mask[(i, j)] {
                    i += 1;
                }
                let seg = Segment {
                    column: j,
                    row_start: start,
                    row_end: i - 1,
                };
                if seg.len() >= min_segment {
                    by_column[j].push(segments.len());
                    segments.push(seg);
                }
            } else {
                i += 1;
            }
        }
    }

    // Union-find over segments; adjacent-column row overlap merges.
    let mut parent: Vec<usize> = (0..segments.len()).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for j in 1..m {
        for &a in &by_column[j - 1] {
            for &b in &by_column[j] {
                if segments[a].overlap(&segments[b]) >= min_shared {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra] = rb;
                    }
                }
            }
        }
    }

    let mut groups: std::collections::HashMap<usize, Vec<usize>> = std::collections::HashMap::new();
    for idx in 0..segments.len() {
        let root = find(&mut parent, idx);
        groups.entry(root).or_default().push(idx);
    }

    let mut regions: Vec<Region> = groups
        .into_values()
        .map(|indices| {
            let mut segs: Vec<Segment> = indices.iter().map(|&i| segments[i]).collect();
            segs.sort_by_key(|s| (s.column, s.row_start));
            let pixel_count = segs.iter().map(Segment::len).sum();
            let column_span = (
                segs.first().unwrap().column,
                segs.last().unwrap().column,
            );
            Region {
                segments: segs,
                pixel_count,
                column_span,
            }
        })
        .filter(|r| r.pixel_count >= min_region_pixels)
        .collect();
    regions.sort_by_key(|r| (r.column_span.0, r.segments[0].row_start));
    Ok(regions)
}

/// Picks one travel time per populated column of a region: the time of the
/// strongest |amplitude| sample within that column's segment rows, referenced
/// to the radargram's time zero, minus `wavelet_delay` (the constant offset
/// between a pulse's first break and its apex).
pub fn pick_travel_times(
    region: &Region,
    r: &Radargram,
    track: &AntennaTrack,
    wavelet_delay: f64,
) -> Result<ExtractedPattern, RoiError> {
    if region.segments.is_empty() {
        return Err(RoiError::EmptyRegion);
    }
    let track_len = track.len();
    let mut observations = Vec::new();
    let mut column = None;
    let mut best: Option<(usize, f64)> = None;

    let flush = |column: Option<usize>,
                 best: &mut Option<(usize, f64)>,
                 observations: &mut Vec<Observation>| {
        if let (Some(col), Some((row, _))) = (column, best.take()) {
            let t = (row as f64 - r.time_zero_index as f64) * r.sample_interval - wavelet_delay;
            let p = track.positions[col];
            observations.push(Observation {
                x_a: p.x,
                y_a: p.y,
                travel_time: t,
            });
        }
    };

    for seg in &region.segments {
        if seg.column >= track_len {
            return Err(RoiError::ColumnOutsideTrack {
                column: seg.column,
                track_len,
            });
        }
        if column != Some(seg.column) {
            flush(column, &mut best, &mut observations);
            column = Some(seg.column);
        }
        for row in seg.row_start..=seg.row_end {
            let a = r.samples[(row, seg.column)].abs();
            if best.map_or(true, |(_, b)| a > b) {
                best = Some((row, a));
            }
        }
    }
    flush(column, &mut best, &mut observations);

    Ok(ExtractedPattern {
        observations,
        source_region: Some(region.clone()),
    })
}
