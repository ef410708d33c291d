//! B-scan conditioning: time-zero alignment, zero-phase band-pass filtering,
//! DC removal, time-varying gain, and SVD-based background/ringing removal.
//!
//! Every operation returns a new radargram and never alters the matrix
//! dimensions, so stages compose freely and inputs stay immutable.

use nalgebra::DMatrix;
use rustfft::{num_complex::Complex, FftPlanner};
use thiserror::Error;

use crate::geometry::AntennaTrack;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("threshold fraction must be in (0, 1), got {0}")]
    BadThreshold(f64),
    #[error("band [{f_low}, {f_high}] Hz invalid for Nyquist {nyquist} Hz")]
    BadBand { f_low: f64, f_high: f64, nyquist: f64 },
    #[error("gain exponent must be >= 0, got {0}")]
    BadGainExponent(f64),
    #[error("cannot zero {requested} singular values of a rank-{available} matrix")]
    TooManySingularValues { requested: usize, available: usize },
}

/// A B-scan: rows are time samples, columns are A-scan traces.
#[derive(Debug, Clone)]
pub struct Radargram {
    pub samples: DMatrix<f64>,
    /// Time spacing between rows, seconds.
    pub sample_interval: f64,
    /// Antenna positions per column, when known.
    pub trace_positions: Option<AntennaTrack>,
    /// Row index corresponding to the emission instant.
    pub time_zero_index: usize,
}

impl Radargram {
    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_traces(&self) -> usize {
        self.samples.ncols()
    }

    /// Length of the recorded window, seconds.
    pub fn time_window(&self) -> f64 {
        self.n_samples() as f64 * self.sample_interval
    }

    fn with_samples(&self, samples: DMatrix<f64>) -> Radargram {
        Radargram {
            samples,
            sample_interval: self.sample_interval,
            trace_positions: self.trace_positions.clone(),
            time_zero_index: self.time_zero_index,
        }
    }
}

/// Shifts all traces so the first break of the mean trace sits at sample 0.
///
/// The first break is the first sample where |mean trace| exceeds
/// `threshold_frac` times its maximum. An all-zero radargram is returned
/// unchanged with a warning.
pub fn time_zero_correct(
    r: &Radargram,
    threshold_frac: f64,
) -> Result<Radargram, PreprocessError> {
    if !(threshold_frac > 0.0 && threshold_frac < 1.0) {
        return Err(PreprocessError::BadThreshold(threshold_frac));
    }
    let (n, m) = (r.n_samples(), r.n_traces());
    let mut mean = vec![0.0; n];
    for j in 0..m {
        for i in 0..n {
            mean[i] += r.samples[(i, j)];
        }
    }
    let max_abs = mean.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if max_abs == 0.0 {
        log::warn!("time-zero correction skipped: radargram is all zeros");
        return Ok(r.clone());
    }
    let threshold = threshold_frac * max_abs;
    let first_break = mean
        .iter()
        .position(|v| v.abs() > threshold)
        .unwrap_or(0);

    let mut out = DMatrix::zeros(n, m);
    for j in 0..m {
        for i in first_break..n {
            out[(i - first_break, j)] = r.samples[(i, j)];
        }
    }
    let mut shifted = r.with_samples(out);
    shifted.time_zero_index = 0;
    Ok(shifted)
}

/// Zero-phase frequency-domain band-pass, applied per trace.
///
/// The window is unity inside [f_low, f_high] with raised-cosine tapers of
/// width 10% of the band on each side and zero elsewhere. Filtering in the
/// frequency domain with a real symmetric window leaves arrival times
/// untouched, which is what the travel-time inversion depends on.
pub fn bandpass(r: &Radargram, f_low: f64, f_high: f64) -> Result<Radargram, PreprocessError> {
    let nyquist = 0.5 / r.sample_interval;
    if !(f_low >= 0.0 && f_low < f_high && f_high < nyquist) {
        return Err(PreprocessError::BadBand {
            f_low,
            f_high,
            nyquist,
        });
    }
    let n = r.n_samples();
    let m = r.n_traces();
    let taper = 0.1 * (f_high - f_low);
    let window = |f: f64| -> f64 {
        if f >= f_low && f <= f_high {
            1.0
        } else if f >= f_low - taper && f < f_low {
            0.5 * (1.0 + (std::f64::consts::PI * (f_low - f) / taper).cos())
        } else if f > f_high && f <= f_high + taper {
            0.5 * (1.0 + (std::f64::consts::PI * (f - f_high) / taper).cos())
        } else {
            0.0
        }
    };
    let df = 1.0 / (n as f64 * r.sample_interval);
    let gains: Vec<f64> = (0..n)
        .map(|k| {
            let bin = k.min(n - k); // |frequency| of bin k
            window(bin as f64 * df)
        })
        .collect();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);
    let scale = 1.0 / n as f64;

    let mut out = DMatrix::zeros(n, m);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    for j in 0..m {
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(r.samples[(i, j)], 0.0);
        }
        fft.process(&mut buf);
        for (slot, g) in buf.iter_mut().zip(&gains) {
            *slot *= *g;
        }
        ifft.process(&mut buf);
        for i in 0..n {
            out[(i, j)] = buf[i].re * scale;
        }
    }
    Ok(r.with_samples(out))
}

/// Subtracts each trace's mean.
pub fn dc_remove(r: &Radargram) -> Radargram {
    let (n, m) = (r.n_samples(), r.n_traces());
    let mut out = r.samples.clone();
    for j in 0..m {
        let mean: f64 = (0..n).map(|i| r.samples[(i, j)]).sum::<f64>() / n as f64;
        for i in 0..n {
            out[(i, j)] -= mean;
        }
    }
    r.with_samples(out)
}

/// Time-varying gain: sample i is scaled by ((i+1)*dt)^alpha, normalized so
/// the gain at the window midpoint is 1. `alpha = 0` is the identity.
pub fn time_gain(r: &Radargram, alpha: f64) -> Result<Radargram, PreprocessError> {
    if !(alpha >= 0.0) {
        return Err(PreprocessError::BadGainExponent(alpha));
    }
    let (n, m) = (r.n_samples(), r.n_traces());
    let mid = (n / 2 + 1) as f64 * r.sample_interval;
    let gains: Vec<f64> = (0..n)
        .map(|i| (((i + 1) as f64 * r.sample_interval) / mid).powf(alpha))
        .collect();
    let mut out = r.samples.clone();
    for j in 0..m {
        for i in 0..n {
            out[(i, j)] *= gains[i];
        }
    }
    Ok(r.with_samples(out))
}

/// Rank-reduction clutter removal: the `k_dominant` largest and `k_noise`
/// smallest singular values of the B-scan matrix are zeroed and the matrix is
/// reconstructed from the remainder.
///
/// The dominant components capture the column-invariant direct coupling and
/// surface ringing; the smallest ones are incoherent noise.
pub fn svd_background_removal(
    r: &Radargram,
    k_dominant: usize,
    k_noise: usize,
) -> Result<Radargram, PreprocessError> {
    let rank = r.n_samples().min(r.n_traces());
    if k_dominant + k_noise >= rank {
        return Err(PreprocessError::TooManySingularValues {
            requested: k_dominant + k_noise,
            available: rank,
        });
    }
    if k_dominant == 0 && k_noise == 0 {
        return Ok(r.clone());
    }
    let svd = r
        .samples
        .clone()
        .svd(true, true);
    let mut singular = svd.singular_values.clone();
    // nalgebra returns singular values sorted in descending order.
    let len = singular.len();
    for i in 0..k_dominant.min(len) {
        singular[i] = 0.0;
    }
    for i in 0..k_noise.min(len) {
        singular[len - 1 - i] = 0.0;
    }
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let reconstructed = u * DMatrix::from_diagonal(&singular) * v_t;
    Ok(r.with_samples(reconstructed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram(n: usize, m: usize, dt: f64) -> Radargram {
        Radargram {
            samples: DMatrix::zeros(n, m),
            sample_interval: dt,
            trace_positions: None,
            time_zero_index: 0,
        }
    }

    #[test]
    fn time_zero_shifts_impulse_to_front() {
        let mut r = gram(100, 5, 0.025e-9);
        for j in 0..5 {
            r.samples[(40, j)] = 1.0;
        }
        let out = time_zero_correct(&r, 0.05).unwrap();
        for j in 0..5 {
            assert_eq!(out.samples[(0, j)], 1.0);
            assert_eq!(out.samples[(40, j)], 0.0);
        }
        assert_eq!(out.time_zero_index, 0);
    }

    #[test]
    fn time_zero_already_aligned_is_identity() {
        let mut r = gram(50, 3, 0.025e-9);
        for j in 0..3 {
            r.samples[(0, j)] = 2.0;
            r.samples[(10, j)] = 1.0;
        }
        let out = time_zero_correct(&r, 0.05).unwrap();
        assert_eq!(out.samples, r.samples);
    }

    #[test]
    fn time_zero_all_zero_is_noop() {
        let r = gram(30, 4, 0.025e-9);
        let out = time_zero_correct(&r, 0.05).unwrap();
        assert_eq!(out.samples, r.samples);
    }

    #[test]
    fn time_zero_rejects_bad_threshold() {
        let r = gram(10, 2, 1e-9);
        assert!(time_zero_correct(&r, 0.0).is_err());
        assert!(time_zero_correct(&r, 1.0).is_err());
    }

    fn tone(n: usize, dt: f64, freq: f64) -> Radargram {
        let mut r = gram(n, 2, dt);
        for j in 0..2 {
            for i in 0..n {
                r.samples[(i, j)] = (2.0 * std::f64::consts::PI * freq * i as f64 * dt).sin();
            }
        }
        r
    }

    fn trace_rms(r: &Radargram, j: usize) -> f64 {
        let n = r.n_samples();
        ((0..n).map(|i| r.samples[(i, j)].powi(2)).sum::<f64>() / n as f64).sqrt()
    }

    #[test]
    fn bandpass_passes_in_band_tone() {
        // 2 GHz tone on an exact FFT bin; survey band 0.4-3.4 GHz.
        let dt = 0.025e-9;
        let r = tone(1000, dt, 2.0e9);
        let out = bandpass(&r, 0.4e9, 3.4e9).unwrap();
        let ratio = trace_rms(&out, 0) / trace_rms(&r, 0);
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn bandpass_rejects_out_of_band_tone() {
        let dt = 0.025e-9;
        let r = tone(1000, dt, 5.0e9);
        let out = bandpass(&r, 0.4e9, 3.4e9).unwrap();
        let atten = 20.0 * (trace_rms(&out, 0) / trace_rms(&r, 0)).log10();
        assert!(atten <= -40.0, "attenuation {atten} dB");
    }

    #[test]
    fn bandpass_removes_dc() {
        let dt = 0.025e-9;
        let mut r = gram(512, 1, dt);
        for i in 0..512 {
            r.samples[(i, 0)] = 3.0;
        }
        let out = bandpass(&r, 0.4e9, 3.4e9).unwrap();
        assert!(trace_rms(&out, 0) < 1e-9);
    }

    #[test]
    fn bandpass_rejects_band_beyond_nyquist() {
        let r = gram(100, 1, 0.025e-9); // Nyquist 20 GHz
        assert!(bandpass(&r, 1.0e9, 25.0e9).is_err());
        assert!(bandpass(&r, 3.0e9, 2.0e9).is_err());
    }

    #[test]
    fn bandpass_idempotent_for_in_band_signal() {
        let dt = 0.025e-9;
        let r = tone(1000, dt, 2.0e9);
        let once = bandpass(&r, 0.4e9, 3.4e9).unwrap();
        let twice = bandpass(&once, 0.4e9, 3.4e9).unwrap();
        let diff = (&twice.samples - &once.samples).norm();
        assert!(diff / once.samples.norm() < 1e-6);
    }

    #[test]
    fn dc_remove_zeroes_constant_trace() {
        let mut r = gram(64, 3, 1e-9);
        for j in 0..3 {
            for i in 0..64 {
                r.samples[(i, j)] = 3.0;
            }
        }
        let out = dc_remove(&r);
        assert!(out.samples.amax() < 1e-12);
    }

    #[test]
    fn time_gain_zero_alpha_is_identity() {
        let mut r = gram(64, 2, 1e-9);
        r.samples[(10, 0)] = 5.0;
        r.samples[(50, 1)] = -2.0;
        let out = time_gain(&r, 0.0).unwrap();
        assert_eq!(out.samples, r.samples);
    }

    #[test]
    fn time_gain_restores_inverse_time_decay() {
        // Two unit events decayed by 1/t; alpha = 1 restores their ratio.
        let dt = 0.025e-9;
        let mut r = gram(1024, 1, dt);
        let (i1, i2) = (200, 800);
        for (i, amp) in [(i1, 1.0 / ((i1 + 1) as f64 * dt)), (i2, 1.0 / ((i2 + 1) as f64 * dt))] {
            r.samples[(i, 0)] = amp;
        }
        let out = time_gain(&r, 1.0).unwrap();
        let ratio = out.samples[(i2, 0)] / out.samples[(i1, 0)];
        assert!((ratio - 1.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn svd_annihilates_rank_one() {
        let mut r = gram(32, 8, 1e-9);
        for j in 0..8 {
            for i in 0..32 {
                r.samples[(i, j)] = ((i as f64) * 0.3).sin();
            }
        }
        let norm_in = r.samples.norm();
        let out = svd_background_removal(&r, 1, 0).unwrap();
        assert!(out.samples.norm() <= 1e-9 * norm_in);
    }

    #[test]
    fn svd_zero_zero_is_identity() {
        let mut r = gram(16, 6, 1e-9);
        for j in 0..6 {
            for i in 0..16 {
                r.samples[(i, j)] = (i * j) as f64 * 0.1 + (i as f64).cos();
            }
        }
        let out = svd_background_removal(&r, 0, 0).unwrap();
        let rel = (&out.samples - &r.samples).norm() / r.samples.norm();
        assert!(rel < 1e-9);
    }

    #[test]
    fn svd_rejects_out_of_range_counts() {
        let r = gram(10, 4, 1e-9);
        assert!(svd_background_removal(&r, 3, 1).is_err());
        assert!(svd_background_removal(&r, 4, 0).is_err());
        assert!(svd_background_removal(&r, 2, 1).is_ok());
    }

    #[test]
    fn svd_output_rank_bound() {
        let mut r = gram(12, 9, 1e-9);
        for j in 0..9 {
            for i in 0..12 {
                r.samples[(i, j)] = ((i + 2 * j) as f64).sin() + 0.5 * ((3 * i) as f64).cos();
            }
        }
        let out = svd_background_removal(&r, 2, 3).unwrap();
        let sv = out.samples.clone().svd(false, false).singular_values;
        let significant = sv.iter().filter(|&&s| s > 1e-9).count();
        assert!(significant <= 9 - 2 - 3);
    }

    #[test]
    fn operations_are_linear() {
        // Superposition on random pairs for every linear stage.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let dt = 0.025e-9;
        let mut a = gram(128, 7, dt);
        let mut b = gram(128, 7, dt);
        for j in 0..7 {
            for i in 0..128 {
                a.samples[(i, j)] = rng.gen_range(-1.0..1.0);
                b.samples[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let sum = a.with_samples(&a.samples + &b.samples);

        let check = |f: &dyn Fn(&Radargram) -> Radargram| {
            let lhs = f(&sum).samples;
            let rhs = f(&a).samples + f(&b).samples;
            assert!((lhs - rhs).norm() < 1e-9);
        };
        check(&|r| bandpass(r, 0.4e9, 3.4e9).unwrap());
        check(&|r| dc_remove(r));
        check(&|r| time_gain(r, 1.3).unwrap());
        // SVD rank reduction is not linear; it is excluded on purpose.
    }

    #[test]
    fn dimensions_are_preserved() {
        let mut r = gram(96, 11, 0.025e-9);
        r.samples[(30, 5)] = 1.0;
        for out in [
            time_zero_correct(&r, 0.05).unwrap(),
            bandpass(&r, 0.4e9, 3.4e9).unwrap(),
            dc_remove(&r),
            time_gain(&r, 0.7).unwrap(),
            svd_background_removal(&r, 1, 1).unwrap(),
        ] {
            assert_eq!(out.n_samples(), 96);
            assert_eq!(out.n_traces(), 11);
        }
    }
}
