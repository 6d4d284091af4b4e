//! Staircase speed-scaling model and scaling traces.
//!
//! The workcell controller reduces the robot's speed to a plateau value that
//! depends only on the current human-robot distance. Distance space is split
//! into half-open bands `[d_{i-1}, d_i)` (with `d_0 = 0` and the last band
//! unbounded); each band maps to one plateau value, and plateau values grow
//! strictly with distance.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use serde::{Deserialize, Serialize};

// ──────────────────────────────────────────────────────────────────────────
// Staircase
// ──────────────────────────────────────────────────────────────────────────

/// Piecewise-constant speed-scaling function of human-robot distance.
///
/// `thresholds` holds the K-1 interior band edges `d_1 < d_2 < … < d_{K-1}`
/// and `values` the K plateau values, ordered from the closest band to the
/// farthest. A distance equal to a threshold belongs to the upper band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseSafety {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

impl StaircaseSafety {
    pub fn new(thresholds: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let s = StaircaseSafety { thresholds, values };
        s.validate()?;
        Ok(s)
    }

    /// Number of plateaus.
    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.thresholds.len() + 1 {
            return Err(Error::Config(format!(
                "staircase needs exactly one more value than thresholds (got {} values, {} thresholds)",
                self.values.len(),
                self.thresholds.len()
            )));
        }
        if self.thresholds.iter().any(|t| !t.is_finite()) || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("staircase entries must be finite".into()));
        }
        if let Some(first) = self.thresholds.first() {
            if *first <= 0.0 {
                return Err(Error::Config("staircase thresholds must be positive".into()));
            }
        }
        if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("staircase thresholds must be strictly increasing".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("staircase values must be strictly increasing".into()));
        }
        if self.values[0] < 0.0 || *self.values.last().unwrap() > 1.0 {
            return Err(Error::Config("staircase values must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// Index of the band a distance falls into (0 = closest band).
    pub fn band_index(&self, distance: f64) -> usize {
        // Thresholds are sorted, so the band index is the number of
        // thresholds less than or equal to the distance; equality moves the
        // point into the upper band.
        self.thresholds.partition_point(|&t| t <= distance)
    }

    /// Plateau value for a raw distance.
    pub fn value_for_distance(&self, distance: f64) -> f64 {
        self.values[self.band_index(distance)]
    }

    /// Scaling applied when the robot is at `x_r` and the human at `x_h`.
    pub fn eval_scaling(&self, x_r: Vec3, x_h: Vec3) -> f64 {
        self.value_for_distance(x_r.distance(x_h))
    }

    /// The plateau index whose value matches `sample` (within `tol`), if any.
    pub fn plateau_of_value(&self, sample: f64, tol: f64) -> Option<usize> {
        self.values.iter().position(|v| (v - sample).abs() <= tol)
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Traces and window statistics
// ──────────────────────────────────────────────────────────────────────────

/// Tolerance used when matching timestamps onto the uniform sample grid.
const TIME_TOL: f64 = 1e-9;

/// Tolerance used when matching trace samples onto plateau values.
const PLATEAU_TOL: f64 = 1e-9;

/// A uniformly sampled scaling signal: sample `i` was taken at
/// `t0 + i * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTrace {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
}

impl ScalingTrace {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Self {
        ScalingTrace { t0, dt, samples }
    }

    /// Build a trace from explicit `(t, s)` points, verifying that the
    /// timestamps form a uniform grid.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InsufficientTrace {
                t_start: points.first().map(|p| p.0).unwrap_or(0.0),
                needed: 2,
            });
        }
        let t0 = points[0].0;
        let dt = points[1].0 - points[0].0;
        if dt <= 0.0 {
            return Err(Error::LogFile("trace timestamps must be strictly increasing".into()));
        }
        for (i, (t, _)) in points.iter().enumerate() {
            let expect = t0 + i as f64 * dt;
            if (t - expect).abs() > TIME_TOL {
                return Err(Error::LogFile(format!(
                    "trace timestamp {t} deviates from uniform grid point {expect}"
                )));
            }
        }
        Ok(ScalingTrace::new(t0, dt, points.iter().map(|p| p.1).collect()))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Timestamp of sample `i`.
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// Index of the sample taken at `t`, if `t` lies on the grid.
    fn index_of(&self, t: f64) -> Option<usize> {
        let rel = (t - self.t0) / self.dt;
        let idx = rel.round();
        if idx < 0.0 {
            return None;
        }
        let idx = idx as usize;
        if idx >= self.samples.len() || (t - self.time(idx)).abs() > TIME_TOL {
            return None;
        }
        Some(idx)
    }

    /// Mean of the `window + 1` samples starting at `t_start` (the sample at
    /// `t_start` plus the `window` following samples).
    pub fn window_average(&self, t_start: f64, window: usize) -> Result<f64> {
        let slice = self.window_slice(t_start, window)?;
        Ok(slice.iter().sum::<f64>() / slice.len() as f64)
    }

    /// Fraction of window samples on each plateau of `safety`, ordered like
    /// `safety.values`. The fractions sum to one and reweighting the plateau
    /// values by them reproduces the window average.
    pub fn alpha_decompose(
        &self,
        safety: &StaircaseSafety,
        t_start: f64,
        window: usize,
    ) -> Result<Vec<f64>> {
        let slice = self.window_slice(t_start, window)?;
        let mut counts = vec![0usize; safety.k()];
        let base = self.index_of(t_start).unwrap();
        for (off, s) in slice.iter().enumerate() {
            match safety.plateau_of_value(*s, PLATEAU_TOL) {
                Some(i) => counts[i] += 1,
                None => {
                    return Err(Error::OffStaircase { value: *s, t: self.time(base + off) });
                }
            }
        }
        let n = slice.len() as f64;
        Ok(counts.into_iter().map(|c| c as f64 / n).collect())
    }

    fn window_slice(&self, t_start: f64, window: usize) -> Result<&[f64]> {
        let err = Error::InsufficientTrace { t_start, needed: window + 1 };
        let Some(start) = self.index_of(t_start) else {
            return Err(err);
        };
        let end = start + window;
        if end >= self.samples.len() {
            return Err(err);
        }
        Ok(&self.samples[start..=end])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// The staircase used throughout the default scenario: bands at every
    /// half metre up to two metres, plateaus from full stop to full speed.
    fn reference_staircase() -> StaircaseSafety {
        StaircaseSafety::new(
            vec![0.5, 1.0, 1.5, 2.0],
            vec![0.0, 0.25, 0.5, 0.75, 1.0],
        )
        .unwrap()
    }

    /// Straight-line scan over the bands; the structural twin of
    /// `value_for_distance`, kept deliberately naive.
    fn linear_scan_value(s: &StaircaseSafety, d: f64) -> f64 {
        for (i, t) in s.thresholds.iter().enumerate() {
            if d < *t {
                return s.values[i];
            }
        }
        *s.values.last().unwrap()
    }

    #[test]
    fn reference_bands() {
        let s = reference_staircase();
        assert_eq!(s.k(), 5);
        assert_eq!(s.value_for_distance(0.0), 0.0);
        assert_eq!(s.value_for_distance(0.3), 0.0);
        assert_eq!(s.value_for_distance(0.7), 0.25);
        assert_eq!(s.value_for_distance(1.2), 0.5);
        assert_eq!(s.value_for_distance(1.7), 0.75);
        assert_eq!(s.value_for_distance(2.4), 1.0);
    }

    #[test]
    fn boundary_belongs_to_upper_band() {
        let s = reference_staircase();
        assert_eq!(s.value_for_distance(0.5), 0.25);
        assert_eq!(s.value_for_distance(1.0), 0.5);
        assert_eq!(s.value_for_distance(1.5), 0.75);
        assert_eq!(s.value_for_distance(2.0), 1.0);
    }

    #[test]
    fn eval_scaling_uses_euclidean_distance() {
        let s = reference_staircase();
        // 3-4-0 triangle: distance 0.5 exactly, on the first threshold.
        let r = Vec3::new(0.3, 0.4, 0.0);
        assert_eq!(s.eval_scaling(r, Vec3::ZERO), 0.25);
        assert_eq!(s.eval_scaling(Vec3::ZERO, Vec3::ZERO), 0.0);
    }

    #[test]
    fn matches_linear_scan_on_random_staircases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5afe);
        for _ in 0..10_000 {
            let k = rng.random_range(1..=8usize);
            let mut thresholds = Vec::with_capacity(k - 1);
            let mut t = 0.0;
            for _ in 0..k - 1 {
                t += rng.random_range(0.05..0.8);
                thresholds.push(t);
            }
            let mut values = Vec::with_capacity(k);
            let mut v = rng.random_range(0.0..0.2);
            for _ in 0..k {
                values.push(v);
                v += rng.random_range(0.01..0.2);
            }
            // Rescale into [0, 1] so validation passes.
            let max = *values.last().unwrap();
            if max > 1.0 {
                for v in &mut values {
                    *v /= max;
                }
            }
            let s = StaircaseSafety::new(thresholds, values).unwrap();
            let d = rng.random_range(0.0..(t + 1.0) * 1.5);
            assert_eq!(s.value_for_distance(d), linear_scan_value(&s, d), "distance {d}");
            // Exercise the boundary convention explicitly as well.
            for &edge in &s.thresholds {
                assert_eq!(s.value_for_distance(edge), linear_scan_value(&s, edge));
            }
        }
    }

    #[test]
    fn scaling_is_monotone_in_distance() {
        let s = reference_staircase();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2_000 {
            let a = rng.random_range(0.0..3.0);
            let b = rng.random_range(0.0..3.0);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            assert!(s.value_for_distance(lo) <= s.value_for_distance(hi));
        }
    }

    #[test]
    fn rejects_malformed_staircases() {
        assert!(StaircaseSafety::new(vec![1.0], vec![0.0, 0.5, 1.0]).is_err());
        assert!(StaircaseSafety::new(vec![1.0, 0.5], vec![0.0, 0.5, 1.0]).is_err());
        assert!(StaircaseSafety::new(vec![0.5, 1.0], vec![0.0, 0.6, 0.6]).is_err());
        assert!(StaircaseSafety::new(vec![-0.5, 1.0], vec![0.0, 0.5, 1.0]).is_err());
        assert!(StaircaseSafety::new(vec![0.5, 1.0], vec![0.0, 0.5, 1.5]).is_err());
    }

    #[test]
    fn window_average_counts_the_starting_sample() {
        // Six samples at 0.25 followed by five at 0.75; the window of ten
        // steps starting at t=0 therefore spans eleven samples.
        let mut samples = vec![0.25; 6];
        samples.extend(vec![0.75; 5]);
        let trace = ScalingTrace::new(0.0, 0.1, samples);
        let avg = trace.window_average(0.0, 10).unwrap();
        assert!((avg - 5.25 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn window_average_requires_full_coverage() {
        let trace = ScalingTrace::new(0.0, 0.1, vec![1.0; 5]);
        assert!(matches!(
            trace.window_average(0.0, 5),
            Err(Error::InsufficientTrace { .. })
        ));
        assert!(matches!(
            trace.window_average(0.35, 2),
            Err(Error::InsufficientTrace { .. })
        ));
        assert!(trace.window_average(0.1, 3).is_ok());
    }

    #[test]
    fn alpha_decomposition_reconstructs_the_average() {
        let s = reference_staircase();
        let mut samples = vec![0.25; 6];
        samples.extend(vec![0.75; 5]);
        let trace = ScalingTrace::new(0.0, 0.1, samples);
        let alpha = trace.alpha_decompose(&s, 0.0, 10).unwrap();
        assert_eq!(alpha.len(), 5);
        assert!((alpha[1] - 6.0 / 11.0).abs() < 1e-15);
        assert!((alpha[3] - 5.0 / 11.0).abs() < 1e-15);
        assert_eq!(alpha[0] + alpha[2] + alpha[4], 0.0);

        let total: f64 = alpha.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let rebuilt: f64 = alpha.iter().zip(&s.values).map(|(a, v)| a * v).sum();
        let avg = trace.window_average(0.0, 10).unwrap();
        assert!((rebuilt - avg).abs() < 1e-12);
    }

    #[test]
    fn alpha_decomposition_rejects_off_staircase_samples() {
        let s = reference_staircase();
        let trace = ScalingTrace::new(0.0, 0.1, vec![0.25, 0.3, 0.25]);
        assert!(matches!(
            trace.alpha_decompose(&s, 0.0, 2),
            Err(Error::OffStaircase { .. })
        ));
    }

    #[test]
    fn from_points_checks_grid_uniformity() {
        assert!(ScalingTrace::from_points(&[(0.0, 1.0), (0.1, 1.0), (0.2, 0.75)]).is_ok());
        assert!(ScalingTrace::from_points(&[(0.0, 1.0), (0.1, 1.0), (0.25, 0.75)]).is_err());
    }
}
