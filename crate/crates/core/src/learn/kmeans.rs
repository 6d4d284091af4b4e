//! Scalar k-means with silhouette-based model selection.
//!
//! Used to estimate how many plateaus a safety staircase has from logged
//! scaling samples alone. One-dimensional data keeps everything exact and
//! cheap: optimal clusters are contiguous ranges of the sorted samples, so
//! Lloyd iterations and silhouette scores reduce to prefix-sum arithmetic.
//! The whole procedure is deterministic — centroids are seeded from
//! quantiles of the distinct values, not random restarts — so repeated runs
//! on the same data agree bit for bit.

use crate::error::{Error, Result};

/// Minimum number of samples demanded before estimating anything.
pub const MIN_SAMPLES: usize = 100;

/// Largest cluster count ever considered.
pub const MAX_K: usize = 20;

/// Data spread below which the samples count as one plateau.
pub const FLAT_SPREAD: f64 = 1e-6;

/// Result of a cluster-count estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct KEstimate {
    /// Selected number of clusters.
    pub k: usize,
    /// Cluster centres in ascending order.
    pub centers: Vec<f64>,
    /// Mean silhouette of the winning clustering; `None` when `k == 1`
    /// (the score is undefined for a single cluster).
    pub silhouette: Option<f64>,
}

/// Estimate the number of distinct levels in `samples`.
///
/// Candidate counts 2..=min(20, #distinct values) are clustered with
/// deterministic scalar k-means and scored by mean silhouette; the count
/// with the strictly best score wins, so ties fall to the smaller k. Data
/// whose total spread is below [`FLAT_SPREAD`] short-circuits to `k = 1`.
pub fn estimate_k(samples: &[f64]) -> Result<KEstimate> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData { got: samples.len(), need: MIN_SAMPLES });
    }
    if let Some(idx) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSample(idx));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);

    let spread = sorted[sorted.len() - 1] - sorted[0];
    if spread < FLAT_SPREAD {
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        return Ok(KEstimate { k: 1, centers: vec![mean], silhouette: None });
    }

    let distinct = count_distinct(&sorted);
    let k_max = MAX_K.min(distinct);
    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for k in 2..=k_max {
        let centers = lloyd_1d(&sorted, k);
        let score = silhouette_1d(&sorted, &centers);
        let improves = match &best {
            None => true,
            Some((_, _, best_score)) => score > *best_score,
        };
        if improves {
            best = Some((k, centers, score));
        }
    }
    let (k, centers, score) = best.expect("spread check guarantees at least two distinct values");
    Ok(KEstimate { k, centers, silhouette: Some(score) })
}

fn count_distinct(sorted: &[f64]) -> usize {
    let mut n = 0;
    let mut last = f64::NAN;
    for &v in sorted {
        if v != last {
            n += 1;
            last = v;
        }
    }
    n
}

fn prefix_sums(sorted: &[f64]) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    prefix.push(0.0);
    for &v in sorted {
        prefix.push(prefix.last().unwrap() + v);
    }
    prefix
}

/// Cluster block boundaries induced by ordered `centers` on `sorted` data:
/// block `j` covers `bounds[j]..bounds[j + 1]`. Points exactly on a
/// midpoint between two centres belong to the upper block.
fn block_bounds(sorted: &[f64], centers: &[f64]) -> Vec<usize> {
    let k = centers.len();
    let mut bounds = vec![0usize; k + 1];
    bounds[k] = sorted.len();
    for j in 1..k {
        let mid = 0.5 * (centers[j - 1] + centers[j]);
        bounds[j] = sorted.partition_point(|&x| x < mid).max(bounds[j - 1]);
    }
    bounds
}

/// Lloyd's algorithm on pre-sorted scalar data with deterministic
/// quantile initialisation. Returns `k` centres in ascending order.
/// Requires `k >= 1` and at least `k` distinct values.
pub fn lloyd_1d(sorted: &[f64], k: usize) -> Vec<f64> {
    assert!(k >= 1);
    let prefix = prefix_sums(sorted);
    // Seed centres at quantiles of the distinct values; with at least k of
    // them the seeds are strictly increasing.
    let mut distinct: Vec<f64> = Vec::new();
    for &v in sorted {
        if distinct.last() != Some(&v) {
            distinct.push(v);
        }
    }
    let m = distinct.len();
    assert!(m >= k, "need at least k distinct values, got {m} for k = {k}");
    let mut centers: Vec<f64> = (0..k)
        .map(|j| if k == 1 { distinct[m / 2] } else { distinct[j * (m - 1) / (k - 1)] })
        .collect();

    for _ in 0..200 {
        let bounds = block_bounds(sorted, &centers);
        let mut moved: f64 = 0.0;
        for j in 0..k {
            let (b, e) = (bounds[j], bounds[j + 1]);
            // An empty block keeps its centre; neighbouring updates usually
            // hand it points on the next pass.
            if e > b {
                let c = (prefix[e] - prefix[b]) / (e - b) as f64;
                moved = moved.max((c - centers[j]).abs());
                centers[j] = c;
            }
        }
        if moved < 1e-12 {
            break;
        }
    }
    centers
}

/// Mean silhouette coefficient of the clustering that `centers` induces on
/// `sorted`. Points in singleton clusters score 0 by convention; a
/// clustering with fewer than two non-empty blocks scores 0.
pub fn silhouette_1d(sorted: &[f64], centers: &[f64]) -> f64 {
    let bounds = block_bounds(sorted, centers);
    let prefix = prefix_sums(sorted);
    let blocks: Vec<(usize, usize)> = (0..centers.len())
        .map(|j| (bounds[j], bounds[j + 1]))
        .filter(|(b, e)| e > b)
        .collect();
    if blocks.len() < 2 || sorted.is_empty() {
        return 0.0;
    }

    let mut total = 0.0;
    for (bi, &(b, e)) in blocks.iter().enumerate() {
        let nc = e - b;
        for p in b..e {
            if nc == 1 {
                continue; // singleton: s = 0
            }
            let x = sorted[p];
            // Mean absolute distance to the rest of the own block, exact
            // via prefix sums over the sorted data.
            let within = x * (p - b) as f64 - (prefix[p] - prefix[b])
                + (prefix[e] - prefix[p + 1])
                - x * (e - p - 1) as f64;
            let a = within / (nc - 1) as f64;
            // Nearest other block by mean distance; blocks never straddle
            // x, they are entirely to its left or right.
            let mut b_min = f64::INFINITY;
            for (bj, &(b2, e2)) in blocks.iter().enumerate() {
                if bj == bi {
                    continue;
                }
                let n2 = (e2 - b2) as f64;
                let sum2 = prefix[e2] - prefix[b2];
                let dist_sum = if b2 >= e { sum2 - x * n2 } else { x * n2 - sum2 };
                b_min = b_min.min(dist_sum / n2);
            }
            total += (b_min - a) / a.max(b_min);
        }
    }
    total / sorted.len() as f64
}
