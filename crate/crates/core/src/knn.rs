//! Exact k-nearest-neighbour distances and the elbow of their sorted curve.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::PointCloud;
use crate::metric::{BoundMetric, Metric};

/// Neighbour rank used for the adaptive radius.
pub const ELBOW_K: usize = 5;

/// Distance from each of `indices` to its `k`-th nearest other point among
/// `indices` (the point itself is excluded; duplicates count as neighbours).
pub fn kth_neighbor_distances(
    cloud: &PointCloud,
    indices: &[usize],
    k: usize,
    metric: Metric,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Param("k must be at least 1".into()));
    }
    if indices.len() < k + 1 {
        return Err(Error::Param(format!(
            "need at least {} points for the {k}-th neighbour, got {}",
            k + 1,
            indices.len()
        )));
    }
    let bound = BoundMetric::for_points(cloud, metric, indices.iter().copied());
    // Positions into `indices`, sorted by norm when pruning applies.
    let mut perm: Vec<usize> = (0..indices.len()).collect();
    let prune = bound.supports_norm_pruning();
    if prune {
        perm.sort_by(|&a, &b| {
            let (a, b) = (indices[a], indices[b]);
            bound.norm(a).total_cmp(&bound.norm(b)).then(a.cmp(&b))
        });
    }
    let order: Vec<usize> = perm.iter().map(|&i| indices[i]).collect();
    let norms: Vec<f64> = order.iter().map(|&g| bound.norm(g)).collect();
    let m = order.len();

    let kth: Vec<f64> = (0..m)
        .into_par_iter()
        .with_min_len(32)
        .map(|s| {
            // `best` holds the k smallest distances seen so far, ascending.
            let mut best: Vec<f64> = Vec::with_capacity(k + 1);
            if !prune {
                for t in (0..m).filter(|&t| t != s) {
                    offer(&mut best, k, bound.distance(order[s], order[t]));
                }
                return best[k - 1];
            }
            // Walk outwards in norm order, nearest gap first, until the gap
            // alone exceeds the current k-th distance.
            let (mut down, mut up) = (s, s + 1);
            loop {
                let gap_down = (down > 0).then(|| norms[s] - norms[down - 1]);
                let gap_up = (up < m).then(|| norms[up] - norms[s]);
                let (take_up, gap) = match (gap_down, gap_up) {
                    (None, None) => break,
                    (Some(g), None) => (false, g),
                    (None, Some(g)) => (true, g),
                    (Some(a), Some(b)) => {
                        if b < a {
                            (true, b)
                        } else {
                            (false, a)
                        }
                    }
                };
                if best.len() == k && gap > best[k - 1] + 1e-10 * norms[s].max(gap) {
                    break;
                }
                let t = if take_up {
                    up += 1;
                    up - 1
                } else {
                    down -= 1;
                    down
                };
                offer(&mut best, k, bound.distance(order[s], order[t]));
            }
            best[k - 1]
        })
        .collect();
    let mut out = vec![0.0; m];
    for (s, d) in kth.into_iter().enumerate() {
        out[perm[s]] = d;
    }
    Ok(out)
}

/// Inserts `d` into the ascending list of the `k` smallest distances.
#[inline]
fn offer(best: &mut Vec<f64>, k: usize, d: f64) {
    if best.len() < k || d < best[k - 1] {
        let at = best.partition_point(|&b| b <= d);
        best.insert(at, d);
        best.truncate(k);
    }
}

/// Index of the point of an ascending curve farthest from the chord joining
/// its endpoints; ties resolve to the smallest index.
pub fn elbow_index(curve: &[f64]) -> usize {
    let m = curve.len();
    if m < 3 {
        return 0;
    }
    let (first, last) = (curve[0], curve[m - 1]);
    let rise = last - first;
    let run = (m - 1) as f64;
    // Perpendicular distance up to the constant factor 1 / |chord|.
    let mut best = (0usize, 0.0f64);
    for (i, &y) in curve.iter().enumerate() {
        let d = (rise * i as f64 - run * (y - first)).abs();
        if d > best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Sorted `k`-NN distances of `indices`, read at the elbow.
pub fn adaptive_epsilon(cloud: &PointCloud, indices: &[usize], k: usize, metric: Metric) -> Result<f64> {
    let mut curve = kth_neighbor_distances(cloud, indices, k, metric)?;
    curve.sort_by(f64::total_cmp);
    Ok(curve[elbow_index(&curve)])
}
