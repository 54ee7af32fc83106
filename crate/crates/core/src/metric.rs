//! Distance functions over `f32` rows, accumulated in `f64`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::PointCloud;

const LANES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Cosine,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::Param(format!("unknown metric {other:?}"))),
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

/// Sum of `f(a[i], b[i])` with a fixed lane split, so the result is
/// reproducible and the loop vectorizes.
#[inline(always)]
fn lane_sum(a: &[f32], b: &[f32], f: impl Fn(f64, f64) -> f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; LANES];
    let ca = a.chunks_exact(LANES);
    let cb = b.chunks_exact(LANES);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (xa, xb) in ca.zip(cb) {
        for k in 0..LANES {
            acc[k] += f(xa[k] as f64, xb[k] as f64);
        }
    }
    let mut tail = 0.0;
    for (&x, &y) in ra.iter().zip(rb) {
        tail += f(x as f64, y as f64);
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

#[inline]
pub fn squared_euclidean(a: &[f32], b: &[f32]) -> f64 {
    lane_sum(a, b, |x, y| (x - y) * (x - y))
}

#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    lane_sum(a, b, |x, y| x * y)
}

#[inline]
pub fn euclidean(a: &[f32], b: &[f32]) -> f64 {
    squared_euclidean(a, b).sqrt()
}

/// `1 - a.b / (|a| |b|)` from precomputed squared norms. A zero vector is at
/// distance 1 from every nonzero vector and 0 from another zero vector.
#[inline]
fn cosine_from_parts(dot: f64, sq_a: f64, sq_b: f64) -> f64 {
    match (sq_a == 0.0, sq_b == 0.0) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        // sqrt(x * x) == x in IEEE arithmetic, so a vector is exactly at
        // distance 0 from itself.
        _ => (1.0 - dot / (sq_a * sq_b).sqrt()).clamp(0.0, 2.0),
    }
}

#[inline]
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    cosine_from_parts(dot(a, b), dot(a, a), dot(b, b))
}

impl Metric {
    #[inline]
    pub fn distance(self, a: &[f32], b: &[f32]) -> f64 {
        match self {
            Metric::Euclidean => euclidean(a, b),
            Metric::Cosine => cosine(a, b),
        }
    }
}

/// A metric bound to a cloud, with per-point norms cached.
///
/// For the euclidean metric the norms also give the lower bound
/// `| |a| - |b| | <= d(a, b)`, which callers use to prune candidate pairs.
pub struct BoundMetric<'a> {
    cloud: &'a PointCloud,
    metric: Metric,
    sq_norms: Vec<f64>,
    norms: Vec<f64>,
}

impl<'a> BoundMetric<'a> {
    pub fn new(cloud: &'a PointCloud, metric: Metric) -> Self {
        Self::for_points(cloud, metric, 0..cloud.n_points())
    }

    /// Caches norms only for `points`; other rows must not be queried.
    pub fn for_points(
        cloud: &'a PointCloud,
        metric: Metric,
        points: impl IntoIterator<Item = usize>,
    ) -> Self {
        let mut sq_norms = vec![0.0; cloud.n_points()];
        let mut zeros = 0usize;
        for i in points {
            let r = cloud.row(i);
            sq_norms[i] = dot(r, r);
            if sq_norms[i] == 0.0 {
                zeros += 1;
            }
        }
        if metric == Metric::Cosine && zeros > 0 {
            log::warn!("{zeros} zero vector(s) under cosine distance; treated as distance 1");
        }
        let norms = sq_norms.iter().map(|s| s.sqrt()).collect();
        BoundMetric {
            cloud,
            metric,
            sq_norms,
            norms,
        }
    }

    #[inline]
    pub fn metric(&self) -> Metric {
        self.metric
    }

    #[inline]
    pub fn cloud(&self) -> &'a PointCloud {
        self.cloud
    }

    #[inline]
    pub fn norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.cloud.row(i), self.cloud.row(j));
        match self.metric {
            Metric::Euclidean => euclidean(a, b),
            Metric::Cosine => cosine_from_parts(dot(a, b), self.sq_norms[i], self.sq_norms[j]),
        }
    }

    /// A value that never exceeds `distance(i, j)`, or `None` when the
    /// metric offers no cheap bound.
    #[inline]
    pub fn lower_bound(&self, i: usize, j: usize) -> Option<f64> {
        match self.metric {
            Metric::Euclidean => Some((self.norms[i] - self.norms[j]).abs()),
            Metric::Cosine => None,
        }
    }

    /// Whether pruning by sorted norm is valid for this metric.
    pub fn supports_norm_pruning(&self) -> bool {
        self.metric == Metric::Euclidean
    }
}
