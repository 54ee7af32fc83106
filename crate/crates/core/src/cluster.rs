//! DBSCAN over the preimage of each cover interval.
//!
//! Core points have at least `min_pts` points (themselves included) within
//! distance `eps`. Clusters are the connected components of core points under
//! the `<= eps` relation. A border point reachable from several clusters joins
//! the one whose smallest core point index is smallest, so the result does
//! not depend on the order in which points are visited.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::PointCloud;
use crate::knn;
use crate::lens::{assign_points, Cover, LensValues};
use crate::metric::{BoundMetric, Metric};

pub const DEFAULT_MIN_PTS: usize = 5;

/// Rows per rayon task when scanning neighbourhoods.
const PAR_MIN_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode", content = "value")]
pub enum EpsilonMode {
    Fixed(f64),
    /// Elbow of the sorted k-nearest-neighbour distance curve of the whole cloud.
    Adaptive,
}

impl std::str::FromStr for EpsilonMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("adaptive") {
            return Ok(EpsilonMode::Adaptive);
        }
        let eps: f64 = s
            .parse()
            .map_err(|_| Error::Param(format!("epsilon must be a number or \"adaptive\", got {s:?}")))?;
        EpsilonMode::Fixed(eps).validated()
    }
}

impl EpsilonMode {
    fn validated(self) -> Result<Self> {
        match self {
            EpsilonMode::Fixed(eps) if !(eps.is_finite() && eps > 0.0) => {
                Err(Error::Param(format!("fixed epsilon must be positive, got {eps}")))
            }
            other => Ok(other),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EpsilonMode::Fixed(_) => "fixed",
            EpsilonMode::Adaptive => "adaptive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterParams {
    pub min_pts: usize,
    pub epsilon: EpsilonMode,
    pub metric: Metric,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            min_pts: DEFAULT_MIN_PTS,
            epsilon: EpsilonMode::Adaptive,
            metric: Metric::Euclidean,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_pts == 0 {
            return Err(Error::Param("min_pts must be at least 1".into()));
        }
        self.epsilon.validated().map(|_| ())
    }
}

/// DBSCAN result for one interval. Point indices refer to the whole cloud;
/// clusters are sorted internally and ordered by their smallest member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub interval_index: usize,
    pub clusters: Vec<Vec<usize>>,
    pub noise: Vec<usize>,
    pub epsilon_used: f64,
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller root so roots are stable.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// The points of one interval, ordered by norm when the metric allows
/// pruning candidate pairs with `| |a| - |b| | <= d(a, b)`.
struct Slab<'m, 'c> {
    bound: &'m BoundMetric<'c>,
    global: Vec<usize>,
    norms: Vec<f64>,
    prune: bool,
}

impl<'m, 'c> Slab<'m, 'c> {
    fn new(bound: &'m BoundMetric<'c>, indices: &[usize]) -> Self {
        let prune = bound.supports_norm_pruning();
        let mut global = indices.to_vec();
        if prune {
            global.sort_by(|&a, &b| bound.norm(a).total_cmp(&bound.norm(b)).then(a.cmp(&b)));
        }
        let norms = global.iter().map(|&g| bound.norm(g)).collect();
        Slab {
            bound,
            global,
            norms,
            prune,
        }
    }

    fn len(&self) -> usize {
        self.global.len()
    }

    #[inline]
    fn out_of_reach(&self, lower: f64, upper: f64, eps: f64) -> bool {
        // The slack absorbs rounding in the cached norms.
        self.prune && upper - lower > eps + 1e-10 * upper
    }

    /// Calls `visit(t)` for every position `t != s` that may lie within `eps`,
    /// stopping early when `visit` returns `false`.
    #[inline]
    fn for_candidates(&self, s: usize, eps: f64, mut visit: impl FnMut(usize) -> bool) {
        for t in s + 1..self.len() {
            if self.out_of_reach(self.norms[s], self.norms[t], eps) {
                break;
            }
            if !visit(t) {
                return;
            }
        }
        for t in (0..s).rev() {
            if self.out_of_reach(self.norms[t], self.norms[s], eps) {
                break;
            }
            if !visit(t) {
                return;
            }
        }
    }

    #[inline]
    fn within(&self, s: usize, t: usize, eps: f64) -> bool {
        self.bound.distance(self.global[s], self.global[t]) <= eps
    }
}

/// DBSCAN on `indices` of `cloud` with radius `eps`.
pub fn dbscan(cloud: &PointCloud, indices: &[usize], params: &ClusterParams, eps: f64) -> ClusterAssignment {
    let bound = BoundMetric::for_points(cloud, params.metric, indices.iter().copied());
    dbscan_bound(&bound, indices, params.min_pts, eps)
}

/// DBSCAN with a metric whose norms are already cached for `indices`.
pub fn dbscan_bound(bound: &BoundMetric<'_>, indices: &[usize], min_pts: usize, eps: f64) -> ClusterAssignment {
    let slab = Slab::new(bound, indices);
    let m = slab.len();

    let core: Vec<bool> = (0..m)
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|s| {
            let mut count = 1;
            if count >= min_pts {
                return true;
            }
            slab.for_candidates(s, eps, |t| {
                if slab.within(s, t, eps) {
                    count += 1;
                }
                count < min_pts
            });
            count >= min_pts
        })
        .collect();

    let mut sets = DisjointSet::new(m);
    for s in 0..m {
        if !core[s] {
            continue;
        }
        for t in s + 1..m {
            if slab.out_of_reach(slab.norms[s], slab.norms[t], eps) {
                break;
            }
            if core[t] && sets.find(s) != sets.find(t) && slab.within(s, t, eps) {
                sets.union(s, t);
            }
        }
    }

    // Key each component by its smallest global core index.
    let mut key = vec![usize::MAX; m];
    for s in (0..m).filter(|&s| core[s]) {
        let r = sets.find(s);
        key[r] = key[r].min(slab.global[s]);
    }
    let core_key: Vec<usize> = (0..m)
        .map(|s| if core[s] { key[sets.find(s)] } else { usize::MAX })
        .collect();

    let border_key: Vec<usize> = (0..m)
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|s| {
            if core[s] {
                return core_key[s];
            }
            let mut best = usize::MAX;
            slab.for_candidates(s, eps, |t| {
                if core[t] && core_key[t] < best && slab.within(s, t, eps) {
                    best = core_key[t];
                }
                true
            });
            best
        })
        .collect();

    let mut by_key: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    let mut noise = Vec::new();
    for s in 0..m {
        match border_key[s] {
            usize::MAX => noise.push(slab.global[s]),
            k => by_key.entry(k).or_default().push(slab.global[s]),
        }
    }
    let mut clusters: Vec<Vec<usize>> = by_key
        .into_values()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    clusters.sort_by_key(|c| c[0]);
    noise.sort_unstable();
    ClusterAssignment {
        interval_index: 0,
        clusters,
        noise,
        epsilon_used: eps,
    }
}

/// Resolves the radius used for every interval of one run.
pub fn resolve_epsilon(cloud: &PointCloud, params: &ClusterParams) -> Result<f64> {
    params.validate()?;
    match params.epsilon {
        EpsilonMode::Fixed(eps) => Ok(eps),
        EpsilonMode::Adaptive => {
            let all: Vec<usize> = (0..cloud.n_points()).collect();
            let eps = knn::adaptive_epsilon(cloud, &all, knn::ELBOW_K, params.metric)?;
            if eps > 0.0 {
                Ok(eps)
            } else {
                Err(Error::Degenerate(format!(
                    "adaptive epsilon is {eps}; the cloud has too many duplicate points"
                )))
            }
        }
    }
}

/// Runs DBSCAN on every interval's preimage with a single radius.
pub fn cluster_all(
    cloud: &PointCloud,
    lens: &LensValues,
    cover: &Cover,
    params: &ClusterParams,
) -> Result<Vec<ClusterAssignment>> {
    let eps = resolve_epsilon(cloud, params)?;
    let preimages = assign_points(lens, cover);
    let bound = BoundMetric::new(cloud, params.metric);
    Ok(preimages
        .par_iter()
        .enumerate()
        .map(|(j, pts)| {
            let mut a = dbscan_bound(&bound, pts, params.min_pts, eps);
            a.interval_index = j;
            a
        })
        .collect())
}
