//! Brute-force reference implementations shared by the integration tests.
//! Everything here is deliberately naive: full distance matrices, exhaustive
//! pair checks and a cyclic Jacobi eigensolver.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use actmap::cluster::ClusterAssignment;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn naive_euclidean(a: &[f32], b: &[f32]) -> f64 {
    let mut s = 0.0f64;
    for (&x, &y) in a.iter().zip(b) {
        let d = x as f64 - y as f64;
        s += d * d;
    }
    s.sqrt()
}

pub fn naive_cosine(a: &[f32], b: &[f32]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 && bb == 0.0 {
        0.0
    } else if aa == 0.0 || bb == 0.0 {
        1.0
    } else {
        (1.0 - ab / (aa * bb).sqrt()).clamp(0.0, 2.0)
    }
}

/// Textbook DBSCAN over a full distance matrix. Returns clusters sorted by
/// smallest member and the sorted noise list. Border points reachable from
/// several clusters join the one whose smallest core point is smallest.
pub fn brute_dbscan(
    rows: &[Vec<f32>],
    cosine: bool,
    min_pts: usize,
    eps: f64,
) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = rows.len();
    let dist = |i: usize, j: usize| {
        if cosine {
            naive_cosine(&rows[i], &rows[j])
        } else {
            naive_euclidean(&rows[i], &rows[j])
        }
    };
    let near: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| dist(i, j) <= eps).collect()).collect();
    let core: Vec<bool> = (0..n)
        .map(|i| near[i].iter().filter(|&&b| b).count() >= min_pts)
        .collect();

    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if !core[s] || comp[s] != usize::MAX {
            continue;
        }
        let id = groups.len();
        let mut members = vec![];
        let mut queue = VecDeque::from([s]);
        comp[s] = id;
        while let Some(u) = queue.pop_front() {
            members.push(u);
            for v in 0..n {
                if core[v] && near[u][v] && comp[v] == usize::MAX {
                    comp[v] = id;
                    queue.push_back(v);
                }
            }
        }
        groups.push(members);
    }
    let key: Vec<usize> = groups.iter().map(|g| *g.iter().min().unwrap()).collect();
    let mut noise = vec![];
    for p in 0..n {
        if core[p] {
            continue;
        }
        let best = (0..n)
            .filter(|&c| core[c] && near[p][c])
            .map(|c| comp[c])
            .min_by_key(|&g| key[g]);
        match best {
            Some(g) => groups[g].push(p),
            None => noise.push(p),
        }
    }
    let mut clusters: Vec<Vec<usize>> = groups
        .into_iter()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect();
    clusters.sort();
    (clusters, noise)
}

/// Edges of the nerve of a cluster family by checking every pair.
/// Values are `(|intersection|, |union|)`.
pub fn brute_nerve(clusters: &[Vec<usize>]) -> BTreeMap<(usize, usize), (usize, usize)> {
    let sets: Vec<BTreeSet<usize>> = clusters.iter().map(|c| c.iter().copied().collect()).collect();
    let mut out = BTreeMap::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let inter = sets[i].intersection(&sets[j]).count();
            if inter > 0 {
                out.insert((i, j), (inter, sets[i].union(&sets[j]).count()));
            }
        }
    }
    out
}

/// Exact kth-nearest-neighbour distance (self excluded) for every row.
pub fn brute_kth(rows: &[Vec<f32>], k: usize, cosine: bool) -> Vec<f64> {
    (0..rows.len())
        .map(|i| {
            let mut d: Vec<f64> = (0..rows.len())
                .filter(|&j| j != i)
                .map(|j| {
                    if cosine {
                        naive_cosine(&rows[i], &rows[j])
                    } else {
                        naive_euclidean(&rows[i], &rows[j])
                    }
                })
                .collect();
            d.sort_by(f64::total_cmp);
            d[k - 1]
        })
        .collect()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with matching unit eigenvectors.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(i == j)).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-32 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|r| v[r][i]).collect()).collect();
    (values, vectors)
}

/// Sample covariance (divisor m - 1) of the given rows.
pub fn covariance(rows: &[Vec<f32>]) -> Vec<Vec<f64>> {
    let m = rows.len();
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|c| rows.iter().map(|r| r[c] as f64).sum::<f64>() / m as f64)
        .collect();
    let mut cov = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += (r[i] as f64 - mean[i]) * (r[j] as f64 - mean[j]);
            }
        }
    }
    cov.iter_mut().flatten().for_each(|x| *x /= m as f64 - 1.0);
    cov
}

/// Sine of the largest principal angle between the spans of two orthonormal
/// families, bounded above by the Frobenius norm of the residual of `b`
/// after projection onto `a`.
pub fn subspace_sine(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut sq = 0.0;
    for w in b {
        let mut r = w.clone();
        for u in a {
            let c: f64 = u.iter().zip(w).map(|(x, y)| x * y).sum();
            r.iter_mut().zip(u).for_each(|(ri, ui)| *ri -= c * ui);
        }
        sq += r.iter().map(|x| x * x).sum::<f64>();
    }
    sq.sqrt()
}

/// Accuracy of a bias perceptron trained for `epochs` passes on labels +-1.
pub fn perceptron_accuracy(x: &[[f64; 2]], y: &[f64], epochs: usize) -> f64 {
    let mut w = [0.0f64; 3];
    for _ in 0..epochs {
        for (p, &t) in x.iter().zip(y) {
            if (w[0] * p[0] + w[1] * p[1] + w[2]) * t <= 0.0 {
                w[0] += t * p[0];
                w[1] += t * p[1];
                w[2] += t;
            }
        }
    }
    let ok = x
        .iter()
        .zip(y)
        .filter(|(p, &t)| (w[0] * p[0] + w[1] * p[1] + w[2]) * t > 0.0)
        .count();
    ok as f64 / x.len() as f64
}

/// Number of independent cycles of an undirected graph.
pub fn cycle_rank(n_nodes: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n_nodes).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] == x {
            x
        } else {
            let r = find(p, p[x]);
            p[x] = r;
            r
        }
    }
    let mut comps = n_nodes;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    edges.len() + comps - n_nodes
}

/// A random DBSCAN instance: Gaussian blobs plus uniform clutter, or small
/// integer coordinates that produce exact distance ties. The radius is the
/// midpoint between two consecutive distinct pairwise distances for
/// continuous data and an exact lattice distance for integer data.
pub struct DbscanCase {
    pub rows: Vec<Vec<f32>>,
    pub cosine: bool,
    pub min_pts: usize,
    pub eps: f64,
}

pub fn random_dbscan_case(seed: u64) -> DbscanCase {
    let mut r = rng(seed);
    let n = r.random_range(1..=300usize);
    let d = r.random_range(1..=16usize);
    let cosine = r.random_bool(0.5);
    let min_pts = r.random_range(1..=8usize);
    let lattice = r.random_bool(0.25);
    let rows: Vec<Vec<f32>> = if lattice {
        (0..n)
            .map(|_| (0..d).map(|_| r.random_range(-3..=3i32) as f32).collect())
            .collect()
    } else {
        let k = r.random_range(1..=5usize);
        let centers: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..d).map(|_| r.random_range(-5.0..5.0)).collect())
            .collect();
        (0..n)
            .map(|_| {
                if r.random_bool(0.15) {
                    (0..d).map(|_| r.random_range(-6.0..6.0) as f32).collect()
                } else {
                    let c = &centers[r.random_range(0..k)];
                    let s: f64 = r.random_range(0.1..1.0);
                    c.iter().map(|&x| (x + s * r.random_range(-1.0..1.0)) as f32).collect()
                }
            })
            .collect()
    };
    let dist = |a: &[f32], b: &[f32]| {
        if cosine {
            naive_cosine(a, b)
        } else {
            naive_euclidean(a, b)
        }
    };
    let mut all: Vec<f64> = vec![];
    for i in 0..n {
        for j in i + 1..n {
            all.push(dist(&rows[i], &rows[j]));
        }
    }
    all.sort_by(f64::total_cmp);
    all.dedup();
    let eps = if all.is_empty() {
        1.0
    } else {
        let q = r.random_range(0.0..0.3f64);
        let i = ((all.len() - 1) as f64 * q) as usize;
        if lattice {
            all[i].max(f64::MIN_POSITIVE)
        } else if i + 1 < all.len() {
            0.5 * (all[i] + all[i + 1])
        } else {
            all[i] * 1.5 + 1e-3
        }
    };
    DbscanCase {
        rows,
        cosine,
        min_pts,
        eps: if eps > 0.0 { eps } else { 0.5 },
    }
}

/// Random family: each interval partitions a random subset of the points
/// into disjoint clusters; clusters of different intervals overlap freely.
pub fn random_family(seed: u64) -> (Vec<ClusterAssignment>, usize) {
    let mut r = rng(seed);
    let n_points = r.random_range(1..=200usize);
    let n_intervals = r.random_range(1..=8usize);
    let mut budget = r.random_range(1..=40usize);
    let mut out = vec![];
    for j in 0..n_intervals {
        let mut pts: Vec<usize> = (0..n_points).filter(|_| r.random_bool(0.3)).collect();
        pts.shuffle(&mut r);
        let k = r.random_range(0..=budget.min(6)).min(pts.len());
        budget -= k;
        let mut clusters = vec![vec![]; k];
        for (i, p) in pts.into_iter().enumerate() {
            if i < k {
                clusters[i].push(p);
            } else if k > 0 && r.random_bool(0.8) {
                clusters[r.random_range(0..k)].push(p);
            }
        }
        let mut clusters: Vec<Vec<usize>> = clusters
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        clusters.sort();
        out.push(ClusterAssignment {
            interval_index: j,
            clusters,
            noise: vec![],
            epsilon_used: 1.0,
        });
    }
    (out, n_points)
}

/// A random matrix with up to 50 rows and 10 columns whose columns have
/// distinct scales, so the top two components are well separated.
pub fn random_matrix(seed: u64) -> Vec<Vec<f32>> {
    let mut r = rng(seed);
    let m = r.random_range(3..=50usize);
    let d = r.random_range(2..=10usize);
    let scales: Vec<f64> = (0..d).map(|_| 10f64.powf(r.random_range(-1.0..1.0))).collect();
    let shift: Vec<f64> = (0..d).map(|_| r.random_range(-5.0..5.0)).collect();
    (0..m)
        .map(|_| {
            (0..d)
                .map(|c| {
                    let z: f64 = r.sample(StandardNormal);
                    (shift[c] + scales[c] * z) as f32
                })
                .collect()
        })
        .collect()
}

/// Gaussian cloud of 10 to 250 points in up to 12 dimensions.
pub fn random_cloud(seed: u64) -> Vec<Vec<f32>> {
    let mut r = rng(seed);
    let n = r.random_range(10..=250usize);
    let d = r.random_range(1..=12usize);
    let spread: f64 = r.random_range(0.1..10.0);
    (0..n)
        .map(|_| {
            (0..d)
                .map(|_| {
                    let z: f64 = r.sample(StandardNormal);
                    (spread * z) as f32
                })
                .collect()
        })
        .collect()
}

pub mod fixtures {
    use actmap::analysis::{find_branching_nodes, pooled_members, DEFAULT_MIN_DEGREE};
    use actmap::nerve::top_classes;
    use actmap::pca::pca_refine;
    use actmap::synth::{generate, SynthKind, SynthSpec};
    use actmap::{MapperGraph, PointCloud, PointMetadata};

    pub const CIRCLE_SEED: u64 = 0;
    pub const Y_BRANCH_SEED: u64 = 0;

    pub fn circle() -> (PointCloud, PointMetadata) {
        generate(&SynthSpec {
            kind: SynthKind::NoisyCircle,
            n_points: 400,
            dim: 8,
            noise_sigma: 0.05,
            seed: CIRCLE_SEED,
        })
        .unwrap()
    }

    pub fn y_branch(seed: u64) -> (PointCloud, PointMetadata) {
        generate(&SynthSpec {
            kind: SynthKind::YBranch,
            n_points: 900,
            dim: 64,
            noise_sigma: 0.05,
            seed,
        })
        .unwrap()
    }

    /// Best pair of branches leaving one branching node.
    #[derive(Debug, Clone)]
    pub struct BranchPair {
        pub hub: usize,
        pub labels: [String; 2],
        pub purity: [f64; 2],
        pub accuracy: f64,
    }

    /// Searches every branching node for two branches whose majority labels
    /// differ and whose purity is at least `min_purity`, projects their
    /// pooled points and scores a perceptron on the two labels. Returns the
    /// pair with the best accuracy.
    pub fn best_branch_pair(
        graph: &MapperGraph,
        cloud: &PointCloud,
        meta: &PointMetadata,
        min_purity: f64,
    ) -> Option<BranchPair> {
        let mut best: Option<BranchPair> = None;
        for report in find_branching_nodes(graph, DEFAULT_MIN_DEGREE, Some(meta)) {
            let pure: Vec<(usize, String, f64)> = report
                .branches
                .iter()
                .enumerate()
                .filter_map(|(i, b)| {
                    let pts = pooled_members(graph, &b.nodes);
                    let top = top_classes(&pts, meta, 1).into_iter().next()?;
                    (top.pct >= min_purity).then_some((i, top.label, top.pct))
                })
                .collect();
            for (x, a) in pure.iter().enumerate() {
                for b in &pure[x + 1..] {
                    if a.1 == b.1 {
                        continue;
                    }
                    let sel: Vec<usize> = report.branches[a.0]
                        .nodes
                        .iter()
                        .chain(&report.branches[b.0].nodes)
                        .copied()
                        .collect();
                    let proj = pca_refine(cloud, graph, &sel, None).ok()?;
                    let (mut xs, mut ys) = (vec![], vec![]);
                    for (k, &p) in proj.point_ids.iter().enumerate() {
                        let label = meta.label(p);
                        if label == a.1 {
                            xs.push(proj.coords[k]);
                            ys.push(1.0);
                        } else if label == b.1 {
                            xs.push(proj.coords[k]);
                            ys.push(-1.0);
                        }
                    }
                    let accuracy = super::perceptron_accuracy(&xs, &ys, 100);
                    if best.as_ref().is_none_or(|c| accuracy > c.accuracy) {
                        best = Some(BranchPair {
                            hub: report.branching_node,
                            labels: [a.1.clone(), b.1.clone()],
                            purity: [a.2, b.2],
                            accuracy,
                        });
                    }
                }
            }
        }
        best
    }
}
