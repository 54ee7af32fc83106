//! Refinement of selected substructures: PCA projection of the pooled
//! members and the axis-aligned bounding-box neighbourhood.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::pooled_members;
use crate::error::{Error, Result};
use crate::io::PointCloud;
use crate::nerve::MapperGraph;

pub const SHARED_GROUP: &str = "shared";
pub const UNGROUPED: &str = "other";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    pub point_ids: Vec<usize>,
    pub coords: Vec<[f64; 2]>,
    pub explained_variance: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_labels: Option<Vec<String>>,
}

/// Leading eigenpairs of the sample covariance, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalComponents {
    pub mean: Vec<f64>,
    pub variances: Vec<f64>,
    /// Unit directions; the largest-magnitude coordinate of each is positive.
    pub directions: Vec<Vec<f64>>,
}

impl PrincipalComponents {
    pub fn project(&self, row: &[f32]) -> Vec<f64> {
        self.directions
            .iter()
            .map(|dir| {
                dir.iter()
                    .zip(row.iter().zip(&self.mean))
                    .map(|(w, (&x, m))| w * (x as f64 - m))
                    .sum()
            })
            .collect()
    }
}

/// Top-`k` principal components of the rows `points` of `cloud`. Directions
/// beyond the data dimension are reported as zero vectors with zero variance.
pub fn principal_components(cloud: &PointCloud, points: &[usize], k: usize) -> Result<PrincipalComponents> {
    let m = points.len();
    let d = cloud.dim();
    if m < 2 {
        return Err(Error::Degenerate(format!("PCA needs at least 2 points, got {m}")));
    }
    let mut mean = vec![0.0f64; d];
    for &p in points {
        for (acc, &x) in mean.iter_mut().zip(cloud.row(p)) {
            *acc += x as f64;
        }
    }
    mean.iter_mut().for_each(|v| *v /= m as f64);

    let centered = DMatrix::from_fn(m, d, |r, c| cloud.row(points[r])[c] as f64 - mean[c]);
    let cov = (centered.transpose() * &centered) / (m as f64 - 1.0);
    if cov.trace() <= 0.0 {
        return Err(Error::Degenerate("all selected points are identical".into()));
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut variances = Vec::with_capacity(k);
    let mut directions = Vec::with_capacity(k);
    for slot in 0..k {
        match order.get(slot) {
            Some(&col) => {
                let mut dir: Vec<f64> = eig.eigenvectors.column(col).iter().copied().collect();
                let lead = dir
                    .iter()
                    .enumerate()
                    .fold(0, |best, (i, v)| if v.abs() > dir[best].abs() { i } else { best });
                if dir[lead] < 0.0 {
                    dir.iter_mut().for_each(|v| *v = -*v);
                }
                variances.push(eig.eigenvalues[col].max(0.0));
                directions.push(dir);
            }
            None => {
                variances.push(0.0);
                directions.push(vec![0.0; d]);
            }
        }
    }
    Ok(PrincipalComponents {
        mean,
        variances,
        directions,
    })
}

fn check_selection(graph: &MapperGraph, node_ids: &[usize]) -> Result<()> {
    if node_ids.is_empty() {
        return Err(Error::Param("node selection is empty".into()));
    }
    for &id in node_ids {
        graph.node(id)?;
    }
    Ok(())
}

/// A named set of nodes, used to tag projected points (e.g. two branches).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeGroup {
    pub label: String,
    pub nodes: Vec<usize>,
}

/// Projects the pooled members of `node_ids` onto their top two principal
/// directions. Points are listed in ascending id order; with `groups`, each
/// point is tagged by the group containing it, `"shared"` when in several
/// and `"other"` when in none.
pub fn pca_refine(
    cloud: &PointCloud,
    graph: &MapperGraph,
    node_ids: &[usize],
    groups: Option<&[NodeGroup]>,
) -> Result<Projection2D> {
    check_selection(graph, node_ids)?;
    if let Some(groups) = groups {
        for g in groups {
            check_selection(graph, &g.nodes)?;
        }
    }
    let points = pooled_members(graph, node_ids);
    if let Some(&p) = points.iter().find(|&&p| p >= cloud.n_points()) {
        return Err(Error::Data(format!(
            "graph member {p} is outside the {}-point cloud",
            cloud.n_points()
        )));
    }
    let pcs = principal_components(cloud, &points, 2)?;
    let coords = points
        .par_iter()
        .map(|&p| {
            let c = pcs.project(cloud.row(p));
            [c[0], c[1]]
        })
        .collect();

    let group_labels = groups.map(|groups| {
        let pooled: Vec<Vec<usize>> = groups.iter().map(|g| pooled_members(graph, &g.nodes)).collect();
        points
            .iter()
            .map(|p| {
                let mut hits = pooled
                    .iter()
                    .zip(groups)
                    .filter(|(pts, _)| pts.binary_search(p).is_ok());
                match (hits.next(), hits.next()) {
                    (None, _) => UNGROUPED.to_string(),
                    (Some((_, g)), None) => g.label.clone(),
                    (Some(_), Some(_)) => SHARED_GROUP.to_string(),
                }
            })
            .collect()
    });

    Ok(Projection2D {
        point_ids: points,
        coords,
        explained_variance: [pcs.variances[0], pcs.variances[1]],
        group_labels,
    })
}

/// All cloud points inside the axis-aligned bounding box of the selected
/// nodes' members, ascending.
pub fn neighborhood_box(cloud: &PointCloud, graph: &MapperGraph, node_ids: &[usize]) -> Result<Vec<usize>> {
    check_selection(graph, node_ids)?;
    let members = pooled_members(graph, node_ids);
    let d = cloud.dim();
    let mut lo = vec![f32::INFINITY; d];
    let mut hi = vec![f32::NEG_INFINITY; d];
    for &p in &members {
        for (k, &x) in cloud.row(p).iter().enumerate() {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    Ok((0..cloud.n_points())
        .into_par_iter()
        .filter(|&i| {
            cloud
                .row(i)
                .iter()
                .zip(lo.iter().zip(&hi))
                .all(|(&x, (&l, &h))| l <= x && x <= h)
        })
        .collect())
}
