//! End-to-end construction: lens, cover, clustering, nerve, edge filter.

use serde::{Deserialize, Serialize};

use crate::cluster::{cluster_all, resolve_epsilon, ClusterParams, EpsilonMode};
use crate::error::{Error, Result};
use crate::io::{PointCloud, PointMetadata};
use crate::lens::{build_cover, compute_lens, LensKind};
use crate::metric::Metric;
use crate::nerve::{build_nerve, filter_edges, MapperGraph, Params};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapperConfig {
    pub lens: LensKind,
    pub n_intervals: usize,
    pub overlap: f64,
    pub min_pts: usize,
    pub epsilon: EpsilonMode,
    pub metric: Metric,
    pub min_jaccard: f64,
}

impl Default for MapperConfig {
    fn default() -> Self {
        MapperConfig {
            lens: LensKind::L2Norm,
            n_intervals: 70,
            overlap: 0.3,
            min_pts: 5,
            epsilon: EpsilonMode::Adaptive,
            metric: Metric::Euclidean,
            min_jaccard: 0.0,
        }
    }
}

impl MapperConfig {
    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams {
            min_pts: self.min_pts,
            epsilon: self.epsilon,
            metric: self.metric,
        }
    }

    /// Dataset name such as `overlap-30-epsilon-adaptive`.
    pub fn name(&self) -> String {
        let pct = self.overlap * 100.0;
        let pct = if (pct - pct.round()).abs() < 1e-9 {
            format!("{}", pct.round() as i64)
        } else {
            format!("{pct}")
        };
        format!("overlap-{pct}-epsilon-{}", self.epsilon.label())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_intervals == 0 {
            return Err(Error::Param("number of intervals must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::Param(format!("overlap {} outside [0, 1)", self.overlap)));
        }
        if !(0.0..=1.0).contains(&self.min_jaccard) {
            return Err(Error::Param(format!("min_jaccard {} outside [0, 1]", self.min_jaccard)));
        }
        self.cluster_params().validate()
    }

    /// Flat provenance record embedded in every output.
    pub fn to_params(&self) -> Params {
        let mut p = Params::new();
        p.insert("name".into(), self.name().into());
        p.insert("lens".into(), serde_json::to_value(self.lens).unwrap());
        p.insert("n_intervals".into(), self.n_intervals.into());
        p.insert("overlap".into(), self.overlap.into());
        p.insert("min_pts".into(), self.min_pts.into());
        p.insert("epsilon_mode".into(), self.epsilon.label().into());
        let eps = match self.epsilon {
            EpsilonMode::Fixed(e) => serde_json::Value::from(e),
            EpsilonMode::Adaptive => serde_json::Value::Null,
        };
        p.insert("epsilon".into(), eps);
        p.insert("metric".into(), self.metric.to_string().into());
        p.insert("min_jaccard".into(), self.min_jaccard.into());
        p
    }
}

/// Accepts a fraction in `[0, 1)` or an integer percentage in `[1, 100)`.
pub fn parse_overlap(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Param(format!("overlap must be a number, got {s:?}")))?;
    let fraction = if (0.0..1.0).contains(&v) {
        v
    } else if v.fract() == 0.0 && (1.0..100.0).contains(&v) {
        v / 100.0
    } else {
        return Err(Error::Param(format!(
            "overlap {s} is neither a fraction in [0, 1) nor an integer percentage below 100"
        )));
    };
    Ok(fraction)
}

/// Builds the mapper graph of `cloud`. The graph's params hold the config,
/// the radius actually used and the number of points left out of every node.
pub fn build_graph(cloud: &PointCloud, metadata: Option<&PointMetadata>, config: &MapperConfig) -> Result<MapperGraph> {
    config.validate()?;
    if let Some(meta) = metadata {
        if meta.len() != cloud.n_points() {
            return Err(Error::Data(format!(
                "metadata has {} records for {} points",
                meta.len(),
                cloud.n_points()
            )));
        }
    }
    let mut params = config.to_params();
    params.insert("n_points".into(), cloud.n_points().into());
    params.insert("dim".into(), cloud.dim().into());

    if cloud.n_points() == 0 {
        params.insert("epsilon_used".into(), serde_json::Value::Null);
        params.insert("dropped_points".into(), 0.into());
        return Ok(MapperGraph {
            params,
            ..Default::default()
        });
    }

    let lens = compute_lens(cloud, config.lens);
    let cover = build_cover(&lens, config.n_intervals, config.overlap)?;
    let cluster_params = config.cluster_params();
    let eps = resolve_epsilon(cloud, &cluster_params)?;
    let fixed = ClusterParams {
        epsilon: EpsilonMode::Fixed(eps),
        ..cluster_params
    };
    let assignments = cluster_all(cloud, &lens, &cover, &fixed)?;
    let graph = build_nerve(&assignments, &lens, metadata);
    let mut graph = filter_edges(&graph, config.min_jaccard)?;

    params.insert("epsilon_used".into(), eps.into());
    params.insert("dropped_points".into(), (cloud.n_points() - graph.covered_points()).into());
    graph.params = params;
    Ok(graph)
}
