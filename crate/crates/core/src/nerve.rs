//! The 1-dimensional nerve of the clustered cover: one node per cluster and
//! an edge wherever two clusters share a point, weighted by Jaccard index.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::error::{Error, Result};
use crate::io::PointMetadata;
use crate::lens::LensValues;

/// Number of classes summarised per node.
pub const TOP_CLASSES: usize = 3;

/// Examples listed per top class in a node detail.
pub const EXAMPLES_PER_CLASS: usize = 5;

/// Free-form construction parameter record carried by every graph.
pub type Params = serde_json::Map<String, serde_json::Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopClass {
    pub label: String,
    pub count: usize,
    pub pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapperNode {
    pub id: usize,
    pub interval: usize,
    pub size: usize,
    pub avg_lens: f64,
    pub members: Vec<usize>,
    pub top_classes: Vec<TopClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapperEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct MapperGraph {
    pub params: Params,
    pub lens_range: Option<[f64; 2]>,
    pub nodes: Vec<MapperNode>,
    pub edges: Vec<MapperEdge>,
}

impl MapperGraph {
    pub fn node(&self, id: usize) -> Result<&MapperNode> {
        self.nodes
            .get(id)
            .filter(|n| n.id == id)
            .or_else(|| self.nodes.iter().find(|n| n.id == id))
            .ok_or_else(|| Error::NotFound(format!("node {id}")))
    }

    /// Sorted neighbour lists indexed by node position.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
            nbrs.dedup();
        }
        adj
    }

    /// Points that belong to at least one node.
    pub fn covered_points(&self) -> usize {
        let mut all: Vec<usize> = self.nodes.iter().flat_map(|n| n.members.iter().copied()).collect();
        all.sort_unstable();
        all.dedup();
        all.len()
    }
}

/// The `k` most frequent labels among `members`, ties broken by label.
pub fn top_classes(members: &[usize], metadata: &PointMetadata, k: usize) -> Vec<TopClass> {
    if members.is_empty() {
        return Vec::new();
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for &p in members {
        *counts.entry(metadata.label(p)).or_default() += 1;
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(k)
        .map(|(label, count)| TopClass {
            label: label.to_string(),
            count,
            pct: count as f64 / members.len() as f64,
        })
        .collect()
}

/// `|a ∩ b| / |a ∪ b|` from the sizes and the intersection count.
#[inline]
pub fn jaccard(size_a: usize, size_b: usize, shared: usize) -> f64 {
    shared as f64 / (size_a + size_b - shared) as f64
}

pub fn build_nerve(
    assignments: &[ClusterAssignment],
    lens: &LensValues,
    metadata: Option<&PointMetadata>,
) -> MapperGraph {
    let mut clusters: Vec<(usize, &Vec<usize>)> = assignments
        .iter()
        .flat_map(|a| a.clusters.iter().filter(|c| !c.is_empty()).map(move |c| (a.interval_index, c)))
        .collect();
    clusters.sort_by_key(|(interval, members)| (*interval, members[0]));

    let nodes: Vec<MapperNode> = clusters
        .iter()
        .enumerate()
        .map(|(id, (interval, members))| {
            let sum: f64 = members.iter().map(|&p| lens.values[p]).sum();
            MapperNode {
                id,
                interval: *interval,
                size: members.len(),
                avg_lens: sum / members.len() as f64,
                members: members.to_vec(),
                top_classes: metadata
                    .map(|m| top_classes(members, m, TOP_CLASSES))
                    .unwrap_or_default(),
            }
        })
        .collect();

    // Point -> nodes containing it, then count shared points per node pair.
    let mut containing: HashMap<usize, Vec<usize>> = HashMap::new();
    for node in &nodes {
        for &p in &node.members {
            containing.entry(p).or_default().push(node.id);
        }
    }
    let mut shared: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for ids in containing.values().filter(|ids| ids.len() > 1) {
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                *shared.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
    }
    let edges = shared
        .into_iter()
        .map(|((source, target), n)| MapperEdge {
            source,
            target,
            weight: jaccard(nodes[source].size, nodes[target].size, n),
        })
        .collect();

    MapperGraph {
        params: Params::new(),
        lens_range: lens.range().map(|(lo, hi)| [lo, hi]),
        nodes,
        edges,
    }
}

/// Keeps the edges whose weight is at least `min_jaccard`.
pub fn filter_edges(graph: &MapperGraph, min_jaccard: f64) -> Result<MapperGraph> {
    if !(0.0..=1.0).contains(&min_jaccard) {
        return Err(Error::Param(format!("min_jaccard {min_jaccard} outside [0, 1]")));
    }
    let mut out = graph.clone();
    out.edges.retain(|e| e.weight >= min_jaccard);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleRef {
    pub point_id: usize,
    pub example_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassExamples {
    pub label: String,
    pub examples: Vec<ExampleRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDetail {
    pub id: usize,
    pub interval: usize,
    pub size: usize,
    pub avg_lens: f64,
    pub top_classes: Vec<TopClass>,
    pub examples: Vec<ClassExamples>,
}

pub fn node_detail(graph: &MapperGraph, node_id: usize, metadata: Option<&PointMetadata>) -> Result<NodeDetail> {
    let node = graph.node(node_id)?;
    let (top, examples) = match metadata {
        None => (Vec::new(), Vec::new()),
        Some(meta) => {
            let top = top_classes(&node.members, meta, TOP_CLASSES);
            let examples = top
                .iter()
                .map(|tc| ClassExamples {
                    label: tc.label.clone(),
                    // Members are sorted, so this takes the smallest ids.
                    examples: node
                        .members
                        .iter()
                        .filter(|&&p| meta.label(p) == tc.label)
                        .take(EXAMPLES_PER_CLASS)
                        .map(|&p| ExampleRef {
                            point_id: p,
                            example_ref: meta.example_ref(p).map(str::to_string),
                        })
                        .collect(),
                })
                .collect();
            (top, examples)
        }
    };
    Ok(NodeDetail {
        id: node.id,
        interval: node.interval,
        size: node.size,
        avg_lens: node.avg_lens,
        top_classes: top,
        examples,
    })
}
