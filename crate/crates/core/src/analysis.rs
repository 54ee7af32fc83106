//! Structural queries on a mapper graph: components, branching nodes and
//! their branches, and a fundamental cycle basis.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::io::PointMetadata;
use crate::nerve::{top_classes, MapperGraph, Params, TopClass, TOP_CLASSES};
use crate::pca::Projection2D;

pub const DEFAULT_MIN_DEGREE: usize = 3;

/// Connected components as sorted node-id lists, ordered by smallest id.
pub fn connected_components(graph: &MapperGraph) -> Vec<Vec<usize>> {
    let adj = graph.adjacency();
    let mut seen = vec![false; adj.len()];
    let mut out = Vec::new();
    for root in 0..adj.len() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut comp = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    comp.push(v);
                    queue.push_back(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Nodes from the branching node's neighbour outwards.
    pub nodes: Vec<usize>,
    /// Top classes over the pooled members of `nodes`.
    pub top_classes: Vec<TopClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub branching_node: usize,
    pub degree: usize,
    pub branches: Vec<Branch>,
}

/// Distinct points of the given nodes, ascending.
pub fn pooled_members(graph: &MapperGraph, nodes: &[usize]) -> Vec<usize> {
    let mut pts: Vec<usize> = nodes
        .iter()
        .flat_map(|&id| graph.nodes[id].members.iter().copied())
        .collect();
    pts.sort_unstable();
    pts.dedup();
    pts
}

/// One path per neighbour of `center`, extended through degree-2 nodes and
/// stopped at any other node (leaf, hub) or at a node already claimed.
///
/// Paths grow one step at a time in turn, so a loop returning to `center`
/// is split between the two paths that enter it and paths stay disjoint.
fn branch_paths(center: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut claimed = vec![false; adj.len()];
    claimed[center] = true;
    let mut paths: Vec<Vec<usize>> = Vec::with_capacity(adj[center].len());
    let mut prev: Vec<usize> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    for &n in &adj[center] {
        claimed[n] = true;
        paths.push(vec![n]);
        prev.push(center);
        active.push(adj[n].len() == 2);
    }
    while active.iter().any(|&a| a) {
        for b in 0..paths.len() {
            if !active[b] {
                continue;
            }
            let cur = *paths[b].last().unwrap();
            let next = adj[cur].iter().copied().find(|&x| x != prev[b]);
            match next {
                Some(next) if !claimed[next] => {
                    claimed[next] = true;
                    paths[b].push(next);
                    prev[b] = cur;
                    active[b] = adj[next].len() == 2;
                }
                _ => active[b] = false,
            }
        }
    }
    paths
}

/// Nodes of degree at least `min_degree` with their branches, by node id.
pub fn find_branching_nodes(
    graph: &MapperGraph,
    min_degree: usize,
    metadata: Option<&PointMetadata>,
) -> Vec<BranchReport> {
    let adj = graph.adjacency();
    (0..adj.len())
        .filter(|&u| adj[u].len() >= min_degree.max(1))
        .map(|u| BranchReport {
            branching_node: u,
            degree: adj[u].len(),
            branches: branch_paths(u, &adj)
                .into_iter()
                .map(|nodes| Branch {
                    top_classes: metadata
                        .map(|m| top_classes(&pooled_members(graph, &nodes), m, TOP_CLASSES))
                        .unwrap_or_default(),
                    nodes,
                })
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub betti_1: usize,
    /// Each cycle lists its nodes in traversal order; the last node is
    /// adjacent to the first.
    pub cycles: Vec<Vec<usize>>,
}

/// Fundamental cycles of a BFS spanning forest rooted at the smallest id of
/// each component, one per non-tree edge in edge order.
pub fn find_cycles(graph: &MapperGraph) -> LoopReport {
    let adj = graph.adjacency();
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut components = 0;
    for root in 0..n {
        if seen[root] {
            continue;
        }
        components += 1;
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }

    let mut edges: Vec<(usize, usize)> = graph
        .edges
        .iter()
        .map(|e| (e.source.min(e.target), e.source.max(e.target)))
        .collect();
    edges.sort_unstable();
    edges.dedup();

    let mut cycles = Vec::new();
    for &(u, v) in &edges {
        if parent[v] == u || parent[u] == v {
            continue;
        }
        let (mut a, mut b) = (u, v);
        let mut up = vec![a];
        let mut down = vec![b];
        while depth[a] > depth[b] {
            a = parent[a];
            up.push(a);
        }
        while depth[b] > depth[a] {
            b = parent[b];
            down.push(b);
        }
        while a != b {
            a = parent[a];
            b = parent[b];
            up.push(a);
            down.push(b);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        cycles.push(up);
    }
    LoopReport {
        betti_1: edges.len() + components - n,
        cycles,
    }
}

/// Everything `analyze` reports about one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub params: Params,
    pub components: Vec<Vec<usize>>,
    pub branching_nodes: Vec<BranchReport>,
    pub loops: LoopReport,
    pub projections: Vec<Projection2D>,
}

pub fn analyze(graph: &MapperGraph, min_degree: usize, metadata: Option<&PointMetadata>) -> AnalysisReport {
    AnalysisReport {
        params: graph.params.clone(),
        components: connected_components(graph),
        branching_nodes: find_branching_nodes(graph, min_degree, metadata),
        loops: find_cycles(graph),
        projections: Vec::new(),
    }
}
