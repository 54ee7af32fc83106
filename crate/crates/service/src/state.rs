//! Datasets loaded once at startup and shared read-only by every request.

use std::fs;
use std::path::{Path, PathBuf};

use actmap::io::{load_manifest, load_matrix, load_metadata, read_graph, DatasetManifest, MatrixFormat};
use actmap::{Error, MapperGraph, PointCloud, PointMetadata, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

pub struct ServedLayer {
    pub name: String,
    pub graph: MapperGraph,
    pub metadata: Option<PointMetadata>,
    pub cloud: Option<PointCloud>,
}

pub struct ServedDataset {
    pub manifest: DatasetManifest,
    pub layers: Vec<ServedLayer>,
}

impl ServedDataset {
    pub fn name(&self) -> &str {
        &self.manifest.name
    }

    pub fn layer(&self, name: &str) -> Option<&ServedLayer> {
        self.layers.iter().find(|l| l.name == name)
    }
}

pub struct AppState {
    pub datasets: Vec<ServedDataset>,
    pub serve_matrices: bool,
}

impl AppState {
    pub fn empty() -> Self {
        AppState {
            datasets: Vec::new(),
            serve_matrices: false,
        }
    }

    pub fn dataset(&self, name: &str) -> Option<&ServedDataset> {
        self.datasets.iter().find(|d| d.name() == name)
    }
}

fn graph_points(graph: &MapperGraph) -> Option<usize> {
    graph.params.get("n_points").and_then(|v| v.as_u64()).map(|n| n as usize)
}

pub fn load_dataset(manifest_path: &Path, serve_matrices: bool) -> Result<ServedDataset> {
    let manifest = load_manifest(manifest_path)?;
    let mut layers = Vec::with_capacity(manifest.layers.len());
    for entry in &manifest.layers {
        let graph_path = entry.graph_path.as_ref().expect("resolved by load_manifest");
        let graph = read_graph(graph_path)?;
        let cloud = if serve_matrices {
            Some(load_matrix(&entry.matrix_path, MatrixFormat::from_path(&entry.matrix_path))?)
        } else {
            None
        };
        let n_points = cloud.as_ref().map(|c| c.n_points()).or(graph_points(&graph));
        if let (Some(c), Some(g)) = (&cloud, graph_points(&graph)) {
            if c.n_points() != g {
                return Err(Error::Data(format!(
                    "layer {}: graph was built on {g} points but the matrix has {}",
                    entry.layer_name,
                    c.n_points()
                )));
            }
        }
        let metadata = match &entry.metadata_path {
            Some(path) => {
                let n = n_points.ok_or_else(|| {
                    Error::Data(format!("layer {}: cannot tell how many points to expect", entry.layer_name))
                })?;
                Some(load_metadata(path, n)?)
            }
            None => None,
        };
        log::info!(
            "dataset {} layer {}: {} nodes, {} edges",
            manifest.name,
            entry.layer_name,
            graph.nodes.len(),
            graph.edges.len()
        );
        layers.push(ServedLayer {
            name: entry.layer_name.clone(),
            graph,
            metadata,
            cloud,
        });
    }
    Ok(ServedDataset { manifest, layers })
}

/// Loads `data_dir/manifest.json` if present and every
/// `data_dir/<sub>/manifest.json`, ordered by dataset name.
pub fn load_data_dir(data_dir: &Path, serve_matrices: bool) -> Result<AppState> {
    let io_err = |e| Error::Io {
        path: data_dir.to_path_buf(),
        source: e,
    };
    let mut manifests: Vec<PathBuf> = Vec::new();
    let top = data_dir.join(MANIFEST_FILE);
    if top.is_file() {
        manifests.push(top);
    }
    for entry in fs::read_dir(data_dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path().join(MANIFEST_FILE);
        if path.is_file() {
            manifests.push(path);
        }
    }
    let mut datasets = manifests
        .iter()
        .map(|m| load_dataset(m, serve_matrices))
        .collect::<Result<Vec<_>>>()?;
    datasets.sort_by(|a, b| a.name().cmp(b.name()));
    if let Some(w) = datasets.windows(2).find(|w| w[0].name() == w[1].name()) {
        return Err(Error::Data(format!("dataset {:?} is defined twice", w[0].name())));
    }
    Ok(AppState {
        datasets,
        serve_matrices,
    })
}
