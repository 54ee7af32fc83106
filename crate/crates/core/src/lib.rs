//! Mapper graphs for large labeled point clouds such as neural-network
//! activation vectors.
//!
//! The pipeline maps every point through a lens (the L2 norm), covers the
//! lens range with uniformly sized overlapping intervals, clusters each
//! interval's preimage with DBSCAN and connects clusters that share points.
//! [`analysis`] and [`pca`] then look for branches and loops in the graph
//! and project selected substructures for closer inspection.

pub mod analysis;
pub mod cluster;
pub mod error;
pub mod io;
pub mod knn;
pub mod lens;
pub mod metric;
pub mod nerve;
pub mod pca;
pub mod pipeline;
pub mod synth;

pub use error::{Error, Result};
pub use io::{PointCloud, PointMetadata};
pub use nerve::MapperGraph;
pub use pipeline::{build_graph, MapperConfig};
