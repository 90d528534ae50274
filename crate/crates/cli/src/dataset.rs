//! Real-dataset directories.
//!
//! A dataset is a directory holding ground truth plus at least one layer
//! source:
//!
//! ```text
//! mydataset/
//!   truth.labels      one community label per node, line-ordered
//!   multiplex.edges   optional, `layer src dst [weight]` lines
//!   features0.csv     optional, numeric rows; each file becomes one kNN layer
//!   features1.csv
//! ```
//!
//! Edge-list layers come first (in file order), then one correlation-kNN
//! layer per feature file in ascending filename order.

use std::path::Path;

use multiplex_louvain::graph::{build_knn_layer, load_features, load_multiplex, load_partition};
use multiplex_louvain::{Layer, MultiplexGraph, Partition};

use crate::{CliError, Result};

/// Neighbor count used when turning feature matrices into layers.
pub const DEFAULT_KNN: usize = 10;

pub struct Dataset {
    pub name: String,
    pub graph: MultiplexGraph,
    pub truth: Partition,
}

pub fn load_dataset(dir: &Path, knn: usize) -> Result<Dataset> {
    if !dir.is_dir() {
        return Err(CliError::Data(format!(
            "{}: not a dataset directory",
            dir.display()
        )));
    }
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    let truth = load_partition(dir.join("truth.labels"))
        .map_err(|e| CliError::Data(format!("{name}: {e}")))?;

    let mut layers: Vec<Layer> = Vec::new();
    let edges_path = dir.join("multiplex.edges");
    if edges_path.exists() {
        let graph = load_multiplex(&edges_path)?;
        layers.extend(graph.layers().iter().cloned());
    }

    let mut feature_files: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            let file = p.file_name().map(|s| s.to_string_lossy().into_owned());
            matches!(file, Some(f) if f.starts_with("features") && f.ends_with(".csv"))
        })
        .collect();
    feature_files.sort();
    for path in feature_files {
        let features = load_features(&path)?;
        let layer_graph = build_knn_layer(&features, knn)?;
        layers.push(layer_graph.layer(0).clone());
    }

    if layers.is_empty() {
        return Err(CliError::Data(format!(
            "{name}: no multiplex.edges and no features*.csv in {}",
            dir.display()
        )));
    }
    let graph = MultiplexGraph::new(layers, None)?;
    if graph.n() != truth.len() {
        return Err(CliError::Data(format!(
            "{name}: graph has {} nodes but truth.labels has {}",
            graph.n(),
            truth.len()
        )));
    }
    Ok(Dataset { name, graph, truth })
}
