//! Multiplex graphs: k weighted undirected layers over one shared node set.
//!
//! Edge-list file format, one edge per line:
//!
//! ```text
//! layer src dst [weight]
//! ```
//!
//! `#` starts a comment, blank lines are skipped, the weight defaults to 1.
//! Node count is `max id + 1` across all layers, layer count is
//! `max layer id + 1`; a layer id that never appears (or appears with zero
//! total weight) is an error. Each undirected edge may be listed once, in
//! either orientation; a duplicate `(i,j)`/`(j,i)` line is an error.
//!
//! Self-loops are legal. A self-loop of weight `w` counts `w` towards the
//! layer total `m` and `2w` towards the node's degree, so `sum(degrees) = 2m`
//! holds identically, also after contraction.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// One weighted undirected layer. Off-diagonal adjacency is stored both ways
/// in ascending neighbor order; self-loop weights are kept separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degrees: Vec<f64>,
    total_weight: f64,
}

impl Layer {
    /// Builds a layer from undirected edges. Duplicate pairs are merged by
    /// weight summation; `(i, i)` entries become self-loops.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Layer>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidEdge(format!(
                    "node id out of range: ({a}, {b}) with n = {n}"
                )));
            }
            if w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidEdge(format!(
                    "weight {w} on edge ({a}, {b}) must be finite and non-negative"
                )));
            }
            let key = (a.min(b), a.max(b));
            *merged.entry(key).or_insert(0.0) += w;
        }
        Ok(Self::from_merged(n, &merged))
    }

    fn from_merged(n: usize, merged: &BTreeMap<(usize, usize), f64>) -> Layer {
        let mut adj = vec![Vec::new(); n];
        let mut self_loops = vec![0.0; n];
        for (&(a, b), &w) in merged {
            if a == b {
                self_loops[a] += w;
            } else {
                adj[a].push((b, w));
                adj[b].push((a, w));
            }
        }
        for list in &mut adj {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        let mut degrees = vec![0.0; n];
        let mut total = 0.0;
        for i in 0..n {
            let mut d = 2.0 * self_loops[i];
            for &(_, w) in &adj[i] {
                d += w;
            }
            degrees[i] = d;
            total += self_loops[i];
        }
        for (&(a, b), &w) in merged {
            if a != b {
                total += w;
            }
        }
        Layer {
            adj,
            self_loops,
            degrees,
            total_weight: total,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Off-diagonal neighbors of `i` with weights, ascending by neighbor id.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    /// Self-loop weight at `i`, counted once in `m` and twice in the degree.
    pub fn self_loop(&self, i: usize) -> f64 {
        self.self_loops[i]
    }

    /// Weighted degree of `i` (row sum of the adjacency; self-loops doubled).
    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    /// Total edge weight `m` (each undirected edge once, self-loops once).
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Undirected edges `(i, j, w)` with `i <= j`, in canonical order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            if self.self_loops[i] > 0.0 {
                out.push((i, i, self.self_loops[i]));
            }
            for &(j, w) in &self.adj[i] {
                if j > i {
                    out.push((i, j, w));
                }
            }
        }
        out.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }
}

/// A multiplex graph: layers share the node set, there are no inter-layer
/// edges. `node_size[i]` counts how many original nodes a node stands for
/// (1 on input graphs, aggregated by contraction).
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplexGraph {
    layers: Vec<Layer>,
    node_size: Vec<usize>,
}

impl MultiplexGraph {
    /// Validates shared node count and non-empty layers. `node_size` of
    /// `None` means every node stands for itself.
    pub fn new(layers: Vec<Layer>, node_size: Option<Vec<usize>>) -> Result<MultiplexGraph> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("a multiplex graph needs at least one layer".into()));
        }
        let n = layers[0].n();
        for (s, layer) in layers.iter().enumerate() {
            if layer.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: layer.n(),
                });
            }
            if layer.total_weight() <= 0.0 {
                return Err(Error::EmptyLayer(s));
            }
        }
        let node_size = match node_size {
            Some(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: v.len(),
                    });
                }
                v
            }
            None => vec![1; n],
        };
        Ok(MultiplexGraph { layers, node_size })
    }

    pub fn n(&self) -> usize {
        self.layers[0].n()
    }

    /// Number of layers.
    pub fn k(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, s: usize) -> &Layer {
        &self.layers[s]
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn m(&self, s: usize) -> f64 {
        self.layers[s].total_weight()
    }

    pub fn degree(&self, s: usize, i: usize) -> f64 {
        self.layers[s].degree(i)
    }

    pub fn neighbors(&self, s: usize, i: usize) -> &[(usize, f64)] {
        self.layers[s].neighbors(i)
    }

    pub fn self_loop(&self, s: usize, i: usize) -> f64 {
        self.layers[s].self_loop(i)
    }

    pub fn node_size(&self, i: usize) -> usize {
        self.node_size[i]
    }

    pub fn node_sizes(&self) -> &[usize] {
        &self.node_size
    }

    /// Collapses every community of `partition` into one node. Intra-community
    /// weight (plus member self-loops) becomes the supernode's self-loop, so
    /// each layer's `m`, total degree and node-size total are conserved.
    /// Coarse node ids equal community ids.
    pub fn contract(&self, partition: &Partition) -> Result<MultiplexGraph> {
        if partition.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                actual: partition.len(),
            });
        }
        let c = partition.community_count();
        let labels = partition.labels();
        let mut layers = Vec::with_capacity(self.k());
        for layer in &self.layers {
            let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for i in 0..self.n() {
                let li = labels[i];
                if layer.self_loop(i) > 0.0 {
                    *merged.entry((li, li)).or_insert(0.0) += layer.self_loop(i);
                }
                for &(j, w) in layer.neighbors(i) {
                    if j < i {
                        continue; // each undirected edge once
                    }
                    let lj = labels[j];
                    let key = (li.min(lj), li.max(lj));
                    *merged.entry(key).or_insert(0.0) += w;
                }
            }
            layers.push(Layer::from_merged(c, &merged));
        }
        let mut node_size = vec![0usize; c];
        for i in 0..self.n() {
            node_size[labels[i]] += self.node_size[i];
        }
        MultiplexGraph::new(layers, Some(node_size))
    }

    /// Sums all layers (self-loops included) into a single-layer multiplex.
    pub fn flatten(&self) -> MultiplexGraph {
        let n = self.n();
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for layer in &self.layers {
            for (i, j, w) in layer.edges() {
                *merged.entry((i, j)).or_insert(0.0) += w;
            }
        }
        let flat = Layer::from_merged(n, &merged);
        MultiplexGraph {
            layers: vec![flat],
            node_size: self.node_size.clone(),
        }
    }
}

/// A node-disjoint community assignment with contiguous ids `0..c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    count: usize,
}

impl Partition {
    /// Wraps a label vector. Every id in `0..max+1` must be used by at least
    /// one node.
    pub fn from_labels(labels: Vec<usize>) -> Result<Partition> {
        if labels.is_empty() {
            return Err(Error::InvalidPartition("no nodes".into()));
        }
        let count = labels.iter().copied().max().unwrap() + 1;
        let mut used = vec![false; count];
        for &l in &labels {
            used[l] = true;
        }
        if let Some(gap) = used.iter().position(|u| !u) {
            return Err(Error::InvalidPartition(format!("community id {gap} is unused")));
        }
        Ok(Partition { labels, count })
    }

    /// Renumbers arbitrary labels to contiguous ids in first-occurrence order.
    pub fn canonicalize(labels: &[usize]) -> Partition {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = map.len();
            let id = *map.entry(l).or_insert(next);
            out.push(id);
        }
        Partition {
            labels: out,
            count: map.len(),
        }
    }

    /// Every node its own community.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            labels: (0..n).collect(),
            count: n,
        }
    }

    /// All nodes in one community.
    pub fn all_in_one(n: usize) -> Partition {
        Partition {
            labels: vec![0; n],
            count: 1,
        }
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.count
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.count];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Lifts a partition of a contracted graph back to the fine graph through the
/// node mapping produced by contraction (`mapping[i]` = coarse node of `i`).
pub fn expand_partition(coarse: &Partition, mapping: &[usize]) -> Result<Partition> {
    let mut labels = Vec::with_capacity(mapping.len());
    for (i, &c) in mapping.iter().enumerate() {
        if c >= coarse.len() {
            return Err(Error::InvalidPartition(format!(
                "node {i} maps to coarse node {c}, but the coarse partition has {} nodes",
                coarse.len()
            )));
        }
        labels.push(coarse.label(c));
    }
    Partition::from_labels(labels)
}

// ---------------------------------------------------------------------------
// file i/o

/// Reads a multiplex edge list (format documented at module level).
pub fn load_multiplex(path: impl AsRef<Path>) -> Result<MultiplexGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    // per-layer edge maps, with duplicate detection
    let mut layer_edges: BTreeMap<usize, BTreeMap<(usize, usize), f64>> = BTreeMap::new();
    let mut max_node = 0usize;
    let mut max_layer = 0usize;
    let mut any = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 3 || fields.len() > 4 {
            return Err(parse_err(
                lineno,
                format!("expected `layer src dst [weight]`, got {} fields", fields.len()),
            ));
        }
        let layer: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad layer id `{}`", fields[0])))?;
        let src: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad node id `{}`", fields[1])))?;
        let dst: usize = fields[2]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad node id `{}`", fields[2])))?;
        let weight: f64 = match fields.get(3) {
            Some(t) => t
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad weight `{t}`")))?,
            None => 1.0,
        };
        if weight < 0.0 || !weight.is_finite() {
            return Err(parse_err(lineno, format!("negative or non-finite weight {weight}")));
        }
        let key = (src.min(dst), src.max(dst));
        let entry = layer_edges.entry(layer).or_default();
        if entry.insert(key, weight).is_some() {
            return Err(parse_err(
                lineno,
                format!("duplicate edge ({src}, {dst}) in layer {layer}"),
            ));
        }
        max_node = max_node.max(src).max(dst);
        max_layer = max_layer.max(layer);
        any = true;
    }
    if !any {
        return Err(parse_err(1, "no edges in file".into()));
    }

    let n = max_node + 1;
    let k = max_layer + 1;
    let mut layers = Vec::with_capacity(k);
    for s in 0..k {
        match layer_edges.get(&s) {
            Some(edges) if !edges.is_empty() => layers.push(Layer::from_merged(n, edges)),
            _ => return Err(Error::EmptyLayer(s)),
        }
    }
    MultiplexGraph::new(layers, None)
}

/// Writes the canonical edge list: layers ascending, edges sorted by
/// `(src, dst)` with `src <= dst`, weights in shortest round-trip form.
/// Re-saving a loaded file reproduces it byte for byte.
pub fn save_multiplex(graph: &MultiplexGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for (s, layer) in graph.layers().iter().enumerate() {
        for (i, j, w) in layer.edges() {
            writeln!(out, "{s} {i} {j} {w}").expect("string write");
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a partition file: one integer label per line (line index = node id).
/// Labels are renumbered to contiguous ids in first-occurrence order.
pub fn load_partition(path: impl AsRef<Path>) -> Result<Partition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut map: HashMap<i64, usize> = HashMap::new();
    let mut labels = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: i64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            message: format!("bad label `{line}`"),
        })?;
        let next = map.len();
        labels.push(*map.entry(value).or_insert(next));
    }
    Partition::from_labels(labels)
}

pub fn save_partition(partition: &Partition, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for &l in partition.labels() {
        writeln!(out, "{l}").expect("string write");
    }
    std::fs::write(path, out)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// feature matrices and kNN layers

/// Row-major feature matrix; row `i` describes node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<FeatureMatrix> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Reads a headerless numeric CSV into a feature matrix.
pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let mut data = Vec::new();
    let mut rows = 0usize;
    let mut cols = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match cols {
            None => cols = Some(fields.len()),
            Some(c) if c != fields.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    message: format!("expected {c} columns, got {}", fields.len()),
                })
            }
            _ => {}
        }
        for f in fields {
            let v: f64 = f.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("bad number `{f}`"),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "empty feature matrix".into(),
        });
    }
    FeatureMatrix::new(rows, cols, data)
}

/// Builds a single-layer multiplex from a symmetrized k-nearest-neighbor graph
/// under Pearson correlation: `u ~ v` iff `v` is among the `knn` highest
/// correlates of `u` or vice versa. Correlation ties break towards the lower
/// node id; edges are unweighted.
pub fn build_knn_layer(features: &FeatureMatrix, knn: usize) -> Result<MultiplexGraph> {
    let n = features.rows();
    if knn == 0 || knn >= n {
        return Err(Error::InvalidConfig(format!(
            "knn must be in 1..{n}, got {knn}"
        )));
    }

    // center and normalize once; constant rows have no direction to correlate
    let d = features.cols();
    let mut centered = vec![0.0; n * d];
    for i in 0..n {
        let row = features.row(i);
        let mean = row.iter().sum::<f64>() / d as f64;
        let mut norm2 = 0.0;
        for (j, &x) in row.iter().enumerate() {
            let v = x - mean;
            centered[i * d + j] = v;
            norm2 += v * v;
        }
        if norm2 <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "feature row {i} is constant; correlation is undefined"
            )));
        }
        let norm = norm2.sqrt();
        for j in 0..d {
            centered[i * d + j] /= norm;
        }
    }

    let corr = |a: usize, b: usize| -> f64 {
        let ra = &centered[a * d..(a + 1) * d];
        let rb = &centered[b * d..(b + 1) * d];
        ra.iter().zip(rb).map(|(x, y)| x * y).sum()
    };

    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for u in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&v| v != u).collect();
        others.sort_by(|&a, &b| {
            corr(u, b)
                .partial_cmp(&corr(u, a))
                .expect("correlations are finite")
                .then(a.cmp(&b))
        });
        for &v in others.iter().take(knn) {
            edges.insert((u.min(v), u.max(v)), 1.0);
        }
    }
    let layer = Layer::from_merged(n, &edges);
    MultiplexGraph::new(vec![layer], None)
}
