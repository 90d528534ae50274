//! Per-layer modularity, its mean/variance scalarizations, and the
//! incremental bookkeeping that prices single-node moves in O(degree).
//!
//! For layer s with total weight m, a partition scores
//!
//! ```text
//! Q_s = (1/2m) * sum_ij (A_ij - d_i d_j / 2m) * [c_i == c_j]
//! ```
//!
//! over ordered node pairs including i = j. Stacking the k layer scores gives
//! a modularity vector Q; configurations scalarize it as the plain mean M, or
//! as (1-g)*M -+ g*V with V the sample variance across layers. Minus favors
//! partitions that fit all layers evenly, plus lets one layer dominate, which
//! pays off when some layers are noise.
//!
//! A single-node move changes the vector by dq. The exact variance change is
//!
//! ```text
//! V(Q + dq) - V(Q) = V(dq) + 2/(k-1) * <Q - M, dq - mean(dq)>
//! ```
//!
//! so move gains need no rescan of untouched communities.

use crate::error::{Error, Result};
use crate::graph::{MultiplexGraph, Partition};

/// Modularity of one layer under a partition, via community weight sums.
pub fn modularity_layer(graph: &MultiplexGraph, s: usize, partition: &Partition) -> f64 {
    assert_eq!(
        partition.len(),
        graph.n(),
        "partition covers a different node set"
    );
    let layer = graph.layer(s);
    let m = layer.total_weight();
    let c = partition.community_count();
    let mut sigma_in = vec![0.0; c];
    let mut sigma_tot = vec![0.0; c];
    for i in 0..graph.n() {
        let ci = partition.label(i);
        sigma_tot[ci] += layer.degree(i);
        sigma_in[ci] += layer.self_loop(i);
        for &(j, w) in layer.neighbors(i) {
            if j > i && partition.label(j) == ci {
                sigma_in[ci] += w;
            }
        }
    }
    let two_m = 2.0 * m;
    (0..c)
        .map(|ci| sigma_in[ci] / m - (sigma_tot[ci] / two_m).powi(2))
        .sum()
}

/// The k layer modularities of a partition.
pub fn modularity_vector(graph: &MultiplexGraph, partition: &Partition) -> ModularityVector {
    ModularityVector {
        values: (0..graph.k())
            .map(|s| modularity_layer(graph, s, partition))
            .collect(),
    }
}

/// Per-layer modularities of one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularityVector {
    values: Vec<f64>,
}

impl ModularityVector {
    pub fn new(values: Vec<f64>) -> ModularityVector {
        assert!(!values.is_empty(), "a modularity vector needs >= 1 layer");
        ModularityVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, s: usize) -> f64 {
        self.values[s]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Sample variance across layers; 0 for a single layer.
    pub fn variance(&self) -> f64 {
        sample_variance(&self.values)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_variance(xs: &[f64]) -> f64 {
    let k = xs.len();
    if k < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (k - 1) as f64
}

/// Exact change of the sample variance when `dq` is added to `q`.
pub fn variance_delta(q: &[f64], dq: &[f64]) -> f64 {
    assert_eq!(q.len(), dq.len(), "vector lengths differ");
    let k = q.len();
    if k < 2 {
        return 0.0;
    }
    let mq = mean(q);
    let md = mean(dq);
    let cross: f64 = q
        .iter()
        .zip(dq)
        .map(|(&qs, &ds)| (qs - mq) * (ds - md))
        .sum();
    sample_variance(dq) + 2.0 / (k - 1) as f64 * cross
}

/// How the modularity vector is scalarized into the score F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QualityVariant {
    /// F = mean(Q)
    Mean,
    /// F = (1-g)*mean(Q) - g*var(Q)
    VarMinus(f64),
    /// F = (1-g)*mean(Q) + g*var(Q)
    VarPlus(f64),
}

/// Scalarization plus the Pareto-list capacity used by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityConfig {
    variant: QualityVariant,
    list_capacity: usize,
}

impl QualityConfig {
    pub fn mean(list_capacity: usize) -> Result<QualityConfig> {
        Self::build(QualityVariant::Mean, list_capacity)
    }

    pub fn var_minus(gamma: f64, list_capacity: usize) -> Result<QualityConfig> {
        Self::check_gamma(gamma)?;
        Self::build(QualityVariant::VarMinus(gamma), list_capacity)
    }

    pub fn var_plus(gamma: f64, list_capacity: usize) -> Result<QualityConfig> {
        Self::check_gamma(gamma)?;
        Self::build(QualityVariant::VarPlus(gamma), list_capacity)
    }

    fn check_gamma(gamma: f64) -> Result<()> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma must lie strictly inside (0, 1), got {gamma}"
            )));
        }
        Ok(())
    }

    fn build(variant: QualityVariant, list_capacity: usize) -> Result<QualityConfig> {
        if list_capacity == 0 {
            return Err(Error::InvalidConfig("list capacity must be >= 1".into()));
        }
        Ok(QualityConfig {
            variant,
            list_capacity,
        })
    }

    pub fn variant(&self) -> QualityVariant {
        self.variant
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.variant {
            QualityVariant::Mean => None,
            QualityVariant::VarMinus(g) | QualityVariant::VarPlus(g) => Some(g),
        }
    }

    pub fn list_capacity(&self) -> usize {
        self.list_capacity
    }

    /// The score F of a modularity vector.
    pub fn score(&self, q: &ModularityVector) -> f64 {
        self.score_parts(q.mean(), q.variance())
    }

    fn score_parts(&self, mean: f64, variance: f64) -> f64 {
        match self.variant {
            QualityVariant::Mean => mean,
            QualityVariant::VarMinus(g) => (1.0 - g) * mean - g * variance,
            QualityVariant::VarPlus(g) => (1.0 - g) * mean + g * variance,
        }
    }

    /// The score change implied by per-layer gains and the exact variance
    /// change (for Mean the variance part is ignored).
    fn score_delta(&self, mean_gain: f64, variance_change: f64) -> f64 {
        match self.variant {
            QualityVariant::Mean => mean_gain,
            QualityVariant::VarMinus(g) => (1.0 - g) * mean_gain - g * variance_change,
            QualityVariant::VarPlus(g) => (1.0 - g) * mean_gain + g * variance_change,
        }
    }
}

/// Price of moving one node to a target community.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveGain {
    /// Modularity change per layer.
    pub layer_gains: Vec<f64>,
    /// Mean of `layer_gains`.
    pub mean_gain: f64,
    /// Sample variance of `layer_gains`.
    pub gain_variance: f64,
    /// Exact change of the across-layer variance.
    pub variance_change: f64,
    /// Change of the scalar score F.
    pub quality_gain: f64,
}

impl MoveGain {
    fn zero(k: usize) -> MoveGain {
        MoveGain {
            layer_gains: vec![0.0; k],
            mean_gain: 0.0,
            gain_variance: 0.0,
            variance_change: 0.0,
            quality_gain: 0.0,
        }
    }
}

pub(crate) fn build_gain(cfg: &QualityConfig, q: &[f64], layer_gains: Vec<f64>) -> MoveGain {
    let mean_gain = mean(&layer_gains);
    let gain_variance = sample_variance(&layer_gains);
    let variance_change = variance_delta(q, &layer_gains);
    let quality_gain = cfg.score_delta(mean_gain, variance_change);
    MoveGain {
        layer_gains,
        mean_gain,
        gain_variance,
        variance_change,
        quality_gain,
    }
}

/// Modularity change in one layer when a node leaves `home` and joins
/// `target`. `k_home`/`k_target` are the node's link weights into each
/// community (itself excluded); sigma values still include the node at home.
/// The node's self-loop moves with it and cancels out.
pub(crate) fn layer_move_gain(
    m: f64,
    degree: f64,
    k_home: f64,
    sigma_home: f64,
    k_target: f64,
    sigma_target: f64,
) -> f64 {
    let two_m_sq = 2.0 * m * m;
    let removal = -k_home / m + degree * (sigma_home - degree) / two_m_sq;
    let insertion = k_target / m - degree * sigma_target / two_m_sq;
    removal + insertion
}

/// Louvain bookkeeping for one working partition: labels plus per-layer
/// community weight sums, with the modularity vector and score kept current.
/// Community slots are node ids of the graph the state was built on; slots
/// may go empty as nodes move, `partition()` compacts them away.
#[derive(Debug, Clone, PartialEq)]
pub struct LouvainState {
    cfg: QualityConfig,
    labels: Vec<usize>,
    member_count: Vec<usize>,
    active_communities: usize,
    /// indexed [layer][community slot]
    sigma_tot: Vec<Vec<f64>>,
    sigma_in: Vec<Vec<f64>>,
    q: ModularityVector,
    f: f64,
}

impl LouvainState {
    /// The singleton partition: every node its own community.
    pub fn singletons(graph: &MultiplexGraph, cfg: &QualityConfig) -> LouvainState {
        let n = graph.n();
        let k = graph.k();
        let mut sigma_tot = Vec::with_capacity(k);
        let mut sigma_in = Vec::with_capacity(k);
        let mut values = Vec::with_capacity(k);
        for s in 0..k {
            let layer = graph.layer(s);
            let tot: Vec<f64> = (0..n).map(|i| layer.degree(i)).collect();
            let inn: Vec<f64> = (0..n).map(|i| layer.self_loop(i)).collect();
            let m = layer.total_weight();
            let two_m = 2.0 * m;
            let q_s = (0..n)
                .map(|i| inn[i] / m - (tot[i] / two_m).powi(2))
                .sum();
            sigma_tot.push(tot);
            sigma_in.push(inn);
            values.push(q_s);
        }
        let q = ModularityVector::new(values);
        let f = cfg.score(&q);
        LouvainState {
            cfg: *cfg,
            labels: (0..n).collect(),
            member_count: vec![1; n],
            active_communities: n,
            sigma_tot,
            sigma_in,
            q,
            f,
        }
    }

    pub fn config(&self) -> &QualityConfig {
        &self.cfg
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn community_count(&self) -> usize {
        self.active_communities
    }

    /// Current modularity vector (maintained incrementally).
    pub fn q(&self) -> &ModularityVector {
        &self.q
    }

    /// Current score F; always equals `config().score(q())`.
    pub fn f(&self) -> f64 {
        self.f
    }

    /// The current partition with empty community slots compacted away
    /// (ids renumbered in first-occurrence order).
    pub fn partition(&self) -> Partition {
        Partition::canonicalize(&self.labels)
    }

    fn check_target(&self, target: usize) -> Result<()> {
        if target >= self.member_count.len() || self.member_count[target] == 0 {
            return Err(Error::UnknownCommunity(target));
        }
        Ok(())
    }

    /// Link weights of `node` into its own community and into `target`
    /// (the node itself excluded), per layer.
    fn link_weights(&self, graph: &MultiplexGraph, node: usize, target: usize) -> Vec<(f64, f64)> {
        let home = self.labels[node];
        (0..graph.k())
            .map(|s| {
                let mut k_home = 0.0;
                let mut k_target = 0.0;
                for &(j, w) in graph.neighbors(s, node) {
                    let c = self.labels[j];
                    if c == home {
                        k_home += w;
                    } else if c == target {
                        k_target += w;
                    }
                }
                (k_home, k_target)
            })
            .collect()
    }

    /// Prices moving `node` into `target` without changing anything.
    /// Moving to the node's own community is a legal no-op with zero gain.
    pub fn move_gain(&self, graph: &MultiplexGraph, node: usize, target: usize) -> Result<MoveGain> {
        self.check_target(target)?;
        let home = self.labels[node];
        if target == home {
            return Ok(MoveGain::zero(graph.k()));
        }
        let links = self.link_weights(graph, node, target);
        let gains: Vec<f64> = (0..graph.k())
            .map(|s| {
                let (k_home, k_target) = links[s];
                layer_move_gain(
                    graph.m(s),
                    graph.degree(s, node),
                    k_home,
                    self.sigma_tot[s][home],
                    k_target,
                    self.sigma_tot[s][target],
                )
            })
            .collect();
        Ok(build_gain(&self.cfg, self.q.values(), gains))
    }

    /// Applies the move and returns its gain. Sums, modularity vector and
    /// score are updated in O(degree); the score is recomputed from the
    /// updated vector so `f == score(q)` holds exactly.
    pub fn apply_move(
        &mut self,
        graph: &MultiplexGraph,
        node: usize,
        target: usize,
    ) -> Result<MoveGain> {
        let gain = self.move_gain(graph, node, target)?;
        let home = self.labels[node];
        if target == home {
            return Ok(gain);
        }
        let links = self.link_weights(graph, node, target);
        for s in 0..graph.k() {
            let (k_home, k_target) = links[s];
            let d = graph.degree(s, node);
            let loop_w = graph.self_loop(s, node);
            self.sigma_tot[s][home] -= d;
            self.sigma_tot[s][target] += d;
            self.sigma_in[s][home] -= k_home + loop_w;
            self.sigma_in[s][target] += k_target + loop_w;
        }
        self.labels[node] = target;
        self.member_count[home] -= 1;
        if self.member_count[home] == 0 {
            self.active_communities -= 1;
        }
        self.member_count[target] += 1;
        let values: Vec<f64> = self
            .q
            .values()
            .iter()
            .zip(&gain.layer_gains)
            .map(|(q, dq)| q + dq)
            .collect();
        self.q = ModularityVector::new(values);
        self.f = self.cfg.score(&self.q);
        Ok(gain)
    }

    /// Recomputes (Q, F) from scratch on the current partition; the cached
    /// values drift from these by rounding only.
    pub fn recompute(&self, graph: &MultiplexGraph) -> (ModularityVector, f64) {
        let q = modularity_vector(graph, &self.partition());
        let f = self.cfg.score(&q);
        (q, f)
    }

    pub(crate) fn sigma_tot(&self, s: usize, c: usize) -> f64 {
        self.sigma_tot[s][c]
    }

    pub(crate) fn is_active_community(&self, c: usize) -> bool {
        c < self.member_count.len() && self.member_count[c] > 0
    }
}
