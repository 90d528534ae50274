//! The multiobjective Louvain loop.
//!
//! Phase one sweeps the nodes; for every archived partition it prices moving
//! the node into each community holding one of its neighbors (union over
//! layers) and submits every strictly score-improving variant to the Pareto
//! list. Sweeps repeat until a whole sweep leaves the list unchanged. Phase
//! two contracts the graph by the best-scoring partition, the list restarts
//! from the coarse singleton partition, and the cycle repeats until phase one
//! finds nothing to change. With capacity 1 and the plain-mean score the
//! procedure is exactly classical Louvain.

use std::cmp::Reverse;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{MultiplexGraph, Partition};
use crate::pareto::{InsertOutcome, ListEntry, ParetoList};
use crate::quality::{
    build_gain, layer_move_gain, modularity_vector, LouvainState, ModularityVector, QualityConfig,
};

/// How phase one orders its node sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrdering {
    /// Heaviest supernodes first (ties by id). On the first pass all sizes
    /// are 1, which degrades to natural order.
    CommunitySize,
    /// Seeded shuffle, redrawn every outer iteration.
    Random,
    /// Node ids ascending.
    Natural,
}

/// The published method names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Mean score, caller-chosen list length.
    Ma,
    /// Mean minus weighted variance, list length >= 2.
    Mvm,
    /// Mean plus weighted variance, list length >= 2.
    Mvp,
    /// Mean minus weighted variance, incumbent only (list length 1).
    Evm,
    /// Mean plus weighted variance, incumbent only.
    Evp,
    /// Plain Louvain on the mean: Ma with list length 1.
    Gl,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Preset> {
        match s.to_ascii_uppercase().as_str() {
            "MA" => Ok(Preset::Ma),
            "MVM" => Ok(Preset::Mvm),
            "MVP" => Ok(Preset::Mvp),
            "EVM" => Ok(Preset::Evm),
            "EVP" => Ok(Preset::Evp),
            "GL" => Ok(Preset::Gl),
            other => Err(Error::InvalidConfig(format!("unknown preset `{other}`"))),
        }
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Preset::Ma => "MA",
            Preset::Mvm => "MVM",
            Preset::Mvp => "MVP",
            Preset::Evm => "EVM",
            Preset::Evp => "EVP",
            Preset::Gl => "GL",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub quality: QualityConfig,
    pub ordering: NodeOrdering,
    pub seed: u64,
    /// Safety bound on contraction rounds.
    pub max_outer_iters: usize,
    /// Safety bound on sweeps within one phase one.
    pub max_inner_sweeps: usize,
}

impl SolverConfig {
    pub fn new(quality: QualityConfig) -> SolverConfig {
        SolverConfig {
            quality,
            ordering: NodeOrdering::Natural,
            seed: 0,
            max_outer_iters: 100,
            max_inner_sweeps: 1000,
        }
    }

    /// Builds the config for a named method. `EVM`/`EVP`/`GL` fix the list
    /// length at 1, `MVM`/`MVP` need `h >= 2` and a gamma, `MA` needs an
    /// explicit `h`; anything inconsistent is an error.
    pub fn from_preset(preset: Preset, h: Option<usize>, gamma: Option<f64>) -> Result<SolverConfig> {
        let reject_gamma = |gamma: Option<f64>| -> Result<()> {
            match gamma {
                Some(g) => Err(Error::InvalidConfig(format!(
                    "{preset} does not take a gamma (got {g})"
                ))),
                None => Ok(()),
            }
        };
        let need_gamma = |gamma: Option<f64>| -> Result<f64> {
            gamma.ok_or_else(|| Error::InvalidConfig(format!("{preset} requires a gamma")))
        };
        let fixed_h1 = |h: Option<usize>| -> Result<()> {
            match h {
                None | Some(1) => Ok(()),
                Some(other) => Err(Error::InvalidConfig(format!(
                    "{preset} fixes the list length at 1, got {other}"
                ))),
            }
        };
        let quality = match preset {
            Preset::Ma => {
                reject_gamma(gamma)?;
                let h = h.ok_or_else(|| {
                    Error::InvalidConfig("MA requires an explicit list length".into())
                })?;
                QualityConfig::mean(h)?
            }
            Preset::Gl => {
                reject_gamma(gamma)?;
                fixed_h1(h)?;
                QualityConfig::mean(1)?
            }
            Preset::Mvm | Preset::Mvp => {
                let g = need_gamma(gamma)?;
                let h = h.ok_or_else(|| {
                    Error::InvalidConfig(format!("{preset} requires an explicit list length"))
                })?;
                if h < 2 {
                    return Err(Error::InvalidConfig(format!(
                        "{preset} requires a list length >= 2, got {h}"
                    )));
                }
                if preset == Preset::Mvm {
                    QualityConfig::var_minus(g, h)?
                } else {
                    QualityConfig::var_plus(g, h)?
                }
            }
            Preset::Evm | Preset::Evp => {
                let g = need_gamma(gamma)?;
                fixed_h1(h)?;
                if preset == Preset::Evm {
                    QualityConfig::var_minus(g, 1)?
                } else {
                    QualityConfig::var_plus(g, 1)?
                }
            }
        };
        Ok(SolverConfig::new(quality))
    }
}

/// One contraction round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterRecord {
    pub best_f: f64,
    pub list_len: usize,
    /// Communities of the best entry on the then-current coarse graph.
    pub community_count: usize,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    /// Final partition on the original nodes.
    pub partition: Partition,
    /// Per-layer modularity of `partition`, recomputed from scratch.
    pub q: ModularityVector,
    /// Score of `q` under the configured scalarization.
    pub f: f64,
    pub outer_iterations: usize,
    pub history: Vec<OuterRecord>,
}

/// Hooks into the solver's progress; all methods default to no-ops.
/// Used for invariant checking and move tracing in tests.
pub trait SolverObserver {
    fn after_node(&mut self, _node: usize, _list: &ParetoList) {}
    fn after_sweep(&mut self, _sweep: usize, _list: &ParetoList, _changed: bool) {}
    fn after_outer(&mut self, _outer: usize, _list: &ParetoList, _graph: &MultiplexGraph) {}
}

impl SolverObserver for () {}

/// Runs the full method.
pub fn run(graph: &MultiplexGraph, cfg: &SolverConfig) -> Result<SolverResult> {
    run_observed(graph, cfg, &mut ())
}

pub fn run_observed(
    graph: &MultiplexGraph,
    cfg: &SolverConfig,
    observer: &mut impl SolverObserver,
) -> Result<SolverResult> {
    if cfg.max_outer_iters == 0 || cfg.max_inner_sweeps == 0 {
        return Err(Error::InvalidConfig("iteration bounds must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut coarse = graph.clone();
    let mut mapping: Vec<usize> = (0..graph.n()).collect();
    let mut history: Vec<OuterRecord> = Vec::new();

    loop {
        let order = node_order(&coarse, cfg.ordering, &mut rng);
        let mut list = ParetoList::with_singletons(&coarse, &cfg.quality);
        let changed = phase_one(&coarse, &mut list, &order, cfg.max_inner_sweeps, observer);
        let step = {
            let best = list.best()?;
            history.push(OuterRecord {
                best_f: best.f(),
                list_len: list.len(),
                community_count: best.state().community_count(),
            });
            if changed {
                Some(phase_two(&coarse, best)?)
            } else {
                None
            }
        };
        observer.after_outer(history.len() - 1, &list, &coarse);
        match step {
            None => break,
            Some((next, cmap)) => {
                for m in &mut mapping {
                    *m = cmap[*m];
                }
                coarse = next;
                if history.len() >= cfg.max_outer_iters {
                    break;
                }
            }
        }
    }

    let partition = Partition::from_labels(mapping)?;
    let q = modularity_vector(graph, &partition);
    let f = cfg.quality.score(&q);
    Ok(SolverResult {
        partition,
        q,
        f,
        outer_iterations: history.len(),
        history,
    })
}

fn node_order(graph: &MultiplexGraph, ordering: NodeOrdering, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..graph.n()).collect();
    match ordering {
        NodeOrdering::Natural => {}
        NodeOrdering::CommunitySize => {
            order.sort_by_key(|&i| (Reverse(graph.node_size(i)), i));
        }
        NodeOrdering::Random => order.shuffle(rng),
    }
    order
}

/// Sweeps until one full sweep leaves the list unchanged (or the sweep bound
/// trips). Returns whether the list changed at all.
pub fn phase_one(
    graph: &MultiplexGraph,
    list: &mut ParetoList,
    order: &[usize],
    max_sweeps: usize,
    observer: &mut impl SolverObserver,
) -> bool {
    let mut scratch = MoveScratch::new(graph);
    let mut changed_any = false;
    for sweep in 0..max_sweeps {
        let mut changed = false;
        for &node in order {
            // snapshot: entries inserted while handling this node are not
            // expanded for it, removed ones are skipped
            for id in list.ids() {
                let (targets, base) = {
                    let Some(entry) = list.get(id) else { continue };
                    let st = entry.state();
                    let targets = scratch.improving_targets(graph, st, node);
                    if targets.is_empty() {
                        continue;
                    }
                    (targets, st.clone())
                };
                for &target in &targets {
                    let mut cand = base.clone();
                    cand.apply_move(graph, node, target)
                        .expect("target holds a neighbor, so it is active");
                    if list.try_insert(cand) == InsertOutcome::Inserted {
                        changed = true;
                    }
                }
            }
            observer.after_node(node, list);
        }
        observer.after_sweep(sweep, list, changed);
        debug_assert!(list.check_invariants().is_ok());
        if changed {
            changed_any = true;
        } else {
            break;
        }
    }
    changed_any
}

/// Contracts by the entry's partition. Returns the coarse graph and the
/// node-to-coarse-node mapping.
pub fn phase_two(graph: &MultiplexGraph, best: &ListEntry) -> Result<(MultiplexGraph, Vec<usize>)> {
    let partition = best.state().partition();
    let coarse = graph.contract(&partition)?;
    Ok((coarse, partition.labels().to_vec()))
}

/// Reusable buffers for pricing all neighbor communities of one node in
/// O(degree * layers).
struct MoveScratch {
    /// accumulated link weight, indexed [layer][community slot]
    weights: Vec<Vec<f64>>,
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl MoveScratch {
    fn new(graph: &MultiplexGraph) -> MoveScratch {
        MoveScratch {
            weights: vec![vec![0.0; graph.n()]; graph.k()],
            seen: vec![false; graph.n()],
            touched: Vec::new(),
        }
    }

    /// Communities of `node`'s neighbors (union over layers, first-touch
    /// order) whose move gain is strictly positive for this state.
    fn improving_targets(
        &mut self,
        graph: &MultiplexGraph,
        st: &LouvainState,
        node: usize,
    ) -> Vec<usize> {
        let k = graph.k();
        self.touched.clear();
        for s in 0..k {
            for &(j, w) in graph.neighbors(s, node) {
                let c = st.label(j);
                if !self.seen[c] {
                    self.seen[c] = true;
                    self.touched.push(c);
                }
                self.weights[s][c] += w;
            }
        }
        let home = st.label(node);
        let mut out = Vec::new();
        for &target in &self.touched {
            if target == home {
                continue;
            }
            let gains: Vec<f64> = (0..k)
                .map(|s| {
                    layer_move_gain(
                        graph.m(s),
                        graph.degree(s, node),
                        self.weights[s][home],
                        st.sigma_tot(s, home),
                        self.weights[s][target],
                        st.sigma_tot(s, target),
                    )
                })
                .collect();
            debug_assert!(st.is_active_community(target));
            let gain = build_gain(st.config(), st.q().values(), gains);
            if gain.quality_gain > 0.0 {
                out.push(target);
            }
        }
        for &c in &self.touched {
            self.seen[c] = false;
            for s in 0..k {
                self.weights[s][c] = 0.0;
            }
        }
        out
    }
}
