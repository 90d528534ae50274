//! Shared fixtures and independent oracles for the integration tests.
//!
//! Everything here recomputes results from first principles (dense double
//! sums, exhaustive enumeration, a from-scratch classical Louvain) so the
//! library's incremental bookkeeping is checked against code that shares
//! none of it.

#![allow(dead_code)] // each test target compiles its own copy of this module

use std::collections::BTreeMap;

use multiplex_louvain::solver::SolverObserver;
use multiplex_louvain::{Layer, MultiplexGraph, ParetoList, Partition};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// modularity oracle

/// Layer modularity via the ordered-pair double sum
/// `Q = sum_{ij in same community} (A_ij / 2m - d_i d_j / (2m)^2)`,
/// with `A_ii` twice the self-loop weight. Degrees and `2m` are rederived
/// from the dense matrix, so nothing is shared with the library's
/// aggregate-based computation.
pub fn modularity_double_sum(graph: &MultiplexGraph, s: usize, part: &Partition) -> f64 {
    let layer = graph.layer(s);
    let n = layer.n();
    assert_eq!(part.len(), n);
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = 2.0 * layer.self_loop(i);
        for &(j, w) in layer.neighbors(i) {
            a[i][j] = w;
        }
    }
    let deg: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = deg.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if part.label(i) == part.label(j) {
                q += a[i][j] / two_m - deg[i] * deg[j] / (two_m * two_m);
            }
        }
    }
    q
}

/// All layer modularities through the double-sum oracle.
pub fn modularity_oracle_vector(graph: &MultiplexGraph, part: &Partition) -> Vec<f64> {
    (0..graph.k())
        .map(|s| modularity_double_sum(graph, s, part))
        .collect()
}

// ---------------------------------------------------------------------------
// scalarization oracle

pub fn oracle_mean(q: &[f64]) -> f64 {
    q.iter().sum::<f64>() / q.len() as f64
}

/// Sample variance with the k-1 denominator; 0 for a single layer.
pub fn oracle_variance(q: &[f64]) -> f64 {
    if q.len() < 2 {
        return 0.0;
    }
    let mean = oracle_mean(q);
    q.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (q.len() - 1) as f64
}

#[derive(Debug, Clone, Copy)]
pub enum OracleScore {
    Mean,
    VarMinus(f64),
    VarPlus(f64),
}

pub fn oracle_f(q: &[f64], score: OracleScore) -> f64 {
    let m = oracle_mean(q);
    let v = oracle_variance(q);
    match score {
        OracleScore::Mean => m,
        OracleScore::VarMinus(g) => (1.0 - g) * m - g * v,
        OracleScore::VarPlus(g) => (1.0 - g) * m + g * v,
    }
}

// ---------------------------------------------------------------------------
// exhaustive partition enumeration

/// Every partition of `n` nodes, via restricted growth strings
/// (`a[0] = 0`, `a[i] <= max(a[..i]) + 1`). Bell-number counts:
/// `all_partitions(6).len() == 203`, `all_partitions(8).len() == 4140`.
pub fn all_partitions(n: usize) -> Vec<Partition> {
    fn rec(prefix: &mut Vec<usize>, maxv: usize, n: usize, out: &mut Vec<Partition>) {
        if prefix.len() == n {
            out.push(Partition::from_labels(prefix.clone()).unwrap());
            return;
        }
        let top = if prefix.is_empty() { 0 } else { maxv + 1 };
        for v in 0..=top {
            prefix.push(v);
            rec(prefix, maxv.max(v), n, out);
            prefix.pop();
        }
    }
    assert!(n >= 1);
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), 0, n, &mut out);
    out
}

// ---------------------------------------------------------------------------
// fixtures

/// Two 3-cliques joined by one bridge edge (2-3), unit weights, one layer.
/// The modularity optimum is the clique split with Q = 5/14.
pub fn two_triangles() -> MultiplexGraph {
    let layer = Layer::from_edges(
        6,
        [
            (0, 1, 1.0),
            (0, 2, 1.0),
            (1, 2, 1.0),
            (3, 4, 1.0),
            (3, 5, 1.0),
            (4, 5, 1.0),
            (2, 3, 1.0),
        ],
    )
    .unwrap();
    MultiplexGraph::new(vec![layer], None).unwrap()
}

/// A random multiplex with Bernoulli edges, continuous weights and the
/// occasional self-loop. Empty layers get one fallback edge so the graph
/// always validates.
pub fn random_multiplex(n: usize, k: usize, rng: &mut ChaCha8Rng) -> MultiplexGraph {
    assert!(n >= 2);
    let mut layers = Vec::with_capacity(k);
    for _ in 0..k {
        let p = rng.gen_range(0.08..0.30);
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((i, j, rng.gen_range(0.5..2.0)));
                }
            }
            if rng.gen_bool(0.1) {
                edges.push((i, i, rng.gen_range(0.25..1.0)));
            }
        }
        if edges.is_empty() {
            edges.push((0, n - 1, 1.0));
        }
        layers.push(Layer::from_edges(n, edges).unwrap());
    }
    MultiplexGraph::new(layers, None).unwrap()
}

// ---------------------------------------------------------------------------
// move tracing

/// `(outer iteration, coarse node visited, canonical labels afterwards)`.
/// One event per node visit per sweep, on whatever graph that outer
/// iteration works on.
pub type TraceEvent = (usize, usize, Vec<usize>);

/// First-occurrence renumbering of arbitrary labels.
pub fn canon_of(labels: &[usize]) -> Vec<usize> {
    let top = labels.iter().copied().max().unwrap();
    let mut map: Vec<Option<usize>> = vec![None; top + 1];
    let mut next = 0usize;
    let mut out = Vec::with_capacity(labels.len());
    for &l in labels {
        let id = *map[l].get_or_insert_with(|| {
            let id = next;
            next += 1;
            id
        });
        out.push(id);
    }
    out
}

/// Records the incumbent (best-scoring) partition after every node visit.
pub struct TraceObserver {
    outer: usize,
    pub events: Vec<TraceEvent>,
}

impl TraceObserver {
    pub fn new() -> TraceObserver {
        TraceObserver {
            outer: 0,
            events: Vec::new(),
        }
    }
}

impl SolverObserver for TraceObserver {
    fn after_node(&mut self, node: usize, list: &ParetoList) {
        let best = list.best().expect("the list is never empty");
        self.events
            .push((self.outer, node, canon_of(best.state().labels())));
    }

    fn after_outer(&mut self, _outer: usize, _list: &ParetoList, _graph: &MultiplexGraph) {
        self.outer += 1;
    }
}

// ---------------------------------------------------------------------------
// classical single-layer Louvain, written from scratch

/// A plain weighted graph for the reference implementation. Neighbor lists
/// ascend by id; self-loops count once in `m` and twice in the degree.
struct RefGraph {
    n: usize,
    nbrs: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    deg: Vec<f64>,
    m: f64,
}

impl RefGraph {
    fn from_merged(n: usize, merged: &BTreeMap<(usize, usize), f64>) -> RefGraph {
        let mut nbrs = vec![Vec::new(); n];
        let mut loops = vec![0.0; n];
        for (&(a, b), &w) in merged {
            if a == b {
                loops[a] += w;
            } else {
                nbrs[a].push((b, w));
                nbrs[b].push((a, w));
            }
        }
        for list in &mut nbrs {
            list.sort_unstable_by_key(|&(j, _)| j);
        }
        let mut deg = vec![0.0; n];
        for i in 0..n {
            let mut d = 2.0 * loops[i];
            for &(_, w) in &nbrs[i] {
                d += w;
            }
            deg[i] = d;
        }
        let mut m = 0.0;
        for l in &loops {
            m += l;
        }
        for (&(a, b), &w) in merged {
            if a != b {
                m += w;
            }
        }
        RefGraph {
            n,
            nbrs,
            loops,
            deg,
            m,
        }
    }
}

/// One Louvain level: sweep the nodes in natural order, move each to the
/// first neighbor community that maximizes modularity (strict improvement
/// only), repeat until a sweep changes nothing. The running modularity `q`
/// is maintained incrementally, and a candidate move is judged by the value
/// `q + gain` it would leave behind, mirroring how an archive of size one
/// compares whole partitions.
fn ref_one_level(g: &RefGraph, outer: usize, events: &mut Vec<TraceEvent>) -> (Vec<usize>, bool) {
    let n = g.n;
    let mut labels: Vec<usize> = (0..n).collect();
    let mut sigma_tot = g.deg.clone();
    let two_m = 2.0 * g.m;
    let mut q: f64 = (0..n)
        .map(|i| g.loops[i] / g.m - (g.deg[i] / two_m).powi(2))
        .sum();
    let two_m_sq = 2.0 * g.m * g.m;
    let mut changed_any = false;
    for _sweep in 0..1000 {
        let mut changed = false;
        for node in 0..n {
            let home = labels[node];
            // link weight into each neighbor community, first-touch order
            let mut order: Vec<usize> = Vec::new();
            let mut weight: BTreeMap<usize, f64> = BTreeMap::new();
            for &(j, w) in &g.nbrs[node] {
                let c = labels[j];
                let slot = weight.entry(c).or_insert_with(|| {
                    order.push(c);
                    0.0
                });
                *slot += w;
            }
            let w_home = weight.get(&home).copied().unwrap_or(0.0);
            let deg = g.deg[node];
            let base_q = q;
            let mut inc_q = q;
            let mut best: Option<(usize, f64)> = None;
            for &target in &order {
                if target == home {
                    continue;
                }
                let removal = -w_home / g.m + deg * (sigma_tot[home] - deg) / two_m_sq;
                let insertion = weight[&target] / g.m - deg * sigma_tot[target] / two_m_sq;
                let gain = removal + insertion;
                if gain <= 0.0 {
                    continue;
                }
                let cand_q = base_q + gain;
                if cand_q > inc_q {
                    inc_q = cand_q;
                    best = Some((target, cand_q));
                }
            }
            if let Some((target, new_q)) = best {
                sigma_tot[home] -= deg;
                sigma_tot[target] += deg;
                labels[node] = target;
                q = new_q;
                changed = true;
            }
            events.push((outer, node, canon_of(&labels)));
        }
        if changed {
            changed_any = true;
        } else {
            break;
        }
    }
    (labels, changed_any)
}

fn ref_contract(g: &RefGraph, canon: &[usize]) -> RefGraph {
    let c = canon.iter().copied().max().unwrap() + 1;
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for i in 0..g.n {
        let li = canon[i];
        if g.loops[i] > 0.0 {
            *merged.entry((li, li)).or_insert(0.0) += g.loops[i];
        }
        for &(j, w) in &g.nbrs[i] {
            if j < i {
                continue;
            }
            let lj = canon[j];
            let key = (li.min(lj), li.max(lj));
            *merged.entry(key).or_insert(0.0) += w;
        }
    }
    RefGraph::from_merged(c, &merged)
}

/// Full classical Louvain on one layer: levels of `ref_one_level` plus
/// contraction, until a level moves nothing. Returns the final labels on
/// the original nodes and the complete visit trace.
pub fn classical_louvain_trace(layer: &Layer) -> (Vec<usize>, Vec<TraceEvent>) {
    let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, j, w) in layer.edges() {
        merged.insert((i, j), w);
    }
    let mut g = RefGraph::from_merged(layer.n(), &merged);
    let mut mapping: Vec<usize> = (0..layer.n()).collect();
    let mut events = Vec::new();
    let mut outer = 0usize;
    loop {
        let (labels, changed) = ref_one_level(&g, outer, &mut events);
        outer += 1;
        if !changed {
            break;
        }
        let canon = canon_of(&labels);
        for m in &mut mapping {
            *m = canon[*m];
        }
        g = ref_contract(&g, &canon);
        if outer >= 100 {
            break;
        }
    }
    (mapping, events)
}
