//! Synthetic multiplex benchmarks: multilayer stochastic block models,
//! LFR-style planted-partition graphs with power-law degrees, and
//! Erdős–Rényi noise layers.
//!
//! Everything is a pure function of (spec, seed): the same inputs give
//! bit-identical graphs.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Layer, MultiplexGraph, Partition};

/// Planted community labels; any valid partition works.
pub type GroundTruth = Partition;

/// How many times a whole sample (SBM/ER) or a single layer build (LFR) is
/// retried before giving up.
const MAX_RESTARTS: usize = 100;
const LFR_RESTARTS: usize = 10;

/// Multilayer SBM. Informative layers connect same-community pairs with
/// `p_in` and cross pairs with `p_out`; noisy layers use `p_noise` for every
/// pair. All layers share the planted communities and are sampled
/// independently.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
    pub informative_layers: usize,
    pub noisy_layers: usize,
    pub p_noise: f64,
    pub seed: u64,
}

impl SbmSpec {
    /// Informative-only spec, no noise layers.
    pub fn informative(
        sizes: Vec<usize>,
        p_in: f64,
        p_out: f64,
        layers: usize,
        seed: u64,
    ) -> SbmSpec {
        SbmSpec {
            sizes,
            p_in,
            p_out,
            informative_layers: layers,
            noisy_layers: 0,
            p_noise: 0.0,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let n: usize = self.sizes.iter().sum();
        if self.sizes.is_empty() || self.sizes.iter().any(|&s| s == 0) || n < 2 {
            return Err(Error::InvalidConfig(
                "SBM community sizes must be positive and sum to >= 2".into(),
            ));
        }
        if !(self.p_in > 0.0 && self.p_in <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "p_in = {} must be in (0, 1]",
                self.p_in
            )));
        }
        if !(0.0..=1.0).contains(&self.p_out) || self.p_out > self.p_in {
            return Err(Error::InvalidConfig(format!(
                "p_out = {} must be in [0, 1] and <= p_in",
                self.p_out
            )));
        }
        if self.informative_layers + self.noisy_layers == 0 {
            return Err(Error::InvalidConfig("SBM needs at least one layer".into()));
        }
        if self.noisy_layers > 0 && !(self.p_noise > 0.0 && self.p_noise <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "p_noise = {} must be in (0, 1] when noisy layers are requested",
                self.p_noise
            )));
        }
        Ok(())
    }
}

/// LFR-style planted partition graph (one layer). Degrees come from a
/// truncated power law rescaled to `avg_degree` and capped at `max_degree`;
/// each node sends `ceil((1 - mu) * degree)` stubs to its own community.
/// `noisy` collapses the spec to one community with `mu = 0`, a pure
/// configuration-model graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LfrSpec {
    pub n: usize,
    pub community_sizes: Vec<usize>,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub mu: f64,
    pub degree_exponent: f64,
    pub noisy: bool,
    pub seed: u64,
}

impl LfrSpec {
    /// The benchmark configuration used throughout the evaluation: 128 nodes,
    /// 4 communities of 32, average degree 16, maximum degree 32, exponent 2.
    pub fn benchmark(mu: f64, noisy: bool, seed: u64) -> LfrSpec {
        LfrSpec {
            n: 128,
            community_sizes: vec![32; 4],
            avg_degree: 16.0,
            max_degree: 32,
            mu,
            degree_exponent: 2.0,
            noisy,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidConfig("LFR needs n >= 2".into()));
        }
        if !self.noisy {
            let total: usize = self.community_sizes.iter().sum();
            if total != self.n || self.community_sizes.iter().any(|&s| s == 0) {
                return Err(Error::InvalidConfig(format!(
                    "community sizes must be positive and sum to n = {}",
                    self.n
                )));
            }
            if !(0.0..1.0).contains(&self.mu) {
                return Err(Error::InvalidConfig(format!(
                    "mu = {} must be in [0, 1)",
                    self.mu
                )));
            }
        }
        if !(self.avg_degree >= 1.0 && self.avg_degree <= self.max_degree as f64) {
            return Err(Error::InvalidConfig(format!(
                "avg_degree = {} must be in [1, max_degree]",
                self.avg_degree
            )));
        }
        if self.max_degree >= self.n {
            return Err(Error::InvalidConfig(format!(
                "max_degree = {} must be below n = {}",
                self.max_degree, self.n
            )));
        }
        if !(self.degree_exponent > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "degree_exponent = {} must be > 1",
                self.degree_exponent
            )));
        }
        Ok(())
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sub_seed(seed: u64, salt: u64) -> u64 {
    splitmix(seed ^ splitmix(salt))
}

fn block_labels(sizes: &[usize]) -> Vec<usize> {
    let mut labels = Vec::with_capacity(sizes.iter().sum());
    for (c, &size) in sizes.iter().enumerate() {
        labels.extend(std::iter::repeat(c).take(size));
    }
    labels
}

/// Samples a multilayer SBM. If any sampled layer comes out empty the whole
/// sample is redrawn (continuing the seeded stream), at most 100 times.
pub fn gen_sbm(spec: &SbmSpec) -> Result<(MultiplexGraph, GroundTruth)> {
    spec.validate()?;
    let labels = block_labels(&spec.sizes);
    let n = labels.len();
    let truth = Partition::from_labels(labels.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    for _ in 0..MAX_RESTARTS {
        let mut layers = Vec::with_capacity(spec.informative_layers + spec.noisy_layers);
        let mut empty = false;
        for layer_idx in 0..spec.informative_layers + spec.noisy_layers {
            let noisy = layer_idx >= spec.informative_layers;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    let p = if noisy {
                        spec.p_noise
                    } else if labels[i] == labels[j] {
                        spec.p_in
                    } else {
                        spec.p_out
                    };
                    if rng.gen::<f64>() < p {
                        edges.push((i, j, 1.0));
                    }
                }
            }
            empty |= edges.is_empty();
            layers.push(Layer::from_edges(n, edges)?);
        }
        if !empty {
            return Ok((MultiplexGraph::new(layers, None)?, truth));
        }
    }
    Err(Error::Generation(format!(
        "SBM sample still has an empty layer after {MAX_RESTARTS} attempts"
    )))
}

/// Erdős–Rényi graph as a single-layer multiplex. Resamples if empty.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<MultiplexGraph> {
    if n < 2 {
        return Err(Error::InvalidConfig("ER needs n >= 2".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidConfig(format!("p = {p} must be in (0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESTARTS {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j, 1.0));
                }
            }
        }
        if !edges.is_empty() {
            let layer = Layer::from_edges(n, edges)?;
            return Ok(MultiplexGraph::new(vec![layer], None)?);
        }
    }
    Err(Error::Generation(format!(
        "ER sample empty after {MAX_RESTARTS} attempts"
    )))
}

/// Stacks single-layer graphs into one multiplex, in order.
pub fn stack_layers(graphs: &[MultiplexGraph]) -> Result<MultiplexGraph> {
    if graphs.is_empty() {
        return Err(Error::InvalidConfig("nothing to stack".into()));
    }
    let n = graphs[0].n();
    let mut layers = Vec::new();
    for g in graphs {
        if g.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: g.n(),
            });
        }
        layers.extend(g.layers().iter().cloned());
    }
    MultiplexGraph::new(layers, None)
}

/// Samples an LFR-style graph. Each attempt draws fresh degrees from a fresh
/// sub-seed. Community subgraphs realize their exact intra-degree sequence
/// (graphical construction randomized by edge swaps; power-law tails can
/// saturate a community, which leaves random stub pairing unrepairable);
/// the sparse inter-community stubs are randomly paired with a bounded
/// rewiring repair of 100 per pair. Structural infeasibility (intra-stubs
/// exceeding community capacity, non-graphical sequence) fails the attempt,
/// so a misconfigured spec errors out after all restarts.
pub fn gen_lfr(spec: &LfrSpec) -> Result<(MultiplexGraph, GroundTruth)> {
    spec.validate()?;
    let (sizes, mu) = if spec.noisy {
        (vec![spec.n], 0.0)
    } else {
        (spec.community_sizes.clone(), spec.mu)
    };
    let labels = block_labels(&sizes);
    let truth = Partition::from_labels(labels.clone())?;

    let mut last_err = String::new();
    for attempt in 0..LFR_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(spec.seed, attempt as u64));
        match lfr_attempt(spec, &sizes, mu, &labels, &mut rng) {
            Ok(layer) => return Ok((MultiplexGraph::new(vec![layer], None)?, truth)),
            Err(e) => last_err = e,
        }
    }
    Err(Error::Generation(format!(
        "LFR failed after {LFR_RESTARTS} attempts: {last_err}"
    )))
}

fn lfr_attempt(
    spec: &LfrSpec,
    sizes: &[usize],
    mu: f64,
    labels: &[usize],
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Layer, String> {
    let n = spec.n;
    let mut degrees = draw_degrees(spec, rng);

    // stub counts must pair up globally
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let i = rng.gen_range(0..n);
        if degrees[i] < spec.max_degree {
            degrees[i] += 1;
        } else {
            degrees[i] -= 1;
        }
    }

    let mut intra: Vec<usize> = degrees
        .iter()
        .map(|&d| ((1.0 - mu) * d as f64).ceil() as usize)
        .collect();
    let mut inter: Vec<usize> = (0..n).map(|i| degrees[i] - intra[i]).collect();

    // each community must hold an even number of intra stubs; borrow an inter
    // stub from a random member, or grow a degree when nobody has one
    let members: Vec<Vec<usize>> = {
        let mut m = vec![Vec::new(); sizes.len()];
        for (i, &l) in labels.iter().enumerate() {
            m[l].push(i);
        }
        m
    };
    for group in &members {
        if group.iter().map(|&i| intra[i]).sum::<usize>() % 2 == 0 {
            continue;
        }
        // the bumped node must stay below the community cap of size - 1
        let cap = group.len() - 1;
        let donors: Vec<usize> = group
            .iter()
            .copied()
            .filter(|&i| inter[i] > 0 && intra[i] < cap)
            .collect();
        if let Some(&i) = donors.as_slice().choose(rng) {
            intra[i] += 1;
            inter[i] -= 1;
        } else {
            let growers: Vec<usize> = group
                .iter()
                .copied()
                .filter(|&i| degrees[i] < spec.max_degree && intra[i] < cap)
                .collect();
            if let Some(&i) = growers.as_slice().choose(rng) {
                degrees[i] += 1;
                intra[i] += 1;
            } else {
                let shrinkers: Vec<usize> =
                    group.iter().copied().filter(|&i| intra[i] > 0).collect();
                let &i = shrinkers
                    .as_slice()
                    .choose(rng)
                    .ok_or("odd intra-stub total with no stub holders")?;
                degrees[i] -= 1;
                intra[i] -= 1;
            }
        }
    }

    // degree adjustments above can leave an odd inter total
    if inter.iter().sum::<usize>() % 2 == 1 {
        let holders: Vec<usize> = (0..n).filter(|&i| inter[i] > 0).collect();
        let &i = holders
            .as_slice()
            .choose(rng)
            .ok_or("odd inter-stub total with no holders")?;
        if degrees[i] < spec.max_degree {
            degrees[i] += 1;
            inter[i] += 1;
        } else {
            degrees[i] -= 1;
            inter[i] -= 1;
        }
    }

    for i in 0..n {
        let cap = sizes[labels[i]] - 1;
        if intra[i] > cap {
            return Err(format!(
                "node {i} wants {} intra links in a community of {}",
                intra[i],
                sizes[labels[i]]
            ));
        }
    }

    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for group in &members {
        // heavy tails can draw a non-graphical intra sequence; shave stub
        // pairs off the largest holder (total degree preserved, the pair
        // moves to the inter pool) until realizable. No-op when already
        // graphical, and terminates because all-(0|1) sequences of even sum
        // are graphical.
        loop {
            let mut values: Vec<usize> = group.iter().map(|&i| intra[i]).collect();
            values.sort_unstable_by(|a, b| b.cmp(a));
            if erdos_gallai(&values) {
                break;
            }
            let &top = group
                .iter()
                .max_by_key(|&&i| intra[i])
                .expect("non-graphical group is non-empty");
            debug_assert!(intra[top] >= 2);
            intra[top] -= 2;
            inter[top] += 2;
        }
        let seq: Vec<(usize, usize)> = group
            .iter()
            .filter(|&&i| intra[i] > 0)
            .map(|&i| (intra[i], i))
            .collect();
        if seq.is_empty() {
            continue;
        }
        let sub = build_fixed_degree_graph(seq, rng)?;
        edges.extend(sub.into_iter().map(|(a, b)| (a, b, 1.0)));
    }

    let mut stubs: Vec<usize> = Vec::new();
    for i in 0..n {
        stubs.extend(std::iter::repeat(i).take(inter[i]));
    }
    if !stubs.is_empty() {
        let pairs = pair_stubs(stubs, rng, |a, b| labels[a] != labels[b])?;
        edges.extend(pairs.into_iter().map(|(a, b)| (a, b, 1.0)));
    }

    if edges.is_empty() {
        return Err("no edges generated".into());
    }
    Layer::from_edges(n, edges).map_err(|e| e.to_string())
}

/// Power-law degrees: raw draws with tail exponent `degree_exponent` are
/// scaled by a bisected factor so that, after rounding and clamping to
/// `[1, max_degree]`, the mean lands on `avg_degree`.
fn draw_degrees(spec: &LfrSpec, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = spec.n;
    let tail = spec.degree_exponent - 1.0;
    let raw: Vec<f64> = (0..n)
        .map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / tail))
        .collect();
    let clamp = |scale: f64| -> Vec<usize> {
        raw.iter()
            .map(|&x| ((scale * x).round() as usize).clamp(1, spec.max_degree))
            .collect()
    };
    let mean = |degs: &[usize]| degs.iter().sum::<usize>() as f64 / n as f64;

    let (mut lo, mut hi) = (1e-9, spec.max_degree as f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mean(&clamp(mid)) < spec.avg_degree {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    clamp(hi)
}

/// Erdos-Gallai test on a descending degree sequence with even sum.
fn erdos_gallai(desc: &[usize]) -> bool {
    if desc.iter().sum::<usize>() % 2 == 1 {
        return false;
    }
    let n = desc.len();
    let mut lhs = 0usize;
    for k in 1..=n {
        lhs += desc[k - 1];
        let rhs = k * (k - 1) + desc[k..].iter().map(|&d| d.min(k)).sum::<usize>();
        if lhs > rhs {
            return false;
        }
    }
    true
}

/// Simple graph realizing the exact degree sequence `seq` of `(degree, node)`
/// entries: greedy graphical construction (highest remaining degree first),
/// then randomized by simplicity-preserving double-edge swaps, 10 proposals
/// per edge. Errors when the sequence is not graphical.
fn build_fixed_degree_graph(
    seq: Vec<(usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Vec<(usize, usize)>, String> {
    let mut rem = seq;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    loop {
        rem.sort_unstable();
        let Some(&(d, v)) = rem.last() else { break };
        if d == 0 {
            break;
        }
        rem.pop();
        if d > rem.len() {
            return Err("intra degree sequence not graphical".into());
        }
        let start = rem.len() - d;
        for t in start..rem.len() {
            if rem[t].0 == 0 {
                return Err("intra degree sequence not graphical".into());
            }
            rem[t].0 -= 1;
            edges.push((v, rem[t].1));
        }
    }

    if edges.len() >= 2 {
        let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
        let mut present: BTreeSet<(usize, usize)> = edges.iter().map(|&e| norm(e)).collect();
        for _ in 0..10 * edges.len() {
            let e1 = rng.gen_range(0..edges.len());
            let e2 = rng.gen_range(0..edges.len());
            if e1 == e2 {
                continue;
            }
            let (a, b) = edges[e1];
            let (c, d) = if rng.gen::<bool>() {
                edges[e2]
            } else {
                (edges[e2].1, edges[e2].0)
            };
            // propose (a, b), (c, d) -> (a, d), (c, b)
            if a == d || c == b {
                continue;
            }
            let (n1, n2) = (norm((a, d)), norm((c, b)));
            if n1 == n2 || present.contains(&n1) || present.contains(&n2) {
                continue;
            }
            present.remove(&norm((a, b)));
            present.remove(&norm((c, d)));
            present.insert(n1);
            present.insert(n2);
            edges[e1] = (a, d);
            edges[e2] = (c, b);
        }
    }
    Ok(edges)
}

/// Randomly pairs stubs into simple edges. A bad pair (self-loop, repeat, or
/// `!allowed`) is repaired by swapping an endpoint with a random partner
/// pair, accepted only when both resulting pairs are good; gives up once the
/// budget of 100 proposals per pair is spent. Suited to sparse pairings
/// (the inter-community stubs); dense sequences go through
/// `build_fixed_degree_graph` instead.
fn pair_stubs(
    mut stubs: Vec<usize>,
    rng: &mut ChaCha8Rng,
    allowed: impl Fn(usize, usize) -> bool,
) -> std::result::Result<Vec<(usize, usize)>, String> {
    assert!(stubs.len() % 2 == 0, "stub total must be even");
    stubs.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
    let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));

    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &p in &pairs {
        *counts.entry(norm(p)).or_insert(0) += 1;
    }
    let bad = |p: (usize, usize), counts: &BTreeMap<(usize, usize), usize>| {
        p.0 == p.1 || counts[&norm(p)] > 1 || !allowed(p.0, p.1)
    };

    let mut queue: Vec<usize> = (0..pairs.len())
        .filter(|&t| bad(pairs[t], &counts))
        .collect();
    let mut budget = 100 * pairs.len();
    while let Some(&t) = queue.last() {
        if !bad(pairs[t], &counts) {
            queue.pop();
            continue;
        }
        if budget == 0 {
            return Err("stub rewiring budget exhausted".into());
        }
        budget -= 1;
        if pairs.len() < 2 {
            return Err("cannot repair a single stub pair".into());
        }
        let mut u = rng.gen_range(0..pairs.len());
        if u == t {
            u = (u + 1) % pairs.len();
        }
        let (a, b) = pairs[t];
        let (c, d) = pairs[u];
        // propose (a, b), (c, d) -> (a, d), (c, b)
        *counts.get_mut(&norm((a, b))).unwrap() -= 1;
        *counts.get_mut(&norm((c, d))).unwrap() -= 1;
        *counts.entry(norm((a, d))).or_insert(0) += 1;
        *counts.entry(norm((c, b))).or_insert(0) += 1;
        if !bad((a, d), &counts) && !bad((c, b), &counts) {
            pairs[t] = (a, d);
            pairs[u] = (c, b);
            queue.pop();
        } else {
            *counts.get_mut(&norm((a, d))).unwrap() -= 1;
            *counts.get_mut(&norm((c, b))).unwrap() -= 1;
            *counts.get_mut(&norm((a, b))).unwrap() += 1;
            *counts.get_mut(&norm((c, d))).unwrap() += 1;
        }
    }
    Ok(pairs)
}
