//! Benchmark execution: a task grid (points x samples x method configs x
//! runs) dispatched over a rayon pool, plus the aggregation passes that turn
//! run rows into mean / best / ratio rows.
//!
//! Determinism: instance and run seeds are pure functions of their indices
//! (see `seeds`), tasks are built in canonical nested-loop order (point,
//! sample, method, run) and an indexed parallel map preserves that order, so
//! the CSV bytes cannot depend on the worker count. Wall times are the one
//! nondeterministic field and stay blank unless explicitly requested.
//!
//! Every run carries an observer that re-checks the Pareto-list invariants
//! (mutual non-dominance, capacity bound) after each outer iteration; any
//! violation fails the whole command.

use std::sync::Arc;
use std::time::Instant;

use multiplex_louvain::generators::{gen_er, gen_lfr, gen_sbm, stack_layers, LfrSpec, SbmSpec};
use multiplex_louvain::solver::{self, SolverObserver};
use multiplex_louvain::{metrics, MultiplexGraph, ParetoList, Partition, SolverConfig};
use rayon::prelude::*;

use crate::config::{LfrBench, MethodConfig, OrderingOpt, SbmBench};
use crate::report::{fmt_num, ResultRow, RowKind};
use crate::seeds;
use crate::{CliError, Result};

/// How to materialize one instance of a grid point from a sample seed.
pub enum InstanceSpec {
    Sbm { bench: SbmBench, ratio: f64 },
    Lfr { bench: LfrBench, mu: f64 },
    Real {
        graph: Arc<MultiplexGraph>,
        truth: Arc<Partition>,
        noise_p: Option<f64>,
        flatten: bool,
    },
}

impl InstanceSpec {
    fn materialize(&self, seed: u64) -> Result<(MultiplexGraph, Option<Partition>)> {
        match self {
            InstanceSpec::Sbm { bench, ratio } => {
                let spec = SbmSpec {
                    sizes: bench.sizes.clone(),
                    p_in: bench.p_in,
                    p_out: bench.p_in / ratio,
                    informative_layers: bench.informative_layers,
                    noisy_layers: bench.noisy_layers,
                    p_noise: bench.p_noise,
                    seed,
                };
                let (graph, truth) = gen_sbm(&spec)?;
                Ok((graph, Some(truth)))
            }
            InstanceSpec::Lfr { bench, mu } => {
                let mut layers = Vec::new();
                let mut truth = None;
                for i in 0..bench.informative_layers {
                    let spec = LfrSpec {
                        n: bench.n(),
                        community_sizes: bench.community_sizes.clone(),
                        avg_degree: bench.avg_degree,
                        max_degree: bench.max_degree,
                        mu: *mu,
                        degree_exponent: bench.degree_exponent,
                        noisy: false,
                        seed: seeds::mix(seed, &[i as u64]),
                    };
                    let (layer, planted) = gen_lfr(&spec)?;
                    truth.get_or_insert(planted);
                    layers.push(layer);
                }
                for j in 0..bench.noisy_layers {
                    let spec = LfrSpec {
                        n: bench.n(),
                        community_sizes: bench.community_sizes.clone(),
                        avg_degree: bench.avg_degree,
                        max_degree: bench.max_degree,
                        mu: 0.0,
                        degree_exponent: bench.degree_exponent,
                        noisy: true,
                        seed: seeds::mix(seed, &[(bench.informative_layers + j) as u64]),
                    };
                    let (layer, _) = gen_lfr(&spec)?;
                    layers.push(layer);
                }
                Ok((stack_layers(&layers)?, truth))
            }
            InstanceSpec::Real {
                graph,
                truth,
                noise_p,
                flatten,
            } => {
                let base = if *flatten {
                    graph.flatten()
                } else {
                    graph.as_ref().clone()
                };
                let built = match noise_p {
                    Some(p) => {
                        let noise = gen_er(base.n(), *p, seed)?;
                        stack_layers(&[base, noise])?
                    }
                    None => base,
                };
                Ok((built, Some(truth.as_ref().clone())))
            }
        }
    }
}

/// One sweep-parameter value with its instance recipe.
pub struct GridPoint {
    pub param: Option<f64>,
    pub instance: InstanceSpec,
}

pub struct TaskGrid {
    pub dataset: String,
    pub points: Vec<GridPoint>,
    pub methods: Vec<MethodConfig>,
    pub ordering: OrderingOpt,
    pub samples: usize,
    pub runs: usize,
    pub seed: u64,
    /// Fill `wall_ms`; off by default because it breaks byte-determinism.
    pub timings: bool,
}

pub struct BenchOutput {
    pub rows: Vec<ResultRow>,
    /// Outer iterations whose Pareto list was re-verified (criterion:
    /// violations abort, so a successful run means zero).
    pub invariant_checks: usize,
}

#[derive(Default)]
struct InvariantObserver {
    checks: usize,
    violation: Option<String>,
}

impl SolverObserver for InvariantObserver {
    fn after_outer(&mut self, outer: usize, list: &ParetoList, _graph: &MultiplexGraph) {
        self.checks += 1;
        if self.violation.is_none() {
            if let Err(e) = list.check_invariants() {
                self.violation = Some(format!("outer iteration {outer}: {e}"));
            }
        }
    }
}

struct Instance {
    point: usize,
    sample: usize,
    seed: u64,
    graph: Arc<MultiplexGraph>,
    truth: Option<Arc<Partition>>,
}

/// Runs the whole grid on `jobs` workers (0 = pool default) and returns one
/// row per solver run, in canonical order.
pub fn execute(grid: &TaskGrid, jobs: usize) -> Result<BenchOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Data(e.to_string()))?;

    let mut instance_plan = Vec::new();
    for point in 0..grid.points.len() {
        for sample in 0..grid.samples {
            instance_plan.push((point, sample, seeds::sample_seed(grid.seed, point, sample)));
        }
    }
    let instances: Vec<Instance> = pool.install(|| {
        instance_plan
            .par_iter()
            .map(|&(point, sample, seed)| {
                let (graph, truth) = grid.points[point].instance.materialize(seed)?;
                Ok(Instance {
                    point,
                    sample,
                    seed,
                    graph: Arc::new(graph),
                    truth: truth.map(Arc::new),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    struct Task<'a> {
        inst: &'a Instance,
        config: usize,
        run: usize,
        run_seed: u64,
    }
    let mut tasks = Vec::new();
    for inst in &instances {
        for config in 0..grid.methods.len() {
            for run in 0..grid.runs {
                tasks.push(Task {
                    inst,
                    config,
                    run,
                    run_seed: seeds::run_seed(grid.seed, inst.point, inst.sample, config, run),
                });
            }
        }
    }

    let results: Vec<(ResultRow, usize)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|task| {
                let method = &grid.methods[task.config];
                let mut cfg = SolverConfig::from_preset(method.preset, method.h, method.gamma)
                    .map_err(|e| CliError::Data(e.to_string()))?;
                cfg.ordering = grid.ordering.to_core();
                cfg.seed = task.run_seed;
                let mut obs = InvariantObserver::default();
                let started = Instant::now();
                let res = solver::run_observed(&task.inst.graph, &cfg, &mut obs)?;
                let wall = started.elapsed().as_millis();
                if let Some(violation) = obs.violation {
                    return Err(CliError::Data(format!(
                        "pareto-list invariant violated ({} {} sample {} run {}): {violation}",
                        grid.dataset, method.label, task.inst.sample, task.run
                    )));
                }
                let (accuracy, nmi) = match &task.inst.truth {
                    Some(truth) => (
                        Some(metrics::accuracy(&res.partition, truth)?),
                        Some(metrics::nmi(&res.partition, truth)?),
                    ),
                    None => (None, None),
                };
                let row = ResultRow {
                    kind: RowKind::Run,
                    dataset: grid.dataset.clone(),
                    method: method.label.clone(),
                    h: method.h,
                    gamma: method.gamma,
                    ordering: Some(grid.ordering.as_str()),
                    param: grid.points[task.inst.point].param,
                    sample: Some(task.inst.sample),
                    run: Some(task.run),
                    sample_seed: Some(task.inst.seed),
                    run_seed: Some(task.run_seed),
                    accuracy,
                    nmi,
                    f: Some(res.f),
                    q_layers: res.q.values().to_vec(),
                    outer_iters: Some(res.outer_iterations),
                    communities: Some(res.partition.community_count()),
                    wall_ms: grid.timings.then_some(wall),
                };
                Ok((row, obs.checks))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::with_capacity(results.len());
    let mut invariant_checks = 0usize;
    for (row, checks) in results {
        rows.push(row);
        invariant_checks += checks;
    }
    Ok(BenchOutput {
        rows,
        invariant_checks,
    })
}

// ---------------------------------------------------------------------------
// aggregation

fn bits(x: Option<f64>) -> String {
    x.map(|v| v.to_bits().to_string()).unwrap_or_default()
}

/// Groups rows by key in first-appearance order.
fn group_by<'a, F>(rows: &'a [ResultRow], key: F) -> Vec<(String, Vec<&'a ResultRow>)>
where
    F: Fn(&ResultRow) -> String,
{
    let mut order: Vec<(String, Vec<&ResultRow>)> = Vec::new();
    let mut index: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for row in rows {
        let k = key(row);
        match index.get(&k) {
            Some(&i) => order[i].1.push(row),
            None => {
                index.insert(k.clone(), order.len());
                order.push((k, vec![row]));
            }
        }
    }
    order
}

fn mean_of<F>(rows: &[&ResultRow], field: F) -> Option<f64>
where
    F: Fn(&ResultRow) -> Option<f64>,
{
    let mut sum = 0.0;
    for row in rows {
        sum += field(row)?;
    }
    Some(sum / rows.len() as f64)
}

/// One `mean` row per (dataset, method, gamma, param) cell, averaging over
/// samples and runs.
pub fn mean_rows(run_rows: &[ResultRow]) -> Vec<ResultRow> {
    let cells = group_by(run_rows, |r| {
        format!(
            "{}\u{1}{}\u{1}{}\u{1}{}\u{1}{}",
            r.dataset,
            r.method,
            bits(r.gamma),
            r.ordering.unwrap_or_default(),
            bits(r.param)
        )
    });
    cells
        .into_iter()
        .map(|(_, rows)| {
            let first = rows[0];
            let mut out = ResultRow::blank(RowKind::Mean, &first.dataset, &first.method);
            out.h = first.h;
            out.gamma = first.gamma;
            out.ordering = first.ordering;
            out.param = first.param;
            out.accuracy = mean_of(&rows, |r| r.accuracy);
            out.nmi = mean_of(&rows, |r| r.nmi);
            out.f = mean_of(&rows, |r| r.f);
            out
        })
        .collect()
}

/// For every (dataset, method, param) cell with several gammas, the mean row
/// whose NMI is highest (ties towards the smaller gamma), re-tagged `best`.
/// Cells without NMI (no ground truth) are skipped, since the selection rule
/// is defined on NMI.
pub fn best_rows(means: &[ResultRow]) -> Vec<ResultRow> {
    let cells = group_by(means, |r| {
        format!(
            "{}\u{1}{}\u{1}{}\u{1}{}",
            r.dataset,
            r.method,
            r.ordering.unwrap_or_default(),
            bits(r.param)
        )
    });
    let mut out = Vec::new();
    for (_, rows) in cells {
        let mut best: Option<&ResultRow> = None;
        for row in rows {
            let Some(nmi) = row.nmi else { continue };
            let replace = match best {
                None => true,
                Some(b) => {
                    let bn = b.nmi.expect("best always has NMI");
                    nmi > bn || (nmi == bn && row.gamma < b.gamma)
                }
            };
            if replace {
                best = Some(row);
            }
        }
        if let Some(b) = best {
            let mut row = b.clone();
            row.kind = RowKind::Best;
            out.push(row);
        }
    }
    out
}

/// Performance-ratio rows over `best` rows: each (dataset, param) pair is one
/// column, each method is scored by its best-gamma accuracy and NMI.
pub fn ratio_rows(best: &[ResultRow]) -> Result<Vec<ResultRow>> {
    let mut table = metrics::ScoreTable::new();
    for row in best {
        let (Some(acc), Some(nmi)) = (row.accuracy, row.nmi) else {
            continue;
        };
        let column = match row.param {
            Some(p) => format!("{}@{}", row.dataset, fmt_num(p)),
            None => row.dataset.clone(),
        };
        table.push(&row.method, &column, acc, nmi);
    }
    let ratios = metrics::performance_ratios(&table)?;
    Ok(ratios
        .into_iter()
        .map(|r| {
            let mut row = ResultRow::blank(RowKind::Ratio, "all", &r.method);
            row.accuracy = Some(r.rho_accuracy);
            row.nmi = Some(r.rho_nmi);
            row
        })
        .collect())
}
