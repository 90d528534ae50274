//! One function per subcommand. Usage problems (bad flags, preset taxonomy)
//! map to exit code 1, data problems (files, configs, solver failures) to 2.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use multiplex_louvain::solver;
use multiplex_louvain::{graph, metrics, Preset, SolverConfig};

use crate::cli::{BenchArgs, MetricsArgs, RealArgs, RunArgs, SettingOpt};
use crate::config::{expand_methods, ExperimentConfig, MethodSpec};
use crate::dataset::load_dataset;
use crate::harness::{self, GridPoint, InstanceSpec, TaskGrid};
use crate::report::{self, fmt_num, ResultRow, RowKind};
use crate::{CliError, Result};

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".to_string())
}

pub fn cmd_run(args: &RunArgs) -> Result<()> {
    let preset: Preset = args
        .preset
        .parse()
        .map_err(|e: multiplex_louvain::Error| CliError::Usage(e.to_string()))?;
    let mut cfg = SolverConfig::from_preset(preset, args.h, args.gamma)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    cfg.ordering = args.ordering.to_core();
    cfg.seed = args.seed;

    let graph_data = graph::load_multiplex(&args.graph)?;
    let truth = match &args.truth {
        Some(path) => Some(graph::load_partition(path)?),
        None => None,
    };
    if let Some(t) = &truth {
        if t.len() != graph_data.n() {
            return Err(CliError::Data(format!(
                "truth has {} labels but the graph has {} nodes",
                t.len(),
                graph_data.n()
            )));
        }
    }

    let started = std::time::Instant::now();
    let res = solver::run(&graph_data, &cfg)?;
    let wall = started.elapsed().as_millis();

    let out_path = args
        .partition_out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.partition", file_stem(&args.graph))));
    graph::save_partition(&res.partition, &out_path)?;
    eprintln!("wrote partition to {}", out_path.display());

    let label = crate::config::method_label(preset, args.h);
    let mut row = ResultRow::blank(RowKind::Run, &file_stem(&args.graph), &label);
    row.h = args.h;
    row.gamma = args.gamma;
    row.ordering = Some(args.ordering.as_str());
    row.run_seed = Some(args.seed);
    if let Some(t) = &truth {
        row.accuracy = Some(metrics::accuracy(&res.partition, t)?);
        row.nmi = Some(metrics::nmi(&res.partition, t)?);
    }
    row.f = Some(res.f);
    row.q_layers = res.q.values().to_vec();
    row.outer_iters = Some(res.outer_iterations);
    row.communities = Some(res.partition.community_count());
    row.wall_ms = Some(wall);
    report::write_csv(&[row], None)
}

fn bench_name(prefix: &str, informative: usize, noisy: usize) -> String {
    if noisy == 0 {
        format!("{prefix}-{informative}i")
    } else {
        format!("{prefix}-{informative}i{noisy}n")
    }
}

fn resolve_jobs(cli: Option<usize>, cfg: Option<usize>) -> usize {
    cli.or(cfg).unwrap_or(0)
}

fn emit(rows: &[ResultRow], cli_out: &Option<PathBuf>, cfg_out: &Option<PathBuf>) -> Result<()> {
    let dest = cli_out.as_deref().or(cfg_out.as_deref());
    report::write_csv(rows, dest)?;
    if let Some(path) = dest {
        eprintln!("wrote {} rows to {}", rows.len(), path.display());
    }
    Ok(())
}

pub fn cmd_bench_sbm(args: &BenchArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let bench = cfg
        .sbm
        .as_ref()
        .ok_or_else(|| CliError::Data("config has no `sbm` section".into()))?;
    let dataset = bench_name("sbm", bench.informative_layers, bench.noisy_layers);
    let points = bench
        .ratios
        .iter()
        .map(|&ratio| GridPoint {
            param: Some(ratio),
            instance: InstanceSpec::Sbm {
                bench: bench.clone(),
                ratio,
            },
        })
        .collect();
    let rows = sweep_rows(args, &cfg, dataset, points, true)?;
    emit(&rows, &args.output, &cfg.output)
}

pub fn cmd_bench_lfr(args: &BenchArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let bench = cfg
        .lfr
        .as_ref()
        .ok_or_else(|| CliError::Data("config has no `lfr` section".into()))?;
    let dataset = bench_name("lfr", bench.informative_layers, bench.noisy_layers);
    let points = bench
        .mus
        .iter()
        .map(|&mu| GridPoint {
            param: Some(mu),
            instance: InstanceSpec::Lfr {
                bench: bench.clone(),
                mu,
            },
        })
        .collect();
    let rows = sweep_rows(args, &cfg, dataset, points, true)?;
    emit(&rows, &args.output, &cfg.output)
}

/// Runs the grid and returns run rows, per-cell means, and (optionally) the
/// best-gamma selection, in that order.
fn sweep_rows(
    args: &BenchArgs,
    cfg: &ExperimentConfig,
    dataset: String,
    points: Vec<GridPoint>,
    with_best: bool,
) -> Result<Vec<ResultRow>> {
    let grid = TaskGrid {
        dataset,
        points,
        methods: expand_methods(&cfg.methods)?,
        ordering: cfg.ordering,
        samples: cfg.samples,
        runs: cfg.runs,
        seed: cfg.seed,
        timings: args.timings,
    };
    let out = harness::execute(&grid, resolve_jobs(args.jobs, cfg.jobs))?;
    let means = harness::mean_rows(&out.rows);
    let mut rows = out.rows;
    if with_best {
        let best = harness::best_rows(&means);
        rows.extend(means);
        rows.extend(best);
    } else {
        rows.extend(means);
    }
    Ok(rows)
}

pub fn cmd_gamma_sweep(args: &BenchArgs) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    for spec in &cfg.methods {
        if spec.gammas.as_ref().map_or(true, |g| g.is_empty()) {
            return Err(CliError::Data(format!(
                "gamma-sweep needs a gamma grid for every method; `{}` has none",
                spec.preset
            )));
        }
    }
    let (dataset, points) = match (&cfg.sbm, &cfg.lfr) {
        (Some(bench), None) => (
            bench_name("sbm", bench.informative_layers, bench.noisy_layers),
            bench
                .ratios
                .iter()
                .map(|&ratio| GridPoint {
                    param: Some(ratio),
                    instance: InstanceSpec::Sbm {
                        bench: bench.clone(),
                        ratio,
                    },
                })
                .collect::<Vec<_>>(),
        ),
        (None, Some(bench)) => (
            bench_name("lfr", bench.informative_layers, bench.noisy_layers),
            bench
                .mus
                .iter()
                .map(|&mu| GridPoint {
                    param: Some(mu),
                    instance: InstanceSpec::Lfr {
                        bench: bench.clone(),
                        mu,
                    },
                })
                .collect::<Vec<_>>(),
        ),
        _ => {
            return Err(CliError::Data(
                "gamma-sweep needs exactly one of the `sbm`/`lfr` sections".into(),
            ))
        }
    };
    let rows = sweep_rows(args, &cfg, dataset, points, false)?;
    emit(&rows, &args.output, &cfg.output)
}

fn default_method_specs() -> Vec<MethodSpec> {
    let gammas = vec![0.1, 0.3, 0.5, 0.7, 0.9];
    let grid = |preset: &str, h: Option<usize>, with_gamma: bool| MethodSpec {
        preset: preset.to_string(),
        h,
        gammas: with_gamma.then(|| gammas.clone()),
    };
    vec![
        grid("MA", Some(2), false),
        grid("MVM", Some(2), true),
        grid("MVP", Some(2), true),
        grid("EVM", None, true),
        grid("EVP", None, true),
        grid("GL", None, false),
    ]
}

pub fn cmd_real(args: &RealArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => Some(ExperimentConfig::load(path)?),
        None => None,
    };
    let method_specs = cfg
        .as_ref()
        .map(|c| c.methods.clone())
        .unwrap_or_else(default_method_specs);
    let methods = expand_methods(&method_specs)?;
    let ordering = cfg.as_ref().map(|c| c.ordering).unwrap_or_default();
    let seed = args.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
    let runs = args.runs.or(cfg.as_ref().map(|c| c.runs)).unwrap_or(1);
    let samples = match args.setting {
        // the informative setting is deterministic, so one sample suffices
        SettingOpt::Informative => 1,
        _ => args.samples.or(cfg.as_ref().map(|c| c.samples)).unwrap_or(5),
    };

    let mut rows = Vec::new();
    for dir in &args.data {
        let ds = load_dataset(dir, args.knn)?;
        let graph_data = Arc::new(ds.graph);
        let truth = Arc::new(ds.truth);
        let point = |noise_p: Option<f64>, flatten: bool| GridPoint {
            param: noise_p,
            instance: InstanceSpec::Real {
                graph: Arc::clone(&graph_data),
                truth: Arc::clone(&truth),
                noise_p,
                flatten,
            },
        };
        let points = match args.setting {
            SettingOpt::Informative => vec![point(None, false)],
            SettingOpt::PlusNoise => args.noise_p.iter().map(|&p| point(Some(p), false)).collect(),
            SettingOpt::FlattenPlusNoise => {
                args.noise_p.iter().map(|&p| point(Some(p), true)).collect()
            }
        };
        let grid = TaskGrid {
            dataset: ds.name,
            points,
            methods: methods.clone(),
            ordering,
            samples,
            runs,
            seed,
            timings: args.timings,
        };
        let out = harness::execute(
            &grid,
            resolve_jobs(args.jobs, cfg.as_ref().and_then(|c| c.jobs)),
        )?;
        rows.extend(out.rows);
    }

    let means = harness::mean_rows(&rows);
    let best = harness::best_rows(&means);
    let ratios = harness::ratio_rows(&best)?;
    rows.extend(means);
    rows.extend(best);
    rows.extend(ratios);
    let cfg_out = cfg.and_then(|c| c.output);
    emit(&rows, &args.output, &cfg_out)
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<()> {
    let pred = graph::load_partition(&args.pred)?;
    let truth = graph::load_partition(&args.truth)?;
    let acc = metrics::accuracy(&pred, &truth)?;
    let nmi = if args.arithmetic {
        metrics::nmi_with(&pred, &truth, metrics::NmiNormalization::Arithmetic)?
    } else {
        metrics::nmi(&pred, &truth)?
    };
    println!("accuracy {}", fmt_num(acc));
    println!("nmi {}", fmt_num(nmi));
    Ok(())
}

pub fn dispatch(command: &crate::cli::Command) -> Result<()> {
    use crate::cli::Command;
    match command {
        Command::Run(a) => cmd_run(a),
        Command::BenchSbm(a) => cmd_bench_sbm(a),
        Command::BenchLfr(a) => cmd_bench_lfr(a),
        Command::GammaSweep(a) => cmd_gamma_sweep(a),
        Command::Real(a) => cmd_real(a),
        Command::Metrics(a) => cmd_metrics(a),
    }
}
