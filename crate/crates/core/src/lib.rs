//! Community detection on multiplex networks (several weighted layers over one
//! shared node set) with variance-aware multiobjective Louvain.
//!
//! The solver keeps a bounded list of mutually non-dominated partitions, scored
//! by a scalarization of the per-layer modularity vector: plain mean (`MA`/`GL`),
//! mean minus weighted variance (`MVM`/`EVM`) or mean plus weighted variance
//! (`MVP`/`EVP`). Generators for planted-partition benchmarks and the usual
//! recovery metrics live here too, so the whole evaluation pipeline is
//! reproducible from a seed.

mod error;

pub mod generators;
pub mod graph;
pub mod metrics;
pub mod pareto;
pub mod quality;
pub mod solver;

mod assignment;

pub use error::{Error, Result};
pub use graph::{FeatureMatrix, Layer, MultiplexGraph, Partition};
pub use pareto::{dominates, InsertOutcome, ListEntry, ParetoList};
pub use quality::{LouvainState, ModularityVector, MoveGain, QualityConfig, QualityVariant};
pub use solver::{NodeOrdering, Preset, SolverConfig, SolverResult};
