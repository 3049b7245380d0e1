//! Replicated experiment execution, parameter sweeps and strategy
//! comparisons.
//!
//! Replica `r` always runs on RNG stream `r` of the master seed, so results
//! are independent of execution order and of how many worker threads are
//! used.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use criga_core::control::{run_ga, ControlStrategy, ControllerKind, RunConfig, Termination};
use criga_core::ga::{replica_rng, GenerationRecord};
use criga_core::landscape::FitnessLandscape;

use crate::config::{ExperimentConfig, LandscapeKindName, StrategyName};
use crate::error::{HarnessError, Result};

/// Per-replica outcome summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub replica: usize,
    /// Whether the master genotype ever became the recorded best.
    pub hit: bool,
    /// First generation with the master as recorded best (0 = initial
    /// population); equals the budget when it never happened.
    pub first_hit_generation: usize,
    pub final_best_fitness: f64,
    /// Σ population size over executed generations: one fitness evaluation
    /// per individual per generation.
    pub total_evaluations: u64,
    pub final_mutation_prob: f64,
    pub final_population_size: usize,
    pub terminated: Termination,
}

/// Everything one replica produced.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicaOutput {
    pub summary: RunSummary,
    pub records: Vec<GenerationRecord>,
}

fn run_one_replica(
    run_config: &RunConfig,
    landscape: &FitnessLandscape,
    master_seed: u64,
    replica: usize,
) -> Result<ReplicaOutput> {
    let mut rng = replica_rng(master_seed, replica as u64);
    let result = run_ga(run_config, landscape, &mut rng)?;
    let summary = RunSummary {
        replica,
        hit: result.first_hit.is_some(),
        first_hit_generation: result.first_hit.unwrap_or(run_config.budget),
        final_best_fitness: result.final_best.fitness,
        total_evaluations: result.total_evaluations(),
        final_mutation_prob: result.final_mutation_prob,
        final_population_size: result.final_population_size,
        terminated: result.termination,
    };
    Ok(ReplicaOutput {
        summary,
        records: result.records,
    })
}

/// Runs every replica of an experiment on `threads` worker threads.
///
/// Output is byte-identical for any thread count: replicas own disjoint RNG
/// streams and are collected in index order.
pub fn run_experiment(
    config: &ExperimentConfig,
    base_dir: Option<&Path>,
    threads: usize,
) -> Result<Vec<ReplicaOutput>> {
    let landscape = config.landscape(base_dir)?;
    let run_config = config.run_config()?;
    let seed = config.run.seed;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| {
        (0..config.run.replicas)
            .into_par_iter()
            .map(|replica| run_one_replica(&run_config, &landscape, seed, replica))
            .collect()
    })
}

/// Aggregate over the replicas of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub replicas: usize,
    /// Fraction of replicas that found the master genotype.
    pub hit_rate: f64,
    /// Median of `first_hit_generation` (budget counted for misses).
    pub median_first_hit_generation: f64,
    pub mean_evaluations: f64,
}

pub fn aggregate(outputs: &[ReplicaOutput]) -> Aggregate {
    let replicas = outputs.len();
    let hits = outputs.iter().filter(|o| o.summary.hit).count();
    let mut first_hits: Vec<usize> = outputs
        .iter()
        .map(|o| o.summary.first_hit_generation)
        .collect();
    first_hits.sort_unstable();
    let median = if replicas % 2 == 1 {
        first_hits[replicas / 2] as f64
    } else {
        (first_hits[replicas / 2 - 1] + first_hits[replicas / 2]) as f64 / 2.0
    };
    let mean_evaluations = outputs
        .iter()
        .map(|o| o.summary.total_evaluations as f64)
        .sum::<f64>()
        / replicas as f64;
    Aggregate {
        replicas,
        hit_rate: hits as f64 / replicas as f64,
        median_first_hit_generation: median,
        mean_evaluations,
    }
}

/// Sweepable parameter axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Fixed mutation probability (fixed strategy only).
    PM,
    /// Initial population size.
    M,
    /// Sharp-peak height (sharp_peak landscapes only).
    Sigma,
    /// Genotype length (analytic landscape kinds only).
    N,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::PM => "p_m",
            SweepAxis::M => "m",
            SweepAxis::Sigma => "sigma",
            SweepAxis::N => "n",
        }
    }
}

/// One aggregated row of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    #[serde(flatten)]
    pub aggregate: Aggregate,
}

fn integer_value(axis: SweepAxis, value: f64) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
        return Err(HarnessError::Config(format!(
            "axis {} requires a positive integer value, got {value}",
            axis.label()
        )));
    }
    Ok(value as usize)
}

/// Applies one axis value to a copy of the configuration.
fn apply_axis(config: &ExperimentConfig, axis: SweepAxis, value: f64) -> Result<ExperimentConfig> {
    let mut modified = config.clone();
    match axis {
        SweepAxis::PM => {
            if config.control.strategy != StrategyName::Fixed {
                return Err(HarnessError::Config(
                    "axis p_m requires control.strategy = \"fixed\"".into(),
                ));
            }
            modified.control.mutation_prob = Some(value);
        }
        SweepAxis::M => {
            if config.control.strategy == StrategyName::ElitistSize {
                return Err(HarnessError::Config(
                    "axis m has no effect under elitist_size (runs start at population two)"
                        .into(),
                ));
            }
            modified.run.population = integer_value(axis, value)?;
        }
        SweepAxis::Sigma => {
            if config.landscape.kind != LandscapeKindName::SharpPeak {
                return Err(HarnessError::Config(
                    "axis sigma requires landscape.kind = \"sharp_peak\"".into(),
                ));
            }
            modified.landscape.sigma = Some(value);
        }
        SweepAxis::N => {
            if config.landscape.kind == LandscapeKindName::Custom {
                return Err(HarnessError::Config(
                    "axis n cannot be swept for custom landscape tables".into(),
                ));
            }
            modified.landscape.n = Some(integer_value(axis, value)?);
        }
    }
    Ok(modified)
}

/// Runs the experiment once per axis value and aggregates each one.
pub fn sweep(
    config: &ExperimentConfig,
    base_dir: Option<&Path>,
    axis: SweepAxis,
    values: &[f64],
    threads: usize,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(HarnessError::Config("sweep needs at least one value".into()));
    }
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let modified = apply_axis(config, axis, value)?;
        let outputs = run_experiment(&modified, base_dir, threads)?;
        rows.push(SweepRow {
            axis: axis.label().to_string(),
            value,
            aggregate: aggregate(&outputs),
        });
    }
    Ok(rows)
}

/// One aggregated row of a strategy comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub label: String,
    #[serde(flatten)]
    pub aggregate: Aggregate,
}

/// Runs several configurations over the same landscape and budget and
/// aggregates each one.
pub fn compare(
    configs: &[(String, ExperimentConfig, Option<std::path::PathBuf>)],
    threads: usize,
) -> Result<Vec<CompareRow>> {
    let Some((_, first, _)) = configs.first() else {
        return Err(HarnessError::Config("compare needs at least one config".into()));
    };
    for (label, config, _) in configs {
        if config.landscape != first.landscape {
            return Err(HarnessError::Config(format!(
                "compare requires a shared landscape section; {label} differs"
            )));
        }
        if config.run.budget != first.run.budget {
            return Err(HarnessError::Config(format!(
                "compare requires a shared run.budget; {label} differs"
            )));
        }
        if config.run.replicas != first.run.replicas {
            return Err(HarnessError::Config(format!(
                "compare requires a shared run.replicas; {label} differs"
            )));
        }
    }
    let mut rows = Vec::with_capacity(configs.len());
    for (label, config, base_dir) in configs {
        let outputs = run_experiment(config, base_dir.as_deref(), threads)?;
        rows.push(CompareRow {
            label: label.clone(),
            aggregate: aggregate(&outputs),
        });
    }
    Ok(rows)
}

/// Convenience used by tests: the strategy of a parsed config.
pub fn strategy_of(config: &ExperimentConfig) -> Result<ControlStrategy> {
    config.control.strategy()
}

/// True when the strategy starts from a two-member population.
pub fn starts_at_two(strategy: ControlStrategy) -> bool {
    matches!(
        strategy,
        ControlStrategy::Adaptive(ControllerKind::ElitistWithSize)
    )
}
