//! Benchmark protocol: grid sweeps over (n, ε, μ, seed), strict
//! competitive ratios against the exact offline optimum, per-cell
//! statistics, analytic bound curves, and phase timings.
//!
//! Everything except wall-clock timings is a pure function of the grid
//! and the instance source contents: instances and perturbation seeds are
//! derived from the base seed with a stable mix, trials execute in any
//! order (serially or on a worker pool) and merge by grid coordinate.
//! Timing maps are the one intentionally volatile field and are excluded
//! from every determinism and correctness contract.

use crate::error::{Error, Result};
use crate::instance::{generate_uniform, parse_orlib, CostMatrix, InstanceMeta, Weight};
use crate::matching::solve_exact;
use crate::online::{
    replay_guard, ArrivalSequence, Algorithm, FollowPrediction, Greedy, Permutation,
};
use crate::prediction::{make_advice, PerturbationSpec};
use crate::rng::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

/// Seed-derivation tags; part of the reproducibility contract.
const TAG_INSTANCE: u64 = 1;
const TAG_TRIAL: u64 = 2;

/// Where sweep instances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InstanceSource {
    /// One `generate_uniform(n, lo, hi, seed)` matrix per grid size.
    Synthetic { lo: Weight, hi: Weight },
    /// OR-Library files; each file contributes its own size.
    Files { paths: Vec<PathBuf> },
}

/// The sweep configuration. Defaults mirror the benchmark grid:
/// sizes 100…800, ε ∈ {0, 0.1, …, 0.5}, μ ∈ {0.1, 0.3, 0.5}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub sizes: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub mus: Vec<f64>,
    /// Seeds per (n, ε, μ) cell.
    pub trials: usize,
    pub base_seed: u64,
    pub source: InstanceSource,
    pub algorithms: Vec<Algorithm>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            sizes: vec![100, 200, 300, 400, 500, 600, 700, 800],
            epsilons: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            mus: vec![0.1, 0.3, 0.5],
            trials: 30,
            base_seed: 1,
            source: InstanceSource::Synthetic { lo: 1, hi: 100 },
            algorithms: Algorithm::ALL.to_vec(),
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.epsilons.is_empty() || self.mus.is_empty() {
            return Err(Error::InvalidArgument(
                "sizes, epsilons and mus must be non-empty".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one algorithm must be selected".into(),
            ));
        }
        if self.sizes.iter().any(|&n| n == 0) {
            return Err(Error::InvalidArgument("sizes must be positive".into()));
        }
        for &e in &self.epsilons {
            PerturbationSpec::new(e, 0.0, 0)?;
        }
        for &m in &self.mus {
            PerturbationSpec::new(0.0, m, 0)?;
        }
        if let InstanceSource::Synthetic { lo, hi } = self.source {
            if lo > hi || lo < 0 {
                return Err(Error::InvalidArgument(format!(
                    "bad synthetic range [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// Perturbation seed for one trial, stable across platforms.
    pub fn trial_seed(&self, n: usize, epsilon: f64, mu: f64, trial: usize) -> u64 {
        derive_seed(&[
            self.base_seed,
            TAG_TRIAL,
            n as u64,
            epsilon.to_bits(),
            mu.to_bits(),
            trial as u64,
        ])
    }

    /// Seed of the synthetic instance for size `n`.
    pub fn instance_seed(&self, n: usize) -> u64 {
        derive_seed(&[self.base_seed, TAG_INSTANCE, n as u64])
    }

    /// Materialize the per-size instances, recording provenance and build
    /// time. One instance per size, reused across every (ε, μ, trial).
    pub fn resolve_instances(&self) -> Result<Vec<ResolvedInstance>> {
        match &self.source {
            InstanceSource::Synthetic { lo, hi } => self
                .sizes
                .iter()
                .map(|&n| {
                    let seed = self.instance_seed(n);
                    let start = Instant::now();
                    let matrix = generate_uniform(n, *lo, *hi, seed)?;
                    Ok(ResolvedInstance {
                        matrix,
                        meta: InstanceMeta::Synthetic {
                            label: format!("uniform-{n}x{n}-[{lo},{hi}]"),
                            seed,
                        },
                        build_seconds: start.elapsed().as_secs_f64(),
                    })
                })
                .collect(),
            InstanceSource::Files { paths } => paths
                .iter()
                .map(|path| {
                    let start = Instant::now();
                    let text = std::fs::read_to_string(path)?;
                    let matrix = parse_orlib(&text)?;
                    Ok(ResolvedInstance {
                        matrix,
                        meta: InstanceMeta::OrlibFile {
                            label: path.display().to_string(),
                        },
                        build_seconds: start.elapsed().as_secs_f64(),
                    })
                })
                .collect(),
        }
    }
}

/// A sweep instance with its provenance.
#[derive(Debug, Clone)]
pub struct ResolvedInstance {
    pub matrix: CostMatrix,
    pub meta: InstanceMeta,
    pub build_seconds: f64,
}

/// Timing phase names used in [`TrialRecord::timings`].
pub mod phase {
    pub const INSTANCE: &str = "instance";
    pub const ADVICE: &str = "advice";
    pub const OPT_SOLVE: &str = "opt-solve";
    pub const PREDICTION_SOLVE: &str = "prediction-solve";

    pub fn online(algorithm: crate::online::Algorithm) -> String {
        format!("online-{algorithm}")
    }
}

/// One (instance, ε, μ, seed) execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub seed: u64,
    pub opt_cost: Weight,
    pub alg_costs: BTreeMap<Algorithm, Weight>,
    /// Strict per-trial ratio alg_cost / opt_cost (no additive slack).
    pub ratios: BTreeMap<Algorithm, f64>,
    /// Total advice error E = round(ε·n²)·δ.
    pub total_error: Weight,
    /// Wall-clock seconds per phase; excluded from determinism contracts.
    pub timings: BTreeMap<String, f64>,
}

/// Run every requested algorithm on one perturbed trial.
///
/// `instance_seconds` is the (shared) cost of building the instance and
/// is stamped into the timing map so the per-phase profile is complete.
pub fn run_trial(
    instance: &CostMatrix,
    spec: PerturbationSpec,
    algorithms: &[Algorithm],
    instance_seconds: f64,
) -> Result<TrialRecord> {
    let n = instance.n();
    let mut timings = BTreeMap::new();
    timings.insert(phase::INSTANCE.to_string(), instance_seconds);

    let start = Instant::now();
    let advice = make_advice(instance, spec)?;
    timings.insert(phase::ADVICE.to_string(), start.elapsed().as_secs_f64());

    let start = Instant::now();
    let opt = solve_exact(instance);
    timings.insert(phase::OPT_SOLVE.to_string(), start.elapsed().as_secs_f64());
    if opt.total_cost == 0 {
        return Err(Error::DegenerateOptimum);
    }

    let seq = ArrivalSequence::natural(instance);
    let mut alg_costs = BTreeMap::new();
    let mut ratios = BTreeMap::new();
    for &algorithm in algorithms {
        let run = match algorithm {
            Algorithm::FollowPrediction => {
                let start = Instant::now();
                let mut strategy = FollowPrediction::new(&advice, n)?;
                timings.insert(
                    phase::PREDICTION_SOLVE.to_string(),
                    start.elapsed().as_secs_f64(),
                );
                let start = Instant::now();
                let run = replay_guard(&seq, &mut strategy)?;
                timings.insert(phase::online(algorithm), start.elapsed().as_secs_f64());
                run
            }
            Algorithm::Greedy => {
                let start = Instant::now();
                let run = replay_guard(&seq, &mut Greedy::new(n))?;
                timings.insert(phase::online(algorithm), start.elapsed().as_secs_f64());
                run
            }
            Algorithm::Permutation => {
                let start = Instant::now();
                let run = replay_guard(&seq, &mut Permutation::new(n))?;
                timings.insert(phase::online(algorithm), start.elapsed().as_secs_f64());
                run
            }
        };
        alg_costs.insert(algorithm, run.total_cost);
        ratios.insert(algorithm, run.total_cost as f64 / opt.total_cost as f64);
    }

    Ok(TrialRecord {
        n,
        epsilon: spec.epsilon,
        mu: spec.mu,
        seed: spec.seed,
        opt_cost: opt.total_cost,
        alg_costs,
        ratios,
        total_error: advice.total_error,
        timings,
    })
}

/// Ratio statistics of one algorithm inside one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation (n−1); 0 for a single trial.
    pub std: f64,
}

/// Aggregated view of one (n, ε, μ) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub trials: usize,
    pub stats: BTreeMap<Algorithm, RatioStats>,
}

impl CellSummary {
    fn from_records(n: usize, epsilon: f64, mu: f64, records: &[&TrialRecord]) -> Self {
        let mut stats = BTreeMap::new();
        if let Some(first) = records.first() {
            for &algorithm in first.ratios.keys() {
                let ratios: Vec<f64> = records
                    .iter()
                    .filter_map(|r| r.ratios.get(&algorithm).copied())
                    .collect();
                let k = ratios.len() as f64;
                let mean = ratios.iter().sum::<f64>() / k;
                let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let std = if ratios.len() > 1 {
                    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
                        / (k - 1.0);
                    var.sqrt()
                } else {
                    0.0
                };
                stats.insert(algorithm, RatioStats { mean, min, max, std });
            }
        }
        Self {
            n,
            epsilon,
            mu,
            trials: records.len(),
            stats,
        }
    }
}

/// A trial that errored; sweeps record these instead of aborting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub n: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub seed: u64,
    pub message: String,
}

/// All trials plus per-cell summaries of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub instances: Vec<InstanceMeta>,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<CellSummary>,
    pub failures: Vec<TrialFailure>,
}

impl SweepResult {
    /// True when not a single trial succeeded.
    pub fn all_failed(&self) -> bool {
        self.records.is_empty()
    }
}

/// Execute the whole grid. Trials are independent and run on the current
/// rayon pool; results merge in grid order, so parallel and serial
/// execution agree on everything except wall-clock timings.
pub fn run_sweep(grid: &SweepGrid) -> Result<SweepResult> {
    grid.validate()?;
    let instances = grid.resolve_instances()?;

    struct Cell {
        instance_idx: usize,
        epsilon: f64,
        mu: f64,
        trial: usize,
    }
    let mut tasks = Vec::new();
    for (instance_idx, _) in instances.iter().enumerate() {
        for &epsilon in &grid.epsilons {
            for &mu in &grid.mus {
                for trial in 0..grid.trials {
                    tasks.push(Cell {
                        instance_idx,
                        epsilon,
                        mu,
                        trial,
                    });
                }
            }
        }
    }

    let outcomes: Vec<std::result::Result<TrialRecord, TrialFailure>> = tasks
        .par_iter()
        .map(|cell| {
            let instance = &instances[cell.instance_idx];
            let n = instance.matrix.n();
            let seed = grid.trial_seed(n, cell.epsilon, cell.mu, cell.trial);
            let spec = PerturbationSpec::new(cell.epsilon, cell.mu, seed).map_err(|e| {
                TrialFailure {
                    n,
                    epsilon: cell.epsilon,
                    mu: cell.mu,
                    seed,
                    message: e.to_string(),
                }
            })?;
            run_trial(
                &instance.matrix,
                spec,
                &grid.algorithms,
                instance.build_seconds,
            )
            .map_err(|e| TrialFailure {
                n,
                epsilon: cell.epsilon,
                mu: cell.mu,
                seed,
                message: e.to_string(),
            })
        })
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(record) => records.push(record),
            Err(failure) => failures.push(failure),
        }
    }

    let mut summaries = Vec::new();
    for instance in &instances {
        let n = instance.matrix.n();
        for &epsilon in &grid.epsilons {
            for &mu in &grid.mus {
                let cell: Vec<&TrialRecord> = records
                    .iter()
                    .filter(|r| r.n == n && r.epsilon == epsilon && r.mu == mu)
                    .collect();
                if !cell.is_empty() {
                    summaries.push(CellSummary::from_records(n, epsilon, mu, &cell));
                }
            }
        }
    }

    Ok(SweepResult {
        grid: grid.clone(),
        instances: instances.into_iter().map(|i| i.meta).collect(),
        records,
        summaries,
        failures,
    })
}

/// Analytic comparison curves at size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCurves {
    /// Deterministic lower bound 2n−1.
    pub deterministic: f64,
    /// Randomized (ln n)² curve.
    pub randomized_log_sq: f64,
    /// Randomized ln n curve (k identified with n).
    pub randomized_ln: f64,
}

pub fn bound_curves(n: usize) -> BoundCurves {
    let ln = (n as f64).ln();
    BoundCurves {
        deterministic: (2 * n - 1) as f64,
        randomized_log_sq: ln * ln,
        randomized_ln: ln,
    }
}

/// Whether a cell's mean follow-prediction ratio beats each curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundVerdicts {
    pub below_deterministic: bool,
    pub below_log_squared: bool,
    pub below_ln: bool,
}

/// None when the cell has no follow-prediction data.
pub fn compare_vs_bounds(summary: &CellSummary) -> Option<BoundVerdicts> {
    let mean = summary.stats.get(&Algorithm::FollowPrediction)?.mean;
    let bounds = bound_curves(summary.n);
    Some(BoundVerdicts {
        below_deterministic: mean < bounds.deterministic,
        below_log_squared: mean < bounds.randomized_log_sq,
        below_ln: mean < bounds.randomized_ln,
    })
}

/// Mean seconds of one phase at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTiming {
    pub n: usize,
    pub phase: String,
    pub mean_seconds: f64,
    pub samples: usize,
}

/// Per-n mean duration of every phase, plot-ready.
pub fn timing_profile(records: &[TrialRecord]) -> Vec<PhaseTiming> {
    let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
    for record in records {
        for (phase, &seconds) in &record.timings {
            groups
                .entry((record.n, phase.clone()))
                .or_default()
                .push(seconds);
        }
    }
    groups
        .into_iter()
        .map(|((n, phase), seconds)| PhaseTiming {
            n,
            phase,
            mean_seconds: seconds.iter().sum::<f64>() / seconds.len() as f64,
            samples: seconds.len(),
        })
        .collect()
}
