//! Online assignment with untrusted advice: a benchmark toolkit.
//!
//! The pipeline in one breath: build or parse a cost matrix
//! ([`instance`]), simulate a predicted version of it under a seeded
//! two-parameter error model ([`prediction`]), solve the prediction
//! offline ([`matching`]) and replay it against the true matrix under the
//! online protocol next to greedy and permutation baselines ([`online`]),
//! then sweep the parameter grid and compare strict competitive ratios
//! with the classical analytic curves ([`experiment`], [`report`]).
//!
//! Every random choice derives from explicit 64-bit seeds through one
//! fixed generator ([`rng`]), so trials, sweeps and emitted artifacts are
//! exactly reproducible.

pub mod error;
pub mod experiment;
pub mod instance;
pub mod matching;
pub mod online;
pub mod prediction;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
pub use experiment::{
    bound_curves, compare_vs_bounds, run_sweep, run_trial, timing_profile, BoundCurves,
    BoundVerdicts, CellSummary, InstanceSource, SweepGrid, SweepResult, TrialRecord,
};
pub use instance::{
    generate_line_metric, generate_uniform, parse_orlib, CostMatrix, InstanceMeta, MatrixStats,
    Weight,
};
pub use matching::{evaluate, solve_bruteforce, solve_exact, Assignment};
pub use online::{
    replay_guard, run_follow_prediction, run_greedy, run_permutation, Algorithm,
    ArrivalSequence, OnlineRun, OnlineStrategy, RevealedView,
};
pub use prediction::{make_advice, replay_advice, AdviceDocument, AdviceRecord, PerturbationSpec};
