//! Online protocol engine and the three online algorithms.
//!
//! Requests (columns) arrive one at a time; each must be assigned an
//! unused server (row) immediately and irrevocably. Algorithms see the
//! matrix only through a [`RevealedView`], which refuses any weight of a
//! column that has not arrived yet — the real-time constraint is enforced
//! by construction, not by convention, and every matrix read is counted.

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, Weight};
use crate::matching::{solve_exact, Assignment};
use crate::prediction::AdviceRecord;
use crate::rng::StableRng;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::fmt;

const INF: Weight = Weight::MAX / 4;

/// The shipped online algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Solve the predicted matrix offline, replay that matching verbatim.
    FollowPrediction,
    /// Cheapest free server for each arrival.
    Greedy,
    /// Track optimal prefix matchings; serve each arrival with the newly
    /// activated server.
    Permutation,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::FollowPrediction,
        Algorithm::Greedy,
        Algorithm::Permutation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::FollowPrediction => "follow-prediction",
            Algorithm::Greedy => "greedy",
            Algorithm::Permutation => "permutation",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "follow-prediction" => Ok(Algorithm::FollowPrediction),
            "greedy" => Ok(Algorithm::Greedy),
            "permutation" => Ok(Algorithm::Permutation),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm {other:?} (expected follow-prediction, greedy or permutation)"
            ))),
        }
    }
}

/// An instance together with the order in which its columns arrive.
#[derive(Debug, Clone)]
pub struct ArrivalSequence<'a> {
    base: &'a CostMatrix,
    order: Vec<usize>,
}

impl<'a> ArrivalSequence<'a> {
    /// Columns arrive in natural order 0, …, n−1.
    pub fn natural(base: &'a CostMatrix) -> Self {
        Self {
            base,
            order: (0..base.n()).collect(),
        }
    }

    /// Columns arrive in the given order, which must be a permutation.
    pub fn with_order(base: &'a CostMatrix, order: Vec<usize>) -> Result<Self> {
        let n = base.n();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidArgument(format!(
                "arrival order length {} != n = {n}",
                order.len()
            )));
        }
        for &v in &order {
            if v >= n || seen[v] {
                return Err(Error::InvalidArgument(
                    "arrival order is not a permutation".into(),
                ));
            }
            seen[v] = true;
        }
        Ok(Self { base, order })
    }

    /// Seeded random arrival order.
    pub fn shuffled(base: &'a CostMatrix, seed: u64) -> Self {
        let mut order: Vec<usize> = (0..base.n()).collect();
        StableRng::from_seed(seed).shuffle(&mut order);
        Self { base, order }
    }

    pub fn base(&self) -> &CostMatrix {
        self.base
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// What an algorithm is allowed to see at one step: the columns that have
/// arrived so far, and nothing else.
pub struct RevealedView<'a> {
    base: &'a CostMatrix,
    revealed: &'a [bool],
    arrived: &'a [usize],
    step: usize,
    label: &'a str,
    reads: &'a Cell<u64>,
}

impl RevealedView<'_> {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Zero-based arrival step.
    pub fn step(&self) -> usize {
        self.step
    }

    /// The column arriving now.
    pub fn current_column(&self) -> usize {
        self.arrived[self.step]
    }

    /// Columns revealed so far, in arrival order (last = current).
    pub fn arrived_columns(&self) -> &[usize] {
        self.arrived
    }

    /// Weight of (server, column). Errs if the column has not arrived.
    pub fn weight(&self, server: usize, column: usize) -> Result<Weight> {
        if column >= self.base.n() || !self.revealed[column] {
            return Err(Error::ProtocolViolation {
                algorithm: self.label.to_string(),
                step: self.step,
                column,
            });
        }
        self.reads.set(self.reads.get() + 1);
        Ok(self.base.at(server, column))
    }
}

/// A decision rule driven step by step by the engine.
pub trait OnlineStrategy {
    fn algorithm(&self) -> Algorithm;

    /// Name used in protocol-violation reports.
    fn label(&self) -> String {
        self.algorithm().as_str().to_string()
    }

    /// Pick an unused server for the current arrival.
    fn decide(&mut self, view: &RevealedView<'_>) -> Result<usize>;
}

/// One completed online execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineRun {
    pub algorithm: Algorithm,
    /// decisions[t] = server assigned to the column arriving at step t.
    pub decisions: Vec<usize>,
    pub total_cost: Weight,
    /// Advice behind a follow-prediction run; None for the others.
    pub advice: Option<AdviceRecord>,
    /// Always true for a completed run; violations abort with an error.
    pub protocol_ok: bool,
    /// Matrix reads the strategy performed through the view.
    pub matrix_reads: u64,
}

/// Execute any strategy under protocol enforcement: columns are revealed
/// one at a time, early reads fail the run, decisions must form a
/// permutation of the servers.
pub fn replay_guard(seq: &ArrivalSequence, strategy: &mut dyn OnlineStrategy) -> Result<OnlineRun> {
    let n = seq.base.n();
    let label = strategy.label();
    let mut revealed = vec![false; n];
    let mut used = vec![false; n];
    let mut decisions = Vec::with_capacity(n);
    let mut total_cost: Weight = 0;
    let reads = Cell::new(0u64);

    for step in 0..n {
        let column = seq.order[step];
        revealed[column] = true;
        let view = RevealedView {
            base: seq.base,
            revealed: &revealed,
            arrived: &seq.order[..=step],
            step,
            label: &label,
            reads: &reads,
        };
        let server = strategy.decide(&view)?;
        if server >= n {
            return Err(Error::InvalidMatching(format!(
                "{label} chose server {server} out of range at step {step}"
            )));
        }
        if used[server] {
            return Err(Error::InvalidMatching(format!(
                "{label} reused server {server} at step {step}"
            )));
        }
        used[server] = true;
        decisions.push(server);
        total_cost += seq.base.at(server, column);
    }

    Ok(OnlineRun {
        algorithm: strategy.algorithm(),
        decisions,
        total_cost,
        advice: None,
        protocol_ok: true,
        matrix_reads: reads.get(),
    })
}

/// Follow-the-prediction: the predicted matrix is solved offline once,
/// then each arrival is a constant-time lookup into that matching.
pub struct FollowPrediction {
    plan: Assignment,
}

impl FollowPrediction {
    /// Solve the advice matrix; errs on a dimension mismatch with `n`.
    pub fn new(advice: &AdviceRecord, n: usize) -> Result<Self> {
        if advice.predicted.n() != n {
            return Err(Error::InvalidArgument(format!(
                "advice is {}×{0} but instance is {n}×{n}",
                advice.predicted.n()
            )));
        }
        Ok(Self {
            plan: solve_exact(&advice.predicted),
        })
    }

    /// Use an externally supplied matching as the plan. Rejected unless it
    /// is a permutation of `{0, …, n−1}` — a conflict discovered mid-run
    /// would strand a request.
    pub fn from_plan(plan: Assignment, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        if plan.server_of.len() != n {
            return Err(Error::InvalidMatching(format!(
                "plan length {} != n = {n}",
                plan.server_of.len()
            )));
        }
        for &u in &plan.server_of {
            if u >= n || seen[u] {
                return Err(Error::InvalidMatching(
                    "supplied plan is not a permutation".into(),
                ));
            }
            seen[u] = true;
        }
        Ok(Self { plan })
    }
}

impl OnlineStrategy for FollowPrediction {
    fn algorithm(&self) -> Algorithm {
        Algorithm::FollowPrediction
    }

    fn decide(&mut self, view: &RevealedView<'_>) -> Result<usize> {
        Ok(self.plan.server_of[view.current_column()])
    }
}

/// Cheapest free server for the arriving column, lowest index on ties.
pub struct Greedy {
    used: Vec<bool>,
}

impl Greedy {
    pub fn new(n: usize) -> Self {
        Self {
            used: vec![false; n],
        }
    }
}

impl OnlineStrategy for Greedy {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Greedy
    }

    fn decide(&mut self, view: &RevealedView<'_>) -> Result<usize> {
        let column = view.current_column();
        let mut best: Option<(Weight, usize)> = None;
        for server in 0..view.n() {
            if self.used[server] {
                continue;
            }
            let w = view.weight(server, column)?;
            if best.is_none_or(|(bw, _)| w < bw) {
                best = Some((w, server));
            }
        }
        let (_, server) = best.expect("at least one free server per step");
        self.used[server] = true;
        Ok(server)
    }
}

/// Optimal matching of the revealed columns, maintained incrementally.
///
/// Each arrival runs one shortest-augmenting-path search on top of the
/// previous optimum (the same dual machinery as the offline solver), so
/// the matching after t arrivals is an exact optimum of the revealed
/// rectangular subproblem and its server set grows by exactly one server
/// per step — the property the permutation algorithm's decision rule
/// needs. A from-scratch re-solve would stay optimal but could swap two
/// servers at once, leaving no well-defined "newly activated" server.
struct PrefixMatcher {
    n: usize,
    /// slot matched to each row; index n is the virtual free row.
    slot_of_row: Vec<Option<usize>>,
    slot_pot: Vec<Weight>,
    row_pot: Vec<Weight>,
}

impl PrefixMatcher {
    fn new(n: usize) -> Self {
        Self {
            n,
            slot_of_row: vec![None; n + 1],
            slot_pot: Vec::new(),
            row_pot: vec![0; n + 1],
        }
    }

    /// Add arrival slot `t`; `weight(row, slot)` reads the matrix.
    /// Returns the newly matched row.
    fn add_slot<F>(&mut self, mut weight: F) -> Result<usize>
    where
        F: FnMut(usize, usize) -> Result<Weight>,
    {
        let n = self.n;
        let slot = self.slot_pot.len();
        self.slot_pot.push(0);
        self.slot_of_row[n] = Some(slot);

        let mut min_slack = vec![INF; n];
        let mut prev_row = vec![n; n];
        let mut committed = vec![false; n + 1];
        let mut cur_row = n;

        loop {
            committed[cur_row] = true;
            let cur_slot = self.slot_of_row[cur_row].expect("committed rows are matched");
            let mut delta = INF;
            let mut next_row = n;

            for row in 0..n {
                if committed[row] {
                    continue;
                }
                let slack =
                    weight(row, cur_slot)? - self.slot_pot[cur_slot] - self.row_pot[row];
                if slack < min_slack[row] {
                    min_slack[row] = slack;
                    prev_row[row] = cur_row;
                }
                if min_slack[row] < delta {
                    delta = min_slack[row];
                    next_row = row;
                }
            }

            for row in 0..=n {
                if committed[row] {
                    if let Some(s) = self.slot_of_row[row] {
                        self.slot_pot[s] += delta;
                    }
                    self.row_pot[row] -= delta;
                } else {
                    min_slack[row] -= delta;
                }
            }

            cur_row = next_row;
            if self.slot_of_row[cur_row].is_none() {
                break;
            }
        }

        let activated = cur_row;
        while cur_row != n {
            let back = prev_row[cur_row];
            self.slot_of_row[cur_row] = self.slot_of_row[back];
            cur_row = back;
        }
        Ok(activated)
    }

    /// (row, slot) pairs of the current prefix matching.
    #[cfg(test)]
    fn matched_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .filter_map(|row| self.slot_of_row[row].map(|s| (row, s)))
            .collect()
    }
}

/// The 2n−1-competitive deterministic baseline.
pub struct Permutation {
    matcher: PrefixMatcher,
    columns: Vec<usize>,
}

impl Permutation {
    pub fn new(n: usize) -> Self {
        Self {
            matcher: PrefixMatcher::new(n),
            columns: Vec::with_capacity(n),
        }
    }
}

impl OnlineStrategy for Permutation {
    fn algorithm(&self) -> Algorithm {
        Algorithm::Permutation
    }

    fn decide(&mut self, view: &RevealedView<'_>) -> Result<usize> {
        self.columns.push(view.current_column());
        let columns = &self.columns;
        self.matcher
            .add_slot(|row, slot| view.weight(row, columns[slot]))
    }
}

/// Run Algorithm 1's replay phase: assign each arrival the server the
/// advice-optimal matching prescribes.
pub fn run_follow_prediction(seq: &ArrivalSequence, advice: &AdviceRecord) -> Result<OnlineRun> {
    let mut strategy = FollowPrediction::new(advice, seq.base.n())?;
    let mut run = replay_guard(seq, &mut strategy)?;
    run.advice = Some(advice.clone());
    Ok(run)
}

pub fn run_greedy(seq: &ArrivalSequence) -> Result<OnlineRun> {
    replay_guard(seq, &mut Greedy::new(seq.base.n()))
}

pub fn run_permutation(seq: &ArrivalSequence) -> Result<OnlineRun> {
    replay_guard(seq, &mut Permutation::new(seq.base.n()))
}
