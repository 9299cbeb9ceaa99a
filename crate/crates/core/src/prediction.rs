//! Simulated prediction of the cost matrix via seeded perturbation.
//!
//! The "model" behind the advice is a two-parameter error process on the
//! true matrix `A`:
//!
//! * `epsilon` picks how many cells change: exactly `round(ε·n²)` distinct
//!   cells, sampled uniformly without replacement. Sampling a fixed count
//!   rather than flipping a per-cell coin makes the total error an exact
//!   identity instead of an expectation.
//! * `mu` picks how much each chosen cell moves: a single magnitude
//!   `δ = round(μ·max(A))` shared by every perturbed cell.
//!
//! Each perturbed cell moves by exactly ±δ under a clamp rule that keeps
//! the value inside `[min(A), max(A)]`: if adding δ would overshoot the
//! maximum the sign is forced negative; else if subtracting would
//! undershoot the minimum it is forced positive; otherwise a fair coin
//! (uniform draw tested against 0.5) decides. Checks happen in that
//! order.
//!
//! The total error is therefore exactly `round(ε·n²) · δ`, and the
//! predicted matrix never leaves the value bounds of the original.
//!
//! Stream discipline: one seeded generator per advice record, consumed in
//! a fixed order — first the mask draws (one per selected cell), then one
//! coin per unforced perturbed cell in row-major order. This makes every
//! record reproducible from `(A, spec)` alone.

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, Weight};
use crate::rng::StableRng;
use serde::{Deserialize, Serialize};

/// Parameters of the simulated prediction error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    /// Fraction of cells perturbed, in `[0, 1]`.
    pub epsilon: f64,
    /// Per-cell magnitude as a fraction of `max(A)`, in `[0, 1]`.
    pub mu: f64,
    /// Seed of the record's private generator.
    pub seed: u64,
}

impl PerturbationSpec {
    pub fn new(epsilon: f64, mu: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || !epsilon.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "epsilon {epsilon} outside [0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&mu) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!("mu {mu} outside [0, 1]")));
        }
        Ok(Self { epsilon, mu, seed })
    }

    /// Per-cell magnitude for a matrix with the given maximum:
    /// `round(μ·max)`, rounded half away from zero.
    pub fn delta_for(&self, max: Weight) -> Weight {
        (self.mu * max as f64).round() as Weight
    }
}

/// A predicted matrix with its perturbation fully accounted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdviceRecord {
    /// The predicted matrix A′.
    pub predicted: CostMatrix,
    /// Row-major flags, true where a cell was perturbed.
    pub mask: Vec<bool>,
    /// Magnitude applied at every masked cell.
    pub per_cell_delta: Weight,
    /// Σ|A′ − A| = popcount(mask) · δ.
    pub total_error: Weight,
    pub spec: PerturbationSpec,
    /// Set when `mu > 0` rounded down to δ = 0, making the perturbation a
    /// no-op.
    pub degenerate_magnitude: bool,
}

impl AdviceRecord {
    pub fn perturbed_cells(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Compact audit form: the mask as runs over the row-major flat index.
    pub fn to_document(&self) -> AdviceDocument {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.mask.len() {
            if self.mask[i] {
                let start = i;
                while i < self.mask.len() && self.mask[i] {
                    i += 1;
                }
                runs.push(MaskRun {
                    start: start as u64,
                    len: (i - start) as u64,
                });
            } else {
                i += 1;
            }
        }
        AdviceDocument {
            spec: self.spec,
            delta: self.per_cell_delta,
            total_error: self.total_error,
            mask_runs: runs,
        }
    }
}

/// Run of consecutive perturbed cells in row-major order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskRun {
    pub start: u64,
    pub len: u64,
}

/// JSON-serializable audit/replay document for an [`AdviceRecord`].
///
/// The predicted matrix itself is omitted: it is a pure function of the
/// original matrix and `spec`, so [`make_advice`] reconstructs it exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdviceDocument {
    pub spec: PerturbationSpec,
    pub delta: Weight,
    pub total_error: Weight,
    pub mask_runs: Vec<MaskRun>,
}

/// Choose exactly `round(ε·n²)` distinct cells uniformly at random.
/// Returns row-major flags. Partial Fisher–Yates over the flat indices,
/// one draw per selected cell.
pub fn select_cells(n: usize, epsilon: f64, rng: &mut StableRng) -> Vec<bool> {
    let cells = n * n;
    let k = (epsilon * cells as f64).round() as usize;
    let k = k.min(cells);
    let mut indices: Vec<u32> = (0..cells as u32).collect();
    for i in 0..k {
        let j = i + rng.below((cells - i) as u64) as usize;
        indices.swap(i, j);
    }
    let mut mask = vec![false; cells];
    for &idx in &indices[..k] {
        mask[idx as usize] = true;
    }
    mask
}

/// Signed magnitude for one cell under the in-bounds clamp rule.
///
/// Order of checks: upper clamp (`a + δ > hi` forces −δ), then lower clamp
/// (`a − δ < lo` forces +δ), then a fair coin. The result always keeps
/// `a + result` inside `[lo, hi]`; a cell where neither sign stays in
/// bounds (possible only when δ > (hi−lo)/2) is an infeasibility error.
pub fn incr_sign(
    a: Weight,
    delta: Weight,
    lo: Weight,
    hi: Weight,
    rng: &mut StableRng,
) -> Result<Weight> {
    debug_assert!(lo <= a && a <= hi);
    if delta <= 0 || delta > hi - lo {
        return Err(Error::InfeasibleMagnitude(format!(
            "delta {delta} outside (0, {}]",
            hi - lo
        )));
    }
    if a + delta > hi {
        if a - delta < lo {
            return Err(Error::InfeasibleMagnitude(format!(
                "value {a} admits neither +{delta} nor -{delta} within [{lo}, {hi}]"
            )));
        }
        Ok(-delta)
    } else if a - delta < lo {
        Ok(delta)
    } else if rng.coin() {
        Ok(delta)
    } else {
        Ok(-delta)
    }
}

/// Build the predicted matrix A′ = A + mask ⊙ (signed δ) and account the
/// error exactly. Deterministic in `(a, spec)`.
pub fn make_advice(a: &CostMatrix, spec: PerturbationSpec) -> Result<AdviceRecord> {
    let n = a.n();
    let lo = a.min();
    let hi = a.max();
    let delta = spec.delta_for(hi);
    if delta > hi - lo {
        return Err(Error::InfeasibleMagnitude(format!(
            "delta {delta} exceeds max - min = {}",
            hi - lo
        )));
    }

    let mut rng = StableRng::from_seed(spec.seed);
    let mask = select_cells(n, spec.epsilon, &mut rng);
    let degenerate_magnitude = spec.mu > 0.0 && delta == 0;

    let mut predicted = a.entries().to_vec();
    if delta > 0 {
        for (flat, flag) in mask.iter().enumerate() {
            if !flag {
                continue;
            }
            let value = predicted[flat];
            predicted[flat] = value + incr_sign(value, delta, lo, hi, &mut rng)?;
        }
    }

    let perturbed = mask.iter().filter(|&&m| m).count() as Weight;
    Ok(AdviceRecord {
        predicted: CostMatrix::new(n, predicted)?,
        mask,
        per_cell_delta: delta,
        total_error: perturbed * delta,
        spec,
        degenerate_magnitude,
    })
}

/// Rebuild the full record from an audit document and the original
/// matrix, verifying that the document matches what `(a, spec)` produce.
pub fn replay_advice(a: &CostMatrix, doc: &AdviceDocument) -> Result<AdviceRecord> {
    let record = make_advice(a, doc.spec)?;
    let rebuilt = record.to_document();
    if rebuilt != *doc {
        return Err(Error::InvalidArgument(
            "advice document does not match its spec replay".into(),
        ));
    }
    Ok(record)
}
