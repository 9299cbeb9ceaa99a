//! Plain-text artifacts of a sweep: raw trial CSV, per-cell summary CSV,
//! timing CSV, figure data series, and the bound-comparison table.
//!
//! The raw and summary CSVs contain only deterministic values and are
//! byte-identical across repeated runs of the same sweep; floating-point
//! columns use Rust's shortest round-trip formatting. Wall-clock timings
//! go to their own file so they never pollute that guarantee.

use crate::error::{Error, Result};
use crate::experiment::{
    bound_curves, compare_vs_bounds, CellSummary, RatioStats, SweepResult,
};
use crate::online::Algorithm;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const RAW_TRIALS_HEADER: &str = "n,epsilon,mu,seed,opt_cost,algorithm,alg_cost,ratio,total_error";
pub const SUMMARY_HEADER: &str =
    "n,epsilon,mu,algorithm,trials,mean_ratio,min_ratio,max_ratio,std_ratio";
pub const TIMINGS_HEADER: &str = "n,epsilon,mu,seed,phase,seconds";

/// One row per (trial, algorithm), in grid order.
pub fn raw_trials_csv(result: &SweepResult) -> String {
    let mut out = String::from(RAW_TRIALS_HEADER);
    out.push('\n');
    for r in &result.records {
        for (algorithm, cost) in &r.alg_costs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.n,
                r.epsilon,
                r.mu,
                r.seed,
                r.opt_cost,
                algorithm,
                cost,
                r.ratios[algorithm],
                r.total_error
            );
        }
    }
    out
}

/// One row per (cell, algorithm).
pub fn summary_csv(result: &SweepResult) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in &result.summaries {
        for (algorithm, stats) in &s.stats {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.n, s.epsilon, s.mu, algorithm, s.trials, stats.mean, stats.min, stats.max,
                stats.std
            );
        }
    }
    out
}

/// Wall-clock phase durations; volatile by nature.
pub fn timings_csv(result: &SweepResult) -> String {
    let mut out = String::from(TIMINGS_HEADER);
    out.push('\n');
    for r in &result.records {
        for (phase, seconds) in &r.timings {
            let _ = writeln!(out, "{},{},{},{},{},{}", r.n, r.epsilon, r.mu, r.seed, phase, seconds);
        }
    }
    out
}

fn follow_prediction_mean(summary: &CellSummary) -> Option<f64> {
    summary
        .stats
        .get(&Algorithm::FollowPrediction)
        .map(|s| s.mean)
}

/// Mean follow-prediction ratio against ε, one series per (μ, n).
pub fn error_graph_csv(result: &SweepResult) -> String {
    let mut out = String::from("mu,n,epsilon,mean_ratio\n");
    let mut rows: Vec<_> = result
        .summaries
        .iter()
        .filter_map(|s| follow_prediction_mean(s).map(|mean| (s.mu, s.n, s.epsilon, mean)))
        .collect();
    rows.sort_by(|a, b| a.partial_cmp(b).expect("grid values are finite"));
    for (mu, n, epsilon, mean) in rows {
        let _ = writeln!(out, "{mu},{n},{epsilon},{mean}");
    }
    out
}

/// Mean follow-prediction ratio against n, one series per (μ, ε).
pub fn size_graph_csv(result: &SweepResult) -> String {
    let mut out = String::from("mu,epsilon,n,mean_ratio\n");
    let mut rows: Vec<_> = result
        .summaries
        .iter()
        .filter_map(|s| follow_prediction_mean(s).map(|mean| (s.mu, s.epsilon, s.n, mean)))
        .collect();
    rows.sort_by(|a, b| a.partial_cmp(b).expect("grid values are finite"));
    for (mu, epsilon, n, mean) in rows {
        let _ = writeln!(out, "{mu},{epsilon},{n},{mean}");
    }
    out
}

/// Mean follow-prediction ratios next to the analytic curves 2n−1,
/// (ln n)² and ln n.
pub fn bounds_overlay_csv(result: &SweepResult) -> String {
    let mut out = String::from(
        "mu,epsilon,n,mean_ratio,bound_deterministic,bound_log_squared,bound_ln\n",
    );
    let mut rows: Vec<_> = result
        .summaries
        .iter()
        .filter_map(|s| follow_prediction_mean(s).map(|mean| (s.mu, s.epsilon, s.n, mean)))
        .collect();
    rows.sort_by(|a, b| a.partial_cmp(b).expect("grid values are finite"));
    for (mu, epsilon, n, mean) in rows {
        let b = bound_curves(n);
        let _ = writeln!(
            out,
            "{mu},{epsilon},{n},{mean},{},{},{}",
            b.deterministic, b.randomized_log_sq, b.randomized_ln
        );
    }
    out
}

/// Human-readable comparison of cell means against the bound curves.
/// Ratios print with 4 decimal places.
pub fn bound_table(summaries: &[CellSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>8} {:>5} {:>12} {:>14} {:>14} {:>10}",
        "n", "epsilon", "mu", "mean_ratio", "vs 2n-1", "vs (ln n)^2", "vs ln n"
    );
    for summary in summaries {
        let Some(mean) = follow_prediction_mean(summary) else {
            continue;
        };
        let v = compare_vs_bounds(summary).expect("mean exists");
        let word = |below: bool| if below { "below" } else { "above" };
        let _ = writeln!(
            out,
            "{:>6} {:>8} {:>5} {:>12.4} {:>14} {:>14} {:>10}",
            summary.n,
            summary.epsilon,
            summary.mu,
            mean,
            word(v.below_deterministic),
            word(v.below_log_squared),
            word(v.below_ln)
        );
    }
    out
}

/// Parse a summary CSV produced by [`summary_csv`] back into cells.
pub fn parse_summary_csv(text: &str) -> Result<Vec<CellSummary>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == SUMMARY_HEADER => {}
        other => {
            return Err(Error::InvalidArgument(format!(
                "unexpected summary header: {other:?}"
            )))
        }
    }

    // Grouped by (n, epsilon, mu) in file order.
    let mut cells: Vec<CellSummary> = Vec::new();
    let mut index: BTreeMap<(usize, u64, u64), usize> = BTreeMap::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::InvalidArgument(format!(
                "summary line {}: expected 9 fields, found {}",
                lineno + 2,
                fields.len()
            )));
        }
        let bad = |what: &str| Error::InvalidArgument(format!("summary line {}: bad {what}", lineno + 2));
        let n: usize = fields[0].parse().map_err(|_| bad("n"))?;
        let epsilon: f64 = fields[1].parse().map_err(|_| bad("epsilon"))?;
        let mu: f64 = fields[2].parse().map_err(|_| bad("mu"))?;
        let algorithm: Algorithm = fields[3].parse()?;
        let trials: usize = fields[4].parse().map_err(|_| bad("trials"))?;
        let stats = RatioStats {
            mean: fields[5].parse().map_err(|_| bad("mean_ratio"))?,
            min: fields[6].parse().map_err(|_| bad("min_ratio"))?,
            max: fields[7].parse().map_err(|_| bad("max_ratio"))?,
            std: fields[8].parse().map_err(|_| bad("std_ratio"))?,
        };

        let key = (n, epsilon.to_bits(), mu.to_bits());
        let at = *index.entry(key).or_insert_with(|| {
            cells.push(CellSummary {
                n,
                epsilon,
                mu,
                trials,
                stats: BTreeMap::new(),
            });
            cells.len() - 1
        });
        cells[at].stats.insert(algorithm, stats);
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_sweep, InstanceSource, SweepGrid};

    fn small_sweep() -> SweepResult {
        run_sweep(&SweepGrid {
            sizes: vec![5, 8],
            epsilons: vec![0.0, 0.5],
            mus: vec![0.1, 0.3],
            trials: 2,
            base_seed: 11,
            source: InstanceSource::Synthetic { lo: 1, hi: 100 },
            algorithms: Algorithm::ALL.to_vec(),
        })
        .unwrap()
    }

    #[test]
    fn raw_csv_counts_rows_and_stays_stable() {
        let result = small_sweep();
        let csv = raw_trials_csv(&result);
        // header + (trial, algorithm) rows
        assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2 * 2 * 3);
        assert!(csv.starts_with(RAW_TRIALS_HEADER));
        let again = raw_trials_csv(&run_sweep(&result.grid).unwrap());
        assert_eq!(csv, again);
    }

    #[test]
    fn raw_csv_epsilon_zero_rows_have_unit_ratio() {
        let csv = raw_trials_csv(&small_sweep());
        let mut saw = false;
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields[1] == "0" && fields[5] == "follow-prediction" {
                assert_eq!(fields[7], "1");
                saw = true;
            }
        }
        assert!(saw);
    }

    #[test]
    fn summary_csv_round_trips() {
        let result = small_sweep();
        let text = summary_csv(&result);
        let parsed = parse_summary_csv(&text).unwrap();
        assert_eq!(parsed, result.summaries);
    }

    #[test]
    fn figure_files_carry_follow_prediction_series() {
        let result = small_sweep();
        let error_graph = error_graph_csv(&result);
        let size_graph = size_graph_csv(&result);
        let overlay = bounds_overlay_csv(&result);
        // 2 sizes × 2 epsilons × 2 mus cells in each series file.
        assert_eq!(error_graph.lines().count(), 1 + 8);
        assert_eq!(size_graph.lines().count(), 1 + 8);
        assert_eq!(overlay.lines().count(), 1 + 8);
        assert!(overlay.lines().nth(1).unwrap().split(',').count() == 7);
    }

    #[test]
    fn bound_table_marks_perfect_cells_below() {
        let result = small_sweep();
        let table = bound_table(&result.summaries);
        for line in table.lines().skip(1) {
            if line.contains(" 0 ") && line.contains("0.1") {
                // ε = 0 rows sit below the deterministic curve.
                assert!(line.contains("below"));
            }
        }
    }

    #[test]
    fn parse_rejects_foreign_header() {
        assert!(parse_summary_csv("nope\n1,2,3").is_err());
    }
}
