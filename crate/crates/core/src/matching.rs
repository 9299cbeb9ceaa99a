//! Exact offline minimum-weight perfect matching.
//!
//! [`solve_exact`] is a shortest-augmenting-path solver with dual
//! potentials (Jonker–Volgenant style), O(n³) overall. Any exact method
//! gives the same optimal cost, so faster specialized solvers would not
//! change a single ratio downstream; this one is simple, integer-exact and
//! deterministic. [`solve_bruteforce`] enumerates all permutations and is
//! the test oracle for it.

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, Weight};
use serde::{Deserialize, Serialize};

const INF: Weight = Weight::MAX / 4;

/// Perfect matching plus its total weight. `server_of[v] = u` means
/// request (column) `v` is served by server (row) `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub server_of: Vec<usize>,
    pub total_cost: Weight,
}

/// Total weight of `server_of` on `a`: Σ_v a[server_of[v]][v].
///
/// Rejects size mismatches and anything that is not a permutation.
pub fn evaluate(a: &CostMatrix, server_of: &[usize]) -> Result<Weight> {
    let n = a.n();
    if server_of.len() != n {
        return Err(Error::InvalidArgument(format!(
            "matching length {} does not match instance size {n}",
            server_of.len()
        )));
    }
    let mut used = vec![false; n];
    for &u in server_of {
        if u >= n {
            return Err(Error::InvalidMatching(format!(
                "server index {u} out of range for n = {n}"
            )));
        }
        if used[u] {
            return Err(Error::InvalidMatching(format!("server {u} used twice")));
        }
        used[u] = true;
    }
    Ok(server_of
        .iter()
        .enumerate()
        .map(|(v, &u)| a.at(u, v))
        .sum())
}

/// Minimum-weight perfect matching by shortest augmenting paths.
///
/// Rows enter one at a time; each entry runs a Dijkstra-like scan over
/// columns under reduced costs, then the dual potentials are updated so
/// the next path search stays consistent. Ties on the minimum slack go to
/// the lowest column index, which fixes the output matching exactly.
pub fn solve_exact(a: &CostMatrix) -> Assignment {
    let n = a.n();
    let mut row_pot = vec![0 as Weight; n];
    let mut col_pot = vec![0 as Weight; n + 1];
    // server_of_col[j] = row matched to column j; index n is the virtual
    // column every augmentation starts from.
    let mut server_of_col: Vec<Option<usize>> = vec![None; n + 1];

    for row in 0..n {
        server_of_col[n] = Some(row);
        let mut min_slack = vec![INF; n];
        let mut prev_col = vec![n; n];
        let mut committed = vec![false; n + 1];
        let mut cur_col = n;

        while let Some(cur_row) = server_of_col[cur_col] {
            committed[cur_col] = true;
            let mut delta = INF;
            let mut next_col = n;

            for j in 0..n {
                if committed[j] {
                    continue;
                }
                let slack = a.at(cur_row, j) - row_pot[cur_row] - col_pot[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    prev_col[j] = cur_col;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    next_col = j;
                }
            }

            for j in 0..=n {
                if committed[j] {
                    if let Some(r) = server_of_col[j] {
                        row_pot[r] += delta;
                    }
                    col_pot[j] -= delta;
                } else {
                    // committed[n] is always true, so j < n here
                    min_slack[j] -= delta;
                }
            }

            cur_col = next_col;
        }

        // Unwind the alternating path back to the virtual column.
        while cur_col != n {
            let back = prev_col[cur_col];
            server_of_col[cur_col] = server_of_col[back];
            cur_col = back;
        }
    }

    let server_of: Vec<usize> = (0..n)
        .map(|j| server_of_col[j].expect("perfect matching"))
        .collect();
    let total_cost = server_of
        .iter()
        .enumerate()
        .map(|(v, &u)| a.at(u, v))
        .sum();
    Assignment {
        server_of,
        total_cost,
    }
}

/// Maximum size accepted by [`solve_bruteforce`].
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Enumerate all n! matchings and keep the cheapest; among equal-cost
/// matchings the lexicographically smallest `server_of` wins. Test oracle
/// only — refuses n > 10.
pub fn solve_bruteforce(a: &CostMatrix) -> Result<Assignment> {
    let n = a.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::SizeLimit {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }

    let mut best: Option<Assignment> = None;
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; n];
    // Depth-first over server_of in lexicographic order; first strict
    // improvement kept, so ties resolve to the smallest array.
    fn recurse(
        a: &CostMatrix,
        current: &mut Vec<usize>,
        used: &mut [bool],
        cost_so_far: Weight,
        best: &mut Option<Assignment>,
    ) {
        let n = a.n();
        let v = current.len();
        if v == n {
            if best.as_ref().is_none_or(|b| cost_so_far < b.total_cost) {
                *best = Some(Assignment {
                    server_of: current.clone(),
                    total_cost: cost_so_far,
                });
            }
            return;
        }
        for u in 0..n {
            if used[u] {
                continue;
            }
            used[u] = true;
            current.push(u);
            recurse(a, current, used, cost_so_far + a.at(u, v), best);
            current.pop();
            used[u] = false;
        }
    }
    recurse(a, &mut current, &mut used, 0, &mut best);
    Ok(best.expect("n >= 1 always yields a matching"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_uniform;

    fn matrix(n: usize, entries: &[Weight]) -> CostMatrix {
        CostMatrix::new(n, entries.to_vec()).unwrap()
    }

    #[test]
    fn bruteforce_diagonal_dominance() {
        let a = matrix(2, &[1, 10, 10, 1]);
        let m = solve_bruteforce(&a).unwrap();
        assert_eq!(m.total_cost, 2);
        assert_eq!(m.server_of, vec![0, 1]);
    }

    #[test]
    fn bruteforce_prefers_off_diagonal() {
        // Both permutations: server_of=[0,1] costs 1+100, [1,0] costs 1+2.
        let a = matrix(2, &[1, 2, 1, 100]);
        let m = solve_bruteforce(&a).unwrap();
        assert_eq!(m.server_of, vec![1, 0]);
        assert_eq!(m.total_cost, 3);
    }

    #[test]
    fn bruteforce_breaks_ties_lexicographically() {
        let a = matrix(3, &[1; 9]);
        let m = solve_bruteforce(&a).unwrap();
        assert_eq!(m.server_of, vec![0, 1, 2]);
        assert_eq!(m.total_cost, 3);
    }

    #[test]
    fn bruteforce_size_limit() {
        let a = generate_uniform(11, 1, 5, 0).unwrap();
        assert!(matches!(
            solve_bruteforce(&a),
            Err(Error::SizeLimit { n: 11, limit: 10 })
        ));
    }

    #[test]
    fn exact_diagonal_dominance() {
        let a = matrix(2, &[1, 10, 10, 1]);
        let m = solve_exact(&a);
        assert_eq!(m.server_of, vec![0, 1]);
        assert_eq!(m.total_cost, 2);
    }

    #[test]
    fn exact_single_cell() {
        for c in [0, 1, 7, 1000] {
            let a = matrix(1, &[c]);
            let m = solve_exact(&a);
            assert_eq!(m.server_of, vec![0]);
            assert_eq!(m.total_cost, c);
        }
    }

    #[test]
    fn exact_matches_bruteforce_on_200_random_6x6() {
        for seed in 0..200 {
            let a = generate_uniform(6, 1, 100, seed).unwrap();
            let exact = solve_exact(&a);
            let brute = solve_bruteforce(&a).unwrap();
            assert_eq!(
                exact.total_cost, brute.total_cost,
                "seed {seed}: exact {} != brute {}",
                exact.total_cost, brute.total_cost
            );
            assert_eq!(evaluate(&a, &exact.server_of).unwrap(), exact.total_cost);
        }
    }

    #[test]
    fn exact_is_deterministic() {
        let a = generate_uniform(30, 1, 100, 5).unwrap();
        assert_eq!(solve_exact(&a), solve_exact(&a));
    }

    #[test]
    fn evaluate_self_consistency() {
        let a = generate_uniform(8, 1, 100, 9).unwrap();
        let m = solve_exact(&a);
        assert_eq!(evaluate(&a, &m.server_of).unwrap(), m.total_cost);
    }

    #[test]
    fn evaluate_direct_sum() {
        let a = matrix(2, &[1, 2, 3, 4]);
        assert_eq!(evaluate(&a, &[1, 0]).unwrap(), 5);
    }

    #[test]
    fn evaluate_rejects_duplicate_server() {
        let a = matrix(2, &[1, 2, 3, 4]);
        assert!(matches!(
            evaluate(&a, &[0, 0]),
            Err(Error::InvalidMatching(_))
        ));
    }

    #[test]
    fn evaluate_rejects_size_mismatch() {
        let a = matrix(2, &[1, 2, 3, 4]);
        assert!(matches!(
            evaluate(&a, &[0]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
