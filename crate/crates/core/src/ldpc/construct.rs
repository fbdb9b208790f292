//! Progressive edge growth for regular codes, constrained to exact row
//! degrees and to girth of at least six.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::ParityCheckMatrix;
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 32;
const UNREACHED: usize = usize::MAX;

/// Build a `(col_deg, row_deg)`-regular parity-check matrix with `n` columns.
///
/// Deterministic given `seed`. Fails if the degree pair is infeasible or if
/// no 4-cycle-free placement was found; note that a girth-6 regular graph
/// requires `n * C(col_deg, 2) <= C(m, 2)` at the very least.
pub fn construct_regular_matrix(
    n: usize,
    col_deg: usize,
    row_deg: usize,
    seed: u64,
) -> Result<ParityCheckMatrix> {
    if n == 0 || col_deg == 0 || row_deg == 0 {
        return Err(Error::Construction("degrees and length must be positive".into()));
    }
    if (n * col_deg) % row_deg != 0 {
        return Err(Error::Construction(format!(
            "n * col_deg = {} is not divisible by row_deg = {row_deg}",
            n * col_deg
        )));
    }
    let m = n * col_deg / row_deg;
    if col_deg > m {
        return Err(Error::Construction(format!(
            "column degree {col_deg} exceeds the number of checks {m}"
        )));
    }
    let pairs_needed = n * col_deg * (col_deg - 1) / 2;
    let pairs_available = m * (m - 1) / 2;
    if pairs_needed > pairs_available {
        return Err(Error::Construction(format!(
            "no 4-cycle-free ({col_deg},{row_deg}) graph exists with n = {n}: \
             {pairs_needed} check pairs needed, {pairs_available} available"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(rows) = peg_attempt(n, m, col_deg, row_deg, &mut rng) {
            return ParityCheckMatrix::from_rows(n, rows);
        }
    }
    Err(Error::Construction(format!(
        "progressive edge growth did not complete after {MAX_ATTEMPTS} attempts"
    )))
}

fn peg_attempt(
    n: usize,
    m: usize,
    col_deg: usize,
    row_deg: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<usize>>> {
    let mut var_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(col_deg); n];
    let mut chk_adj: Vec<Vec<usize>> = vec![Vec::with_capacity(row_deg); m];
    let mut depth = vec![UNREACHED; m];
    let mut var_seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut candidates = Vec::new();

    for v in 0..n {
        for e in 0..col_deg {
            candidates.clear();
            if e == 0 {
                candidates.extend((0..m).filter(|&c| chk_adj[c].len() < row_deg));
                pick_least_loaded(&mut candidates, &chk_adj);
            } else {
                bfs_depths(v, &var_adj, &chk_adj, &mut depth, &mut var_seen, &mut queue);
                // Unreached checks count as infinitely far; depth 0 is already
                // adjacent and depth 1 would close a 4-cycle.
                let mut best = 1usize;
                for c in 0..m {
                    if chk_adj[c].len() >= row_deg || depth[c] <= 1 {
                        continue;
                    }
                    let d = depth[c];
                    if d > best {
                        best = d;
                        candidates.clear();
                    }
                    if d == best {
                        candidates.push(c);
                    }
                }
                pick_least_loaded(&mut candidates, &chk_adj);
            }
            if candidates.is_empty() {
                return None;
            }
            let c = candidates[rng.random_range(0..candidates.len())];
            var_adj[v].push(c);
            chk_adj[c].push(v);
        }
    }
    Some(chk_adj)
}

fn pick_least_loaded(candidates: &mut Vec<usize>, chk_adj: &[Vec<usize>]) {
    if let Some(min) = candidates.iter().map(|&c| chk_adj[c].len()).min() {
        candidates.retain(|&c| chk_adj[c].len() == min);
    }
}

/// Check-node distances from variable `v`, in units of check layers.
fn bfs_depths(
    v: usize,
    var_adj: &[Vec<usize>],
    chk_adj: &[Vec<usize>],
    depth: &mut [usize],
    var_seen: &mut [bool],
    queue: &mut VecDeque<usize>,
) {
    depth.fill(UNREACHED);
    var_seen.fill(false);
    queue.clear();
    var_seen[v] = true;
    for &c in &var_adj[v] {
        if depth[c] == UNREACHED {
            depth[c] = 0;
            queue.push_back(c);
        }
    }
    while let Some(c) = queue.pop_front() {
        let d = depth[c];
        for &u in &chk_adj[c] {
            if var_seen[u] {
                continue;
            }
            var_seen[u] = true;
            for &c2 in &var_adj[u] {
                if depth[c2] == UNREACHED {
                    depth[c2] = d + 1;
                    queue.push_back(c2);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_regular(h: &ParityCheckMatrix, col_deg: usize, row_deg: usize) {
        assert!(h.cols().iter().all(|c| c.len() == col_deg));
        assert!(h.rows().iter().all(|r| r.len() == row_deg));
        assert!(!h.has_four_cycle());
    }

    #[test]
    fn small_regular_code() {
        let h = construct_regular_matrix(48, 3, 6, 1).unwrap();
        assert_eq!(h.m(), 24);
        check_regular(&h, 3, 6);
    }

    #[test]
    fn n12_cannot_avoid_four_cycles() {
        // 12 columns x 3 check pairs = 36 > C(6, 2) = 15.
        let err = construct_regular_matrix(12, 3, 6, 1).unwrap_err();
        assert!(err.to_string().contains("4-cycle"), "{err}");
    }

    #[test]
    fn infeasible_degree_pair() {
        assert!(construct_regular_matrix(10, 3, 4, 0).is_err());
        assert!(construct_regular_matrix(10, 0, 4, 0).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = construct_regular_matrix(200, 3, 6, 42).unwrap();
        let b = construct_regular_matrix(200, 3, 6, 42).unwrap();
        let c = construct_regular_matrix(200, 3, 6, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        check_regular(&a, 3, 6);
    }
}
