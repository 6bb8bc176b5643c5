//! Kuhn–Munkres minimum-cost assignment for rectangular matrices.

use super::Assignment;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Minimum-cost one-to-one assignment of every row to a distinct column.
///
/// `cost` has `n` rows of `m ≥ n` columns. `+∞` marks a forbidden pair; the
/// call fails with [`Error::Infeasible`] when no finite matching covers all
/// rows. Shortest augmenting path with potentials, `O(n²m)`.
pub fn km_assign<T: Real>(cost: &[Vec<T>]) -> Result<Assignment> {
    let n = cost.len();
    if n == 0 {
        return Ok(Assignment::default());
    }
    let m = cost[0].len();
    if cost.iter().any(|r| r.len() != m) {
        return Err(invalid("cost", "rows must have equal length"));
    }
    if n > m {
        return Err(invalid("cost", format!("{n} rows exceed {m} columns")));
    }
    if cost
        .iter()
        .flatten()
        .any(|c| c.is_nan() || *c == T::neg_infinity())
    {
        return Err(invalid("cost", "entries must be finite or +inf"));
    }

    let inf = T::infinity();
    // 1-based; column 0 is the virtual root of each augmenting tree
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if j1 == 0 || !delta.is_finite() {
                return Err(Error::Infeasible);
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let pairs = (1..=m)
        .filter(|&j| owner[j] != 0)
        .map(|j| (owner[j] - 1, j - 1));
    Ok(Assignment::from_pairs(pairs))
}
