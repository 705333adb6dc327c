use serde::{Deserialize, Serialize};

use super::MatchError;

/// Dense row-major `rows × cols` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// Minimum-cost assignment of every row to a distinct column (`rows ≤ cols`).
///
/// Shortest augmenting paths with row/column potentials, rows inserted in
/// order. Among equal-cost choices the lowest column index is taken at every
/// step, so ties resolve to the lowest-index assignment.
/// Returns `assignment[row] = column`.
pub fn solve_assignment(cost: &Matrix) -> Result<Vec<usize>, MatchError> {
    let (n, m) = (cost.rows, cost.cols);
    if n > m {
        return Err(MatchError::TooFewQueries { queries: m, targets: n });
    }
    if cost.data.iter().any(|v| !v.is_finite()) {
        return Err(MatchError::NonFiniteCost);
    }
    // 1-based with a virtual column 0, following the classic formulation.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![usize::MAX; n];
    for j in 1..=m {
        if p[j] != 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    Ok(assignment)
}

/// Sum of `cost[r][assignment[r]]` in row order.
pub fn assignment_cost(cost: &Matrix, assignment: &[usize]) -> f64 {
    assignment.iter().enumerate().map(|(r, &c)| cost.get(r, c)).sum()
}
