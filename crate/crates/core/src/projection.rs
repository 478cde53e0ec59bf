//! Projection onto permutations: the linear assignment problem solved by the
//! O(n³) Hungarian method with row/column potentials.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::graph::Permutation;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssignmentResult {
    pub perm: Permutation,
    /// `Σᵢ X[i][perm[i]]` for the input matrix `X` (cost or score).
    pub objective: f64,
    /// Objective of the final dual solution, in the same sense as `objective`.
    pub dual_objective: f64,
    /// Complementary slackness and dual feasibility verified on the final potentials.
    pub dual_feasible: bool,
}

/// Permutation minimizing `Σᵢ C[i][π(i)]`.
///
/// Near-ties (within `1e-12·max|C|`) are resolved towards the smallest
/// column index, with rows inserted in ascending order, so the result is
/// deterministic; an all-zero cost matrix yields the identity.
pub fn lap_min_cost(cost: &DMatrix<f64>) -> AssignmentResult {
    assert_eq!(cost.nrows(), cost.ncols(), "assignment requires a square matrix");
    let n = cost.nrows();
    if n == 0 {
        return AssignmentResult {
            perm: Permutation::identity(0),
            objective: 0.0,
            dual_objective: 0.0,
            dual_feasible: true,
        };
    }
    let scale = cost.amax().max(f64::MIN_POSITIVE);
    let slack = 1e-12 * scale;

    // 1-based arrays; column 0 is the virtual root of each augmenting search.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if j1 == 0 || minv[j] < delta - slack {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
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

    let mut map = vec![0usize; n];
    for j in 1..=n {
        map[owner[j] - 1] = j - 1;
    }
    let perm = Permutation::from_map(map).expect("Hungarian method yields a bijection");
    let objective: f64 = (0..n).map(|i| cost[(i, perm.get(i))]).sum();
    let dual_objective: f64 = u[1..].iter().sum::<f64>() + v[1..].iter().sum::<f64>();

    let tol = 1e-9 * scale.max(1.0);
    let mut dual_feasible = true;
    'check: for i in 0..n {
        for j in 0..n {
            let reduced = cost[(i, j)] - u[i + 1] - v[j + 1];
            if reduced < -tol || (perm.get(i) == j && reduced.abs() > tol) {
                dual_feasible = false;
                break 'check;
            }
        }
    }

    AssignmentResult {
        perm,
        objective,
        dual_objective,
        dual_feasible,
    }
}

/// Orthogonal projection of `P` onto permutation matrices: maximizes `⟨Π, P⟩`.
pub fn project_to_permutation(p: &DMatrix<f64>) -> AssignmentResult {
    let top = if p.is_empty() { 0.0 } else { p.max() };
    let cost = p.map(|x| top - x);
    let res = lap_min_cost(&cost);
    let n = p.nrows();
    let objective: f64 = (0..n).map(|i| p[(i, res.perm.get(i))]).sum();
    AssignmentResult {
        objective,
        dual_objective: n as f64 * top - res.dual_objective,
        ..res
    }
}
