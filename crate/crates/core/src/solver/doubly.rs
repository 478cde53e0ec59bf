use nalgebra::DMatrix;

use super::{check_orders, objective_gradient, relaxed_objective, ConstraintKind, RelaxedSolution, SolverOptions};
use crate::error::Result;
use crate::graph::Graph;
use crate::projection::lap_min_cost;

/// Approximate minimum of `‖PA − BP‖_F²` over the doubly-stochastic matrices.
///
/// Conditional gradient from the barycenter `J/n`: the linear minimization
/// oracle is a linear assignment problem on the gradient, followed by an
/// exact line search on the quadratic. Stops when the duality gap falls
/// below the configured tolerance or at the iteration cap, in which case
/// `converged` is false.
pub fn solve_doubly_stochastic(a: &Graph, b: &Graph, opts: &SolverOptions) -> Result<RelaxedSolution> {
    check_orders(a, b)?;
    let n = a.n();
    let gap_tol = opts
        .fw_gap_tol
        .unwrap_or(1e-7 * b.frobenius_norm().powi(2) * n as f64);

    let mut p = DMatrix::from_element(n, n, 1.0 / n as f64);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.fw_max_iter {
        let grad = objective_gradient(a, b, &p);
        let vertex = lap_min_cost(&grad).perm.to_matrix();
        let dir = &vertex - &p;
        gap = -grad.dot(&dir);
        if gap <= gap_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let r = &p * a.weights() - b.weights() * &p;
        let rd = &dir * a.weights() - b.weights() * &dir;
        let curvature = rd.norm_squared();
        let step = if curvature > 0.0 {
            (-r.dot(&rd) / curvature).clamp(0.0, 1.0)
        } else {
            1.0
        };
        p += dir * step;
    }

    Ok(RelaxedSolution {
        objective: relaxed_objective(a, b, &p),
        p,
        constraint_kind: ConstraintKind::DoublyStochastic,
        kkt_residual: gap.max(0.0),
        iterations,
        converged,
        unique: None,
        degenerate_rows: Vec::new(),
    })
}
