use nalgebra::{DMatrix, DVector};

use super::pseudo::JointSpectrum;
use super::{check_orders, objective_gradient, project_row_sums, relaxed_objective, ConstraintKind, RelaxedSolution, SeedSet, SolverOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Minimum of `‖PA − BP‖_F² + μ‖PC − D‖_F²` subject to `P·1 = 1`.
///
/// Row `i` of `F = U_Bᵀ P U_A` solves the bordered system
///
/// ```text
/// [ diag(c_i) + μ C̃C̃ᵀ   v_A ] [ f ]   [ μ C̃ D̃ᵢᵀ ]
/// [ v_Aᵀ                 0   ] [ γ ] = [ v^B_i   ]
/// ```
///
/// with `C̃ = U_Aᵀ C`, `D̃ = U_Bᵀ D`. A singular row system is completed with
/// the minimum-norm pseudo-solution and flagged in `degenerate_rows`.
/// `seeds.mu` is used as the penalty weight.
pub fn solve_seeded(a: &Graph, b: &Graph, seeds: &SeedSet, opts: &SolverOptions) -> Result<RelaxedSolution> {
    check_orders(a, b)?;
    let n = a.n();
    if seeds.n() != n {
        return Err(Error::Dimension(format!("seeds have {} rows for graphs of order {n}", seeds.n())));
    }
    let mu = seeds.mu;
    let joint = JointSpectrum::new(a, b, opts)?;
    let ct = joint.a.vectors.transpose() * &seeds.c;
    let dt = joint.b.vectors.transpose() * &seeds.d;
    let gram = (&ct * ct.transpose()) * mu;
    let va = DVector::from_column_slice(&joint.a.ones_overlap);

    let mut f = DMatrix::zeros(n, n);
    let mut degenerate_rows = Vec::new();
    for i in 0..n {
        let mut kkt = DMatrix::zeros(n + 1, n + 1);
        kkt.view_mut((0, 0), (n, n)).copy_from(&gram);
        for j in 0..n {
            kkt[(j, j)] += joint.cost(i, j);
            kkt[(j, n)] = va[j];
            kkt[(n, j)] = va[j];
        }
        let mut rhs = DVector::zeros(n + 1);
        rhs.rows_mut(0, n).copy_from(&(&ct * dt.row(i).transpose() * mu));
        rhs[n] = joint.b.ones_overlap[i];

        let svd = kkt.svd(true, true);
        let top = svd.singular_values.max();
        let cutoff = opts.kkt_tol_rel * top;
        if svd.singular_values.iter().any(|&s| s <= cutoff) {
            degenerate_rows.push(i);
        }
        let sol = svd
            .solve(&rhs, cutoff)
            .map_err(|e| Error::Singular(format!("row {i}: {e}")))?;
        f.row_mut(i).copy_from(&sol.rows(0, n).transpose());
    }

    let p = joint.to_vertex_basis(&f);
    let residual = &p * &seeds.c - &seeds.d;
    let grad = objective_gradient(a, b, &p) + (&residual * seeds.c.transpose()) * (2.0 * mu);
    Ok(RelaxedSolution {
        objective: relaxed_objective(a, b, &p) + mu * residual.norm_squared(),
        kkt_residual: project_row_sums(&grad).norm(),
        p,
        constraint_kind: ConstraintKind::PseudoStochastic,
        iterations: 1,
        converged: true,
        unique: Some(degenerate_rows.is_empty()),
        degenerate_rows,
    })
}
