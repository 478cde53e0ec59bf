use nalgebra::DMatrix;

use super::{check_orders, objective_gradient, project_row_sums, relaxed_objective, ConstraintKind, RelaxedSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{eig_sym, SpectralDecomposition};

/// Eigendecompositions of both graphs and the coefficient grid `c_ij = (λᴬⱼ − λᴮᵢ)²`.
pub(crate) struct JointSpectrum {
    pub a: SpectralDecomposition,
    pub b: SpectralDecomposition,
    pub zero_tol: f64,
}

impl JointSpectrum {
    pub fn new(a: &Graph, b: &Graph, opts: &SolverOptions) -> Result<Self> {
        let a = eig_sym(a)?;
        let b = eig_sym(b)?;
        let zero_tol = opts.zero_tol_rel * (a.sigma + b.sigma).powi(2);
        Ok(Self { a, b, zero_tol })
    }

    /// Cost of coordinate `(i, j)`, flushed to exactly zero below the tolerance.
    pub fn cost(&self, i: usize, j: usize) -> f64 {
        let c = (self.a.lambdas[j] - self.b.lambdas[i]).powi(2);
        if c <= self.zero_tol {
            0.0
        } else {
            c
        }
    }

    /// `P = U_B F U_Aᵀ`.
    pub fn to_vertex_basis(&self, f: &DMatrix<f64>) -> DMatrix<f64> {
        &self.b.vectors * f * self.a.vectors.transpose()
    }
}

/// Minimum of `‖PA − BP‖_F²` subject to `P·1 = 1`.
///
/// In `F = U_Bᵀ P U_A` coordinates row `i` minimizes `Σⱼ c_ij F_ij²`
/// subject to `Σⱼ F_ij v^A_j = v^B_i`. Zero-cost coordinates absorb the
/// constraint with the minimum-norm split; otherwise the KKT solution
/// `F_ij ∝ v^A_j / c_ij` applies.
pub fn solve_pseudo_stochastic(a: &Graph, b: &Graph, opts: &SolverOptions) -> Result<RelaxedSolution> {
    check_orders(a, b)?;
    let n = a.n();
    let joint = JointSpectrum::new(a, b, opts)?;
    let overlap_sq_tol = opts.overlap_tol * opts.overlap_tol * n as f64;
    let va = &joint.a.ones_overlap;

    let mut f = DMatrix::zeros(n, n);
    let mut degenerate_rows = Vec::new();
    for i in 0..n {
        let rhs = joint.b.ones_overlap[i];
        let costs: Vec<f64> = (0..n).map(|j| joint.cost(i, j)).collect();
        let outcome = solve_row(&costs, va, rhs, overlap_sq_tol).map_err(|reason| Error::Infeasible { row: i, reason })?;
        if !outcome.unique {
            degenerate_rows.push(i);
        }
        f.row_mut(i).copy_from_slice(&outcome.values);
    }

    let p = joint.to_vertex_basis(&f);
    let kkt_residual = project_row_sums(&objective_gradient(a, b, &p)).norm();
    Ok(RelaxedSolution {
        objective: relaxed_objective(a, b, &p),
        p,
        constraint_kind: ConstraintKind::PseudoStochastic,
        kkt_residual,
        iterations: 1,
        converged: true,
        unique: Some(degenerate_rows.is_empty()),
        degenerate_rows,
    })
}

pub(crate) struct RowOutcome {
    pub values: Vec<f64>,
    pub unique: bool,
}

/// Minimum-norm minimizer of `Σ c_j x_j²` subject to `Σ a_j x_j = rhs`.
pub(crate) fn solve_row(costs: &[f64], a: &[f64], rhs: f64, overlap_sq_tol: f64) -> std::result::Result<RowOutcome, String> {
    let n = costs.len();
    let mut values = vec![0.0; n];
    let zero: Vec<usize> = (0..n).filter(|&j| costs[j] == 0.0).collect();
    let zero_mass: f64 = zero.iter().map(|&j| a[j] * a[j]).sum();

    if zero_mass > overlap_sq_tol {
        for &j in &zero {
            values[j] = rhs * a[j] / zero_mass;
        }
        return Ok(RowOutcome {
            values,
            unique: zero.len() == 1,
        });
    }

    // Zero-cost coordinates cannot carry the constraint and stay at zero.
    let weight: f64 = (0..n).filter(|&j| costs[j] > 0.0).map(|j| a[j] * a[j] / costs[j]).sum();
    let weight_floor: f64 = (0..n).filter(|&j| costs[j] > 0.0).map(|j| a[j] * a[j]).sum();
    if weight_floor > overlap_sq_tol {
        for j in 0..n {
            if costs[j] > 0.0 {
                values[j] = rhs * (a[j] / costs[j]) / weight;
            }
        }
    } else if rhs * rhs > overlap_sq_tol {
        return Err(format!(
            "constraint value {rhs:e} cannot be met: every coordinate is orthogonal to the ones vector"
        ));
    }
    Ok(RowOutcome {
        values,
        unique: zero.is_empty(),
    })
}
