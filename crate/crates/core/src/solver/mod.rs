//! Convex relaxations of graph matching and their uniqueness certificates.
//!
//! All solvers minimize `‖PA − BP‖_F²` (plus a seed penalty for
//! [`solve_seeded`]) over a convex superset of the permutation matrices:
//!
//! * [`solve_pseudo_stochastic`]: the affine set `P·1 = 1`, solved in closed
//!   form in the joint eigenbasis, one decoupled row at a time;
//! * [`solve_doubly_stochastic`]: the Birkhoff polytope, by Frank–Wolfe with
//!   the Hungarian method as linear minimization oracle;
//! * [`solve_seeded`]: the affine set with the penalty `μ‖PC − D‖_F²`.

mod certify;
mod doubly;
mod pseudo;
mod seeded;
mod seeds;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use certify::{
    certify_uniqueness, check_seed_conditions, CertificateMode, RowCertificate, SeedConditionReport,
    SpaceCheck, UniquenessCertificate,
};
pub use doubly::solve_doubly_stochastic;
pub use pseudo::solve_pseudo_stochastic;
pub use seeded::solve_seeded;
pub use seeds::{first_invariant_symmetry, generate_seeds, SeedSet};

use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintKind {
    PseudoStochastic,
    DoublyStochastic,
}

/// Solver configuration; every field has a default so a flat partial
/// key/value map deserializes into it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub constraint: ConstraintKind,
    /// Cost coefficients `c_ij = (λᴬⱼ − λᴮᵢ)²` at or below `zero_tol_rel·(σ_A + σ_B)²` count as zero.
    pub zero_tol_rel: f64,
    /// Overlaps with `1` below `overlap_tol·√n` count as zero.
    pub overlap_tol: f64,
    /// Frank–Wolfe stopping gap; `None` means `1e-7·‖B‖_F²·n`.
    pub fw_gap_tol: Option<f64>,
    pub fw_max_iter: usize,
    /// Seed penalty weight.
    pub mu: f64,
    /// Relative singular-value threshold for rank decisions in certificates.
    pub rank_tol_rel: f64,
    /// Relative singular-value threshold for the pseudo-inverse in seeded row solves.
    pub kkt_tol_rel: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            constraint: ConstraintKind::PseudoStochastic,
            zero_tol_rel: 1e-10,
            overlap_tol: 1e-8,
            fw_gap_tol: None,
            fw_max_iter: 2000,
            mu: 1.0,
            rank_tol_rel: 1e-8,
            kkt_tol_rel: 1e-12,
        }
    }
}

/// A relaxed (not necessarily permutation) minimizer with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelaxedSolution {
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub p: DMatrix<f64>,
    pub constraint_kind: ConstraintKind,
    /// `‖PA − BP‖_F²`, plus `μ‖PC − D‖_F²` for seeded solves.
    pub objective: f64,
    /// Norm of the objective gradient projected onto the feasible directions
    /// (for Frank–Wolfe: the final duality gap).
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `Some(true)` when the minimizer is provably unique; `None` when not assessed.
    pub unique: Option<bool>,
    /// Row indices (in the eigenbasis of `B`) whose subproblem was degenerate.
    pub degenerate_rows: Vec<usize>,
}

impl RelaxedSolution {
    /// `‖P·1 − 1‖_∞`.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.p.nrows())
            .map(|i| (self.p.row(i).sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `‖Pᵀ·1 − 1‖_∞`.
    pub fn column_sum_error(&self) -> f64 {
        (0..self.p.ncols())
            .map(|j| (self.p.column(j).sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `‖PA − BP‖_F²`.
pub fn relaxed_objective(a: &Graph, b: &Graph, p: &DMatrix<f64>) -> f64 {
    (p * a.weights() - b.weights() * p).norm_squared()
}

/// Gradient `2(RA − BR)` of `‖PA − BP‖_F²`, with `R = PA − BP`.
pub(crate) fn objective_gradient(a: &Graph, b: &Graph, p: &DMatrix<f64>) -> DMatrix<f64> {
    let r = p * a.weights() - b.weights() * p;
    (&r * a.weights() - b.weights() * &r) * 2.0
}

/// Removes the row-mean of `g`: the projection onto directions with `D·1 = 0`.
pub(crate) fn project_row_sums(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.ncols() as f64;
    let mut out = g.clone();
    for i in 0..g.nrows() {
        let mean = g.row(i).sum() / n;
        out.row_mut(i).add_scalar_mut(-mean);
    }
    out
}

pub(crate) fn check_orders(a: &Graph, b: &Graph) -> crate::error::Result<()> {
    if a.n() != b.n() {
        return Err(crate::error::Error::Dimension(format!(
            "graph orders {} and {} differ",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}
