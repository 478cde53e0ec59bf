//! Recovery bounds for inexact matching and numerical verifiers for the
//! perturbation estimates they rest on.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::eig_sym;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RecoveryBound {
    pub rho_max: f64,
    /// `√2·σ`.
    pub sqrt2_sigma: f64,
    /// `δ²ε⁴ / (12·σ·n^1.5)`.
    pub spectral_term: f64,
    /// Set when `σ = 1` was assumed.
    pub normalized: bool,
}

fn check_domain(eps: f64, delta: f64, sigma: f64, n: usize) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1], got {eps}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    Ok(())
}

fn spectral_term(eps: f64, delta: f64, sigma: f64, n: usize) -> f64 {
    delta * delta * eps.powi(4) / (12.0 * sigma * (n as f64).powf(1.5))
}

/// Largest noise level `ρ ≤ min{√2σ, δ²ε⁴/(12σn^1.5)}` under which the
/// perturbed pseudo-stochastic relaxation stays within `1/2` of the isomorphism.
pub fn lemma2_bound(eps: f64, delta: f64, sigma: f64, n: usize) -> Result<RecoveryBound> {
    check_domain(eps, delta, sigma, n)?;
    let sqrt2_sigma = std::f64::consts::SQRT_2 * sigma;
    let spectral_term = spectral_term(eps, delta, sigma, n);
    Ok(RecoveryBound {
        rho_max: sqrt2_sigma.min(spectral_term),
        sqrt2_sigma,
        spectral_term,
        normalized: false,
    })
}

/// Noise level `δ²ε⁴/(12n^1.5)` below which relaxation recovers the exact
/// matching of a graph normalized to spectral radius one.
pub fn theorem3_bound(eps: f64, delta: f64, n: usize) -> Result<RecoveryBound> {
    check_domain(eps, delta, 1.0, n)?;
    let spectral_term = spectral_term(eps, delta, 1.0, n);
    Ok(RecoveryBound {
        rho_max: spectral_term,
        sqrt2_sigma: std::f64::consts::SQRT_2,
        spectral_term,
        normalized: true,
    })
}

/// Returns `A/σ` and `σ`, the spectral radius of `A`.
pub fn normalize_spectral_radius(a: &Graph) -> Result<(Graph, f64)> {
    let sigma = eig_sym(a)?.sigma;
    if sigma == 0.0 {
        return Err(Error::Domain("cannot normalize a graph with zero spectrum".into()));
    }
    Ok((a.scaled(1.0 / sigma), sigma))
}

/// Spectral norm from the singular values.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    /// `‖u − u₀‖`.
    pub lhs: f64,
    /// `ρ‖M⁻¹‖‖N‖‖u₀‖ / (1 − ρ‖M⁻¹‖‖N‖)`.
    pub rhs: f64,
    /// `ρ‖M⁻¹‖‖N‖`.
    pub contraction: f64,
    pub holds: bool,
}

fn square_solve(m: &DMatrix<f64>, c: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let sv = m.singular_values();
    if sv.min() <= 1e-14 * sv.max() {
        return Err(Error::Singular(format!("{what} is numerically singular")));
    }
    m.clone()
        .lu()
        .solve(c)
        .ok_or_else(|| Error::Singular(format!("{what} is singular")))
}

/// Solves `M u₀ = c` and `(M + ρN) u = c` and compares `‖u − u₀‖` with the
/// first-order perturbation bound.
///
/// Fails with a domain error when `ρ‖M⁻¹‖‖N‖ ≥ 1`, where the bound is vacuous.
pub fn perturbation_bound_check(m: &DMatrix<f64>, n: &DMatrix<f64>, rho: f64, c: &DVector<f64>) -> Result<PerturbationReport> {
    let dim = m.nrows();
    if m.ncols() != dim || n.shape() != m.shape() || c.len() != dim {
        return Err(Error::Dimension("M, N must be square of equal size and match c".into()));
    }
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!("rho must be nonnegative, got {rho}")));
    }
    let m_sv = m.singular_values();
    let m_inv_norm = 1.0 / m_sv.min();
    let contraction = rho * m_inv_norm * spectral_norm(n);
    if !(contraction < 1.0) {
        return Err(Error::Domain(format!(
            "precondition rho*|M^-1|*|N| < 1 violated ({contraction}); bound is vacuous"
        )));
    }
    let u0 = square_solve(m, c, "M")?;
    let u = square_solve(&(m + n * rho), c, "M + rho N")?;
    let lhs = (&u - &u0).norm();
    let rhs = contraction * u0.norm() / (1.0 - contraction);
    let holds = lhs <= rhs * (1.0 + 1e-10) + 1e-13 * u0.norm();
    Ok(PerturbationReport {
        lhs,
        rhs,
        contraction,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockNormReport {
    /// `‖Mᵢ⁻¹‖` for each block.
    pub block_norms: Vec<f64>,
    /// `maxᵢ ‖Mᵢ⁻¹‖`, which equals `‖M⁻¹‖` for the block-diagonal `M`.
    pub measured: f64,
    /// `1 + √n/ε²`.
    pub bound: f64,
    pub holds: bool,
}

/// Block `Mᵢ`: the identity with row `i` replaced by `vᵀ`.
pub fn overlap_block(v: &[f64], i: usize) -> DMatrix<f64> {
    let n = v.len();
    let mut m = DMatrix::identity(n, n);
    for (j, &x) in v.iter().enumerate() {
        m[(i, j)] = x;
    }
    m
}

/// Verifies `maxᵢ ‖Mᵢ⁻¹‖ < 1 + √n/ε²` for the overlap vector `v`.
pub fn block_norm_bounds(v: &[f64], eps: f64) -> Result<BlockNormReport> {
    let n = v.len();
    if n == 0 {
        return Err(Error::Dimension("empty overlap vector".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {eps}")));
    }
    if let Some(i) = v.iter().position(|x| x.abs() <= eps) {
        return Err(Error::Domain(format!(
            "precondition |v_i| > eps violated at i = {i} (|v_i| = {}, eps = {eps})",
            v[i].abs()
        )));
    }
    let mut block_norms = Vec::with_capacity(n);
    for i in 0..n {
        let inv = overlap_block(v, i)
            .try_inverse()
            .ok_or_else(|| Error::Singular(format!("block {i} is singular")))?;
        block_norms.push(spectral_norm(&inv));
    }
    let measured = block_norms.iter().copied().fold(0.0, f64::max);
    let bound = 1.0 + (n as f64).sqrt() / (eps * eps);
    Ok(BlockNormReport {
        holds: measured < bound,
        block_norms,
        measured,
        bound,
    })
}
