use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal norm, relative to `‖W‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Overlaps `|uᵀ1|` above `SIGN_TOL·√n` fix the eigenvector sign to make the overlap positive.
pub const SIGN_TOL: f64 = 1e-8;

/// Orthonormal eigendecomposition `W = U diag(λ) Uᵀ` of a symmetric matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    /// Eigenvalues in ascending order.
    pub lambdas: Vec<f64>,
    /// Eigenvectors in columns; column `i` pairs with `lambdas[i]`.
    #[serde(serialize_with = "crate::io::serialize_matrix")]
    pub vectors: DMatrix<f64>,
    /// `v = Uᵀ1`.
    pub ones_overlap: Vec<f64>,
    /// Spectral radius `max |λ|`.
    pub sigma: f64,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.lambdas));
        &self.vectors * d * self.vectors.transpose()
    }

    /// `‖U diag(λ) Uᵀ − W‖_F`.
    pub fn reconstruction_error(&self, w: &DMatrix<f64>) -> f64 {
        (self.reconstruct() - w).norm()
    }

    /// `‖UᵀU − I‖_F`.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n();
        (self.vectors.transpose() * &self.vectors - DMatrix::identity(n, n)).norm()
    }

    pub(crate) fn from_parts(lambdas: Vec<f64>, vectors: DMatrix<f64>) -> Self {
        let ones_overlap: Vec<f64> = (0..vectors.ncols()).map(|c| vectors.column(c).sum()).collect();
        let sigma = lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        Self {
            lambdas,
            vectors,
            ones_overlap,
            sigma,
        }
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Output is deterministic: eigenvalues ascending (ties keep the order in
/// which Jacobi leaves them), and each eigenvector is signed so that its sum
/// is positive, or, when the sum is numerically zero, so that its first
/// largest-magnitude entry is positive.
pub fn eig_sym(graph: &Graph) -> Result<SpectralDecomposition> {
    eig_sym_matrix(graph.weights())
}

pub(crate) fn eig_sym_matrix(w: &DMatrix<f64>) -> Result<SpectralDecomposition> {
    let n = w.nrows();
    let mut a = w.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = OFF_DIAGONAL_TOL * w.norm();

    let mut converged = false;
    let mut residual = off_diagonal_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if residual <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
        residual = off_diagonal_norm(&a);
    }
    if !converged && residual > tol {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].total_cmp(&a[(y, y)]));
    let lambdas: Vec<f64> = order.iter().map(|&k| a[(k, k)]).collect();
    let mut vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    fix_signs(&mut vectors);
    Ok(SpectralDecomposition::from_parts(lambdas, vectors))
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// `A ← JᵀAJ`, `V ← VJ` with `J` the plane rotation in `(p, q)`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

pub(crate) fn fix_signs(vectors: &mut DMatrix<f64>) {
    let n = vectors.nrows();
    let sign_tol = SIGN_TOL * (n as f64).sqrt();
    for c in 0..vectors.ncols() {
        let col = vectors.column(c);
        let sum = col.sum();
        let flip = if sum.abs() > sign_tol {
            sum < 0.0
        } else {
            let max = col.amax();
            let lead = col
                .iter()
                .find(|x| x.abs() >= max * (1.0 - 1e-9))
                .copied()
                .unwrap_or(0.0);
            lead < 0.0
        };
        if flip {
            vectors.column_mut(c).neg_mut();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let g = Graph::from_rows(&[vec![-2.5]]).unwrap();
        let d = eig_sym(&g).unwrap();
        assert_eq!(d.lambdas, vec![-2.5]);
        assert_eq!(d.vectors[(0, 0)], 1.0);
        assert_eq!(d.ones_overlap, vec![1.0]);
        assert_eq!(d.sigma, 2.5);
    }

    #[test]
    fn path3_spectrum() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let d = eig_sym(&g).unwrap();
        let r2 = 2f64.sqrt();
        assert!((d.lambdas[0] + r2).abs() < 1e-12);
        assert!(d.lambdas[1].abs() < 1e-12);
        assert!((d.lambdas[2] - r2).abs() < 1e-12);
        let mid = d.vectors.column(1);
        assert!((mid[0].abs() - 1.0 / r2).abs() < 1e-12);
        assert!(mid[1].abs() < 1e-12);
        assert!((mid[0] + mid[2]).abs() < 1e-12);
        // Largest-magnitude entry is positive when the overlap vanishes.
        assert!(mid[0] > 0.0);
    }

    #[test]
    fn zero_matrix_is_already_diagonal() {
        let g = Graph::new(DMatrix::zeros(3, 3)).unwrap();
        let d = eig_sym(&g).unwrap();
        assert_eq!(d.lambdas, vec![0.0; 3]);
        assert_eq!(d.orthonormality_error(), 0.0);
    }

    #[test]
    fn positive_overlap_sign_convention() {
        let g = Graph::from_rows(&[
            vec![0.3, 1.0, -0.2],
            vec![1.0, -0.7, 0.4],
            vec![-0.2, 0.4, 1.1],
        ])
        .unwrap();
        let d = eig_sym(&g).unwrap();
        assert!(d.ones_overlap.iter().all(|&v| v > 0.0));
        assert!(d.reconstruction_error(g.weights()) < 1e-12);
    }
}
