//! Friendliness classification of a decomposed adjacency matrix.
//!
//! A graph is friendly when its spectrum is simple and no eigenvector is
//! orthogonal to the all-ones vector. Otherwise it is `(m, k)`-unfriendly:
//! `m` is the excess multiplicity of repeated eigenvalues and `k` the total
//! dimension of hostile eigenspaces (those orthogonal to `1`).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::jacobi::SpectralDecomposition;

/// Relative eigenvalue-merge tolerance; the absolute tolerance is `GAP_REL_TOL·max(1, σ)`.
pub const GAP_REL_TOL: f64 = 1e-8;
/// An eigenspace is hostile when `‖proj 1‖ < OVERLAP_TOL·√n`.
pub const OVERLAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralTolerances {
    pub gap_tol: f64,
    pub overlap_tol: f64,
}

impl SpectralTolerances {
    pub fn for_decomposition(dec: &SpectralDecomposition) -> Self {
        Self {
            gap_tol: GAP_REL_TOL * dec.sigma.max(1.0),
            overlap_tol: OVERLAP_TOL,
        }
    }
}

/// A maximal run of numerically equal eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Eigenspace {
    /// Mean of the merged eigenvalues.
    pub lambda: f64,
    /// Index of the first basis column.
    #[serde(skip)]
    pub start: usize,
    pub multiplicity: usize,
    pub hostile: bool,
    /// Norm of the projection of `1` onto the space.
    #[serde(skip)]
    pub ones_projection: f64,
}

impl Eigenspace {
    pub fn columns(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.multiplicity
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FriendlinessReport {
    pub is_friendly: bool,
    pub epsilon: f64,
    /// Smallest gap between distinct eigenspaces; zero when there is only one.
    pub delta: f64,
    pub sigma: f64,
    pub eigenspaces: Vec<Eigenspace>,
    pub m: usize,
    pub k: usize,
    pub per_vector_overlaps: Vec<f64>,
}

/// A classification together with the adapted eigenbasis it was computed in.
#[derive(Clone, Debug)]
pub struct Classification {
    pub report: FriendlinessReport,
    /// Eigenbasis in which every non-hostile degenerate eigenspace has been
    /// rotated so that each basis vector has the same positive overlap with `1`.
    pub basis: SpectralDecomposition,
    pub tolerances: SpectralTolerances,
}

impl Classification {
    pub fn eigenspaces(&self) -> &[Eigenspace] {
        &self.report.eigenspaces
    }

    /// Eigenspace containing basis column `i`.
    pub fn space_of(&self, i: usize) -> &Eigenspace {
        self.report
            .eigenspaces
            .iter()
            .find(|s| s.columns().contains(&i))
            .expect("eigenspaces partition the basis")
    }
}

/// Classifies with the default tolerances.
pub fn classify_default(dec: &SpectralDecomposition) -> Classification {
    let tol = SpectralTolerances::for_decomposition(dec);
    classify(dec, tol.gap_tol, tol.overlap_tol)
}

pub fn classify(dec: &SpectralDecomposition, gap_tol: f64, overlap_tol: f64) -> Classification {
    let n = dec.n();
    let hostile_tol = overlap_tol * (n as f64).sqrt();
    let mut vectors = dec.vectors.clone();
    let mut spaces = Vec::new();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && dec.lambdas[end] - dec.lambdas[end - 1] <= gap_tol {
            end += 1;
        }
        let mult = end - start;
        let coeffs = DVector::from_iterator(mult, (start..end).map(|c| vectors.column(c).sum()));
        let proj = coeffs.norm();
        let hostile = proj < hostile_tol;
        if mult > 1 && !hostile {
            rotate_towards_ones(&mut vectors, start, end, &coeffs);
        }
        let lambda = dec.lambdas[start..end].iter().sum::<f64>() / mult as f64;
        spaces.push(Eigenspace {
            lambda,
            start,
            multiplicity: mult,
            hostile,
            ones_projection: proj,
        });
        start = end;
    }

    let basis = SpectralDecomposition::from_parts(dec.lambdas.clone(), vectors);
    let m = spaces.iter().map(|s| s.multiplicity - 1).sum();
    let k = spaces.iter().filter(|s| s.hostile).map(|s| s.multiplicity).sum();
    let delta = spaces
        .windows(2)
        .map(|w| dec.lambdas[w[1].start] - dec.lambdas[w[1].start - 1])
        .fold(f64::INFINITY, f64::min);
    let delta = if delta.is_finite() { delta } else { 0.0 };
    let is_friendly = m == 0 && k == 0;
    let per_vector_overlaps: Vec<f64> = basis.ones_overlap.iter().map(|v| v.abs()).collect();
    let epsilon = if is_friendly {
        epsilon_from_overlaps(&per_vector_overlaps)
    } else {
        0.0
    };

    Classification {
        report: FriendlinessReport {
            is_friendly,
            epsilon,
            delta,
            sigma: dec.sigma,
            eigenspaces: spaces,
            m,
            k,
            per_vector_overlaps,
        },
        basis,
        tolerances: SpectralTolerances { gap_tol, overlap_tol },
    }
}

/// Supremum of the `ε` with `ε < |vᵢ| < 1/ε` for all `i`.
fn epsilon_from_overlaps(abs_overlaps: &[f64]) -> f64 {
    let min = abs_overlaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max = abs_overlaps.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    min.min(1.0 / max)
}

/// Replaces columns `start..end` by `U_S H`, where the Householder reflection
/// `H` sends the coefficient direction `c/‖c‖` to `1/√m`. Afterwards every
/// column has overlap `‖c‖/√m` with the all-ones vector.
fn rotate_towards_ones(vectors: &mut DMatrix<f64>, start: usize, end: usize, coeffs: &DVector<f64>) {
    let mult = end - start;
    let target = DVector::from_element(mult, 1.0 / (mult as f64).sqrt());
    let w = coeffs / coeffs.norm() - &target;
    let ww = w.dot(&w);
    if ww <= f64::EPSILON * f64::EPSILON {
        return;
    }
    let h = DMatrix::identity(mult, mult) - (&w * w.transpose()) * (2.0 / ww);
    let block = vectors.columns(start, mult).into_owned();
    vectors.columns_mut(start, mult).copy_from(&(block * h));
}

/// Strong friendliness margins.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrongFriendliness {
    /// Supremum `ε`; any tested value must be strictly smaller.
    pub epsilon: f64,
    pub delta: f64,
    pub friendly: bool,
}

/// `(ε, δ)` of a decomposition; an unfriendly input yields `ε = 0` with the flag cleared.
pub fn strong_friendliness(dec: &SpectralDecomposition) -> StrongFriendliness {
    let c = classify_default(dec);
    StrongFriendliness {
        epsilon: c.report.epsilon,
        delta: c.report.delta,
        friendly: c.report.is_friendly,
    }
}

/// `(m, k)` from a classification.
pub fn unfriendliness_counts(c: &Classification) -> (usize, usize) {
    (c.report.m, c.report.k)
}
