//! Weighted undirected graphs, vertex permutations and the distortion functionals.
//!
//! Direction convention: a permutation `p` is identified with the 0/1 matrix
//! `Π` having `Π[i][p[i]] = 1`. Matching `A` to `B` means `B ≈ Π A Πᵀ`, so
//! vertex `i` of `B` corresponds to vertex `p[i]` of `A`, and the distortion
//! is `‖ΠA − BΠ‖_F = ‖ΠAΠᵀ − B‖_F`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tolerated `‖W − Wᵀ‖_∞` on input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// A weighted undirected graph stored as a dense symmetric adjacency matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    weights: DMatrix<f64>,
}

impl Graph {
    /// Validates and wraps a weight matrix.
    ///
    /// Matrices whose asymmetry exceeds [`SYMMETRY_TOL`] are rejected, never
    /// symmetrized. Accepted matrices are made bit-exactly symmetric by
    /// copying the upper triangle.
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        if weights.nrows() != weights.ncols() {
            return Err(Error::Dimension(format!(
                "adjacency must be square, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if weights.nrows() == 0 {
            return Err(Error::Dimension("graph must have at least one vertex".into()));
        }
        let n = weights.nrows();
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let w = weights[(i, j)];
                if !w.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                asym = asym.max((w - weights[(j, i)]).abs());
            }
        }
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let mut weights = weights;
        for i in 0..n {
            for j in 0..i {
                weights[(i, j)] = weights[(j, i)];
            }
        }
        Ok(Self { weights })
    }

    /// Builds a graph from row-major nested vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows must all have length n".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Builds a graph from an undirected edge list; each pair is listed once.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = DMatrix::zeros(n, n);
        for &(i, j, x) in edges {
            if i >= n || j >= n {
                return Err(Error::Dimension(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
        Self::new(w)
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn into_weights(self) -> DMatrix<f64> {
        self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.weights.norm()
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Graph {
        Graph {
            weights: &self.weights * factor,
        }
    }

    /// Row sums, used as a degree-like vertex invariant.
    pub fn strengths(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.weights.row(i).sum()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.weights.row(i).iter().copied().collect())
            .collect()
    }
}

/// A bijection of `{0, .., n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n {
                return Err(Error::InvalidPermutation(format!("index {m} out of range for n = {n}")));
            }
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::InvalidPermutation(format!("index {m} repeated")));
            }
        }
        Ok(Self(map))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &m) in self.0.iter().enumerate() {
            inv[m] = i;
        }
        Self(inv)
    }

    /// The permutation whose matrix is `Π_self · Π_other`.
    pub fn compose(&self, other: &Permutation) -> Self {
        Self(self.0.iter().map(|&m| other.0[m]).collect())
    }

    /// Matrix view with `Π[i][map[i]] = 1`.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &j) in self.0.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        m
    }

    /// Applies `Π` to the rows of a matrix: row `i` of the result is row `map[i]` of `x`.
    pub fn permute_rows(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(self.0[i], j)])
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(map: Vec<usize>) -> Result<Self> {
        Self::from_map(map)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, m) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Symmetries,
    Isomorphisms,
    RhoSymmetries,
}

/// A finite set of permutations, kept sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PermutationSet {
    pub elements: Vec<Permutation>,
    pub kind: SetKind,
}

impl PermutationSet {
    pub fn new(mut elements: Vec<Permutation>, kind: SetKind) -> Self {
        elements.sort();
        elements.dedup();
        Self { elements, kind }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Elements other than the identity.
    pub fn non_trivial(&self) -> impl Iterator<Item = &Permutation> {
        self.elements.iter().filter(|p| !p.is_identity())
    }

    /// Exhaustive group check: identity, closure under composition and inverse.
    pub fn is_group(&self) -> bool {
        let Some(first) = self.elements.first() else {
            return false;
        };
        if !self.contains(&Permutation::identity(first.len())) {
            return false;
        }
        self.elements.iter().all(|a| {
            self.contains(&a.inverse()) && self.elements.iter().all(|b| self.contains(&a.compose(b)))
        })
    }
}

fn check_sizes(a: &Graph, b: &Graph, p: &Permutation) -> Result<()> {
    if a.n() != b.n() || a.n() != p.len() {
        return Err(Error::Dimension(format!(
            "graph orders {} and {} with permutation of length {}",
            a.n(),
            b.n(),
            p.len()
        )));
    }
    Ok(())
}

/// Squared distortion `‖ΠAΠᵀ − B‖_F²`.
pub fn distortion_squared(a: &Graph, b: &Graph, p: &Permutation) -> Result<f64> {
    check_sizes(a, b, p)?;
    let n = a.n();
    let map = p.as_slice();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = a.weight(map[i], map[j]) - b.weight(i, j);
            acc += d * d;
        }
    }
    Ok(acc)
}

/// `dis(Π) = ‖ΠA − BΠ‖_F`.
pub fn distortion(a: &Graph, b: &Graph, p: &Permutation) -> Result<f64> {
    distortion_squared(a, b, p).map(f64::sqrt)
}

/// The quadratic assignment objective `tr(B Π A Πᵀ)`.
pub fn qap_objective(a: &Graph, b: &Graph, p: &Permutation) -> Result<f64> {
    check_sizes(a, b, p)?;
    let n = a.n();
    let map = p.as_slice();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += b.weight(i, j) * a.weight(map[i], map[j]);
        }
    }
    Ok(acc)
}

/// Forward image `Π A Πᵀ` of `A` under `p`.
pub fn apply_isomorphism(a: &Graph, p: &Permutation) -> Result<Graph> {
    if a.n() != p.len() {
        return Err(Error::Dimension(format!(
            "graph of order {} with permutation of length {}",
            a.n(),
            p.len()
        )));
    }
    let map = p.as_slice();
    Ok(Graph {
        weights: DMatrix::from_fn(a.n(), a.n(), |i, j| a.weight(map[i], map[j])),
    })
}
