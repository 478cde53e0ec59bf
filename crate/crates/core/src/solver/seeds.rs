use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation, PermutationSet};

/// Draw cap for [`generate_seeds`].
pub const SEED_RETRY_CAP: usize = 1000;

/// Corresponding vertex functions on `A` (`c`) and `B` (`d`), one per column.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedSet {
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub mu: f64,
}

impl SeedSet {
    pub fn new(c: DMatrix<f64>, d: DMatrix<f64>, mu: f64) -> Result<Self> {
        if c.shape() != d.shape() {
            return Err(Error::Dimension(format!(
                "seed matrices differ in shape: {:?} vs {:?}",
                c.shape(),
                d.shape()
            )));
        }
        if c.ncols() == 0 {
            return Err(Error::Dimension("at least one seed column is required".into()));
        }
        if c.iter().chain(d.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Domain("seed entries must be finite".into()));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { c, d, mu })
    }

    /// Seeds covariant under `p`: `C = Πᵀ D`, so that `Π C = D`.
    pub fn covariant(d: DMatrix<f64>, p: &Permutation, mu: f64) -> Result<Self> {
        let c = p.inverse().permute_rows(&d);
        Self::new(c, d, mu)
    }

    pub fn q(&self) -> usize {
        self.c.ncols()
    }

    pub fn n(&self) -> usize {
        self.c.nrows()
    }
}

/// First non-trivial symmetry `Π` of the set with `Π D = D`, if any.
pub fn first_invariant_symmetry<'s>(d: &DMatrix<f64>, sym: &'s PermutationSet) -> Option<&'s Permutation> {
    sym.non_trivial().find(|p| p.permute_rows(d) == *d)
}

/// Random point seeds on `B`: `q` indicator columns at distinct vertices,
/// redrawn until no non-trivial symmetry in `sym` leaves the matrix invariant.
pub fn generate_seeds(b: &Graph, sym: &PermutationSet, q: usize, rng_seed: u64) -> Result<DMatrix<f64>> {
    let n = b.n();
    if q == 0 || q > n {
        return Err(Error::Domain(format!("seed count must be in 1..={n}, got {q}")));
    }
    if sym.elements.iter().any(|p| p.len() != n) {
        return Err(Error::Dimension("symmetry set does not match the graph order".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut last_invariant = None;
    for _ in 0..SEED_RETRY_CAP {
        let picks = sample(&mut rng, n, q);
        let mut d = DMatrix::zeros(n, q);
        for (col, vertex) in picks.iter().enumerate() {
            d[(vertex, col)] = 1.0;
        }
        match first_invariant_symmetry(&d, sym) {
            None => return Ok(d),
            Some(p) => last_invariant = Some(p.clone()),
        }
    }
    Err(Error::SeedGeneration(format!(
        "{q} point seeds stayed invariant after {SEED_RETRY_CAP} draws, e.g. under {}",
        last_invariant.map(|p| p.to_string()).unwrap_or_default()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SetKind;

    fn path3_symmetries() -> PermutationSet {
        PermutationSet::new(
            vec![Permutation::identity(3), Permutation::from_map(vec![2, 1, 0]).unwrap()],
            SetKind::Symmetries,
        )
    }

    fn indicator(n: usize, v: usize) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(n, 1);
        d[(v, 0)] = 1.0;
        d
    }

    #[test]
    fn middle_of_path_is_invariant_end_is_not() {
        let sym = path3_symmetries();
        assert!(first_invariant_symmetry(&indicator(3, 1), &sym).is_some());
        assert!(first_invariant_symmetry(&indicator(3, 0), &sym).is_none());
    }

    #[test]
    fn generated_seeds_break_path_symmetry() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let sym = path3_symmetries();
        for s in 0..20 {
            let d = generate_seeds(&g, &sym, 1, s).unwrap();
            assert!(d[(1, 0)] == 0.0);
        }
    }

    #[test]
    fn asymmetric_graph_accepts_any_seed() {
        let g = Graph::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.5]]).unwrap();
        let sym = PermutationSet::new(vec![Permutation::identity(2)], SetKind::Symmetries);
        let d = generate_seeds(&g, &sym, 1, 7).unwrap();
        assert_eq!(d.sum(), 1.0);
    }

    #[test]
    fn complete_symmetry_cannot_be_broken_by_one_seed() {
        let g = Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
        let all = PermutationSet::new(
            [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
                .iter()
                .map(|m| Permutation::from_map(m.to_vec()).unwrap())
                .collect(),
            SetKind::Symmetries,
        );
        assert!(matches!(generate_seeds(&g, &all, 1, 0), Err(Error::SeedGeneration(_))));
        assert!(generate_seeds(&g, &all, 2, 0).is_ok());
    }

    #[test]
    fn covariant_seeds() {
        let p = Permutation::from_map(vec![2, 0, 1]).unwrap();
        let d = indicator(3, 0);
        let s = SeedSet::covariant(d.clone(), &p, 1.0).unwrap();
        assert_eq!(p.permute_rows(&s.c), d);
    }

    #[test]
    fn rejects_bad_seed_sets() {
        assert!(SeedSet::new(DMatrix::zeros(3, 1), DMatrix::zeros(3, 2), 1.0).is_err());
        assert!(SeedSet::new(DMatrix::zeros(3, 1), DMatrix::zeros(3, 1), 0.0).is_err());
        assert!(SeedSet::new(DMatrix::zeros(3, 0), DMatrix::zeros(3, 0), 1.0).is_err());
    }
}
