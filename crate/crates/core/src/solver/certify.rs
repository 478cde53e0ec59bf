//! Uniqueness certificates from the first-order system in the eigenbasis of `B`.
//!
//! After reparametrizing around an isomorphism, the optimality conditions of
//! the (seeded) pseudo-stochastic relaxation decouple into one `n × n`
//! linear system per row of `F = UᵀQU`:
//!
//! * unseeded: `Mᵢ = diag((λᵢ − λⱼ)²) + eᵢvᵀ`;
//! * seeded, `vᵢ ≠ 0`: `Mᵢ = diag((λᵢ − λⱼ)²) + μ(I − v eᵢᵀ/vᵢ)G + eᵢvᵀ`;
//! * seeded, hostile row: `Mᵢ = diag((λᵢ − λⱼ)²) + μG + eᵢvᵀ`;
//!
//! with `G = UᵀDDᵀU`. The relaxation has a unique minimizer iff every `Mᵢ`
//! is nonsingular.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::SolverOptions;
use super::SeedSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{classify_default, eig_sym, Classification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateMode {
    Unseeded,
    Seeded,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowCertificate {
    pub row: usize,
    pub smallest_singular: f64,
    pub largest_singular: f64,
    pub rank_deficiency: usize,
    pub hostile: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessCertificate {
    pub full_rank: bool,
    pub per_row: Vec<RowCertificate>,
    pub mode: CertificateMode,
}

impl UniquenessCertificate {
    pub fn deficient_rows(&self) -> Vec<usize> {
        self.per_row.iter().filter(|r| r.rank_deficiency > 0).map(|r| r.row).collect()
    }
}

/// Builds and rank-checks the per-row systems for `B`, optionally with seeds `D` and weight `μ`.
pub fn certify_uniqueness(b: &Graph, seeds: Option<&SeedSet>, opts: &SolverOptions) -> Result<UniquenessCertificate> {
    let n = b.n();
    if let Some(s) = seeds {
        if s.n() != n {
            return Err(Error::Dimension(format!("seeds have {} rows for a graph of order {n}", s.n())));
        }
    }
    let cls = classify_default(&eig_sym(b)?);
    let u = &cls.basis.vectors;
    let lambdas = &cls.basis.lambdas;
    let v = DVector::from_column_slice(&cls.basis.ones_overlap);
    let gram = seeds.map(|s| {
        let ud = u.transpose() * &s.d;
        (&ud * ud.transpose(), s.mu)
    });

    let mut per_row = Vec::with_capacity(n);
    for i in 0..n {
        let space_i = cls.space_of(i);
        let hostile = space_i.hostile;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            if !space_i.columns().contains(&j) {
                m[(j, j)] = (lambdas[i] - lambdas[j]).powi(2);
            }
        }
        if let Some((g, mu)) = &gram {
            if hostile {
                m += g * *mu;
            } else {
                let mut proj = DMatrix::<f64>::identity(n, n);
                for r in 0..n {
                    proj[(r, i)] -= v[r] / v[i];
                }
                m += (proj * g) * *mu;
            }
        }
        for j in 0..n {
            m[(i, j)] += v[j];
        }

        let sv = m.singular_values();
        let largest = sv.max();
        let smallest = sv.min();
        let cutoff = opts.rank_tol_rel * largest;
        let rank_deficiency = sv.iter().filter(|&&s| s <= cutoff).count();
        per_row.push(RowCertificate {
            row: i,
            smallest_singular: smallest,
            largest_singular: largest,
            rank_deficiency,
            hostile,
        });
    }

    Ok(UniquenessCertificate {
        full_rank: per_row.iter().all(|r| r.rank_deficiency == 0),
        per_row,
        mode: if seeds.is_some() {
            CertificateMode::Seeded
        } else {
            CertificateMode::Unseeded
        },
    })
}

/// Seed-condition outcome for one eigenspace that needs disambiguation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpaceCheck {
    pub lambda: f64,
    pub multiplicity: usize,
    pub hostile: bool,
    /// Basis columns `j` violating the pointwise inequality.
    pub violating: Vec<usize>,
    /// `Dᵀw ≠ 0` for every nonzero `w` in the space that the constraint leaves free.
    pub rank_sufficient: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedConditionReport {
    pub pass: bool,
    pub spaces: Vec<SpaceCheck>,
}

/// Evaluates the seed conditions on every degenerate or hostile eigenspace of `B`.
///
/// For a non-hostile space spanned by `uᵢ, .., u_{i+m−1}` (in the adapted
/// basis) it tests `(1ᵀuᵢ) DDᵀuⱼ ≠ 1 (uᵢᵀDDᵀuⱼ)` for each `j > i`; for a
/// hostile space it tests `DDᵀuⱼ ≠ 0` for every `j`. A space passes when
/// these hold and the seeds also separate the space as a whole, i.e.
/// `[DᵀU_S; 1ᵀU_S]` (hostile: `DᵀU_S`) has full column rank.
pub fn check_seed_conditions(b: &Graph, d: &DMatrix<f64>) -> Result<SeedConditionReport> {
    let n = b.n();
    if d.nrows() != n {
        return Err(Error::Dimension(format!("D has {} rows for a graph of order {n}", d.nrows())));
    }
    let cls = classify_default(&eig_sym(b)?);
    Ok(check_in_basis(&cls, d))
}

fn check_in_basis(cls: &Classification, d: &DMatrix<f64>) -> SeedConditionReport {
    let n = cls.basis.n();
    let u = &cls.basis.vectors;
    let ones = DVector::from_element(n, 1.0);
    let ddt = d * d.transpose();
    let tol = 1e-8 * ddt.norm().max(1.0) * (n as f64).sqrt();

    let mut spaces = Vec::new();
    for space in cls.eigenspaces() {
        if space.is_simple() && !space.hostile {
            continue;
        }
        let cols = space.columns();
        let first = cols.start;
        let mut violating = Vec::new();
        for j in cols.clone() {
            let ddu = &ddt * u.column(j);
            let bad = if space.hostile {
                ddu.norm() <= tol
            } else if j == first {
                continue;
            } else {
                let vi = cls.basis.ones_overlap[first];
                let coupling = u.column(first).dot(&ddu);
                (&ddu * vi - &ones * coupling).norm() <= tol
            };
            if bad {
                violating.push(j);
            }
        }

        let us = u.columns(cols.start, space.multiplicity);
        let dtu = d.transpose() * us;
        let stacked = if space.hostile {
            dtu
        } else {
            let mut s = DMatrix::zeros(dtu.nrows() + 1, space.multiplicity);
            s.view_mut((0, 0), dtu.shape()).copy_from(&dtu);
            for c in 0..space.multiplicity {
                s[(dtu.nrows(), c)] = us.column(c).sum();
            }
            s
        };
        let rank_sufficient = stacked.nrows() >= space.multiplicity && {
            let sv = stacked.singular_values();
            let top = sv.max().max(1.0);
            sv.iter().all(|&s| s > 1e-8 * top)
        };
        spaces.push(SpaceCheck {
            lambda: space.lambda,
            multiplicity: space.multiplicity,
            hostile: space.hostile,
            pass: violating.is_empty() && rank_sufficient,
            violating,
            rank_sufficient,
        });
    }
    SeedConditionReport {
        pass: spaces.iter().all(|s| s.pass),
        spaces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn two_edges() -> Graph {
        Graph::from_edges(4, &[(0, 1, 2.0), (2, 3, 2.0)]).unwrap()
    }

    fn indicator(n: usize, v: usize) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(n, 1);
        d[(v, 0)] = 1.0;
        d
    }

    #[test]
    fn friendly_graph_is_certified_without_seeds() {
        let g = Graph::from_rows(&[
            vec![0.2, 1.0, 0.0],
            vec![1.0, 0.0, 0.7],
            vec![0.0, 0.7, -0.4],
        ])
        .unwrap();
        let cert = certify_uniqueness(&g, None, &SolverOptions::default()).unwrap();
        assert!(cert.full_rank);
        assert_eq!(cert.mode, CertificateMode::Unseeded);
        let rep = check_seed_conditions(&g, &DMatrix::zeros(3, 1)).unwrap();
        assert!(rep.pass && rep.spaces.is_empty());
    }

    #[test]
    fn path3_is_deficient_exactly_on_the_hostile_row() {
        let cert = certify_uniqueness(&path3(), None, &SolverOptions::default()).unwrap();
        assert!(!cert.full_rank);
        assert_eq!(cert.deficient_rows(), vec![1]);
        assert_eq!(cert.per_row[1].rank_deficiency, 1);
        assert!(cert.per_row[1].hostile);
    }

    #[test]
    fn end_seed_certifies_path3() {
        let d = indicator(3, 0);
        let seeds = SeedSet::new(d.clone(), d.clone(), 1.0).unwrap();
        let cert = certify_uniqueness(&path3(), Some(&seeds), &SolverOptions::default()).unwrap();
        assert!(cert.full_rank);
        assert!(check_seed_conditions(&path3(), &d).unwrap().pass);
        // The middle vertex carries no weight on the hostile vector.
        let mid = indicator(3, 1);
        assert!(!check_seed_conditions(&path3(), &mid).unwrap().pass);
    }

    #[test]
    fn two_edges_need_seeds_on_both_components() {
        let zero = DMatrix::zeros(4, 1);
        assert!(!check_seed_conditions(&two_edges(), &zero).unwrap().pass);
        // A single point seed leaves the swap inside the other edge unbroken.
        let one = check_seed_conditions(&two_edges(), &indicator(4, 0)).unwrap();
        assert!(!one.pass);
        let mut d = DMatrix::zeros(4, 2);
        d[(0, 0)] = 1.0;
        d[(2, 1)] = 1.0;
        let rep = check_seed_conditions(&two_edges(), &d).unwrap();
        assert!(rep.pass, "{rep:?}");
        let seeds = SeedSet::new(d.clone(), d, 1.0).unwrap();
        assert!(certify_uniqueness(&two_edges(), Some(&seeds), &SolverOptions::default())
            .unwrap()
            .full_rank);
    }
}
