//! Exhaustive ground truth: symmetry and isomorphism enumeration and the
//! minimum-distortion search, by backtracking with partial-distortion pruning.
//!
//! These routines are exponential and refuse inputs above a configurable
//! vertex limit instead of silently truncating.

use crate::error::{Error, Result};
use crate::graph::{distortion, Graph, Permutation, PermutationSet, SetKind};

/// Default largest graph order accepted by the oracle.
pub const DEFAULT_ORACLE_LIMIT: usize = 10;

/// Round-off slack on squared distortions, relative to `1 + ‖A‖_F² + ‖B‖_F²`.
pub const ROUNDOFF_SLACK: f64 = 1e-14;

#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub limit: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl Oracle {
    pub fn with_limit(limit: usize) -> Self {
        Self { limit }
    }

    fn admit(&self, a: &Graph, b: &Graph) -> Result<()> {
        if a.n() != b.n() {
            return Err(Error::Dimension(format!("graph orders {} and {} differ", a.n(), b.n())));
        }
        if a.n() > self.limit {
            return Err(Error::OracleLimit {
                n: a.n(),
                limit: self.limit,
            });
        }
        Ok(())
    }

    /// All `Π` with `dis_{A↦A}(Π) ≤ rho`. For `rho = 0` this is the automorphism group.
    pub fn enumerate_symmetries(&self, a: &Graph, rho: f64) -> Result<PermutationSet> {
        let kind = if rho == 0.0 {
            SetKind::Symmetries
        } else {
            SetKind::RhoSymmetries
        };
        let found = self.enumerate(a, a, rho)?;
        Ok(PermutationSet::new(found, kind))
    }

    /// All `Π` with `dis_{A↦B}(Π) ≤ rho`; empty when the graphs are not ρ-isomorphic.
    pub fn enumerate_isomorphisms(&self, a: &Graph, b: &Graph, rho: f64) -> Result<PermutationSet> {
        let found = self.enumerate(a, b, rho)?;
        Ok(PermutationSet::new(found, SetKind::Isomorphisms))
    }

    fn enumerate(&self, a: &Graph, b: &Graph, rho: f64) -> Result<Vec<Permutation>> {
        self.admit(a, b)?;
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!("rho must be finite and nonnegative, got {rho}")));
        }
        let n = a.n();
        let scale = 1.0 + a.frobenius_norm().powi(2) + b.frobenius_norm().powi(2);
        let threshold = rho * rho + ROUNDOFF_SLACK * scale;

        // B-vertices are placed in order of decreasing |strength|.
        let strengths = b.strengths();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| strengths[y].abs().total_cmp(&strengths[x].abs()).then(x.cmp(&y)));

        let mut search = Search::new(a, b, threshold);
        let mut out = Vec::new();
        search.enumerate(&order, 0, 0.0, &mut out);
        Ok(out)
    }

    /// Global minimizer of the distortion over all `n!` permutations.
    ///
    /// Ties are broken towards the lexicographically smallest map; two
    /// squared values within [`ROUNDOFF_SLACK`] count as tied.
    pub fn brute_force_min_distortion(&self, a: &Graph, b: &Graph) -> Result<(Permutation, f64)> {
        self.admit(a, b)?;
        let n = a.n();
        let scale = 1.0 + a.frobenius_norm().powi(2) + b.frobenius_norm().powi(2);
        let mut search = Search::new(a, b, f64::INFINITY);
        let mut best = (Vec::new(), f64::INFINITY);
        search.minimize(0, 0.0, ROUNDOFF_SLACK * scale, &mut best);
        debug_assert_eq!(best.0.len(), n);
        let perm = Permutation::from_map(best.0)?;
        let value = distortion(a, b, &perm)?;
        Ok((perm, value))
    }
}

struct Search<'g> {
    a: &'g Graph,
    b: &'g Graph,
    threshold: f64,
    sorted_a: Vec<Vec<f64>>,
    sorted_b: Vec<Vec<f64>>,
    map: Vec<Option<usize>>,
    used: Vec<bool>,
    placed: Vec<usize>,
}

fn sorted_rows(g: &Graph) -> Vec<Vec<f64>> {
    g.rows()
        .into_iter()
        .map(|mut r| {
            r.sort_by(f64::total_cmp);
            r
        })
        .collect()
}

impl<'g> Search<'g> {
    fn new(a: &'g Graph, b: &'g Graph, threshold: f64) -> Self {
        let n = a.n();
        Self {
            a,
            b,
            threshold,
            sorted_a: sorted_rows(a),
            sorted_b: sorted_rows(b),
            map: vec![None; n],
            used: vec![false; n],
            placed: Vec::with_capacity(n),
        }
    }

    /// Lower bound on the row-`bv` disagreement of any completion mapping `bv` to `av`.
    fn row_bound(&self, bv: usize, av: usize) -> f64 {
        self.sorted_a[av]
            .iter()
            .zip(&self.sorted_b[bv])
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    }

    /// Cost added by mapping B-vertex `bv` to A-vertex `av` given the current partial map.
    fn increment(&self, bv: usize, av: usize) -> f64 {
        let d = self.a.weight(av, av) - self.b.weight(bv, bv);
        let mut inc = d * d;
        for &pb in &self.placed {
            let pa = self.map[pb].expect("placed vertex is mapped");
            let d = self.a.weight(av, pa) - self.b.weight(bv, pb);
            inc += 2.0 * d * d;
        }
        inc
    }

    fn finished(&self) -> Vec<usize> {
        self.map.iter().map(|m| m.expect("complete map")).collect()
    }

    fn enumerate(&mut self, order: &[usize], depth: usize, acc: f64, out: &mut Vec<Permutation>) {
        let n = self.a.n();
        if depth == n {
            out.push(Permutation::from_map(self.finished()).expect("search builds bijections"));
            return;
        }
        let bv = order[depth];
        for av in 0..n {
            if self.used[av] || self.row_bound(bv, av) > self.threshold {
                continue;
            }
            let next = acc + self.increment(bv, av);
            if next > self.threshold {
                continue;
            }
            self.assign(bv, av);
            self.enumerate(order, depth + 1, next, out);
            self.unassign(bv, av);
        }
    }

    fn minimize(&mut self, bv: usize, acc: f64, tie: f64, best: &mut (Vec<usize>, f64)) {
        let n = self.a.n();
        if bv == n {
            if acc < best.1 - tie {
                *best = (self.finished(), acc);
            }
            return;
        }
        for av in 0..n {
            if self.used[av] {
                continue;
            }
            let next = acc + self.increment(bv, av);
            if next >= best.1 - tie {
                continue;
            }
            self.assign(bv, av);
            self.minimize(bv + 1, next, tie, best);
            self.unassign(bv, av);
        }
    }

    fn assign(&mut self, bv: usize, av: usize) {
        self.map[bv] = Some(av);
        self.used[av] = true;
        self.placed.push(bv);
    }

    fn unassign(&mut self, bv: usize, av: usize) {
        self.placed.pop();
        self.map[bv] = None;
        self.used[av] = false;
    }
}
