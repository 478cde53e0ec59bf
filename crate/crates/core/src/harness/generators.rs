use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{Graph, Permutation, PermutationSet, SetKind};
use crate::oracle::Oracle;
use crate::spectral::{eig_sym, strong_friendliness, StrongFriendliness};

pub const FRIENDLY_RESAMPLE_CAP: usize = 100;

const SYMMETRIC_RESAMPLE_CAP: usize = 20;

fn symmetric_gaussian(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x: f64 = rng.sample(StandardNormal);
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    w
}

/// Symmetric Gaussian weights, redrawn until the graph is friendly.
pub fn random_friendly_graph(n: usize, rng_seed: u64) -> Result<(Graph, StrongFriendliness)> {
    if n < 2 {
        return Err(Error::Domain(format!("friendly graphs need n >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..FRIENDLY_RESAMPLE_CAP {
        let g = Graph::new(symmetric_gaussian(n, &mut rng))?;
        let sf = strong_friendliness(&eig_sym(&g)?);
        if sf.friendly {
            return Ok((g, sf));
        }
    }
    Err(Error::Construction(format!(
        "no friendly graph of order {n} in {FRIENDLY_RESAMPLE_CAP} draws"
    )))
}

pub fn random_permutation(n: usize, rng_seed: u64) -> Permutation {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut map: Vec<usize> = (0..n).collect();
    map.shuffle(&mut rng);
    Permutation::from_map(map).expect("shuffle of 0..n")
}

/// `B + ρR` with `R` symmetric Gaussian, scaled to `‖R‖_F = 1`.
pub fn add_noise(b: &Graph, rho: f64, rng_seed: u64) -> Result<Graph> {
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::Domain(format!("rho must be nonnegative, got {rho}")));
    }
    if rho == 0.0 || b.n() == 0 {
        return Ok(b.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let r = symmetric_gaussian(b.n(), &mut rng);
    let r = &r / r.norm();
    Graph::new(b.weights() + r * rho)
}

/// Group used for the designed automorphisms, acting regularly on itself.
#[derive(Clone, Copy, Debug)]
enum DesignGroup {
    /// `Z₂^p`, elements as bit masks.
    Elementary(u32),
    Cyclic(usize),
}

impl DesignGroup {
    fn for_order(order: usize) -> Self {
        if order.is_power_of_two() {
            DesignGroup::Elementary(order.trailing_zeros())
        } else {
            DesignGroup::Cyclic(order)
        }
    }

    fn order(self) -> usize {
        match self {
            DesignGroup::Elementary(p) => 1 << p,
            DesignGroup::Cyclic(k) => k,
        }
    }

    /// `h − g`, the label of the block joining copies `g` and `h`.
    fn difference(self, g: usize, h: usize) -> usize {
        match self {
            DesignGroup::Elementary(_) => g ^ h,
            DesignGroup::Cyclic(k) => (h + k - g) % k,
        }
    }

    fn negate(self, g: usize) -> usize {
        match self {
            DesignGroup::Elementary(_) => g,
            DesignGroup::Cyclic(k) => (k - g) % k,
        }
    }

    /// Components smaller than this admit extra reflections for cyclic groups.
    fn min_component(self) -> usize {
        match self {
            DesignGroup::Cyclic(k) if k > 2 => 2,
            _ => 1,
        }
    }
}

fn uniform_weight(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.1..1.0)
}

/// Copies of a random component indexed by a group `G` with `|G| = l + 1`;
/// copies `g` and `h` are joined by block `X_{h−g}`, with `X_{−g} = X_gᵀ`.
/// Leftover vertices are fixed by every group element.
fn cayley_blocks(n: usize, group: DesignGroup, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let order = group.order();
    let t = n / order;
    let fixed = n - t * order;
    let mut blocks: Vec<Option<DMatrix<f64>>> = vec![None; order];
    for g in 0..order {
        if blocks[g].is_some() {
            continue;
        }
        let neg = group.negate(g);
        let mut x = DMatrix::from_fn(t, t, |_, _| uniform_weight(rng));
        if neg == g {
            x = (&x + x.transpose()) * 0.5;
        }
        if neg != g {
            blocks[neg] = Some(x.transpose());
        }
        blocks[g] = Some(x);
    }
    let blocks: Vec<DMatrix<f64>> = blocks.into_iter().map(|b| b.expect("filled")).collect();
    let to_fixed = DMatrix::from_fn(fixed, t, |_, _| uniform_weight(rng));
    let core = symmetric_gaussian(fixed, rng);

    let mut w = DMatrix::zeros(n, n);
    for g in 0..order {
        for h in 0..order {
            let x = &blocks[group.difference(g, h)];
            w.view_mut((g * t, h * t), (t, t)).copy_from(x);
        }
        let base = order * t;
        for f in 0..fixed {
            for a in 0..t {
                w[(base + f, g * t + a)] = to_fixed[(f, a)];
                w[(g * t + a, base + f)] = to_fixed[(f, a)];
            }
        }
    }
    let base = order * t;
    w.view_mut((base, base), (fixed, fixed)).copy_from(&core);
    w
}

/// A graph with exactly `l` non-trivial automorphisms and its symmetry set.
///
/// `l = 0` yields a friendly graph. Otherwise the graph consists of `l + 1`
/// isomorphic components permuted regularly by `Z₂^p` (when `l + 1` is a
/// power of two) or by the cyclic group `Z_{l+1}`, plus fixed vertices.
/// The symmetry count is confirmed by exhaustive search, so `n` is limited
/// to the default oracle size.
pub fn random_symmetric_instance(n: usize, l: usize, rng_seed: u64) -> Result<(Graph, PermutationSet)> {
    if l == 0 {
        let (g, _) = random_friendly_graph(n, rng_seed)?;
        let id = PermutationSet::new(vec![Permutation::identity(n)], SetKind::Symmetries);
        return Ok((g, id));
    }
    let group = DesignGroup::for_order(l + 1);
    let t = n / group.order();
    if t < group.min_component() {
        return Err(Error::Domain(format!(
            "cannot realize {l} symmetries on {n} vertices: components need at least {} vertices",
            group.min_component()
        )));
    }
    let oracle = Oracle::default();
    if n > oracle.limit {
        return Err(Error::Domain(format!(
            "symmetry count cannot be verified for n = {n} (limit {})",
            oracle.limit
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..SYMMETRIC_RESAMPLE_CAP {
        let g = Graph::new(cayley_blocks(n, group, &mut rng))?;
        let sym = oracle.enumerate_symmetries(&g, 0.0)?;
        if sym.len() == l + 1 {
            return Ok((g, sym));
        }
    }
    Err(Error::Construction(format!(
        "no instance with exactly {l} symmetries on {n} vertices in {SYMMETRIC_RESAMPLE_CAP} draws"
    )))
}
