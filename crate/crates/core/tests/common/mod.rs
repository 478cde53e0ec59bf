//! Test-side oracles, written independently of the library's algorithms.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relaxmatch::Graph;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Exhaustive minimum of `Σᵢ C[i][p(i)]`.
pub fn brute_force_lap(cost: &DMatrix<f64>) -> (Vec<usize>, f64) {
    let n = cost.nrows();
    let mut best = (Vec::new(), f64::INFINITY);
    for p in permutations(n) {
        let v: f64 = (0..n).map(|i| cost[(i, p[i])]).sum();
        if v < best.1 {
            best = (p, v);
        }
    }
    if n == 0 {
        best.1 = 0.0;
    }
    best
}

/// Element-wise `‖A − ΠᵀBΠ‖_F` with `Π[i][p(i)] = 1`.
pub fn elementwise_distortion(a: &Graph, b: &Graph, p: &[usize]) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = a.weight(p[i], p[j]) - b.weight(i, j);
            s += d * d;
        }
    }
    s.sqrt()
}

fn pinv_solve(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    let svd = m.clone().svd(true, true);
    let cutoff = 1e-10 * svd.singular_values.max().max(1e-300);
    svd.solve(rhs, cutoff).expect("svd with vectors")
}

/// Orthonormal basis of the null space of `m`.
fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    let mut padded = DMatrix::zeros(m.nrows().max(cols), cols);
    padded.view_mut((0, 0), m.shape()).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let cutoff = 1e-10 * svd.singular_values.max().max(1e-300);
    let keep: Vec<usize> = (0..cols).filter(|&k| svd.singular_values[k] <= cutoff).collect();
    DMatrix::from_fn(cols, keep.len(), |r, c| vt[(keep[c], r)])
}

/// Minimum-norm minimizer of `‖PA − BP‖_F² + μ‖PC − D‖_F²` over `P·1 = 1`,
/// from the explicit `n² × n²` system with `vec(P)` in row-major order.
pub fn min_norm_relaxation(a: &Graph, b: &Graph, seeds: Option<(&DMatrix<f64>, &DMatrix<f64>, f64)>) -> DMatrix<f64> {
    let n = a.n();
    let nn = n * n;
    let q = seeds.map_or(0, |(c, _, _)| c.ncols());
    let mut k = DMatrix::zeros(nn + n * q, nn);
    let mut target = DVector::zeros(nn + n * q);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for t in 0..n {
                k[(row, i * n + t)] += a.weight(t, j);
                k[(row, t * n + j)] -= b.weight(i, t);
            }
        }
    }
    if let Some((c, d, mu)) = seeds {
        let s = mu.sqrt();
        for i in 0..n {
            for col in 0..q {
                let row = nn + i * q + col;
                for t in 0..n {
                    k[(row, i * n + t)] = s * c[(t, col)];
                }
                target[row] = s * d[(i, col)];
            }
        }
    }
    let mut e = DMatrix::zeros(n, nn);
    for i in 0..n {
        for j in 0..n {
            e[(i, i * n + j)] = 1.0;
        }
    }
    let x_p = pinv_solve(&e, &DVector::from_element(n, 1.0));
    let basis = null_space(&e);
    let y = pinv_solve(&(&k * &basis), &(target - &k * &x_p));
    let x = x_p + basis * y;
    DMatrix::from_fn(n, n, |i, j| x[i * n + j])
}

/// Symmetric matrix with standard normal entries, drawn from a local generator.
pub fn gaussian_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x: f64 = rng.sample(rand_distr::StandardNormal);
            w[(i, j)] = x;
            w[(j, i)] = x;
        }
    }
    w
}

/// Unweighted Erdős–Rényi graph; these are frequently unfriendly.
pub fn random_unweighted(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                w[(i, j)] = 1.0;
                w[(j, i)] = 1.0;
            }
        }
    }
    Graph::new(w).unwrap()
}

/// The Frucht graph: cubic, 12 vertices, trivial automorphism group.
pub fn frucht() -> Graph {
    let lcf: [i64; 12] = [-5, -2, -4, 2, 5, -2, 2, 5, -2, -5, 4, 2];
    let mut edges = Vec::new();
    for i in 0..12i64 {
        let j = (i + 1).rem_euclid(12);
        edges.push((i as usize, j as usize, 1.0));
        let k = (i + lcf[i as usize]).rem_euclid(12);
        if i < k {
            edges.push((i as usize, k as usize, 1.0));
        }
    }
    Graph::from_edges(12, &edges).unwrap()
}

/// Two-sided 95% half-width for the difference of two proportions.
pub fn binomial_band(p1: f64, n1: usize, p2: f64, n2: usize) -> f64 {
    let pooled = (p1 * n1 as f64 + p2 * n2 as f64) / (n1 + n2) as f64;
    1.96 * (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt()
}
