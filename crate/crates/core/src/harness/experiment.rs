//! The noise-sweep and seed-sweep protocols.
//!
//! Every trial draws from its own ChaCha8 stream, selected from the master
//! seed by the trial index, so results do not depend on scheduling or on the
//! number of worker threads.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{add_noise, random_friendly_graph, random_permutation, random_symmetric_instance};
use super::pipeline::{exactness_tolerance, rgm, RgmOptions};
use crate::bounds::{normalize_spectral_radius, theorem3_bound};
use crate::error::{Error, Result};
use crate::graph::{apply_isomorphism, distortion, Permutation, PermutationSet, SetKind};
use crate::projection::project_to_permutation;
use crate::solver::{check_seed_conditions, generate_seeds, solve_pseudo_stochastic, solve_seeded, SeedSet, SolverOptions};
use crate::spectral::{eig_sym, strong_friendliness};

pub const CSV_HEADER: &str = "# relaxmatch-csv v1";

/// Draws of point seeds tried per trial before giving up on the seed conditions.
const SEED_CONDITION_ATTEMPTS: usize = 100;

fn trial_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

fn run_parallel<T: Send, F: Fn(usize) -> T + Sync + Send>(count: usize, jobs: Option<usize>, f: F) -> Result<Vec<T>> {
    let work = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    match jobs {
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSweepConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Friendly graphs; each is tested at every multiplier.
    pub graphs: usize,
    /// Noise draws per graph and multiplier.
    pub repeats: usize,
    /// Noise levels as multiples of the recovery bound.
    pub multipliers: Vec<f64>,
    pub rng_seed: u64,
    pub solver: SolverOptions,
}

impl Default for NoiseSweepConfig {
    fn default() -> Self {
        Self {
            n_min: 10,
            n_max: 30,
            graphs: 100,
            repeats: 1,
            multipliers: vec![0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0],
            rng_seed: 0,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub instance: usize,
    pub n: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub multiplier: f64,
    pub rho: f64,
    pub success: bool,
    pub distortion: f64,
    pub runtime_s: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub multiplier: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoiseSweepOutcome {
    pub config: NoiseSweepConfig,
    pub records: Vec<TrialRecord>,
    pub summary: Vec<LevelSummary>,
}

struct FriendlyInstance {
    a: crate::graph::Graph,
    b0: crate::graph::Graph,
    planted: Permutation,
    epsilon: f64,
    delta: f64,
    bound: f64,
}

fn noise_instance(config: &NoiseSweepConfig, rng: &mut ChaCha8Rng) -> Result<FriendlyInstance> {
    let n = rng.random_range(config.n_min..=config.n_max);
    let (a, _) = random_friendly_graph(n, rng.random())?;
    let (a, _) = normalize_spectral_radius(&a)?;
    let sf = strong_friendliness(&eig_sym(&a)?);
    let bound = theorem3_bound(sf.epsilon, sf.delta, n)?.rho_max;
    let planted = random_permutation(n, rng.random());
    let b0 = apply_isomorphism(&a, &planted)?;
    Ok(FriendlyInstance {
        a,
        b0,
        planted,
        epsilon: sf.epsilon,
        delta: sf.delta,
        bound,
    })
}

/// Recovery rate of a planted permutation as noise grows past the bound.
///
/// Each graph is normalized to spectral radius one; trial noise is
/// `multiplier × bound` and success means the rounded permutation equals
/// the planted one.
pub fn experiment_noise_sweep(config: &NoiseSweepConfig, jobs: Option<usize>) -> Result<NoiseSweepOutcome> {
    if config.n_min < 2 || config.n_min > config.n_max {
        return Err(Error::Domain(format!(
            "invalid size range {}..={}",
            config.n_min, config.n_max
        )));
    }
    if config.multipliers.iter().any(|m| !(*m >= 0.0 && m.is_finite())) {
        return Err(Error::Domain("multipliers must be finite and nonnegative".into()));
    }
    let levels = config.multipliers.len();
    let per_graph = levels * config.repeats;
    let opts = RgmOptions {
        solver: config.solver.clone(),
        ..Default::default()
    };

    let per_instance = run_parallel(config.graphs, jobs, |g| -> Result<Vec<TrialRecord>> {
        let mut rng = trial_rng(config.rng_seed, g as u64);
        let inst = noise_instance(config, &mut rng)?;
        let mut out = Vec::with_capacity(per_graph);
        for (li, &multiplier) in config.multipliers.iter().enumerate() {
            for r in 0..config.repeats {
                let rho = multiplier * inst.bound;
                let noise_seed: u64 = rng.random();
                let start = Instant::now();
                let attempt = add_noise(&inst.b0, rho, noise_seed).and_then(|b| rgm(&inst.a, &b, &opts));
                let (success, dis, note) = match attempt {
                    Ok(res) => (res.perm == inst.planted, res.distortion, String::new()),
                    Err(e) => (false, f64::NAN, e.to_string()),
                };
                out.push(TrialRecord {
                    trial: g * per_graph + li * config.repeats + r,
                    instance: g,
                    n: inst.a.n(),
                    epsilon: inst.epsilon,
                    delta: inst.delta,
                    multiplier,
                    rho,
                    success,
                    distortion: dis,
                    runtime_s: start.elapsed().as_secs_f64(),
                    note,
                });
            }
        }
        Ok(out)
    })?;
    let mut records = Vec::with_capacity(config.graphs * per_graph);
    for chunk in per_instance {
        records.extend(chunk?);
    }

    let summary = config
        .multipliers
        .iter()
        .map(|&m| {
            let level: Vec<_> = records.iter().filter(|r| r.multiplier == m).collect();
            let successes = level.iter().filter(|r| r.success).count();
            LevelSummary {
                multiplier: m,
                trials: level.len(),
                successes,
                success_rate: rate(successes, level.len()),
            }
        })
        .collect();
    Ok(NoiseSweepOutcome {
        config: config.clone(),
        records,
        summary,
    })
}

fn rate(successes: usize, trials: usize) -> f64 {
    if trials == 0 {
        0.0
    } else {
        successes as f64 / trials as f64
    }
}

impl NoiseSweepOutcome {
    pub fn summary_csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\nmultiplier,success_rate,n_min,n_max,trials,successes\n");
        for l in &self.summary {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                l.multiplier, l.success_rate, self.config.n_min, self.config.n_max, l.trials, l.successes
            );
        }
        s
    }

    /// Per-trial rows; wall-clock runtimes only when asked, since they differ between runs.
    pub fn trials_csv(&self, with_runtime: bool) -> String {
        let mut s = format!("{CSV_HEADER}\ntrial,instance,n,epsilon,delta,multiplier,rho,success,distortion");
        s.push_str(if with_runtime { ",runtime_s,note\n" } else { ",note\n" });
        for r in &self.records {
            let _ = write!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.trial, r.instance, r.n, r.epsilon, r.delta, r.multiplier, r.rho, r.success, r.distortion
            );
            if with_runtime {
                let _ = write!(s, ",{}", r.runtime_s);
            }
            let _ = writeln!(s, ",{}", csv_field(&r.note));
        }
        s
    }
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedFamily {
    pub n: usize,
    /// Number of non-trivial symmetries.
    pub l: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedSweepConfig {
    pub families: Vec<SeedFamily>,
    /// Seed counts as fractions of `l`; `0` runs the unseeded relaxation.
    pub ratios: Vec<f64>,
    /// Instances per family.
    pub trials: usize,
    /// Seed penalty weights.
    pub mus: Vec<f64>,
    /// Redraw seeds until they pass the seed conditions.
    pub require_conditions: bool,
    pub rng_seed: u64,
    pub solver: SolverOptions,
}

impl Default for SeedSweepConfig {
    fn default() -> Self {
        Self {
            families: vec![
                SeedFamily { n: 6, l: 1 },
                SeedFamily { n: 9, l: 2 },
                SeedFamily { n: 8, l: 3 },
                SeedFamily { n: 8, l: 7 },
            ],
            ratios: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            trials: 50,
            mus: vec![1.0],
            require_conditions: true,
            rng_seed: 0,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedTrialRecord {
    pub family: usize,
    pub n: usize,
    pub l: usize,
    pub trial: usize,
    pub ratio: f64,
    pub seeds: usize,
    pub mu: f64,
    pub success: bool,
    pub distortion: f64,
    pub runtime_s: f64,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyRate {
    pub family: usize,
    pub n: usize,
    pub l: usize,
    pub ratio: f64,
    pub mu: f64,
    pub trials: usize,
    pub success_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedSweepOutcome {
    pub config: SeedSweepConfig,
    pub records: Vec<SeedTrialRecord>,
    pub families: Vec<FamilyRate>,
}

/// Seed count for a ratio of `l`, rounded up.
fn seed_count(ratio: f64, l: usize) -> usize {
    (ratio * l as f64 - 1e-9).ceil().max(0.0) as usize
}

/// Point seeds on `B` that break every symmetry and, if required, pass the seed conditions.
fn draw_seeds(
    b: &crate::graph::Graph,
    sym_b: &PermutationSet,
    q: usize,
    require_conditions: bool,
    rng: &mut ChaCha8Rng,
) -> Result<nalgebra::DMatrix<f64>> {
    for _ in 0..SEED_CONDITION_ATTEMPTS {
        let d = generate_seeds(b, sym_b, q, rng.random())?;
        if !require_conditions || check_seed_conditions(b, &d)?.pass {
            return Ok(d);
        }
    }
    Err(Error::SeedGeneration(format!(
        "no {q} point seeds passed the seed conditions in {SEED_CONDITION_ATTEMPTS} draws"
    )))
}

/// Recovery rate of seeded relaxation on graphs with known symmetries as
/// the number of seeds grows from zero to the number of symmetries.
///
/// Success means the rounded permutation is an isomorphism; with a full
/// set of seeds (ratio 1) it must be the planted permutation itself.
pub fn experiment_seed_sweep(config: &SeedSweepConfig, jobs: Option<usize>) -> Result<SeedSweepOutcome> {
    if config.ratios.iter().any(|r| !(0.0..=1.0).contains(r)) {
        return Err(Error::Domain("seed ratios must lie in [0, 1]".into()));
    }
    if config.mus.is_empty() || config.mus.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(Error::Domain("mus must be a nonempty list of positive weights".into()));
    }
    let jobs_total = config.families.len() * config.trials;
    let per_trial = run_parallel(jobs_total, jobs, |job| -> Result<Vec<SeedTrialRecord>> {
        let fi = job / config.trials.max(1);
        let trial = job % config.trials.max(1);
        let fam = config.families[fi];
        let mut rng = trial_rng(config.rng_seed, ((fi as u64) << 32) | trial as u64);
        let (a, sym_a) = random_symmetric_instance(fam.n, fam.l, rng.random())?;
        let planted = random_permutation(fam.n, rng.random());
        let b = apply_isomorphism(&a, &planted)?;
        let inverse = planted.inverse();
        let sym_b = PermutationSet::new(
            sym_a.elements.iter().map(|s| planted.compose(s).compose(&inverse)).collect(),
            SetKind::Symmetries,
        );
        let isos = PermutationSet::new(
            sym_a.elements.iter().map(|s| planted.compose(s)).collect(),
            SetKind::Isomorphisms,
        );
        let tol = exactness_tolerance(&a, &b);

        let mut out = Vec::new();
        for &ratio in &config.ratios {
            let q = seed_count(ratio, fam.l).min(fam.n);
            let judge = |perm: &Permutation| if ratio >= 1.0 { *perm == planted } else { isos.contains(perm) };
            let record = |mu: f64, outcome: std::result::Result<Permutation, String>, start: Instant| {
                let (success, dis, note) = match outcome {
                    Ok(perm) => {
                        let dis = distortion(&a, &b, &perm).unwrap_or(f64::NAN);
                        (judge(&perm) && dis <= tol, dis, String::new())
                    }
                    Err(e) => (false, f64::NAN, e),
                };
                SeedTrialRecord {
                    family: fi,
                    n: fam.n,
                    l: fam.l,
                    trial,
                    ratio,
                    seeds: q,
                    mu,
                    success,
                    distortion: dis,
                    runtime_s: start.elapsed().as_secs_f64(),
                    note,
                }
            };
            if q == 0 {
                let start = Instant::now();
                let outcome = solve_pseudo_stochastic(&a, &b, &config.solver)
                    .map(|sol| project_to_permutation(&sol.p).perm)
                    .map_err(|e| e.to_string());
                for &mu in &config.mus {
                    out.push(record(mu, outcome.clone(), start));
                }
                continue;
            }
            let drawn = draw_seeds(&b, &sym_b, q, config.require_conditions, &mut rng).map_err(|e| e.to_string());
            for &mu in &config.mus {
                let start = Instant::now();
                let outcome = drawn.clone().and_then(|d| {
                    SeedSet::covariant(d, &planted, mu)
                        .and_then(|seeds| solve_seeded(&a, &b, &seeds, &config.solver))
                        .map(|sol| project_to_permutation(&sol.p).perm)
                        .map_err(|e| e.to_string())
                });
                out.push(record(mu, outcome, start));
            }
        }
        Ok(out)
    })?;

    let mut records = Vec::with_capacity(jobs_total * config.ratios.len() * config.mus.len());
    for chunk in per_trial {
        records.extend(chunk?);
    }

    let mut families = Vec::new();
    for (fi, fam) in config.families.iter().enumerate() {
        for &ratio in &config.ratios {
            for &mu in &config.mus {
                let group: Vec<_> = records
                    .iter()
                    .filter(|r| r.family == fi && r.ratio == ratio && r.mu == mu)
                    .collect();
                let successes = group.iter().filter(|r| r.success).count();
                families.push(FamilyRate {
                    family: fi,
                    n: fam.n,
                    l: fam.l,
                    ratio,
                    mu,
                    trials: group.len(),
                    success_rate: rate(successes, group.len()),
                });
            }
        }
    }
    Ok(SeedSweepOutcome {
        config: config.clone(),
        records,
        families,
    })
}

impl SeedSweepOutcome {
    /// `(ratio, mu, mean, min, max)` of the per-family success rates.
    pub fn ratio_summary(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        let mut rows = Vec::new();
        for &ratio in &self.config.ratios {
            for &mu in &self.config.mus {
                let rates: Vec<f64> = self
                    .families
                    .iter()
                    .filter(|f| f.ratio == ratio && f.mu == mu)
                    .map(|f| f.success_rate)
                    .collect();
                if rates.is_empty() {
                    continue;
                }
                let mean = rates.iter().sum::<f64>() / rates.len() as f64;
                let min = rates.iter().copied().fold(f64::INFINITY, f64::min);
                let max = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                rows.push((ratio, mu, mean, min, max));
            }
        }
        rows
    }

    pub fn summary_csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\nratio,mu,mean_success,min_success,max_success,families\n");
        let families = self.config.families.len();
        for (ratio, mu, mean, min, max) in self.ratio_summary() {
            let _ = writeln!(s, "{ratio},{mu},{mean},{min},{max},{families}");
        }
        s
    }

    pub fn families_csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\nfamily,n,l,ratio,mu,trials,success_rate\n");
        for f in &self.families {
            let _ = writeln!(s, "{},{},{},{},{},{},{}", f.family, f.n, f.l, f.ratio, f.mu, f.trials, f.success_rate);
        }
        s
    }

    pub fn trials_csv(&self, with_runtime: bool) -> String {
        let mut s = format!("{CSV_HEADER}\nfamily,n,l,trial,ratio,seeds,mu,success,distortion");
        s.push_str(if with_runtime { ",runtime_s,note\n" } else { ",note\n" });
        for r in &self.records {
            let _ = write!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                r.family, r.n, r.l, r.trial, r.ratio, r.seeds, r.mu, r.success, r.distortion
            );
            if with_runtime {
                let _ = write!(s, ",{}", r.runtime_s);
            }
            let _ = writeln!(s, ",{}", csv_field(&r.note));
        }
        s
    }
}
