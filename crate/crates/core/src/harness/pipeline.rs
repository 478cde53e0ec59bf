use std::time::Instant;

use serde::Serialize;

use crate::bounds::{theorem3_bound, RecoveryBound};
use crate::error::Result;
use crate::graph::{distortion, Graph, Permutation};
use crate::projection::project_to_permutation;
use crate::solver::{
    certify_uniqueness, solve_doubly_stochastic, solve_pseudo_stochastic, solve_seeded, ConstraintKind,
    RelaxedSolution, SeedSet, SolverOptions, UniquenessCertificate,
};
use crate::spectral::{classify_default, eig_sym, FriendlinessReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ExactIsomorphism,
    WithinRho,
    NotIsomorphicCertified,
    Inconclusive,
}

#[derive(Clone, Debug, Default)]
pub struct RgmOptions {
    pub solver: SolverOptions,
    pub seeds: Option<SeedSet>,
    /// Solve on `A/σ_A`, `B/σ_A`.
    pub normalize: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub classify_s: f64,
    pub solve_s: f64,
    pub project_s: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchResult {
    pub relaxed: RelaxedSolution,
    pub perm: Permutation,
    pub distortion: f64,
    /// Recovery bound for `A`, in the units of the input graphs.
    pub bound: Option<RecoveryBound>,
    pub verdict: Verdict,
    pub friendly_a: bool,
    pub friendly_b: bool,
    /// Spectral radius of `A`, the factor applied when normalizing.
    pub scale: f64,
    pub certificate: Option<UniquenessCertificate>,
    pub timings: Timings,
}

/// Distortion below which a permutation counts as an exact isomorphism.
pub fn exactness_tolerance(a: &Graph, b: &Graph) -> f64 {
    1e-7 * (1.0 + a.frobenius_norm() + b.frobenius_norm())
}

/// Bound on `ρ` in the units of `A`: the normalized bound of `A/σ` times `σ`.
fn recovery_bound(report: &FriendlinessReport, n: usize) -> Option<RecoveryBound> {
    if !report.is_friendly || report.sigma == 0.0 || n < 2 {
        return None;
    }
    let sigma = report.sigma;
    let mut b = theorem3_bound(report.epsilon, report.delta / sigma, n).ok()?;
    b.rho_max *= sigma;
    b.spectral_term *= sigma;
    b.sqrt2_sigma *= sigma;
    b.normalized = false;
    Some(b)
}

/// Relaxed graph matching: solve the convex relaxation, round with the
/// Hungarian method and judge the result.
///
/// Verdicts:
/// * `exact_isomorphism`: zero distortion (within tolerance) and both graphs
///   friendly, or a full-rank seeded certificate;
/// * `within_rho`: `A` is friendly and the distortion is below its recovery
///   bound, so the permutation is the exact matching optimum;
/// * `not_isomorphic_certified`: both graphs friendly and positive distortion;
/// * `inconclusive` otherwise.
pub fn rgm(a: &Graph, b: &Graph, opts: &RgmOptions) -> Result<MatchResult> {
    let start = Instant::now();
    let rep_a = classify_default(&eig_sym(a)?).report;
    let rep_b = classify_default(&eig_sym(b)?).report;
    let scale = rep_a.sigma;
    let classify_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let (sa, sb) = if opts.normalize && scale > 0.0 {
        (a.scaled(1.0 / scale), b.scaled(1.0 / scale))
    } else {
        (a.clone(), b.clone())
    };
    let relaxed = match (&opts.seeds, opts.solver.constraint) {
        (Some(seeds), _) => solve_seeded(&sa, &sb, seeds, &opts.solver)?,
        (None, ConstraintKind::PseudoStochastic) => solve_pseudo_stochastic(&sa, &sb, &opts.solver)?,
        (None, ConstraintKind::DoublyStochastic) => solve_doubly_stochastic(&sa, &sb, &opts.solver)?,
    };
    let solve_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let perm = project_to_permutation(&relaxed.p).perm;
    let dis = distortion(a, b, &perm)?;
    let project_s = start.elapsed().as_secs_f64();

    let bound = recovery_bound(&rep_a, a.n());
    let certificate = match &opts.seeds {
        Some(seeds) => Some(certify_uniqueness(b, Some(seeds), &opts.solver)?),
        None => None,
    };
    let exact = dis <= exactness_tolerance(a, b);
    let both_friendly = rep_a.is_friendly && rep_b.is_friendly;
    let certified = certificate.as_ref().is_some_and(|c| c.full_rank);
    let verdict = if exact && (both_friendly || certified) {
        Verdict::ExactIsomorphism
    } else if bound.is_some_and(|bd| dis < bd.rho_max) {
        Verdict::WithinRho
    } else if both_friendly && !exact {
        Verdict::NotIsomorphicCertified
    } else {
        Verdict::Inconclusive
    };

    Ok(MatchResult {
        relaxed,
        perm,
        distortion: dis,
        bound,
        verdict,
        friendly_a: rep_a.is_friendly,
        friendly_b: rep_b.is_friendly,
        scale,
        certificate,
        timings: Timings {
            classify_s,
            solve_s,
            project_s,
        },
    })
}
