//! End-to-end matching pipeline, random instance generators and the two
//! experiment protocols.

mod experiment;
mod generators;
mod pipeline;

pub use experiment::{
    experiment_noise_sweep, experiment_seed_sweep, FamilyRate, LevelSummary, NoiseSweepConfig,
    NoiseSweepOutcome, SeedFamily, SeedSweepConfig, SeedSweepOutcome, SeedTrialRecord,
    TrialRecord, CSV_HEADER,
};
pub use generators::{add_noise, random_friendly_graph, random_permutation, random_symmetric_instance, FRIENDLY_RESAMPLE_CAP};
pub use pipeline::{exactness_tolerance, rgm, MatchResult, RgmOptions, Timings, Verdict};
