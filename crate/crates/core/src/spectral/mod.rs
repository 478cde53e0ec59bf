//! Symmetric eigendecomposition and spectral classification.

mod classify;
mod jacobi;

pub use classify::{
    classify, classify_default, strong_friendliness, unfriendliness_counts, Classification,
    Eigenspace, FriendlinessReport, SpectralTolerances, StrongFriendliness, GAP_REL_TOL,
    OVERLAP_TOL,
};
pub use jacobi::{eig_sym, SpectralDecomposition, MAX_SWEEPS, OFF_DIAGONAL_TOL, SIGN_TOL};
