//! Signed support recovery for sparse single index models.
//!
//! The crate covers the full pipeline for models `Y = f(Xᵀβ, ε)` with a
//! standard Gaussian design and an `s`-sparse unit loading vector `β`:
//!
//! - [`sim`]: synthetic loading vectors, samples, and a one-dimensional
//!   Monte-Carlo oracle for the signal constant `C_V`.
//! - [`sir`]: slicing by the response and the sliced inverse regression
//!   moment matrix in raw, centered, and whitened form.
//! - [`dt`]: diagonal thresholding and DT-SIR signed support recovery.
//! - [`sdp`]: the trace-constrained, ℓ1-penalized semidefinite relaxation,
//!   two first-order backends, and the rank-one optimality certificate.
//! - [`experiments`]: seeded efficiency-curve sweeps over the rescaled
//!   sample size and the sliced-stability diagnostic.

pub mod dt;
mod error;
pub mod experiments;
pub mod linalg;
pub mod rng;
pub mod sdp;
pub mod sim;
pub mod sir;

pub use dt::{dt_select, dt_sir, signed_support_match, SignedSupport};
pub use error::{Error, Result};
pub use experiments::{
    fit_decay, run_curve, run_curve_with_workers, stability_diagnostic, CurveConfig, CurvePoint,
    DecayFit, EfficiencyCurve, Method, SparsityRule, StabilityDiagnostic,
};
pub use sdp::{
    check_rank1_certificate, default_lambda, project_spectraplex, sdp_sign_recover, sdp_solve,
    SdpBackend, SdpConfig, SdpSolution,
};
pub use sim::{
    estimate_cv, generate_beta, sample_sim, BetaScheme, Dataset, Link, ModelSpec, Provenance,
    SparseDirection,
};
pub use sir::{
    compute_sir, inv_sqrt_sym, sir_matrix, sir_matrix_whitened, slice_data, EigFloor, SirMatrix,
    SirMode, SlicedSample,
};

/// Re-exported so downstream crates build matrices with the same type.
pub use nalgebra::DMatrix;
