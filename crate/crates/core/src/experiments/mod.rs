//! Monte-Carlo harness: efficiency curves over the rescaled sample size
//! `Γ = n / (s log(p − s))` and the sliced-stability diagnostic.

mod curve;
mod stability;

pub use curve::{
    n_for_gamma, run_curve, run_curve_with_workers, CurveConfig, CurvePoint, EfficiencyCurve, Method,
    SdpSettings, SparsityRule,
};
pub use stability::{fit_decay, stability_diagnostic, DecayFit, StabilityDiagnostic, INNER_RESOLUTION};
