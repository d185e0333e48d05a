//! Fixtures shared by the benchmarks.

use sparsir_core::rng::derive_seed;
use sparsir_core::{compute_sir, generate_beta, sample_sim, BetaScheme, Link, ModelSpec, SirMatrix, SirMode};

/// SIR matrix for the `atan` benchmark model at `p`, `s = √p`, `n = 10·s·ln(p − s)`.
pub fn sir_fixture(p: usize, seed: u64) -> SirMatrix {
    let s = ((p as f64).sqrt().round() as usize).max(1);
    let n = (10.0 * s as f64 * ((p - s) as f64).ln()).ceil() as usize;
    let beta = generate_beta(p, s, BetaScheme::Fixed, 0).expect("valid sparsity");
    let data = sample_sim(&ModelSpec::named(Link::Atan2), &beta, n.max(40), derive_seed(seed, &[1])).expect("valid sample");
    compute_sir(&data, 10, seed, SirMode::Centered).expect("enough rows to slice")
}
