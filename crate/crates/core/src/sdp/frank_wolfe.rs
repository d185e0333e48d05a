//! Conditional-gradient backend.
//!
//! The ℓ1 penalty is replaced by its Huber smoothing with width `μ`, whose
//! gradient is `clamp(Z/μ, −1, 1)`. Each step moves toward the rank-one atom
//! `vvᵀ` built from the top eigenvector of `A − λ·clamp(Z/μ, −1, 1)`, with an
//! exact line search on the concave smoothed objective. `μ` is halved
//! whenever the Frank–Wolfe gap drops below a tenth of it (or below the
//! tolerance), down to a floor tied to the tolerance.

use nalgebra::DMatrix;

use super::{Iterate, SdpConfig};
use crate::linalg;
use crate::Result;

const MU_START: f64 = 0.1;
const SHRINK_AT: f64 = 0.1;
const LINE_SEARCH_STEPS: usize = 60;

fn smoothed_gradient(a: &DMatrix<f64>, z: &DMatrix<f64>, lambda: f64, mu: f64) -> DMatrix<f64> {
    a - z.map(|v| (v / mu).clamp(-1.0, 1.0)) * lambda
}

fn slope(a: &DMatrix<f64>, z: &DMatrix<f64>, d: &DMatrix<f64>, lambda: f64, mu: f64, t: f64) -> f64 {
    let mut acc = 0.0;
    for ((aij, zij), dij) in a.iter().zip(z.iter()).zip(d.iter()) {
        let w = zij + t * dij;
        acc += (aij - lambda * (w / mu).clamp(-1.0, 1.0)) * dij;
    }
    acc
}

fn atom(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let v = linalg::sym_eigen(g)?.top_vector();
    Ok(&v * v.transpose())
}

pub(super) fn solve(a: &DMatrix<f64>, cfg: &SdpConfig) -> Result<Iterate> {
    let mu_floor = (cfg.tol * 1e-2).max(1e-12);
    let mut mu = MU_START.max(mu_floor);
    let mut z = atom(a)?;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let g = smoothed_gradient(a, &z, cfg.lambda, mu);
        let d = atom(&g)? - &z;
        gap = g.dot(&d);

        if gap <= cfg.tol && mu <= mu_floor {
            return Ok(Iterate { z, iterations, converged: true, residual: gap.max(0.0) });
        }
        if gap <= (SHRINK_AT * mu).max(cfg.tol) && mu > mu_floor {
            mu = (mu * 0.5).max(mu_floor);
            continue;
        }
        if gap <= 0.0 {
            continue;
        }

        let t = if slope(a, &z, &d, cfg.lambda, mu, 1.0) >= 0.0 {
            1.0
        } else {
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..LINE_SEARCH_STEPS {
                let mid = 0.5 * (lo + hi);
                if slope(a, &z, &d, cfg.lambda, mu, mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        z += d * t;
        linalg::mirror_upper(&mut z);
    }
    Ok(Iterate { z, iterations, converged: false, residual: gap.max(0.0) })
}
