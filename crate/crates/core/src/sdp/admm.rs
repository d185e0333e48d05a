//! Splitting backend.
//!
//! Writes the program as `min −tr(AX) + I(X ∈ spectraplex) + λ‖Y‖₁` subject to
//! `X = Y` and runs scaled ADMM with penalty `1/step`:
//!
//! ```text
//! X ← Π(Y − U + step·A)
//! Y ← soft(X + U, λ·step)
//! U ← U + X − Y
//! ```
//!
//! The returned iterate is `X`, which is feasible at every step.

use nalgebra::DMatrix;

use super::spectraplex::project_spectraplex;
use super::{Iterate, SdpConfig};
use crate::Result;

fn soft_threshold(m: &DMatrix<f64>, level: f64) -> DMatrix<f64> {
    m.map(|v| v.signum() * (v.abs() - level).max(0.0))
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
}

pub(super) fn solve(a: &DMatrix<f64>, cfg: &SdpConfig, step: f64) -> Result<Iterate> {
    let p = a.nrows();
    let mut x = DMatrix::identity(p, p) / p as f64;
    let mut y = x.clone();
    let mut u = DMatrix::zeros(p, p);
    let scaled_a = a * step;
    let level = cfg.lambda * step;

    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        iterations += 1;
        let x_next = project_spectraplex(&(&y - &u + &scaled_a))?;
        let y_next = soft_threshold(&(&x_next + &u), level);
        u += &x_next - &y_next;

        residual = max_abs_diff(&x_next, &x)
            .max(max_abs_diff(&x_next, &y_next))
            .max(max_abs_diff(&y_next, &y));
        x = x_next;
        y = y_next;
        if residual < cfg.tol {
            return Ok(Iterate { z: x, iterations, converged: true, residual });
        }
    }
    Ok(Iterate { z: x, iterations, converged: false, residual })
}
