//! The trace-constrained, ℓ1-penalized semidefinite relaxation
//!
//! ```text
//! maximize    tr(AZ) − λ Σ_ij |Z_ij|
//! subject to  tr(Z) = 1,  Z ⪰ 0
//! ```
//!
//! solved by a splitting method ([`SdpBackend::Splitting`]) or by conditional
//! gradient on a smoothed objective ([`SdpBackend::ConditionalGradient`]).
//! Both backends only ever return points of the spectraplex, so a solution
//! is feasible even when the iteration budget runs out.

mod admm;
mod certificate;
mod frank_wolfe;
mod spectraplex;

use nalgebra::DMatrix;

pub use certificate::check_rank1_certificate;
pub use spectraplex::{project_simplex, project_spectraplex};

use crate::dt::{top_k_by_score, SignedSupport};
use crate::linalg::{self, AsMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SdpBackend {
    Splitting,
    ConditionalGradient,
}

impl SdpBackend {
    pub fn name(self) -> &'static str {
        match self {
            SdpBackend::Splitting => "splitting",
            SdpBackend::ConditionalGradient => "conditional-gradient",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "splitting" | "admm" => Ok(SdpBackend::Splitting),
            "conditional-gradient" | "cg" | "frank-wolfe" => Ok(SdpBackend::ConditionalGradient),
            other => Err(Error::invalid(format!("unknown SDP backend '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpConfig {
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
    /// Splitting step (inverse penalty). `None` means `1/‖A‖₂`.
    pub step: Option<f64>,
    pub backend: SdpBackend,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self { lambda: 0.0, max_iter: 20_000, tol: 1e-7, step: None, backend: SdpBackend::Splitting }
    }
}

impl SdpConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self { lambda, ..Self::default() }
    }

    pub fn backend(mut self, backend: SdpBackend) -> Self {
        self.backend = backend;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(step) = self.step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::invalid(format!("step must be positive, got {step}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub z: DMatrix<f64>,
    /// `tr(AZ) − λ Σ|Z_ij|` at `z`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Splitting: largest entrywise change or primal/dual mismatch of the
    /// last step. Conditional gradient: the final Frank–Wolfe gap.
    pub residual: f64,
    /// `1 − λ_max(z)`.
    pub rank1_gap: f64,
}

pub(crate) struct Iterate {
    z: DMatrix<f64>,
    iterations: usize,
    converged: bool,
    residual: f64,
}

/// `tr(AZ) − λ Σ|Z_ij|`.
pub fn objective(a: &DMatrix<f64>, z: &DMatrix<f64>, lambda: f64) -> f64 {
    a.dot(z) - lambda * z.iter().map(|v| v.abs()).sum::<f64>()
}

pub fn sdp_solve<M: AsMatrix>(a: &M, cfg: &SdpConfig) -> Result<SdpSolution> {
    let a = a.as_matrix();
    linalg::check_symmetric(a, 1e-10)?;
    if a.nrows() == 0 {
        return Err(Error::invalid("matrix must be at least 1x1"));
    }
    cfg.validate()?;
    let it = match cfg.backend {
        SdpBackend::Splitting => {
            let step = match cfg.step {
                Some(s) => s,
                None => {
                    let norm = linalg::sym_eigen(a)?.values.amax();
                    if norm > 0.0 {
                        1.0 / norm
                    } else {
                        1.0
                    }
                }
            };
            admm::solve(a, cfg, step)?
        }
        SdpBackend::ConditionalGradient => frank_wolfe::solve(a, cfg)?,
    };
    let top = linalg::sym_eigen(&it.z)?.top_value();
    Ok(SdpSolution {
        objective: objective(a, &it.z, cfg.lambda),
        rank1_gap: (1.0 - top).clamp(0.0, 1.0),
        z: it.z,
        iterations: it.iterations,
        converged: it.converged,
        residual: it.residual,
    })
}

/// Relative eigen-gap under which the principal eigenvector is treated as
/// undefined.
const DEGENERATE_GAP: f64 = 1e-9;

/// Principal eigenvector of `z`, oriented largest-entry-positive, or `None`
/// when the top eigenvalue is (numerically) repeated.
pub fn principal_direction(z: &DMatrix<f64>) -> Result<Option<nalgebra::DVector<f64>>> {
    let eig = linalg::sym_eigen(z)?;
    if eig.top_gap() <= DEGENERATE_GAP * eig.top_value().abs().max(1.0) {
        return Ok(None);
    }
    let mut v = eig.top_vector();
    linalg::orient(&mut v);
    Ok(Some(v))
}

/// Signs of the principal eigenvector of the solution, with entries below
/// `1/(2√s)` in magnitude set to zero. A repeated top eigenvalue gives an
/// empty support.
pub fn sdp_sign_recover(sol: &SdpSolution, s: usize) -> Result<SignedSupport> {
    let p = sol.z.nrows();
    if s == 0 || s > p {
        return Err(Error::invalid(format!("sparsity must satisfy 1 <= s <= p, got s = {s}, p = {p}")));
    }
    let Some(v) = principal_direction(&sol.z)? else {
        return Ok(SignedSupport::zeros(p));
    };
    let threshold = 0.5 / (s as f64).sqrt();
    let thresholded: Vec<f64> = v.iter().map(|&x| if x.abs() < threshold { 0.0 } else { x }).collect();
    Ok(SignedSupport::from_values(&thresholded))
}

/// Half the `s`-th largest diagonal entry, floored at zero.
pub fn default_lambda<M: AsMatrix>(a: &M, s: usize) -> Result<f64> {
    let a = a.as_matrix();
    let diag: Vec<f64> = (0..a.nrows()).map(|j| a[(j, j)]).collect();
    let top = top_k_by_score(&diag, s)?;
    let sth = top.iter().map(|&j| diag[j]).fold(f64::INFINITY, f64::min);
    Ok((0.5 * sth).max(0.0))
}
