//! Rank-one optimality certificate.
//!
//! For a rank-one solution `ẑẑᵀ`, build a sign matrix `U` that equals
//! `sign(ẑ_i)sign(ẑ_j)` on the support block and `A_ij/λ` elsewhere. If every
//! off-block `|A_ij| ≤ λ` (so `U` is a valid subgradient of the ℓ1 term) and
//! `ẑ` is a principal eigenvector of `A − λU`, then `ẑẑᵀ` solves the program.

use nalgebra::{DMatrix, DVector};

use super::SdpSolution;
use crate::linalg::{self, AsMatrix};
use crate::{Error, Result};

/// Eigenvalues within this relative distance of the top one span the principal eigenspace.
const EIGENSPACE_TOL: f64 = 1e-9;

pub fn check_rank1_certificate<M: AsMatrix>(
    a: &M,
    lambda: f64,
    sol: &SdpSolution,
    tol: f64,
) -> Result<bool> {
    let a = a.as_matrix();
    linalg::check_symmetric(a, 1e-10)?;
    if a.shape() != sol.z.shape() {
        return Err(Error::invalid("matrix and solution dimensions differ"));
    }
    if !(sol.rank1_gap < tol) {
        return Err(Error::CertificateUndefined { rank1_gap: sol.rank1_gap, tol });
    }
    let p = a.nrows();
    let mut z = linalg::sym_eigen(&sol.z)?.top_vector();
    linalg::orient(&mut z);
    let on_block: Vec<bool> = z.iter().map(|v| v.abs() > tol).collect();

    let mut u = DMatrix::zeros(p, p);
    let mut feasible = true;
    for i in 0..p {
        for j in 0..p {
            u[(i, j)] = if on_block[i] && on_block[j] {
                z[i].signum() * z[j].signum()
            } else {
                if a[(i, j)].abs() > lambda * (1.0 + tol) {
                    feasible = false;
                }
                if lambda > 0.0 {
                    (a[(i, j)] / lambda).clamp(-1.0, 1.0)
                } else {
                    0.0
                }
            };
        }
    }
    if !feasible {
        return Ok(false);
    }

    let shifted = a - u * lambda;
    let z_block = DVector::from_iterator(p, z.iter().zip(&on_block).map(|(v, b)| if *b { *v } else { 0.0 }));
    let eig = linalg::sym_eigen(&shifted)?;
    let top = eig.top_value();
    let cutoff = top - EIGENSPACE_TOL * top.abs().max(1.0);
    let mut projection = DVector::zeros(p);
    for k in 0..p {
        if eig.values[k] < cutoff {
            break;
        }
        let q = eig.vectors.column(k);
        projection += q * q.dot(&z_block);
    }
    let norm = z_block.norm();
    let sin = ((&z_block - &projection).norm() / norm).min(1.0);
    Ok(sin <= tol)
}
