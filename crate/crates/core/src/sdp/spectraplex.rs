use nalgebra::DMatrix;

use crate::linalg;
use crate::Result;

/// Euclidean projection of `v` onto the probability simplex.
///
/// Sort-based: find the largest `k` with `u_k > (Σ_{i≤k} u_i − 1)/k` for the
/// descending sort `u`, then shift by that threshold and clip at zero.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Frobenius projection onto `{Z ⪰ 0, tr Z = 1}`.
pub fn project_spectraplex(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    linalg::check_symmetric(m, 1e-10)?;
    let eig = linalg::sym_eigen(m)?;
    let w = project_simplex(eig.values.as_slice());
    Ok(linalg::reassemble(&eig.vectors, &w))
}
