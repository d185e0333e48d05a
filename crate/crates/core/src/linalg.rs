//! Small dense symmetric-matrix helpers shared by the estimators and solvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{Error, Result};

/// Anything that exposes a dense square matrix.
pub trait AsMatrix {
    fn as_matrix(&self) -> &DMatrix<f64>;
}

impl AsMatrix for DMatrix<f64> {
    fn as_matrix(&self) -> &DMatrix<f64> {
        self
    }
}

/// Eigenpairs sorted by descending eigenvalue.
#[derive(Debug, Clone)]
pub struct SortedEigen {
    pub values: DVector<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl SortedEigen {
    pub fn top_value(&self) -> f64 {
        self.values[0]
    }

    pub fn top_vector(&self) -> DVector<f64> {
        self.vectors.column(0).into_owned()
    }

    /// Gap between the two largest eigenvalues; infinite for 1×1 input.
    pub fn top_gap(&self) -> f64 {
        if self.values.len() < 2 {
            f64::INFINITY
        } else {
            self.values[0] - self.values[1]
        }
    }
}

/// Symmetric eigendecomposition with eigenvalues in descending order.
///
/// Ties keep the order returned by the underlying solver, sorted stably.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<SortedEigen> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    let p = m.nrows();
    let (raw_values, raw_vectors) = if p >= LARGE_DIM { eigen_large(m)? } else { eigen_small(m)? };
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| raw_values[b].total_cmp(&raw_values[a]));
    let values = DVector::from_iterator(p, idx.iter().map(|&k| raw_values[k]));
    let mut vectors = DMatrix::zeros(p, p);
    for (dst, &k) in idx.iter().enumerate() {
        vectors.set_column(dst, &raw_vectors.column(k));
    }
    Ok(SortedEigen { values, vectors })
}

/// From this dimension on, faer's blocked solver beats nalgebra's.
const LARGE_DIM: usize = 64;

fn eigen_small(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("symmetric eigensolver did not converge".into()))?;
    Ok((eig.eigenvalues.iter().copied().collect(), eig.eigenvectors))
}

fn eigen_large(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let p = m.nrows();
    let f = faer::Mat::<f64>::from_fn(p, p, |i, j| m[(i, j)]);
    let eig = f
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver failed: {e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    Ok(((0..p).map(|k| s[k]).collect(), DMatrix::from_fn(p, p, |i, j| u[(i, j)])))
}

/// Flips `v` so that its largest-magnitude entry (lowest index on ties) is positive.
pub fn orient(v: &mut DVector<f64>) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.len() > 0 && v[best] < 0.0 {
        v.neg_mut();
    }
}

/// Overwrites the strict lower triangle with the upper one.
pub fn mirror_upper(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for j in 0..p {
        for i in (j + 1)..p {
            m[(i, j)] = m[(j, i)];
        }
    }
}

/// Largest absolute asymmetry `|m_ij - m_ji|`.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let p = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..p {
        for i in (j + 1)..p {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Rejects non-square or asymmetric input. The tolerance is relative to the largest entry.
pub fn check_symmetric(m: &DMatrix<f64>, rel_tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let asym = asymmetry(m);
    if asym > rel_tol * scale {
        return Err(Error::invalid(format!(
            "matrix is not symmetric (max |m_ij - m_ji| = {asym:e})"
        )));
    }
    Ok(())
}

/// `Q diag(values) Qᵀ`, mirrored to exact symmetry.
pub fn reassemble(vectors: &DMatrix<f64>, values: &[f64]) -> DMatrix<f64> {
    let p = vectors.nrows();
    let mut out = DMatrix::zeros(p, p);
    for (k, &w) in values.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let q = vectors.column(k);
        for j in 0..p {
            let wj = w * q[j];
            for i in 0..=j {
                out[(i, j)] += q[i] * wj;
            }
        }
    }
    mirror_upper(&mut out);
    out
}

/// Sine of the angle between two nonzero vectors, ignoring sign.
pub fn sin_angle(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let c = a.dot(b).abs() / (a.norm() * b.norm());
    (1.0 - c.min(1.0).powi(2)).max(0.0).sqrt()
}
