//! Diagonal thresholding and DT-SIR.

use nalgebra::DMatrix;

use crate::linalg;
use crate::sim::SparseDirection;
use crate::sir::SirMatrix;
use crate::{Error, Result};

/// Entrywise signs in `{-1, 0, +1}` of an estimated loading vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedSupport {
    signs: Vec<i8>,
}

impl SignedSupport {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::invalid("signs must lie in {-1, 0, +1}"));
        }
        Ok(Self { signs })
    }

    pub fn zeros(p: usize) -> Self {
        Self { signs: vec![0; p] }
    }

    /// Signs of a real vector; exact zeros map to 0.
    pub fn from_values(values: &[f64]) -> Self {
        let signs = values
            .iter()
            .map(|&v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 })
            .collect();
        Self { signs }
    }

    pub fn of_direction(beta: &SparseDirection) -> Self {
        Self::from_values(beta.values())
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn p(&self) -> usize {
        self.signs.len()
    }

    pub fn s_hat(&self) -> usize {
        self.signs.iter().filter(|&&s| s != 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        self.signs.iter().enumerate().filter(|(_, s)| **s != 0).map(|(j, _)| j).collect()
    }

    pub fn flipped(&self) -> Self {
        Self { signs: self.signs.iter().map(|s| -s).collect() }
    }
}

/// True iff the two sign vectors agree up to a global flip.
pub fn signed_support_match(a: &SignedSupport, b: &SignedSupport) -> Result<bool> {
    if a.p() != b.p() {
        return Err(Error::invalid(format!("length mismatch: {} vs {}", a.p(), b.p())));
    }
    let same = a.signs == b.signs;
    let flipped = a.signs.iter().zip(&b.signs).all(|(x, y)| *x == -*y);
    Ok(same || flipped)
}

/// Indices of the `s` largest diagonal entries, ascending. Ties go to the lower index.
pub fn dt_select(v: &SirMatrix, s: usize) -> Result<Vec<usize>> {
    top_k_by_score(&v.diagonal(), s)
}

pub(crate) fn top_k_by_score(score: &[f64], s: usize) -> Result<Vec<usize>> {
    let p = score.len();
    if s == 0 || s > p {
        return Err(Error::invalid(format!("sparsity must satisfy 1 <= s <= p, got s = {s}, p = {p}")));
    }
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
    idx.truncate(s);
    idx.sort_unstable();
    Ok(idx)
}

/// DT selection, then the signs of the principal eigenvector of the
/// selected principal submatrix. No magnitude threshold is applied.
pub fn dt_sir(v: &SirMatrix, s: usize) -> Result<SignedSupport> {
    let selected = dt_select(v, s)?;
    let full = v.matrix();
    let sub = DMatrix::from_fn(s, s, |a, b| full[(selected[a], selected[b])]);
    let mut top = linalg::sym_eigen(&sub)?.top_vector();
    linalg::orient(&mut top);
    let mut signs = vec![0i8; v.dim()];
    for (k, &j) in selected.iter().enumerate() {
        signs[j] = if top[k] > 0.0 {
            1
        } else if top[k] < 0.0 {
            -1
        } else {
            0
        };
    }
    Ok(SignedSupport { signs })
}
