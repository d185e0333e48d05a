//! Slicing by the response and the sliced inverse regression moment matrix.

use nalgebra::DMatrix;
use rand::seq::index;

use crate::linalg::{self, mirror_upper};
use crate::rng;
use crate::sim::Dataset;
use crate::{Error, Result};

/// Data sorted by the response and cut into `h` slices of `m` rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SlicedSample {
    pub h: usize,
    pub m: usize,
    /// `h × p`; row `k` is the mean design row of slice `k`.
    pub slice_means: DMatrix<f64>,
    pub dropped: usize,
    /// Original row indices of the kept observations in ascending response
    /// order. Slice `k` is `order[k*m .. (k+1)*m]`.
    pub order: Vec<usize>,
}

impl SlicedSample {
    pub fn p(&self) -> usize {
        self.slice_means.ncols()
    }

    pub fn slice_rows(&self, k: usize) -> &[usize] {
        &self.order[k * self.m..(k + 1) * self.m]
    }
}

/// Stable sort by `(y, index)`, seeded random discard of `n mod h` ranks,
/// then per-slice column means.
pub fn slice_data(data: &Dataset, h: usize, seed: u64) -> Result<SlicedSample> {
    let n = data.n();
    if h < 2 || n < 2 * h {
        return Err(Error::invalid(format!("slicing needs h >= 2 and n >= 2h, got h = {h}, n = {n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    // sort_by is stable, so ties stay in index order.
    order.sort_by(|&a, &b| data.y[a].total_cmp(&data.y[b]));

    let m = n / h;
    let dropped = n - h * m;
    if dropped > 0 {
        let mut rng = rng::stream(seed);
        let mut discard = vec![false; n];
        for pos in index::sample(&mut rng, n, dropped) {
            discard[pos] = true;
        }
        order = order.into_iter().zip(discard).filter(|(_, d)| !d).map(|(i, _)| i).collect();
    }

    let p = data.p();
    let mut slice_means = DMatrix::zeros(h, p);
    for k in 0..h {
        for &i in &order[k * m..(k + 1) * m] {
            for j in 0..p {
                slice_means[(k, j)] += data.x[(i, j)];
            }
        }
    }
    slice_means /= m as f64;
    Ok(SlicedSample { h, m, slice_means, dropped, order })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SirMode {
    /// Average outer product of the slice means.
    Raw,
    /// Same after removing the grand mean of the slice means.
    Centered,
    /// Centered, conjugated by the inverse square root of the sample covariance.
    Whitened,
}

impl SirMode {
    pub fn name(self) -> &'static str {
        match self {
            SirMode::Raw => "raw",
            SirMode::Centered => "centered",
            SirMode::Whitened => "whitened",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "raw" => Ok(SirMode::Raw),
            "centered" => Ok(SirMode::Centered),
            "whitened" => Ok(SirMode::Whitened),
            other => Err(Error::invalid(format!("unknown estimator mode '{other}'"))),
        }
    }
}

/// Symmetric `p × p` SIR moment estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct SirMatrix {
    v: DMatrix<f64>,
    mode: SirMode,
    h: Option<usize>,
}

impl SirMatrix {
    /// Wraps a matrix computed elsewhere. The strict lower triangle is
    /// replaced by the upper one after checking symmetry to 1e-10 relative.
    pub fn from_matrix(mut v: DMatrix<f64>, mode: SirMode) -> Result<Self> {
        linalg::check_symmetric(&v, 1e-10)?;
        if v.nrows() == 0 {
            return Err(Error::invalid("matrix must be at least 1x1"));
        }
        mirror_upper(&mut v);
        Ok(Self { v, mode, h: None })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.v
    }

    pub fn mode(&self) -> SirMode {
        self.mode
    }

    /// Number of slices, when built from data.
    pub fn slices(&self) -> Option<usize> {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.v[(j, j)]).collect()
    }

    /// Same matrix scaled by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { v: &self.v * c, mode: self.mode, h: self.h }
    }
}

impl linalg::AsMatrix for SirMatrix {
    fn as_matrix(&self) -> &DMatrix<f64> {
        &self.v
    }
}

fn outer_average(means: &DMatrix<f64>) -> DMatrix<f64> {
    let (h, p) = means.shape();
    let mut v = DMatrix::zeros(p, p);
    for k in 0..p {
        for j in 0..=k {
            let mut acc = 0.0;
            for r in 0..h {
                acc += means[(r, j)] * means[(r, k)];
            }
            v[(j, k)] = acc / h as f64;
        }
    }
    mirror_upper(&mut v);
    v
}

fn centered_means(sliced: &SlicedSample) -> DMatrix<f64> {
    let mut means = sliced.slice_means.clone();
    let h = means.nrows() as f64;
    for j in 0..means.ncols() {
        let grand = means.column(j).sum() / h;
        means.column_mut(j).add_scalar_mut(-grand);
    }
    means
}

/// Raw or centered SIR matrix from sliced data.
pub fn sir_matrix(sliced: &SlicedSample, mode: SirMode) -> Result<SirMatrix> {
    let v = match mode {
        SirMode::Raw => outer_average(&sliced.slice_means),
        SirMode::Centered => outer_average(&centered_means(sliced)),
        SirMode::Whitened => {
            return Err(Error::invalid("the whitened matrix needs the full dataset; use sir_matrix_whitened"))
        }
    };
    Ok(SirMatrix { v, mode, h: Some(sliced.h) })
}

/// Lower bound on eigenvalues accepted by [`inv_sqrt_sym`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EigFloor {
    Absolute(f64),
    /// Multiple of the largest eigenvalue.
    Relative(f64),
}

impl Default for EigFloor {
    fn default() -> Self {
        EigFloor::Relative(1e-10)
    }
}

/// Symmetric inverse square root `QΛ^{-1/2}Qᵀ`.
pub fn inv_sqrt_sym(sigma: &DMatrix<f64>, floor: EigFloor) -> Result<DMatrix<f64>> {
    linalg::check_symmetric(sigma, 1e-10)?;
    let eig = linalg::sym_eigen(sigma)?;
    let floor = match floor {
        EigFloor::Absolute(f) => f,
        EigFloor::Relative(r) => r * eig.top_value().max(0.0),
    };
    let smallest = eig.values[eig.values.len() - 1];
    if !(smallest >= floor) || smallest <= 0.0 {
        return Err(Error::NotPositiveDefinite { eigenvalue: smallest, floor });
    }
    let scaled: Vec<f64> = eig.values.iter().map(|w| 1.0 / w.sqrt()).collect();
    Ok(linalg::reassemble(&eig.vectors, &scaled))
}

/// Biased (`1/n`) sample covariance of the rows of `x`.
pub fn sample_covariance(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() as f64;
    let mut centered = x.clone();
    for j in 0..x.ncols() {
        let mean = x.column(j).sum() / n;
        centered.column_mut(j).add_scalar_mut(-mean);
    }
    let mut cov = centered.tr_mul(&centered) / n;
    mirror_upper(&mut cov);
    cov
}

/// Centered SIR matrix conjugated by `Σ̂^{-1/2}`.
pub fn sir_matrix_whitened(data: &Dataset, h: usize, seed: u64, floor: EigFloor) -> Result<SirMatrix> {
    if data.n() <= data.p() {
        return Err(Error::RankDeficient { n: data.n(), p: data.p() });
    }
    let w = inv_sqrt_sym(&sample_covariance(&data.x), floor)?;
    let sliced = slice_data(data, h, seed)?;
    let centered = sir_matrix(&sliced, SirMode::Centered)?;
    let mut v = &w * centered.matrix() * &w;
    mirror_upper(&mut v);
    Ok(SirMatrix { v, mode: SirMode::Whitened, h: Some(h) })
}

/// Any variant straight from data.
pub fn compute_sir(data: &Dataset, h: usize, seed: u64, mode: SirMode) -> Result<SirMatrix> {
    match mode {
        SirMode::Whitened => sir_matrix_whitened(data, h, seed, EigFloor::default()),
        _ => sir_matrix(&slice_data(data, h, seed)?, mode),
    }
}
