//! Synthetic single index models with a standard Gaussian design.
//!
//! A [`ModelSpec`] pairs a link `f(u, ε)` with the standard deviation of the
//! additive Gaussian error. [`generate_beta`] builds the sparse unit loading
//! vector and [`sample_sim`] draws `(Y, X)` with `X ~ N_p(0, I_p)`.
//! [`estimate_cv`] is a one-dimensional Monte-Carlo estimate of
//! `C_V = Var(E[Z | f(Z, ε)])`, the per-coordinate signal constant.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{self, RNG_ALGORITHM};
use crate::{Error, Result};

pub type LinkFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Link function `f(u, ε)` of a single index model.
#[derive(Clone)]
pub enum Link {
    /// `u + ε`
    Linear,
    /// `u + sin(u) + ε`
    SinPlusIdentity,
    /// `2 atan(u) + ε`
    Atan2,
    /// `u³ + ε`
    Cubic,
    /// `sinh(u) + ε`
    Sinh,
    /// Caller-supplied scalar function of `(u, ε)`.
    Custom { name: String, f: Arc<LinkFn> },
}

impl Link {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Link::Custom { name: name.into(), f: Arc::new(f) }
    }

    pub fn eval(&self, u: f64, eps: f64) -> f64 {
        match self {
            Link::Linear => u + eps,
            Link::SinPlusIdentity => u + u.sin() + eps,
            Link::Atan2 => 2.0 * u.atan() + eps,
            Link::Cubic => u * u * u + eps,
            Link::Sinh => u.sinh() + eps,
            Link::Custom { f, .. } => f(u, eps),
        }
    }

    /// Short name used in configuration files and CSV output.
    pub fn name(&self) -> &str {
        match self {
            Link::Linear => "linear",
            Link::SinPlusIdentity => "sin",
            Link::Atan2 => "atan",
            Link::Cubic => "cubic",
            Link::Sinh => "sinh",
            Link::Custom { name, .. } => name,
        }
    }

    /// Parses one of the built-in link names.
    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "linear" => Ok(Link::Linear),
            "sin" => Ok(Link::SinPlusIdentity),
            "atan" => Ok(Link::Atan2),
            "cubic" => Ok(Link::Cubic),
            "sinh" => Ok(Link::Sinh),
            other => Err(Error::invalid(format!(
                "unknown model '{other}' (expected linear, sin, atan, cubic or sinh)"
            ))),
        }
    }

    /// The four nonlinear benchmark links.
    pub fn benchmarks() -> [Link; 4] {
        [Link::SinPlusIdentity, Link::Atan2, Link::Cubic, Link::Sinh]
    }
}

impl fmt::Debug for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Link::Custom { name, .. } => write!(f, "Custom({name})"),
            other => f.write_str(other.name()),
        }
    }
}

/// A single index model family: link plus Gaussian noise scale.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub link: Link,
    pub noise_sd: f64,
}

impl ModelSpec {
    pub fn new(link: Link, noise_sd: f64) -> Result<Self> {
        if !(noise_sd >= 0.0 && noise_sd.is_finite()) {
            return Err(Error::invalid(format!("noise_sd must be finite and >= 0, got {noise_sd}")));
        }
        Ok(Self { link, noise_sd })
    }

    /// A named link with unit noise, as in the benchmark models.
    pub fn named(link: Link) -> Self {
        Self { link, noise_sd: 1.0 }
    }

    pub fn linear(noise_sd: f64) -> Result<Self> {
        Self::new(Link::Linear, noise_sd)
    }

    pub fn name(&self) -> &str {
        self.link.name()
    }

    fn response(&self, u: f64, std_normal: f64) -> f64 {
        self.link.eval(u, self.noise_sd * std_normal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BetaScheme {
    /// `s - 1` entries `+1/√s`, then one `-1/√s`.
    Fixed,
    /// `U(1/2, 1)` magnitudes, positives first, normalized.
    RandomUniform,
}

impl BetaScheme {
    pub fn name(self) -> &'static str {
        match self {
            BetaScheme::Fixed => "fixed",
            BetaScheme::RandomUniform => "uniform",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "fixed" => Ok(BetaScheme::Fixed),
            "uniform" | "random" | "random-uniform" => Ok(BetaScheme::RandomUniform),
            other => Err(Error::invalid(format!("unknown beta scheme '{other}'"))),
        }
    }
}

/// Sparse unit loading vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseDirection {
    values: Vec<f64>,
    support: Vec<usize>,
}

impl SparseDirection {
    /// Wraps an arbitrary vector, normalizing it to unit length.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if values.is_empty() || !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("loading vector must be nonempty, finite and nonzero"));
        }
        values.iter_mut().for_each(|v| *v /= norm);
        let support = values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect();
        Ok(Self { values, support })
    }

    pub fn p(&self) -> usize {
        self.values.len()
    }

    pub fn s(&self) -> usize {
        self.support.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Indices of the nonzero entries, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }
}

pub fn generate_beta(p: usize, s: usize, scheme: BetaScheme, seed: u64) -> Result<SparseDirection> {
    if s == 0 || s > p {
        return Err(Error::invalid(format!("sparsity must satisfy 1 <= s <= p, got s = {s}, p = {p}")));
    }
    let mut values = vec![0.0; p];
    match scheme {
        BetaScheme::Fixed => {
            let a = 1.0 / (s as f64).sqrt();
            values[..s].fill(a);
            // A single coordinate keeps its positive sign.
            if s > 1 {
                values[s - 1] = -a;
            }
            let support = (0..s).collect();
            return Ok(SparseDirection { values, support });
        }
        BetaScheme::RandomUniform => {
            let mut rng = rng::stream(seed);
            let positives = s / 2;
            for (j, v) in values[..s].iter_mut().enumerate() {
                let u: f64 = rng.random_range(0.5..1.0);
                *v = if j < positives { u } else { -u };
            }
        }
    }
    SparseDirection::from_values(values)
}

/// Origin of a dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    /// Free-form description of how the data were produced.
    pub scheme: String,
    pub rng: &'static str,
}

#[derive(Clone, Debug)]
pub struct Dataset {
    /// `n × p`, rows are observations.
    pub x: DMatrix<f64>,
    pub y: Vec<f64>,
    pub provenance: Provenance,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if y.is_empty() || x.nrows() != y.len() {
            return Err(Error::invalid(format!(
                "dataset needs n >= 1 rows matching the response (x has {} rows, y has {})",
                x.nrows(),
                y.len()
            )));
        }
        Ok(Self { x, y, provenance })
    }

    /// Wraps externally supplied data.
    pub fn from_parts(x: DMatrix<f64>, y: Vec<f64>) -> Result<Self> {
        let provenance = Provenance { seed: 0, scheme: "external".into(), rng: "none" };
        Self::new(x, y, provenance)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// Draws `n` observations: the design row-major first, then the noise.
pub fn sample_sim(model: &ModelSpec, beta: &SparseDirection, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    let p = beta.p();
    let mut rng = rng::stream(seed);
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            x[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let y = (0..n)
        .map(|i| {
            let u: f64 = beta.support().iter().map(|&j| x[(i, j)] * beta.values()[j]).sum();
            let e: f64 = rng.sample(StandardNormal);
            model.response(u, e)
        })
        .collect();
    let provenance = Provenance {
        seed,
        scheme: format!("sim:{}:sigma={}", model.name(), model.noise_sd),
        rng: RNG_ALGORITHM,
    };
    Dataset::new(x, y, provenance)
}

pub const DEFAULT_CV_MC_N: usize = 1_000_000;
pub const DEFAULT_CV_SLICES: usize = 1000;

/// Monte-Carlo estimate of `C_V = Var(E[Z | Y])` with `Z ~ N(0, 1)` and `Y = f(Z, ε)`.
///
/// The pairs are sorted by `Y` and cut into `oracle_slices` equal slices;
/// the remainder `mc_n mod oracle_slices` is discarded at seeded random
/// ranks. The estimate is the spread of the slice means of `Z`.
pub fn estimate_cv(model: &ModelSpec, mc_n: usize, oracle_slices: usize, seed: u64) -> Result<f64> {
    if oracle_slices == 0 || mc_n < 100 * oracle_slices {
        return Err(Error::invalid(format!(
            "need mc_n >= 100 * oracle_slices, got mc_n = {mc_n}, slices = {oracle_slices}"
        )));
    }
    let mut rng = rng::stream(seed);
    let mut pairs: Vec<(f64, f64)> = (0..mc_n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            (model.response(z, e), z)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let m = mc_n / oracle_slices;
    let extra = mc_n - m * oracle_slices;
    let mut keep = vec![true; mc_n];
    for pos in index::sample(&mut rng, mc_n, extra) {
        keep[pos] = false;
    }
    let kept: Vec<f64> = pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(pz, _)| pz.1).collect();

    let means: Vec<f64> = kept.chunks_exact(m).map(|c| c.iter().sum::<f64>() / m as f64).collect();
    let h = means.len() as f64;
    let grand = means.iter().sum::<f64>() / h;
    let second = means.iter().map(|v| v * v).sum::<f64>() / h;
    Ok((second - grand * grand).max(0.0))
}
