//! Sliced-stability diagnostic in one dimension.
//!
//! With `Z ~ N(0, 1)` and `Y = f(Z, ε)`, the inverse regression curve
//! `m(y) = E[Z | Y = y]` is fitted by fine equal-count slicing of the sorted
//! sample (`INNER_RESOLUTION · H` inner slices). Each outer slice is the union
//! of `INNER_RESOLUTION` consecutive inner slices, so the conditional
//! variance of `m(Y)` on it is the spread of those inner means, corrected
//! for their sampling noise.

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::{self, derive_seed};
use crate::sim::ModelSpec;
use crate::{Error, Result};

pub const INNER_RESOLUTION: usize = 50;
const BOOTSTRAP_RESAMPLES: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityDiagnostic {
    pub model: String,
    pub mc_n: usize,
    pub h_grid: Vec<usize>,
    /// For each `H`, the `H − 1` response values separating adjacent slices.
    pub boundaries: Vec<Vec<f64>>,
    /// For each `H`, the estimated `Var[m(Y) | Y ∈ S_h]`, `h = 1..H`.
    pub per_slice_variances: Vec<Vec<f64>>,
    pub sums: Vec<f64>,
    /// `sums / H`.
    pub mean_decay: Vec<f64>,
    /// Monte-Carlo standard error of `mean_decay`.
    pub mean_decay_se: Vec<f64>,
    /// Estimate of `Var[m(Y)]` at the finest resolution used.
    pub total_variance: f64,
}

fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

struct Resolution {
    inner_means: Vec<f64>,
    /// Sampling variance of each inner mean.
    inner_noise: Vec<f64>,
    boundaries: Vec<f64>,
}

fn resolve(sorted: &[(f64, f64)], h: usize, seed: u64) -> Resolution {
    let n = sorted.len();
    let inner = h * INNER_RESOLUTION;
    let m = n / inner;
    let mut keep = vec![true; n];
    let mut rng = rng::stream(seed);
    for pos in index::sample(&mut rng, n, n - m * inner) {
        keep[pos] = false;
    }
    let kept: Vec<(f64, f64)> = sorted.iter().zip(&keep).filter(|(_, k)| **k).map(|(v, _)| *v).collect();

    let mut inner_means = Vec::with_capacity(inner);
    let mut inner_noise = Vec::with_capacity(inner);
    for chunk in kept.chunks_exact(m) {
        let z: Vec<f64> = chunk.iter().map(|(_, z)| *z).collect();
        inner_means.push(z.iter().sum::<f64>() / m as f64);
        inner_noise.push(sample_variance(&z) / m as f64);
    }
    let outer = m * INNER_RESOLUTION;
    let boundaries = (1..h).map(|k| 0.5 * (kept[k * outer - 1].0 + kept[k * outer].0)).collect();
    Resolution { inner_means, inner_noise, boundaries }
}

/// Per-slice conditional variances of the inverse regression curve for each `H` in `h_grid`.
pub fn stability_diagnostic(model: &ModelSpec, h_grid: &[usize], mc_n: usize, seed: u64) -> Result<StabilityDiagnostic> {
    if h_grid.is_empty() || h_grid.iter().any(|&h| h < 2) {
        return Err(Error::invalid("every H in the grid must be at least 2"));
    }
    let h_max = *h_grid.iter().max().unwrap_or(&2);
    if mc_n < 1000 * h_max {
        return Err(Error::invalid(format!("need mc_n >= 1000 * max(H) = {}, got {mc_n}", 1000 * h_max)));
    }

    let mut rng = rng::stream(seed);
    let mut sorted: Vec<(f64, f64)> = (0..mc_n)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            (model.link.eval(z, model.noise_sd * e), z)
        })
        .collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let k = INNER_RESOLUTION as f64;
    let mut out = StabilityDiagnostic {
        model: model.name().to_string(),
        mc_n,
        h_grid: h_grid.to_vec(),
        boundaries: Vec::new(),
        per_slice_variances: Vec::new(),
        sums: Vec::new(),
        mean_decay: Vec::new(),
        mean_decay_se: Vec::new(),
        total_variance: 0.0,
    };
    for (g, &h) in h_grid.iter().enumerate() {
        let res = resolve(&sorted, h, derive_seed(seed, &[g as u64]));
        let mut variances = Vec::with_capacity(h);
        let mut se2 = 0.0;
        for (means, noise) in res.inner_means.chunks_exact(INNER_RESOLUTION).zip(res.inner_noise.chunks_exact(INNER_RESOLUTION)) {
            let spread = sample_variance(means);
            let noise = noise.iter().sum::<f64>() / k;
            variances.push((spread - noise).max(0.0));
            // Variance of a sample variance of K roughly normal values.
            se2 += 2.0 * spread * spread / (k - 1.0);
        }
        let sum: f64 = variances.iter().sum();
        out.sums.push(sum);
        out.mean_decay.push(sum / h as f64);
        out.mean_decay_se.push(se2.sqrt() / h as f64);
        out.per_slice_variances.push(variances);
        out.boundaries.push(res.boundaries);
        if h == h_max {
            let noise = res.inner_noise.iter().sum::<f64>() / res.inner_noise.len() as f64;
            out.total_variance = (sample_variance(&res.inner_means) - noise).max(0.0);
        }
    }
    Ok(out)
}

/// Power-law fit `sums ≈ C · H^κ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub kappa: f64,
    pub log_c: f64,
    /// 95th percentile of `κ` under a parametric bootstrap of the sums.
    pub kappa_upper95: f64,
}

fn log_log_slope(h: &[f64], sums: &[f64]) -> (f64, f64) {
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = sums.iter().map(|v| v.max(f64::MIN_POSITIVE).ln()).collect();
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Least-squares fit of `ln(sums)` on `ln(H)`.
pub fn fit_decay(diag: &StabilityDiagnostic, seed: u64) -> Result<DecayFit> {
    let mut distinct = diag.h_grid.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::invalid("need at least two distinct H values to fit a decay exponent"));
    }
    if diag.sums.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Numerical("slice variance sums must be positive to fit a power law".into()));
    }
    let h: Vec<f64> = diag.h_grid.iter().map(|&v| v as f64).collect();
    let (kappa, log_c) = log_log_slope(&h, &diag.sums);

    let mut rng = rng::stream(seed);
    let mut boot: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let resampled: Vec<f64> = diag
                .sums
                .iter()
                .zip(&diag.mean_decay_se)
                .zip(&h)
                .map(|((s, se), hh)| {
                    let e: f64 = rng.sample(StandardNormal);
                    s + e * se * hh
                })
                .collect();
            log_log_slope(&h, &resampled).0
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let kappa_upper95 = boot[(0.95 * (BOOTSTRAP_RESAMPLES - 1) as f64).round() as usize];
    Ok(DecayFit { kappa, log_c, kappa_upper95 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Link;

    #[test]
    fn preconditions() {
        let m = ModelSpec::named(Link::Atan2);
        assert!(stability_diagnostic(&m, &[1, 5], 10_000, 0).is_err());
        assert!(stability_diagnostic(&m, &[5, 10], 9_999, 0).is_err());
        assert!(stability_diagnostic(&m, &[], 10_000, 0).is_err());
    }

    #[test]
    fn seven_slices_for_plotting() {
        let d = stability_diagnostic(&ModelSpec::named(Link::Atan2), &[7], 70_000, 3).unwrap();
        assert_eq!(d.per_slice_variances[0].len(), 7);
        assert_eq!(d.boundaries[0].len(), 6);
        assert!(d.per_slice_variances[0].iter().all(|v| *v >= 0.0));
        assert!(d.boundaries[0].windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn power_law_recovered_exactly() {
        let h = vec![5, 10, 20, 40];
        let sums: Vec<f64> = h.iter().map(|&v| 3.0 * (v as f64).powf(0.4)).collect();
        let diag = StabilityDiagnostic {
            model: "synthetic".into(),
            mc_n: 0,
            mean_decay: sums.iter().zip(&h).map(|(s, v)| s / *v as f64).collect(),
            mean_decay_se: vec![0.0; 4],
            h_grid: h,
            boundaries: vec![],
            per_slice_variances: vec![],
            sums,
            total_variance: 1.0,
        };
        let fit = fit_decay(&diag, 0).unwrap();
        assert!((fit.kappa - 0.4).abs() < 1e-12);
        assert!((fit.log_c - 3f64.ln()).abs() < 1e-12);
        assert!((fit.kappa_upper95 - 0.4).abs() < 1e-12);
    }
}
