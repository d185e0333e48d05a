//! CSV writers. Floats use Rust's shortest round-trip formatting, so the
//! same values always produce the same bytes.

use std::path::Path;

use sparsir_core::{DMatrix, Dataset, EfficiencyCurve, SdpSolution, SignedSupport, SparseDirection, StabilityDiagnostic};

use crate::{CliError, CliResult, RecoveryReport};

pub const CURVE_HEADER: [&str; 12] =
    ["model", "p", "s", "method", "mode", "H", "gamma", "n", "reps", "successes", "success_rate", "skipped"];

type Rows = Vec<Vec<String>>;

fn to_bytes(header: Option<&[&str]>, rows: &Rows) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).expect("in-memory write");
    }
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn curve_csv(curve: &EfficiencyCurve) -> Vec<u8> {
    let c = &curve.config;
    let rows = curve
        .points
        .iter()
        .map(|pt| {
            vec![
                c.model.name().to_string(),
                c.p.to_string(),
                curve.s.to_string(),
                c.method.name().to_string(),
                c.mode.name().to_string(),
                c.h.to_string(),
                pt.gamma.to_string(),
                pt.n.to_string(),
                pt.reps.to_string(),
                pt.successes.to_string(),
                pt.success_rate().map(|r| r.to_string()).unwrap_or_default(),
                pt.skipped.to_string(),
            ]
        })
        .collect();
    to_bytes(Some(&CURVE_HEADER), &rows)
}

pub fn emit_curve_csv(curve: &EfficiencyCurve, path: &Path) -> CliResult<()> {
    write(path, &curve_csv(curve))
}

/// Per-point counts of unconverged and numerically failed replicates.
pub fn emit_curve_failures_csv(curve: &EfficiencyCurve, path: &Path) -> CliResult<()> {
    let rows = curve
        .points
        .iter()
        .map(|pt| vec![pt.gamma.to_string(), pt.unconverged.to_string(), pt.numerical_failures.to_string()])
        .collect();
    write(path, &to_bytes(Some(&["gamma", "unconverged", "numerical_failures"]), &rows))
}

pub fn emit_dataset_csv(data: &Dataset, path: &Path) -> CliResult<()> {
    let mut header = vec!["y".to_string()];
    header.extend((1..=data.p()).map(|j| format!("x{j}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..data.n())
        .map(|i| std::iter::once(data.y[i]).chain(data.x.row(i).iter().copied()).map(|v| v.to_string()).collect())
        .collect();
    write(path, &to_bytes(Some(&header), &rows))
}

pub fn emit_beta_csv(beta: &SparseDirection, path: &Path) -> CliResult<()> {
    let rows = beta.values().iter().enumerate().map(|(j, v)| vec![format!("x{}", j + 1), v.to_string()]).collect();
    write(path, &to_bytes(Some(&["variable", "beta"]), &rows))
}

pub fn emit_matrix_csv(m: &DMatrix<f64>, path: &Path) -> CliResult<()> {
    let rows = m.row_iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
    write(path, &to_bytes(None, &rows))
}

pub fn emit_sdp_summary_csv(sol: &SdpSolution, lambda: f64, backend: &str, path: &Path) -> CliResult<()> {
    let row = vec![
        lambda.to_string(),
        backend.to_string(),
        sol.objective.to_string(),
        sol.iterations.to_string(),
        sol.converged.to_string(),
        sol.residual.to_string(),
        sol.rank1_gap.to_string(),
    ];
    let header = ["lambda", "backend", "objective", "iterations", "converged", "residual", "rank1_gap"];
    write(path, &to_bytes(Some(&header), &vec![row]))
}

pub fn emit_signs_csv(signs: &SignedSupport, path: &Path) -> CliResult<()> {
    let rows = signs.signs().iter().enumerate().map(|(j, s)| vec![(j + 1).to_string(), s.to_string()]).collect();
    write(path, &to_bytes(Some(&["index", "sign"]), &rows))
}

pub fn emit_recover_csv(report: &RecoveryReport, path: &Path) -> CliResult<()> {
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                r.score.to_string(),
                r.rank.map(|k| k.to_string()).unwrap_or_default(),
                r.selected.to_string(),
                r.sign.to_string(),
            ]
        })
        .collect();
    write(path, &to_bytes(Some(&["variable", "score", "rank", "selected", "sign"]), &rows))
}

/// Per-slice variances, one row per `(H, slice)`.
pub fn emit_stability_slices_csv(diags: &[StabilityDiagnostic], path: &Path) -> CliResult<()> {
    let mut rows = Vec::new();
    for d in diags {
        for (h, (vars, bounds)) in d.h_grid.iter().zip(d.per_slice_variances.iter().zip(&d.boundaries)) {
            for (k, v) in vars.iter().enumerate() {
                let lower = if k == 0 { String::new() } else { bounds[k - 1].to_string() };
                let upper = bounds.get(k).map(|b| b.to_string()).unwrap_or_default();
                rows.push(vec![d.model.clone(), h.to_string(), (k + 1).to_string(), lower, upper, v.to_string()]);
            }
        }
    }
    write(path, &to_bytes(Some(&["model", "H", "slice", "y_lower", "y_upper", "variance"]), &rows))
}

pub fn emit_stability_decay_csv(diags: &[StabilityDiagnostic], path: &Path) -> CliResult<()> {
    let mut rows = Vec::new();
    for d in diags {
        for (i, h) in d.h_grid.iter().enumerate() {
            rows.push(vec![
                d.model.clone(),
                h.to_string(),
                d.sums[i].to_string(),
                d.mean_decay[i].to_string(),
                d.mean_decay_se[i].to_string(),
                d.total_variance.to_string(),
            ]);
        }
    }
    write(path, &to_bytes(Some(&["model", "H", "sum", "mean_decay", "mean_decay_se", "total_variance"]), &rows))
}

pub fn emit_stability_fit_csv(fits: &[(String, Option<sparsir_core::DecayFit>)], path: &Path) -> CliResult<()> {
    let rows = fits
        .iter()
        .map(|(model, fit)| match fit {
            Some(f) => vec![model.clone(), f.kappa.to_string(), f.log_c.to_string(), f.kappa_upper95.to_string()],
            None => vec![model.clone(), String::new(), String::new(), String::new()],
        })
        .collect();
    write(path, &to_bytes(Some(&["model", "kappa", "log_c", "kappa_upper95"]), &rows))
}
