//! Variable ranking for ingested data.

use sparsir_core::experiments::SdpSettings;
use sparsir_core::sdp::principal_direction;
use sparsir_core::{compute_sir, default_lambda, dt_select, dt_sir, sdp_solve, Error, Method, SirMode};

use crate::{CliResult, IngestedTable};

#[derive(Clone, Debug)]
pub struct RecoverOptions {
    pub s: usize,
    pub h: usize,
    pub method: Method,
    pub seed: u64,
    /// SDP settings; `lambda: None` uses the default rule.
    pub sdp: SdpSettings,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariableReport {
    pub name: String,
    /// DT: whitened diagonal entry. SDP: `|ẑ_j|`.
    pub score: f64,
    /// 1-based rank among selected variables.
    pub rank: Option<usize>,
    pub selected: bool,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryReport {
    pub method: Method,
    /// Every variable, by descending score, ties in column order.
    pub rows: Vec<VariableReport>,
    pub lambda: Option<f64>,
    pub sdp_converged: Option<bool>,
}

impl RecoveryReport {
    pub fn selected(&self) -> impl Iterator<Item = &VariableReport> {
        self.rows.iter().filter(|r| r.selected)
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Whitened SIR matrix, then DT-SIR or the SDP relaxation.
pub fn recover_real(table: &IngestedTable, opts: &RecoverOptions) -> CliResult<RecoveryReport> {
    let p = table.p();
    if opts.s == 0 || opts.s > p {
        return Err(Error::InvalidArgument(format!("sparsity must satisfy 1 <= s <= p = {p}, got {}", opts.s)).into());
    }
    let data = table.to_dataset()?;
    let v = compute_sir(&data, opts.h, opts.seed, SirMode::Whitened)?;

    let (scores, selected, signs, lambda, converged) = match opts.method {
        Method::DtSir => {
            let selected = dt_select(&v, opts.s)?;
            let est = dt_sir(&v, opts.s)?;
            (v.diagonal(), selected, est.signs().to_vec(), None, None)
        }
        Method::Sdp => {
            let lambda = match opts.sdp.lambda {
                Some(l) => l,
                None => default_lambda(&v, opts.s)?,
            };
            let sol = sdp_solve(&v, &opts.sdp.config(lambda))?;
            let z = principal_direction(&sol.z)?
                .ok_or_else(|| Error::Numerical("SDP solution has a repeated top eigenvalue; no ranking is defined".into()))?;
            let scores: Vec<f64> = z.iter().map(|x| x.abs()).collect();
            let mut order: Vec<usize> = (0..p).collect();
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
            let mut selected = order[..opts.s].to_vec();
            selected.sort_unstable();
            let signs = (0..p).map(|j| if selected.contains(&j) { sign(z[j]) } else { 0 }).collect();
            (scores, selected, signs, Some(lambda), Some(sol.converged))
        }
    };

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut rank = 0;
    let rows = order
        .into_iter()
        .map(|j| {
            let is_selected = selected.contains(&j);
            if is_selected {
                rank += 1;
            }
            VariableReport {
                name: table.columns[j].clone(),
                score: scores[j],
                rank: is_selected.then_some(rank),
                selected: is_selected,
                sign: signs[j],
            }
        })
        .collect();
    Ok(RecoveryReport { method: opts.method, rows, lambda, sdp_converged: converged })
}
