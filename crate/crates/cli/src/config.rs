//! TOML run configuration: optional top-level `seed`, `out`, `workers`,
//! then one table per command. Every key is optional in the file; command
//! line flags take precedence over file values.
//!
//! ```toml
//! seed = 7
//! [curve]
//! model = "sin"
//! p = 100
//! s = 10
//! H = 10
//! gamma_grid = [2, 5, 10, 30]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub curve: CurveSection,
    #[serde(default)]
    pub diagnose: DiagnoseSection,
    #[serde(default)]
    pub recover: RecoverSection,
    #[serde(default, rename = "sdp-solve")]
    pub sdp_solve: SdpSolveSection,
}

impl FileConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub model: Option<String>,
    pub noise_sd: Option<f64>,
    pub p: Option<usize>,
    pub s: Option<usize>,
    pub beta: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub model: Option<String>,
    pub noise_sd: Option<f64>,
    pub p: Option<usize>,
    /// Explicit sparsity; exclusive with `sparsity`.
    pub s: Option<usize>,
    /// `"sqrt"` or `"log"`.
    pub sparsity: Option<String>,
    pub beta: Option<String>,
    pub method: Option<String>,
    pub mode: Option<String>,
    #[serde(rename = "H")]
    pub h: Option<usize>,
    pub gamma_grid: Option<Vec<f64>>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub backend: Option<String>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub step: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagnoseSection {
    pub models: Option<Vec<String>>,
    pub noise_sd: Option<f64>,
    pub h_grid: Option<Vec<usize>>,
    pub mc_n: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RecoverSection {
    pub input: Option<PathBuf>,
    pub y_column: Option<String>,
    pub s: Option<usize>,
    #[serde(rename = "H")]
    pub h: Option<usize>,
    pub method: Option<String>,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub backend: Option<String>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub step: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SdpSolveSection {
    pub input: Option<PathBuf>,
    pub s: Option<usize>,
    pub lambda: Option<f64>,
    pub backend: Option<String>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub step: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_parse() {
        let c = FileConfig::parse(
            r#"
seed = 3
workers = 2
[curve]
model = "atan"
p = 50
H = 5
gamma_grid = [1, 2.5]
lambda = 0.1
[sdp-solve]
input = "a.csv"
backend = "cg"
"#,
        )
        .unwrap();
        assert_eq!(c.seed, Some(3));
        assert_eq!(c.curve.h, Some(5));
        assert_eq!(c.curve.gamma_grid, Some(vec![1.0, 2.5]));
        assert_eq!(c.curve.lambda, Some(0.1));
        assert_eq!(c.sdp_solve.backend.as_deref(), Some("cg"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(FileConfig::parse("[curve]\nbogus = 1\n").is_err());
        assert!(FileConfig::parse("[nope]\n").is_err());
    }
}
