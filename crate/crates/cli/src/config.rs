//! Run configuration: a JSON file whose keys are the flag names, merged with
//! the command line. Flags win.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "EDGEGAS_CONFIG";

/// A single number or a list; `t` is a scalar for `electro` and a grid for `mc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    One(f64),
    Many(Vec<f64>),
}

impl Grid {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Grid::One(x) => vec![*x],
            Grid::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_at: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<String>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub big_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_timing: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_quad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_root: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        RunConfig { $($f: $hi.$f.or($lo.$f),)* }
    };
}

impl RunConfig {
    /// Fields of `self` take precedence over `base`.
    pub fn over(self, base: RunConfig) -> RunConfig {
        overlay!(self, base; edge, kind, beta, n, a, t, t_grid, rho, eval_at, ensemble, big_n,
            samples, seed, n_max, max_seconds, compare, record_timing, tol_quad, tol_root, group,
            full, format, out)
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// Config named by `--config`, else by the environment, else empty.
    pub fn discover(explicit: Option<&Path>) -> Result<RunConfig, CliError> {
        if let Some(p) = explicit {
            return Self::load(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
            _ => Ok(RunConfig::default()),
        }
    }

    pub fn scalar_t(&self) -> Result<Option<f64>, CliError> {
        match &self.t {
            None => Ok(None),
            Some(Grid::One(x)) => Ok(Some(*x)),
            Some(Grid::Many(v)) if v.len() == 1 => Ok(Some(v[0])),
            Some(Grid::Many(_)) => Err(CliError::Usage("expected a single value for t".into())),
        }
    }

    pub fn grid_t(&self) -> Option<Vec<f64>> {
        self.t.as_ref().map(Grid::to_vec).or_else(|| self.t_grid.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: RunConfig = serde_json::from_str(r#"{"beta": 4, "n": 1, "t": [1, 2], "N": 50}"#).unwrap();
        let flags = RunConfig {
            beta: Some(2.0),
            ..Default::default()
        };
        let m = flags.over(file);
        assert_eq!(m.beta, Some(2.0));
        assert_eq!(m.n, Some(1.0));
        assert_eq!(m.big_n, Some(50));
        assert_eq!(m.grid_t(), Some(vec![1.0, 2.0]));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"bta": 2}"#).is_err());
    }

    #[test]
    fn kebab_case_keys() {
        let c: RunConfig = serde_json::from_str(r#"{"tol-quad": 1e-9, "n-max": 3, "record-timing": true}"#).unwrap();
        assert_eq!(c.tol_quad, Some(1e-9));
        assert_eq!(c.n_max, Some(3));
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"tol-quad\""));
    }
}
