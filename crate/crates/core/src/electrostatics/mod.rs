//! Conditioned log-gas electrostatics at the hard edge, the soft edge and for
//! a general `c x^α` background.
//!
//! The hard edge has background density `1/(2π√x)` on `x > 0` with the gap
//! `(0, t)`; conditioning `n` charges into the gap produces a blob on `(0, b)`.
//! The soft edge has background `√x/π` with gap `(0, t)` and a blob on
//! `(b1, b2)` centred at `t/2`. Counts `n` are real throughout.

mod general;
mod hard;
mod oracles;
mod soft;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{NumericsError, DEFAULT_REL_TOL, DEFAULT_ROOT_TOL};

pub use general::{
    background_field_coeff, general_field, general_log_e0, general_v1, general_v1_quadrature,
    GeneralAlphaProblem,
};
pub use hard::{
    hard_count, hard_density, hard_drop, hard_field, hard_field_boundary, hard_legacy_entropy,
    hard_legacy_entropy_with, hard_max_count, hard_solve, hard_solve_with, HardEdgeProblem,
    HardEdgeSolution,
};
pub use oracles::{
    hard_count_quadrature, hard_drop_quadrature, lemma2_h, lemma2_h_quadrature,
    soft_count_quadrature, soft_drop_quadrature,
};
pub use soft::{
    soft_count, soft_density, soft_drop, soft_entropy_integral, soft_field, soft_field_boundary,
    soft_legacy_entropy, soft_legacy_entropy_with, soft_max_count, soft_solve, soft_solve_with,
    SoftEdgeProblem, SoftEdgeSolution, SoftLegacyEntropy,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElectroError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("infeasible count n = {n}: the blob must satisfy 0 <= n < n_max = {n_max}")]
    Infeasible { n: f64, n_max: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, ElectroError>;

/// Tolerances for the quadrature oracles and the endpoint solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub quad_rel_tol: f64,
    pub root_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            quad_rel_tol: DEFAULT_REL_TOL,
            root_tol: DEFAULT_ROOT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Blob,
    Gap,
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensitySample {
    pub x: f64,
    pub rho: f64,
    pub region: Region,
}

/// The superseded half-drop entropy next to its defining integral.
///
/// `raw_*` fields omit the prefactor `1/β - 1/2`, so they remain informative
/// at `β = 2` where both reported values vanish.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegacyEntropy {
    pub prefactor: f64,
    pub quadrature: f64,
    pub closed_form: f64,
    pub raw_quadrature: f64,
    pub raw_closed_form: f64,
    pub raw_error_bound: f64,
}

impl LegacyEntropy {
    pub fn difference(&self) -> f64 {
        self.quadrature - self.closed_form
    }

    pub fn relative_difference(&self) -> f64 {
        (self.raw_quadrature - self.raw_closed_form).abs() / self.raw_closed_form.abs()
    }
}

/// Entropy prefactor `1/β - 1/2`.
pub(crate) fn entropy_prefactor(beta: f64) -> f64 {
    1.0 / beta - 0.5
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ElectroError::Domain(format!("{name} must be positive and finite, got {value}")))
    }
}

pub(crate) fn check_nonnegative(name: &str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ElectroError::Domain(format!("{name} must be nonnegative and finite, got {value}")))
    }
}
