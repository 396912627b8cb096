//! Monte Carlo for tridiagonal Gaussian and Laguerre β-ensembles.
//!
//! Eigenvalues are never computed: window counts come from Sturm sequences,
//! which cost `O(N)` per threshold.

mod compare;
mod mc;
mod sampler;
mod spec;
mod tridiag;

use thiserror::Error;

pub use compare::{compare_mc_asym, ComparisonRow, ComparisonTable, LeadingFit};
pub use mc::{count_in_window, run_mc, sample_rng, GridRow, McReport};
pub use sampler::{sample_gaussian, sample_laguerre, Sampler};
pub use spec::{EdgeWindow, EnsembleKind, EnsembleSpec, McPlan, RawInterval, WindowEdge};
pub use tridiag::{sturm_count_below, TridiagonalMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("cannot construct ensemble: {0}")]
    Construction(String),
    #[error("report is incomplete: {completed} of {requested} samples")]
    Incomplete { completed: u64, requested: u64 },
}
