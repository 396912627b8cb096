//! Special functions, singular quadrature and bracketed root finding.
//!
//! Everything here is pure and reentrant. The closed forms elsewhere in the
//! crate are built from [`elliptic_quartet`]; the quadrature and root finder
//! serve the independent oracle routes and the endpoint solvers.

mod elliptic;
mod quadrature;
mod roots;
mod special;

use thiserror::Error;

pub use elliptic::{e_minus_complement_k, elliptic_quartet, EllipticModulus, EllipticQuartet};
pub use quadrature::{
    quad_semi_infinite, quad_singular, quad_singular_at, quad_singular_estimate, Abscissa,
    QuadEstimate, QuadratureSpec, DEFAULT_REL_TOL,
};
pub use roots::{find_root, DEFAULT_ROOT_TOL};
pub use special::{hyp2f1_series, ln_beta, p_k_poly, pochhammer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failed to reach tolerance: estimate {estimate:e}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    #[error("root not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
}
