//! Large-gap expansions of `log E_β(n; J)` as coefficient maps, with the
//! β ↔ 4/β duality and the β = 2 factorization checked term by term.
//!
//! The variable is the gap size `|t|` and the log basis is `log |t|`
//! throughout. Hard and soft expansions carry terms through `log |t|`; the
//! bulk expansion also has a constant.

mod expansion;

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use thiserror::Error;

pub use expansion::{
    BasisTerm, Expansion, ExpansionParams, ResidualRow, ResidualTable, TermRow,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Hard,
    Soft,
    Bulk,
}

impl std::str::FromStr for Edge {
    type Err = AsymError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hard" => Ok(Edge::Hard),
            "soft" => Ok(Edge::Soft),
            "bulk" => Ok(Edge::Bulk),
            other => Err(AsymError::Domain(format!("unknown edge '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dual count {dual_n} is negative; the duality needs a nonnegative count")]
    InfeasibleDual { dual_n: f64 },
}

/// Length scales on the two sides of a duality.
///
/// For the hard edge they divide `t`; for the soft edge they multiply it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityScales {
    pub s_beta: f64,
    pub s_dual: f64,
}

/// Outcome of a duality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityCheck {
    pub beta: f64,
    pub n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub dual_beta: f64,
    pub dual_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_a: Option<f64>,
    pub scales: DualityScales,
    pub table: ResidualTable,
}

fn check_beta_n(beta: f64, n: f64) -> Result<(), AsymError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(AsymError::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(n >= 0.0 && n.is_finite()) {
        return Err(AsymError::Domain(format!("n must be nonnegative, got {n}")));
    }
    Ok(())
}

pub fn hard_expansion(beta: f64, n: f64, a: f64) -> Result<Expansion, AsymError> {
    check_beta_n(beta, n)?;
    if !a.is_finite() {
        return Err(AsymError::Domain(format!("a must be finite, got {a}")));
    }
    let bracket = n * n / 2.0 + n * a / 2.0 + a * (a - 1.0) / 4.0 + a / (2.0 * beta);
    let params = ExpansionParams {
        beta,
        n,
        a: Some(a),
        rho: None,
    };
    Ok(Expansion::new(Edge::Hard, params)
        .with_term(BasisTerm::power(1, 1), -beta / 8.0)
        .with_term(BasisTerm::power(1, 2), beta * (n + a / 2.0))
        .with_term(BasisTerm::log(), -beta / 2.0 * bracket))
}

pub fn soft_expansion(beta: f64, n: f64) -> Result<Expansion, AsymError> {
    check_beta_n(beta, n)?;
    let h = beta / 2.0 - 1.0;
    let bracket = beta * n * n / 2.0 + h * n + (1.0 - 2.0 / beta * h * h) / 6.0;
    let params = ExpansionParams {
        beta,
        n,
        a: None,
        rho: None,
    };
    Ok(Expansion::new(Edge::Soft, params)
        .with_term(BasisTerm::power(3, 1), -beta / 24.0)
        .with_term(BasisTerm::power(3, 2), SQRT_2 / 3.0 * (beta * n + h))
        .with_term(BasisTerm::log(), -0.75 * bracket))
}

/// Bulk expansion; `n = 0` and `n > 0` follow different formulas.
pub fn bulk_expansion(beta: f64, n: f64, rho: f64) -> Result<Expansion, AsymError> {
    check_beta_n(beta, n)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(AsymError::Domain(format!("rho must be positive, got {rho}")));
    }
    let params = ExpansionParams {
        beta,
        n,
        a: None,
        rho: Some(rho),
    };
    let pr = PI * rho;
    let base = Expansion::new(Edge::Bulk, params)
        .with_term(BasisTerm::power(2, 1), -beta * pr * pr / 16.0)
        .with_term(BasisTerm::power(1, 1), (beta * n + beta / 2.0 - 1.0) * pr / 2.0);
    let (log_coeff, constant) = if n == 0.0 {
        let g = 0.25 * (beta / 2.0 + 2.0 / beta - 3.0);
        (g, g * rho.ln())
    } else {
        let g = n / 2.0 * (1.0 - beta / 2.0 - beta * n / 2.0);
        (g, g * ((4.0 * pr / n).ln() + 1.0))
    };
    Ok(base
        .with_term(BasisTerm::log(), log_coeff)
        .with_term(BasisTerm::constant(), constant))
}

pub fn hard_duality_scales(beta: f64) -> DualityScales {
    let s_beta = 1.0;
    DualityScales {
        s_beta,
        s_dual: s_beta / (beta / 2.0).powi(2),
    }
}

pub fn soft_duality_scales(beta: f64) -> DualityScales {
    let s_beta = 1.0;
    DualityScales {
        s_beta,
        s_dual: (beta / 2.0).powf(2.0 / 3.0) * s_beta,
    }
}

/// Hard edge at `(β, n, a)` against `(4/β, β(n+1)/2 - 1, βa/2 - β + 2)`.
pub fn hard_duality_residual(beta: f64, n: f64, a: f64) -> Result<DualityCheck, AsymError> {
    check_beta_n(beta, n)?;
    let dual_beta = 4.0 / beta;
    let dual_n = beta * (n + 1.0) / 2.0 - 1.0;
    let dual_a = beta * a / 2.0 - beta + 2.0;
    if dual_n < 0.0 {
        return Err(AsymError::InfeasibleDual { dual_n });
    }
    let scales = hard_duality_scales(beta);
    let lhs = hard_expansion(beta, n, a)?.rescaled(1.0 / scales.s_beta)?;
    let rhs = hard_expansion(dual_beta, dual_n, dual_a)?.rescaled(1.0 / scales.s_dual)?;
    Ok(DualityCheck {
        beta,
        n,
        a: Some(a),
        dual_beta,
        dual_n,
        dual_a: Some(dual_a),
        scales,
        table: ResidualTable::compare(&lhs, &rhs),
    })
}

/// Soft edge at `(β, n)` against `(4/β, βn/2 + β/2 - 1)`.
pub fn soft_duality_residual(beta: f64, n: f64) -> Result<DualityCheck, AsymError> {
    check_beta_n(beta, n)?;
    let dual_beta = 4.0 / beta;
    let dual_n = beta * n / 2.0 + beta / 2.0 - 1.0;
    if dual_n < 0.0 {
        return Err(AsymError::InfeasibleDual { dual_n });
    }
    let scales = soft_duality_scales(beta);
    let lhs = soft_expansion(beta, n)?.rescaled(scales.s_beta)?;
    let rhs = soft_expansion(dual_beta, dual_n)?.rescaled(scales.s_dual)?;
    Ok(DualityCheck {
        beta,
        n,
        a: None,
        dual_beta,
        dual_n,
        dual_a: None,
        scales,
        table: ResidualTable::compare(&lhs, &rhs),
    })
}

/// `β = 2` expansion against the sum of the two `β = 1` factors.
pub fn factorization_residual(edge: Edge, n: f64, a: f64) -> Result<ResidualTable, AsymError> {
    let (lhs, rhs) = match edge {
        Edge::Hard => (
            hard_expansion(2.0, n, a)?,
            &hard_expansion(1.0, n, a - 1.0)? + &hard_expansion(1.0, n + 1.0, a - 1.0)?,
        ),
        Edge::Soft => (
            soft_expansion(2.0, n)?,
            &soft_expansion(1.0, n)? + &soft_expansion(1.0, n + 1.0)?,
        ),
        Edge::Bulk => {
            return Err(AsymError::Domain(
                "factorization is defined for the hard and soft edges".into(),
            ))
        }
    };
    Ok(ResidualTable::compare(&lhs, &rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hard_empty_gap_single_term() {
        let e = hard_expansion(3.0, 0.0, 0.0).unwrap();
        assert_eq!(e.nonzero_terms(), vec![(BasisTerm::power(1, 1), -3.0 / 8.0)]);
        assert_eq!(e.evaluate(8.0).unwrap(), -3.0);
    }

    #[test]
    fn soft_beta_two() {
        let e = soft_expansion(2.0, 0.0).unwrap();
        assert_eq!(e.coefficient(BasisTerm::power(3, 1)), -1.0 / 12.0);
        assert_eq!(e.coefficient(BasisTerm::power(3, 2)), 0.0);
        assert_eq!(e.coefficient(BasisTerm::log()), -1.0 / 8.0);
    }

    #[test]
    fn bulk_beta_two() {
        let rho = 0.8;
        let e = bulk_expansion(2.0, 0.0, rho).unwrap();
        assert_eq!(e.coefficient(BasisTerm::log()), -0.25);
        assert_eq!(e.coefficient(BasisTerm::power(1, 1)), 0.0);
        assert!(bulk_expansion(2.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn self_dual_point() {
        let h = hard_duality_residual(2.0, 3.0, 0.5).unwrap();
        assert_eq!(h.table.max_relative, 0.0);
        let s = soft_duality_residual(2.0, 3.0).unwrap();
        assert_eq!(s.table.max_relative, 0.0);
    }

    #[test]
    fn infeasible_dual() {
        assert!(matches!(
            hard_duality_residual(0.5, 0.0, 0.0),
            Err(AsymError::InfeasibleDual { .. })
        ));
        assert!(matches!(
            soft_duality_residual(1.0, 0.0),
            Err(AsymError::InfeasibleDual { .. })
        ));
    }

    #[test]
    fn bulk_has_no_factorization() {
        assert!(factorization_residual(Edge::Bulk, 1.0, 0.0).is_err());
    }
}
