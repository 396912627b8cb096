//! Direct quadratures of the defining integrals, independent of the elliptic
//! closed forms. Used by the tests and the `verify` command.

use std::f64::consts::{FRAC_1_PI, FRAC_PI_2};

use super::{ElectroError, Result, SolverOptions};
use crate::numerics::{quad_singular_at, QuadratureSpec};

fn tol(opts: &SolverOptions) -> f64 {
    opts.quad_rel_tol
}

/// `∫_0^b (1/2π) √((b - x)/(x (t - x))) dx`.
pub fn hard_count_quadrature(b: f64, t: f64, opts: &SolverOptions) -> Result<f64> {
    if !(b > 0.0 && b <= t) {
        return Err(ElectroError::Domain(format!("need 0 < b <= t, got b = {b}, t = {t}")));
    }
    let right = if b == t { -0.5 } else { 0.0 };
    Ok(quad_singular_at(
        |p| 0.5 * FRAC_1_PI * (p.to_upper / (p.x * (t - p.x))).sqrt(),
        QuadratureSpec::new(0.0, b).left(-0.5).right(right).tol(tol(opts)),
    )?)
}

/// `∫_{√b}^{√t} √((y² - b)/(t - y²)) dy`.
pub fn hard_drop_quadrature(b: f64, t: f64, opts: &SolverOptions) -> Result<f64> {
    if !(b >= 0.0 && b < t) {
        return Err(ElectroError::Domain(format!("need 0 <= b < t, got b = {b}, t = {t}")));
    }
    let (sb, st) = (b.sqrt(), t.sqrt());
    Ok(quad_singular_at(
        |p| (p.from_lower * (p.x + sb) / (p.to_upper * (p.x + st))).sqrt(),
        QuadratureSpec::new(sb, st).right(-0.5).tol(tol(opts)),
    )?)
}

/// `∫_{b1}^{b2} (1/π) √((x - b1)(b2 - x)/(t - x)) dx`.
pub fn soft_count_quadrature(d: f64, t: f64, opts: &SolverOptions) -> Result<f64> {
    if !(d > 0.0 && d < t / 2.0) {
        return Err(ElectroError::Domain(format!("need 0 < d < t/2, got d = {d}, t = {t}")));
    }
    let (b1, b2) = (t / 2.0 - d, t / 2.0 + d);
    Ok(quad_singular_at(
        |p| FRAC_1_PI * (p.from_lower * p.to_upper / (t - p.x)).sqrt(),
        QuadratureSpec::new(b1, b2).left(-0.5).right(-0.5).tol(tol(opts)),
    )?)
}

/// `∫_{b2}^{t} √((x - b1)(x - b2)/(t - x)) dx`.
pub fn soft_drop_quadrature(d: f64, t: f64, opts: &SolverOptions) -> Result<f64> {
    if !(d >= 0.0 && d < t / 2.0) {
        return Err(ElectroError::Domain(format!("need 0 <= d < t/2, got d = {d}, t = {t}")));
    }
    let (b1, b2) = (t / 2.0 - d, t / 2.0 + d);
    Ok(quad_singular_at(
        |p| ((p.x - b1) * p.from_lower / p.to_upper).sqrt(),
        QuadratureSpec::new(b2, t).left(-0.5).right(-0.5).tol(tol(opts)),
    )?)
}

/// `H(u) = (π/2)(1 - u²)`.
pub fn lemma2_h(u: f64) -> Result<f64> {
    check_unit(u)?;
    Ok(FRAC_PI_2 * (1.0 - u) * (1.0 + u))
}

/// `2 ∫_0^{1-u} (1 - x) √(((1 - x)² - u²)/(x (2 - x))) dx`.
pub fn lemma2_h_quadrature(u: f64, opts: &SolverOptions) -> Result<f64> {
    check_unit(u)?;
    if u == 1.0 {
        return Ok(0.0);
    }
    let integral = quad_singular_at(
        |p| {
            let y = 1.0 - p.x;
            y * (p.to_upper * (y + u) / (p.x * (2.0 - p.x))).sqrt()
        },
        QuadratureSpec::new(0.0, 1.0 - u).left(-0.5).right(-0.5).tol(tol(opts)),
    )?;
    Ok(2.0 * integral)
}

fn check_unit(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(ElectroError::Domain(format!("u = {u} outside [0, 1]")))
    }
}
