use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{check_positive, ElectroError, Result, SolverOptions};
use crate::numerics::{ln_beta, pochhammer, quad_singular_at, QuadratureSpec};

/// Background `c x^α` with `α = k - 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralAlphaProblem {
    pub k: u32,
    pub c: f64,
    pub t: f64,
    pub beta: f64,
}

impl GeneralAlphaProblem {
    pub fn new(k: u32, c: f64, t: f64, beta: f64) -> Result<Self> {
        check_positive("c", c)?;
        check_positive("t", t)?;
        check_positive("beta", beta)?;
        Ok(Self { k, c, t, beta })
    }

    /// Hard-edge constants: `k = 0`, `c = 1/(2π)`.
    pub fn hard(t: f64, beta: f64) -> Result<Self> {
        Self::new(0, 0.5 / PI, t, beta)
    }

    /// Soft-edge constants: `k = 1`, `c = 1/π`.
    pub fn soft(t: f64, beta: f64) -> Result<Self> {
        Self::new(1, 1.0 / PI, t, beta)
    }

    pub fn alpha(&self) -> f64 {
        f64::from(self.k) - 0.5
    }
}

/// Coefficient of `z^α` in the large-gap limit of the field,
/// `c (-π cot(πα) + iπ)`.
pub fn background_field_coeff(alpha: f64, c: f64) -> Result<Complex64> {
    check_positive("c", c)?;
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(ElectroError::Domain(format!("alpha = {alpha} must exceed -1")));
    }
    if alpha.fract() == 0.0 {
        return Err(ElectroError::Domain(format!(
            "alpha = {alpha} is a pole of the cotangent"
        )));
    }
    // cot vanishes exactly at half-integers; tan(π/2) in floating point does not.
    let re = if (alpha - 0.5).fract() == 0.0 {
        0.0
    } else {
        -PI / (PI * alpha).tan()
    };
    Ok(Complex64::new(c * re, c * PI))
}

/// Trial field `π i c z^α (1 - √z/√(z-t) p_k(t/z))` off `[0, ∞)`.
pub fn general_field(z: Complex64, problem: &GeneralAlphaProblem) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= 0.0 || !(z.re.is_finite() && z.im.is_finite()) {
        return Err(ElectroError::Domain(format!("z = {z} lies on the cut [0, ∞)")));
    }
    let eval = |z: Complex64| {
        let rz = z.sqrt();
        let ratio = rz / (z - problem.t).sqrt();
        let x = problem.t / z;
        // p_k at a complex argument.
        let mut term = Complex64::new(1.0, 0.0);
        let mut p = term;
        for j in 1..=problem.k {
            let jf = f64::from(j);
            term *= x * ((jf - 1.5) / jf);
            p += term;
        }
        let z_alpha = z.powu(problem.k) / rz;
        Complex64::i() * PI * problem.c * z_alpha * (1.0 - ratio * p)
    };
    if z.im < 0.0 {
        Ok(eval(z.conj()).conj())
    } else {
        Ok(eval(z))
    }
}

/// Closed-form electrostatic energy of the empty gap.
pub fn general_v1(problem: &GeneralAlphaProblem) -> f64 {
    let k = problem.k;
    let kf = f64::from(k);
    let sum: f64 = (0..=k)
        .map(|j| {
            let jf = f64::from(j);
            let beta_fn = ln_beta(2.0 * kf - jf + 1.5, 0.5).exp();
            beta_fn * pochhammer(-0.5, j) / factorial(j)
        })
        .sum();
    PI * problem.c * problem.c / (2.0 * kf + 1.0) * problem.t.powi(2 * k as i32 + 1) * sum
}

/// `(c/(2k+1)) ∫_0^t x^{α+1} dφ/dx dx` with `dφ/dx` read off the trial field.
pub fn general_v1_quadrature(problem: &GeneralAlphaProblem, opts: &SolverOptions) -> Result<f64> {
    let k = problem.k;
    let (c, t) = (problem.c, problem.t);
    // x^{α+1} dφ/dx = π c x^{2k+1/2} p_k(t/x) / √(t - x), expanded in powers of x.
    let integral = quad_singular_at(
        |p| {
            let x = p.x;
            let poly: f64 = (0..=k)
                .map(|j| {
                    pochhammer(-0.5, j) / factorial(j)
                        * t.powi(j as i32)
                        * x.powi((k - j) as i32)
                })
                .sum();
            PI * c * x.powi(k as i32) * x.sqrt() * poly / p.to_upper.sqrt()
        },
        QuadratureSpec::new(0.0, t).right(-0.5).tol(opts.quad_rel_tol),
    )?;
    Ok(c / (2.0 * f64::from(k) + 1.0) * integral)
}

/// Leading log-probability `-β V1` of the empty gap.
pub fn general_log_e0(problem: &GeneralAlphaProblem) -> f64 {
    -problem.beta * general_v1(problem)
}

fn factorial(j: u32) -> f64 {
    (1..=j).map(f64::from).product()
}
