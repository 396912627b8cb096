use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;
use serde::Serialize;

use super::{
    check_nonnegative, check_positive, entropy_prefactor, DensitySample, ElectroError,
    LegacyEntropy, Region, Result, SolverOptions,
};
use crate::numerics::{
    e_minus_complement_k, find_root, quad_semi_infinite, quad_singular_estimate, EllipticModulus,
    QuadratureSpec,
};

/// Upper end of the solver bracket as a fraction of `t`.
const BRACKET_FRACTION: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardEdgeProblem {
    pub t: f64,
    pub n: f64,
    pub a: f64,
    pub beta: f64,
}

impl HardEdgeProblem {
    pub fn new(t: f64, n: f64, a: f64, beta: f64) -> Result<Self> {
        check_positive("t", t)?;
        check_nonnegative("n", n)?;
        check_positive("beta", beta)?;
        if !a.is_finite() {
            return Err(ElectroError::Domain(format!("a must be finite, got {a}")));
        }
        Ok(Self { t, n, a, beta })
    }

    /// Strength of the fixed charge at the origin.
    pub fn a_prime(&self) -> f64 {
        (self.a - 1.0) / 2.0 + 1.0 / self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardEdgeSolution {
    pub problem: HardEdgeProblem,
    pub a_prime: f64,
    pub n_max: f64,
    pub b: f64,
    pub modulus: EllipticModulus,
    pub v: f64,
    pub v1: f64,
    pub v1_prime: f64,
    pub v2_corrected: f64,
    pub v2_legacy: f64,
    pub delta_f: f64,
    pub log_e: f64,
}

fn check_geometry(b: f64, t: f64, allow_full: bool) -> Result<()> {
    check_positive("t", t)?;
    let ok = b >= 0.0 && if allow_full { b <= t } else { b < t };
    if ok {
        Ok(())
    } else {
        let upper = if allow_full { "]" } else { ")" };
        Err(ElectroError::Domain(format!("blob endpoint b = {b} outside [0, t{upper} with t = {t}")))
    }
}

fn modulus(b: f64, t: f64) -> Result<EllipticModulus> {
    Ok(EllipticModulus::from_parts(b, t - b)?)
}

/// Number of charges in the blob `(0, b)`.
pub fn hard_count(b: f64, t: f64) -> Result<f64> {
    check_geometry(b, t, true)?;
    Ok(t.sqrt() * FRAC_1_PI * e_minus_complement_k(modulus(b, t)?))
}

/// Largest feasible count, reached as `b → t`.
pub fn hard_max_count(t: f64) -> f64 {
    t.sqrt() * FRAC_1_PI
}

/// Potential drop between the blob and the outer conductor.
pub fn hard_drop(b: f64, t: f64) -> Result<f64> {
    check_geometry(b, t, false)?;
    Ok(t.sqrt() * e_minus_complement_k(modulus(b, t)?.complement()))
}

/// Field in the closed upper half-plane, `Im z = +0` included.
///
/// Written as `i (b - t) / (2 √z √(z-t) (√(z-t) + √(z-b)))`; both roots in
/// the last factor lie in the first quadrant so nothing cancels.
fn field_upper(z: Complex64, b: f64, t: f64) -> Complex64 {
    let rz = z.sqrt();
    let rt = (z - t).sqrt();
    let rb = (z - b).sqrt();
    Complex64::i() * (b - t) / (2.0 * rz * rt * (rt + rb))
}

/// Field `E(z)` off the positive real axis.
pub fn hard_field(z: Complex64, b: f64, t: f64) -> Result<Complex64> {
    check_geometry(b, t, false)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(ElectroError::Domain(format!("z = {z} is not finite")));
    }
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(ElectroError::Domain(format!(
            "z = {z} lies on the cut [0, ∞); use hard_field_boundary"
        )));
    }
    if z.im < 0.0 {
        Ok(field_upper(z.conj(), b, t).conj())
    } else {
        Ok(field_upper(z, b, t))
    }
}

/// Boundary value `E(x + i0)` for `x > 0`, `x ∉ {b, t}`; `dφ/dx = -Re E`.
pub fn hard_field_boundary(x: f64, b: f64, t: f64) -> Result<Complex64> {
    check_geometry(b, t, false)?;
    if !(x > 0.0 && x.is_finite()) || x == b || x == t {
        return Err(ElectroError::Domain(format!(
            "boundary value needs x > 0 away from b = {b} and t = {t}, got {x}"
        )));
    }
    Ok(field_upper(Complex64::new(x, 0.0), b, t))
}

pub fn hard_density(x: f64, b: f64, t: f64) -> Result<DensitySample> {
    check_geometry(b, t, false)?;
    if !(x > 0.0 && x.is_finite()) || x == b || x == t {
        return Err(ElectroError::Domain(format!(
            "density needs x > 0 away from b = {b} and t = {t}, got {x}"
        )));
    }
    let (rho, region) = if x < b {
        (((b - x) / (x * (t - x))).sqrt() / (2.0 * PI), Region::Blob)
    } else if x < t {
        (0.0, Region::Gap)
    } else {
        (((x - b) / (x * (x - t))).sqrt() / (2.0 * PI), Region::Outer)
    };
    Ok(DensitySample { x, rho, region })
}

pub fn hard_solve(problem: &HardEdgeProblem) -> Result<HardEdgeSolution> {
    hard_solve_with(problem, &SolverOptions::default())
}

pub fn hard_solve_with(problem: &HardEdgeProblem, opts: &SolverOptions) -> Result<HardEdgeSolution> {
    let p = HardEdgeProblem::new(problem.t, problem.n, problem.a, problem.beta)?;
    let (t, n) = (p.t, p.n);
    let n_max = hard_max_count(t);
    if n >= n_max {
        return Err(ElectroError::Infeasible { n, n_max });
    }
    let b = if n == 0.0 {
        0.0
    } else {
        let hi = t * BRACKET_FRACTION;
        if hard_count(hi, t)? < n {
            return Err(ElectroError::Infeasible { n, n_max });
        }
        find_root(|b| hard_count(b, t).map_or(f64::NAN, |c| c - n), 0.0, hi, opts.root_tol)?
    };

    let v = hard_drop(b, t)?;
    let a_prime = p.a_prime();
    let prefactor = entropy_prefactor(p.beta);
    let v1 = -v * n / 2.0 + (t - b) / 8.0;
    let v1_prime = -a_prime * v;
    let v2_corrected = prefactor * v;
    let v2_legacy = prefactor * v / 2.0;
    let delta_f = v1 + (v1_prime + v2_corrected);
    Ok(HardEdgeSolution {
        problem: p,
        a_prime,
        n_max,
        b,
        modulus: modulus(b, t)?,
        v,
        v1,
        v1_prime,
        v2_corrected,
        v2_legacy,
        delta_f,
        log_e: -p.beta * delta_f,
    })
}

pub fn hard_legacy_entropy(b: f64, t: f64, beta: f64) -> Result<LegacyEntropy> {
    hard_legacy_entropy_with(b, t, beta, &SolverOptions::default())
}

/// The two-branch entropy integral in the variable `y = √x`, against the
/// half-drop closed form `v/2`.
pub fn hard_legacy_entropy_with(
    b: f64,
    t: f64,
    beta: f64,
    opts: &SolverOptions,
) -> Result<LegacyEntropy> {
    check_geometry(b, t, false)?;
    check_positive("beta", beta)?;
    let sb = b.sqrt();
    let st = t.sqrt();

    // Blob: s² = (b - y²) / (t - y²), integrand s ln s.
    let (inner, inner_err) = if b > 0.0 {
        let est = quad_singular_estimate(
            |p| {
                let num = p.to_upper * (sb + p.x);
                let den = (t - b) + num;
                let s2 = num / den;
                0.5 * s2.sqrt() * s2.ln()
            },
            QuadratureSpec::new(0.0, sb).right(-0.5).tol(opts.quad_rel_tol),
        )?;
        (est.value, est.error_bound)
    } else {
        (0.0, 0.0)
    };

    // Outer: s² = 1 + q with q = (t - b) / (y² - t).
    let outer = quad_semi_infinite(
        |p| {
            let q = (t - b) / (p.from_lower * (p.x + st));
            0.5 * (1.0 + q).sqrt() * q.ln_1p()
        },
        st,
        st,
        -0.5,
        0.0,
        opts.quad_rel_tol,
    )?;

    let prefactor = entropy_prefactor(beta);
    let raw_quadrature = (inner + outer.value) * FRAC_1_PI;
    let raw_closed_form = hard_drop(b, t)? / 2.0;
    Ok(LegacyEntropy {
        prefactor,
        quadrature: prefactor * raw_quadrature,
        closed_form: prefactor * raw_closed_form,
        raw_quadrature,
        raw_closed_form,
        raw_error_bound: (inner_err + outer.error_bound) * FRAC_1_PI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_endpoints() {
        assert_eq!(hard_count(0.0, 9.0).unwrap(), 0.0);
        let full = hard_count(9.0, 9.0).unwrap();
        assert!((full - 3.0 / PI).abs() < 1e-15);
        assert!(hard_count(-1.0, 9.0).is_err());
        assert!(hard_count(10.0, 9.0).is_err());
    }

    #[test]
    fn drop_at_empty_blob() {
        assert_eq!(hard_drop(0.0, 25.0).unwrap(), 5.0);
        assert!(hard_drop(25.0, 25.0).is_err());
    }

    #[test]
    fn exact_law_at_zero_count() {
        for &beta in &[0.5, 1.0, 2.0, 4.0] {
            for &t in &[1.0, 10.0, 100.0] {
                let s = hard_solve(&HardEdgeProblem::new(t, 0.0, 0.0, beta).unwrap()).unwrap();
                assert_eq!(s.delta_f, t / 8.0);
                assert!((s.log_e + beta * t / 8.0).abs() <= 2.0 * f64::EPSILON * beta * t);
            }
        }
    }

    #[test]
    fn infeasible_count() {
        let p = HardEdgeProblem::new(4.0, 1000.0, 0.0, 2.0).unwrap();
        match hard_solve(&p) {
            Err(ElectroError::Infeasible { n_max, .. }) => assert!((n_max - 2.0 / PI).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_rejects_cut() {
        assert!(hard_field(Complex64::new(0.5, 0.0), 1.0, 4.0).is_err());
        assert!(hard_field(Complex64::new(7.0, 0.0), 1.0, 4.0).is_err());
        assert!(hard_field(Complex64::new(-3.0, 0.0), 1.0, 4.0).is_ok());
    }

    #[test]
    fn field_conjugate_symmetry() {
        let z = Complex64::new(1.3, 0.7);
        let up = hard_field(z, 1.0, 4.0).unwrap();
        let down = hard_field(z.conj(), 1.0, 4.0).unwrap();
        assert_eq!(up, down.conj());
    }

    #[test]
    fn density_regions() {
        assert_eq!(hard_density(2.0, 1.0, 4.0).unwrap().rho, 0.0);
        assert_eq!(hard_density(0.5, 1.0, 4.0).unwrap().region, Region::Blob);
        assert_eq!(hard_density(5.0, 1.0, 4.0).unwrap().region, Region::Outer);
        assert!(hard_density(0.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn legacy_entropy_at_beta_two_vanishes() {
        let e = hard_legacy_entropy(1.0, 100.0, 2.0).unwrap();
        assert_eq!(e.quadrature, 0.0);
        assert_eq!(e.closed_form, 0.0);
    }
}
