use std::f64::consts::{FRAC_1_PI, PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use super::{
    check_nonnegative, check_positive, entropy_prefactor, DensitySample, ElectroError, Region,
    Result, SolverOptions,
};
use crate::numerics::{
    elliptic_quartet, find_root, hyp2f1_series, quad_semi_infinite, quad_singular_estimate,
    EllipticModulus, QuadEstimate, QuadratureSpec,
};

const BRACKET_FRACTION: f64 = 1.0 - 1e-12;

/// Below this complementary parameter `2d / b2` the count uses its Gauss
/// series; the elliptic form cancels to `O(d²)` there.
const COUNT_SERIES_M: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftEdgeProblem {
    pub t: f64,
    pub n: f64,
    pub beta: f64,
}

impl SoftEdgeProblem {
    pub fn new(t: f64, n: f64, beta: f64) -> Result<Self> {
        check_positive("t", t)?;
        check_nonnegative("n", n)?;
        check_positive("beta", beta)?;
        Ok(Self { t, n, beta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftEdgeSolution {
    pub problem: SoftEdgeProblem,
    pub n_max: f64,
    pub d: f64,
    pub b1: f64,
    pub b2: f64,
    pub modulus: EllipticModulus,
    pub v: f64,
    pub v1: f64,
    pub v2_corrected: f64,
    pub v2_legacy: f64,
    pub delta_f: f64,
    pub log_e: f64,
}

/// The superseded soft-edge entropy, next to the defining integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SoftLegacyEntropy {
    pub prefactor: f64,
    /// `v/2` plus half the potential rise across `(0, b1)`, times the prefactor.
    pub value: f64,
    pub raw_value: f64,
    /// `∫ ρ log(ρ/ρ_b)` over blob and outer region, times the prefactor.
    pub definition: f64,
    pub raw_definition: f64,
    /// Empty-blob closed form, present only at `d = 0`.
    pub closed_form_d0: Option<f64>,
    pub raw_error_bound: f64,
}

fn check_geometry(d: f64, t: f64, allow_full: bool) -> Result<()> {
    check_positive("t", t)?;
    let half = t / 2.0;
    let ok = d >= 0.0 && if allow_full { d <= half } else { d < half };
    if ok {
        Ok(())
    } else {
        Err(ElectroError::Domain(format!(
            "half-width d = {d} outside the feasible range for t = {t}"
        )))
    }
}

fn endpoints(d: f64, t: f64) -> (f64, f64) {
    (t / 2.0 - d, t / 2.0 + d)
}

fn modulus(d: f64, t: f64) -> Result<EllipticModulus> {
    let (b1, _) = endpoints(d, t);
    Ok(EllipticModulus::from_parts(b1, 2.0 * d)?)
}

pub fn soft_max_count(t: f64) -> f64 {
    2.0 / (3.0 * PI) * t.powf(1.5)
}

/// Number of charges in the blob `(t/2 - d, t/2 + d)`.
pub fn soft_count(d: f64, t: f64) -> Result<f64> {
    check_geometry(d, t, true)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    if d == t / 2.0 {
        return Ok(soft_max_count(t));
    }
    let (b1, b2) = endpoints(d, t);
    let m_c = 2.0 * d / b2;
    if m_c < COUNT_SERIES_M {
        return Ok(d * d / (2.0 * b2.sqrt()) * hyp2f1_series(0.5, 1.5, 3.0, m_c));
    }
    let q = elliptic_quartet(modulus(d, t)?);
    Ok(2.0 / (3.0 * PI) * b2.sqrt() * (t * q.e_prime - 2.0 * b1 * q.k_prime))
}

/// Potential drop between the blob and the outer conductor.
pub fn soft_drop(d: f64, t: f64) -> Result<f64> {
    check_geometry(d, t, false)?;
    if d == 0.0 {
        return Ok(SQRT_2 / 3.0 * t.powf(1.5));
    }
    let (_, b2) = endpoints(d, t);
    let q = elliptic_quartet(modulus(d, t)?);
    Ok(2.0 / 3.0 * b2.sqrt() * (t * q.e - 2.0 * d * q.k))
}

/// Field in the closed upper half-plane as
/// `-i b1 b2 / (√(z-t) (√z √(z-t) + √(z-b1) √(z-b2)))`.
fn field_upper(z: Complex64, d: f64, t: f64) -> Complex64 {
    let (b1, b2) = endpoints(d, t);
    let rz = z.sqrt();
    let rt = (z - t).sqrt();
    let pair = (z - b1).sqrt() * (z - b2).sqrt();
    -Complex64::i() * (b1 * b2) / (rt * (rz * rt + pair))
}

pub fn soft_field(z: Complex64, d: f64, t: f64) -> Result<Complex64> {
    check_geometry(d, t, false)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(ElectroError::Domain(format!("z = {z} is not finite")));
    }
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(ElectroError::Domain(format!(
            "z = {z} lies on the cut [0, ∞); use soft_field_boundary"
        )));
    }
    if z.im < 0.0 {
        Ok(field_upper(z.conj(), d, t).conj())
    } else {
        Ok(field_upper(z, d, t))
    }
}

/// Boundary value `E(x + i0)` for `x > 0`, `x ≠ t`.
pub fn soft_field_boundary(x: f64, d: f64, t: f64) -> Result<Complex64> {
    check_geometry(d, t, false)?;
    if !(x > 0.0 && x.is_finite()) || x == t {
        return Err(ElectroError::Domain(format!(
            "boundary value needs x > 0 and x != t = {t}, got {x}"
        )));
    }
    Ok(field_upper(Complex64::new(x, 0.0), d, t))
}

pub fn soft_density(x: f64, d: f64, t: f64) -> Result<DensitySample> {
    check_geometry(d, t, false)?;
    if !(x > 0.0 && x.is_finite()) || x == t {
        return Err(ElectroError::Domain(format!(
            "density needs x > 0 and x != t = {t}, got {x}"
        )));
    }
    let (b1, b2) = endpoints(d, t);
    let (rho, region) = if x > b1 && x < b2 {
        (((x - b1) * (b2 - x) / (t - x)).sqrt() * FRAC_1_PI, Region::Blob)
    } else if x < t {
        (0.0, Region::Gap)
    } else {
        (((x - b1) * (x - b2) / (x - t)).sqrt() * FRAC_1_PI, Region::Outer)
    };
    Ok(DensitySample { x, rho, region })
}

pub fn soft_solve(problem: &SoftEdgeProblem) -> Result<SoftEdgeSolution> {
    soft_solve_with(problem, &SolverOptions::default())
}

pub fn soft_solve_with(problem: &SoftEdgeProblem, opts: &SolverOptions) -> Result<SoftEdgeSolution> {
    let p = SoftEdgeProblem::new(problem.t, problem.n, problem.beta)?;
    let (t, n) = (p.t, p.n);
    let n_max = soft_max_count(t);
    if n >= n_max {
        return Err(ElectroError::Infeasible { n, n_max });
    }
    let d = if n == 0.0 {
        0.0
    } else {
        let hi = t / 2.0 * BRACKET_FRACTION;
        if soft_count(hi, t)? < n {
            return Err(ElectroError::Infeasible { n, n_max });
        }
        find_root(|d| soft_count(d, t).map_or(f64::NAN, |c| c - n), 0.0, hi, opts.root_tol)?
    };
    let (b1, b2) = endpoints(d, t);
    let v = soft_drop(d, t)?;
    let prefactor = entropy_prefactor(p.beta);
    let v1 = -v * n / 2.0 + t.powi(3) / 24.0 * (1.0 - 4.0 * d * d / (t * t));
    let v2_corrected = prefactor * v;
    let gap = gap_rise(d, t, opts)?;
    let v2_legacy = prefactor * (v / 2.0 + gap.value / 2.0);
    let delta_f = v1 + v2_corrected;
    Ok(SoftEdgeSolution {
        problem: p,
        n_max,
        d,
        b1,
        b2,
        modulus: modulus(d, t)?,
        v,
        v1,
        v2_corrected,
        v2_legacy,
        delta_f,
        log_e: -p.beta * delta_f,
    })
}

/// `∫_0^{b1} √((b1 - x)(b2 - x)/(t - x)) dx`, the size of the potential
/// change across the inner gap.
fn gap_rise(d: f64, t: f64, opts: &SolverOptions) -> Result<QuadEstimate> {
    let (b1, b2) = endpoints(d, t);
    Ok(quad_singular_estimate(
        |p| (p.to_upper * (b2 - p.x) / (t - p.x)).sqrt(),
        QuadratureSpec::new(0.0, b1).right(-0.5).tol(opts.quad_rel_tol),
    )?)
}

/// `∫ ρ log(ρ/ρ_b) dx` over the blob and the outer region.
pub fn soft_entropy_integral(d: f64, t: f64, opts: &SolverOptions) -> Result<QuadEstimate> {
    check_geometry(d, t, false)?;
    let (b1, b2) = endpoints(d, t);
    let blob = if d > 0.0 {
        quad_singular_estimate(
            |p| {
                let (lo, hi) = (p.from_lower, p.to_upper);
                let rho = (lo * hi / (t - p.x)).sqrt() * FRAC_1_PI;
                let log_ratio = 0.5 * (lo.ln() + hi.ln() - p.x.ln() - (t - p.x).ln());
                rho * log_ratio
            },
            QuadratureSpec::new(b1, b2).left(-0.5).right(-0.5).tol(opts.quad_rel_tol),
        )?
    } else {
        QuadEstimate { value: 0.0, error_bound: 0.0, segments: 0 }
    };
    let outer = quad_semi_infinite(
        |p| {
            let rho = ((p.x - b1) * (p.x - b2) / p.from_lower).sqrt() * FRAC_1_PI;
            rho * 0.5 * (b1 * b2 / (p.x * p.from_lower)).ln_1p()
        },
        t,
        t,
        -0.5,
        -0.5,
        opts.quad_rel_tol,
    )?;
    Ok(QuadEstimate {
        value: blob.value + outer.value,
        error_bound: blob.error_bound + outer.error_bound,
        segments: blob.segments + outer.segments,
    })
}

pub fn soft_legacy_entropy(d: f64, t: f64, beta: f64) -> Result<SoftLegacyEntropy> {
    soft_legacy_entropy_with(d, t, beta, &SolverOptions::default())
}

pub fn soft_legacy_entropy_with(
    d: f64,
    t: f64,
    beta: f64,
    opts: &SolverOptions,
) -> Result<SoftLegacyEntropy> {
    check_geometry(d, t, false)?;
    check_positive("beta", beta)?;
    let prefactor = entropy_prefactor(beta);
    let v = soft_drop(d, t)?;
    let gap = gap_rise(d, t, opts)?;
    let raw_value = v / 2.0 + gap.value / 2.0;
    let def = soft_entropy_integral(d, t, opts)?;
    let closed_form_d0 =
        (d == 0.0).then(|| prefactor * t.powf(1.5) / 3.0 * (SQRT_2 - 0.5));
    Ok(SoftLegacyEntropy {
        prefactor,
        value: prefactor * raw_value,
        raw_value,
        definition: prefactor * def.value,
        raw_definition: def.value,
        closed_form_d0,
        raw_error_bound: gap.error_bound / 2.0 + def.error_bound,
    })
}
