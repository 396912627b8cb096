//! Complete elliptic integrals by the arithmetic-geometric mean.
//!
//! A modulus is stored together with its complement so that callers who know
//! `1 - k²` exactly (for example `(t - b) / t`) never lose it to cancellation.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::special::hyp2f1_series;
use super::NumericsError;

/// Below this complementary modulus `K` switches to its logarithmic expansion.
const LOG_BRANCH_KC: f64 = 1e-8;

/// Below this value of `k²` the combination `E - kc² K` is summed as a Gauss
/// series instead of being formed as a difference.
const SERIES_BRANCH_M: f64 = 0.25;

const AGM_MAX_ITER: usize = 40;

/// Elliptic modulus `k` with its complement `kc = sqrt(1 - k²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticModulus {
    k: f64,
    kc: f64,
}

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self, NumericsError> {
        if !(0.0..=1.0).contains(&k) {
            return Err(NumericsError::Domain(format!(
                "elliptic modulus {k} outside [0, 1]"
            )));
        }
        Ok(Self {
            k,
            kc: ((1.0 - k) * (1.0 + k)).sqrt(),
        })
    }

    pub fn from_complementary(kc: f64) -> Result<Self, NumericsError> {
        Ok(Self::new(kc)?.complement())
    }

    /// Modulus with `k² = p / (p + q)` and `kc² = q / (p + q)`.
    pub fn from_parts(p: f64, q: f64) -> Result<Self, NumericsError> {
        if !(p >= 0.0 && q >= 0.0 && p + q > 0.0) || !(p + q).is_finite() {
            return Err(NumericsError::Domain(format!(
                "modulus parts must be nonnegative with positive sum, got ({p}, {q})"
            )));
        }
        let s = p + q;
        Ok(Self {
            k: (p / s).sqrt(),
            kc: (q / s).sqrt(),
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kc(&self) -> f64 {
        self.kc
    }

    /// The parameter `m = k²`.
    pub fn parameter(&self) -> f64 {
        self.k * self.k
    }

    pub fn complement(&self) -> Self {
        Self {
            k: self.kc,
            kc: self.k,
        }
    }
}

/// `K`, `E` at modulus `k` and `K' = K(kc)`, `E' = E(kc)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipticQuartet {
    pub k: f64,
    pub e: f64,
    pub k_prime: f64,
    pub e_prime: f64,
}

impl EllipticQuartet {
    /// `E K' + E' K - K K' - π/2`; zero up to rounding for `0 < k < 1`.
    pub fn legendre_defect(&self) -> f64 {
        self.e * self.k_prime + self.e_prime * self.k - self.k * self.k_prime - FRAC_PI_2
    }
}

/// Complete integrals at `m` and at the complementary modulus.
///
/// At `k = 1` the first-kind integral is reported as `f64::INFINITY` and
/// `E = 1`; symmetrically `K' = ∞`, `E' = 1` at `k = 0`.
pub fn elliptic_quartet(m: EllipticModulus) -> EllipticQuartet {
    let (k, e) = complete_ke(m.k, m.kc);
    let (k_prime, e_prime) = complete_ke(m.kc, m.k);
    EllipticQuartet {
        k,
        e,
        k_prime,
        e_prime,
    }
}

/// `E(k) - kc² K(k)`, the combination behind the particle counts.
///
/// For small `k` the difference is `O(k²)`; there the Gauss series
/// `(π k² / 4) ₂F₁(1/2, 1/2; 2; k²)` is used so no digits are lost.
pub fn e_minus_complement_k(m: EllipticModulus) -> f64 {
    let m2 = m.parameter();
    if m.kc == 0.0 {
        return 1.0;
    }
    if m2 < SERIES_BRANCH_M {
        return std::f64::consts::FRAC_PI_4 * m2 * hyp2f1_series(0.5, 0.5, 2.0, m2);
    }
    let (k, e) = complete_ke(m.k, m.kc);
    e - m.kc * m.kc * k
}

fn complete_ke(k: f64, kc: f64) -> (f64, f64) {
    if kc == 0.0 {
        return (f64::INFINITY, 1.0);
    }
    if k == 0.0 {
        return (FRAC_PI_2, FRAC_PI_2);
    }
    if kc < LOG_BRANCH_KC {
        let l = (4.0 / kc).ln();
        let m1 = kc * kc;
        return (l + 0.25 * m1 * (l - 1.0), 1.0 + 0.5 * m1 * (l - 0.5));
    }
    agm_ke(k, kc)
}

fn agm_ke(k: f64, kc: f64) -> (f64, f64) {
    // E = K (1 - Σ 2^(j-1) c_j²) with c_0 = k and c_{j+1} = c_j² / (4 a_{j+1}).
    let mut a = 1.0_f64;
    let mut b = kc;
    let mut c = k;
    let mut weight = 0.5;
    let mut sum = weight * c * c;
    for _ in 0..AGM_MAX_ITER {
        let a_next = 0.5 * (a + b);
        let b_next = (a * b).sqrt();
        c = c * c / (4.0 * a_next);
        weight *= 2.0;
        sum += weight * c * c;
        a = a_next;
        b = b_next;
        if c <= f64::EPSILON * a {
            break;
        }
    }
    let big_k = FRAC_PI_2 / a;
    (big_k, big_k * (1.0 - sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_modulus() {
        let q = elliptic_quartet(EllipticModulus::new(0.0).unwrap());
        assert_eq!(q.k, FRAC_PI_2);
        assert_eq!(q.e, FRAC_PI_2);
        assert!(q.k_prime.is_infinite());
        assert_eq!(q.e_prime, 1.0);
    }

    #[test]
    fn unit_modulus() {
        let q = elliptic_quartet(EllipticModulus::new(1.0).unwrap());
        assert!(q.k.is_infinite() && q.k > 0.0);
        assert_eq!(q.e, 1.0);
        assert_eq!(q.k_prime, FRAC_PI_2);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(EllipticModulus::new(-0.1).is_err());
        assert!(EllipticModulus::new(1.5).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
        assert!(EllipticModulus::from_parts(0.0, 0.0).is_err());
    }

    #[test]
    fn known_values() {
        // K(1/√2) = Γ(1/4)² / (4 √π)
        let gamma_quarter = 3.625_609_908_221_908_f64;
        let expected = gamma_quarter * gamma_quarter / (4.0 * PI.sqrt());
        let q = elliptic_quartet(EllipticModulus::new(std::f64::consts::FRAC_1_SQRT_2).unwrap());
        assert!((q.k - expected).abs() < 1e-14 * expected);
        assert!((q.k - q.k_prime).abs() < 1e-14);
    }

    #[test]
    fn log_branch_is_continuous() {
        for &kc in &[0.5e-8_f64, 0.99e-8] {
            let k = (1.0 - kc * kc).sqrt();
            let (k_log, e_log) = complete_ke(k, kc);
            let (k_agm, e_agm) = agm_ke(k, kc);
            assert!((k_log - k_agm).abs() < 1e-14 * k_agm, "kc={kc}");
            assert!((e_log - e_agm).abs() < 5e-15, "kc={kc} {e_log} {e_agm}");
        }
    }

    #[test]
    fn series_branch_matches_direct_difference() {
        for &k2 in &[0.2, 0.24, 0.26, 0.3] {
            let m = EllipticModulus::new(f64::sqrt(k2)).unwrap();
            let (k, e) = complete_ke(m.k, m.kc);
            let direct = e - m.kc * m.kc * k;
            let combined = e_minus_complement_k(m);
            assert!((direct - combined).abs() < 1e-14, "k2={k2}");
        }
    }

    #[test]
    fn from_parts_keeps_complement() {
        let m = EllipticModulus::from_parts(1.0, 1e-20).unwrap();
        assert!((m.kc() - 1e-10).abs() < 1e-24);
    }
}
