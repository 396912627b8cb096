//! Small special functions: Pochhammer symbols, the truncated binomial
//! polynomial `p_k`, Gauss hypergeometric series and log-beta.

/// Rising factorial `(u)_j = u (u + 1) ... (u + j - 1)`.
pub fn pochhammer(u: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (u + f64::from(i)))
}

/// `p_k(x) = Σ_{j=0}^{k} (-1/2)_j x^j / j!`, the degree-`k` Taylor polynomial
/// of `sqrt(1 - x)`.
pub fn p_k_poly(k: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=k {
        let jf = f64::from(j);
        term *= (jf - 1.5) / jf * x;
        sum += term;
    }
    sum
}

/// `₂F₁(a, b; c; z)` by direct summation. Intended for `|z| <= 1/2`, where
/// the terms shrink at least geometrically.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    debug_assert!(z.abs() <= 0.5 + 1e-12, "series used outside its fast region");
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 0..500 {
        let jf = f64::from(j);
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
    }
    sum
}

/// `ln B(a, b)` for positive arguments.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}
