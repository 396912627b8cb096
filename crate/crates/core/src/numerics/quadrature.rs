//! Globally adaptive Gauss-Kronrod quadrature with endpoint power maps.
//!
//! A declared algebraic endpoint behavior `(x - lower)^e` is removed by
//! `x = lower + h u^(1/(1+e))`, which turns the integrand into a bounded,
//! smooth function of `u`. The interval is split at its midpoint so each end
//! gets its own map. All mapped pieces share one error budget and one priority
//! queue, so refinement goes where the error is.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::NumericsError;

pub const DEFAULT_REL_TOL: f64 = 1e-10;

const MAX_SUBDIVISIONS: usize = 2000;
const MIN_SEGMENT_WIDTH: f64 = 1e-13;

/// Point handed to the integrand, with distances to both endpoints computed
/// from the map rather than by subtraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abscissa {
    pub x: f64,
    pub from_lower: f64,
    pub to_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    pub left_exponent: f64,
    pub right_exponent: f64,
    pub rel_tol: f64,
}

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            left_exponent: 0.0,
            right_exponent: 0.0,
            rel_tol: DEFAULT_REL_TOL,
        }
    }

    pub fn left(mut self, exponent: f64) -> Self {
        self.left_exponent = exponent;
        self
    }

    pub fn right(mut self, exponent: f64) -> Self {
        self.right_exponent = exponent;
        self
    }

    pub fn tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(NumericsError::Domain(format!(
                "quadrature interval ({}, {}) is not a finite nonempty interval",
                self.lower, self.upper
            )));
        }
        check_exponent(self.left_exponent)?;
        check_exponent(self.right_exponent)?;
        check_tol(self.rel_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub segments: usize,
}

/// Integral of `f(x)` under `spec`.
pub fn quad_singular<F: Fn(f64) -> f64>(f: F, spec: QuadratureSpec) -> Result<f64, NumericsError> {
    quad_singular_at(|p: Abscissa| f(p.x), spec)
}

/// As [`quad_singular`] but the integrand sees endpoint distances directly.
pub fn quad_singular_at<F: Fn(Abscissa) -> f64>(
    f: F,
    spec: QuadratureSpec,
) -> Result<f64, NumericsError> {
    quad_singular_estimate(f, spec).map(|e| e.value)
}

pub fn quad_singular_estimate<F: Fn(Abscissa) -> f64>(
    f: F,
    spec: QuadratureSpec,
) -> Result<QuadEstimate, NumericsError> {
    spec.validate()?;
    let (a, b) = (spec.lower, spec.upper);
    let width = b - a;
    let h = 0.5 * width;
    let p = 1.0 / (1.0 + spec.left_exponent);
    let q = 1.0 / (1.0 + spec.right_exponent);

    let left = |u: f64| {
        let s = h * u.powf(p);
        let at = Abscissa {
            x: a + s,
            from_lower: s,
            to_upper: width - s,
        };
        f(at) * h * p * u.powf(p - 1.0)
    };
    let right = |u: f64| {
        let s = h * u.powf(q);
        let at = Abscissa {
            x: b - s,
            from_lower: width - s,
            to_upper: s,
        };
        f(at) * h * q * u.powf(q - 1.0)
    };
    adaptive(&[&left, &right], spec.rel_tol)
}

/// Integral of `f` over `(lower, ∞)`.
///
/// The head `(lower, lower + scale)` carries `left_exponent`. The tail is
/// mapped by `x = lower + scale / w`; `tail_exponent` declares the behavior of
/// `f(x) scale / w²` as `w → 0` (for `f ~ x^(-p)` this is `p - 2`).
pub fn quad_semi_infinite<F: Fn(Abscissa) -> f64>(
    f: F,
    lower: f64,
    scale: f64,
    left_exponent: f64,
    tail_exponent: f64,
    rel_tol: f64,
) -> Result<QuadEstimate, NumericsError> {
    if !(lower.is_finite() && scale.is_finite() && scale > 0.0) {
        return Err(NumericsError::Domain(format!(
            "semi-infinite quadrature needs finite lower bound and positive scale, got ({lower}, {scale})"
        )));
    }
    check_exponent(left_exponent)?;
    check_exponent(tail_exponent)?;
    check_tol(rel_tol)?;
    let p = 1.0 / (1.0 + left_exponent);
    let r = 1.0 / (1.0 + tail_exponent);

    let head = |u: f64| {
        let s = scale * u.powf(p);
        let at = Abscissa {
            x: lower + s,
            from_lower: s,
            to_upper: f64::INFINITY,
        };
        f(at) * scale * p * u.powf(p - 1.0)
    };
    let tail = |v: f64| {
        let w = v.powf(r);
        let s = scale / w;
        let at = Abscissa {
            x: lower + s,
            from_lower: s,
            to_upper: f64::INFINITY,
        };
        let jac = scale / (w * w) * r * v.powf(r - 1.0);
        if jac.is_infinite() {
            // Integrand decays by assumption; the product is zero in the limit.
            0.0
        } else {
            f(at) * jac
        }
    };
    adaptive(&[&head, &tail], rel_tol)
}

fn check_exponent(e: f64) -> Result<(), NumericsError> {
    if e > -1.0 && e <= 0.0 {
        Ok(())
    } else {
        Err(NumericsError::Domain(format!(
            "endpoint exponent {e} outside (-1, 0]"
        )))
    }
}

fn check_tol(tol: f64) -> Result<(), NumericsError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(NumericsError::Domain(format!("tolerance {tol} must be positive")))
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive(pieces: &[&dyn Fn(f64) -> f64], rel_tol: f64) -> Result<QuadEstimate, NumericsError> {
    let mut heap = BinaryHeap::new();
    for (i, g) in pieces.iter().enumerate() {
        heap.push(gauss_kronrod(*g, i, 0.0, 1.0)?);
    }
    let mut splits = 0;
    loop {
        let (value, error, abs_value) = heap.iter().fold((0.0, 0.0, 0.0), |acc, s| {
            (acc.0 + s.value, acc.1 + s.error, acc.2 + s.abs_value)
        });
        let target = (rel_tol * value.abs()).max(100.0 * f64::EPSILON * abs_value);
        if error <= target {
            return Ok(QuadEstimate {
                value,
                error_bound: error,
                segments: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if splits >= MAX_SUBDIVISIONS || worst.b - worst.a < MIN_SEGMENT_WIDTH {
            return Err(NumericsError::Accuracy {
                estimate: value,
                error_bound: error,
            });
        }
        let g = pieces[worst.piece];
        heap.push(gauss_kronrod(g, worst.piece, worst.a, mid)?);
        heap.push(gauss_kronrod(g, worst.piece, mid, worst.b)?);
        splits += 1;
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 21-point Kronrod rule with the QUADPACK error estimate.
fn gauss_kronrod(
    g: &dyn Fn(f64) -> f64,
    piece: usize,
    a: f64,
    b: f64,
) -> Result<Segment, NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = g(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::Domain(format!(
                "integrand is not finite at mapped abscissa {x}"
            )))
        }
    };

    let fc = eval(center)?;
    let mut res_g = 0.0;
    let mut res_k = WGK[10] * fc;
    let mut res_abs = res_k.abs();
    let mut f1 = [0.0; 10];
    let mut f2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let lo = eval(center - dx)?;
        let hi = eval(center + dx)?;
        f1[j] = lo;
        f2[j] = hi;
        res_k += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment {
        piece,
        a,
        b,
        value,
        error,
        abs_value: res_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn inverse_sqrt_left() {
        let v = quad_singular(|x| 1.0 / x.sqrt(), QuadratureSpec::new(0.0, 1.0).left(-0.5)).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn arcsine_type_both_ends() {
        let spec = QuadratureSpec::new(0.0, 1.0).left(-0.5).right(-0.5);
        let v = quad_singular_at(|p| 1.0 / (p.from_lower * p.to_upper).sqrt(), spec).unwrap();
        assert!((v - PI).abs() < 1e-12);
    }

    #[test]
    fn beta_integral_half() {
        let spec = QuadratureSpec::new(0.0, 1.0).right(-0.5);
        let v = quad_singular_at(|p| (p.x / p.to_upper).sqrt(), spec).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_exact() {
        let v = quad_singular(|x| 3.0 * x * x, QuadratureSpec::new(-1.0, 2.0)).unwrap();
        assert!((v - 9.0).abs() < 1e-13);
    }

    #[test]
    fn semi_infinite_power_law() {
        // ∫_1^∞ x^(-3/2) dx = 2; tail integrand behaves like w^(-1/2).
        let est = quad_semi_infinite(|p| p.x.powf(-1.5), 1.0, 1.0, 0.0, -0.5, 1e-12).unwrap();
        assert!((est.value - 2.0).abs() < 1e-11, "{est:?}");
    }

    #[test]
    fn semi_infinite_exponential() {
        let est = quad_semi_infinite(|p| (-p.x).exp(), 0.0, 1.0, 0.0, 0.0, 1e-12).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(quad_singular(|x| x, QuadratureSpec::new(1.0, 0.0)).is_err());
        assert!(quad_singular(|x| x, QuadratureSpec::new(0.0, 1.0).left(-1.0)).is_err());
        assert!(quad_singular(|x| x, QuadratureSpec::new(0.0, 1.0).tol(0.0)).is_err());
    }

    #[test]
    fn undeclared_singularity_reports_accuracy() {
        // 1/x is not integrable; the loop must give up with an estimate.
        let spec = QuadratureSpec::new(0.0, 1.0);
        match quad_singular(|x| 1.0 / x, spec) {
            Err(NumericsError::Accuracy { .. }) => {}
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_domain_error() {
        let spec = QuadratureSpec::new(0.0, 1.0);
        assert!(matches!(
            quad_singular(|_| f64::NAN, spec),
            Err(NumericsError::Domain(_))
        ));
    }
}
