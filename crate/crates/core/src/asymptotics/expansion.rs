use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_rational::Ratio;
use serde::Serialize;

use super::{AsymError, Edge};

/// `|t|^power`, optionally multiplied by `log |t|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisTerm {
    pub power: Ratio<i64>,
    pub with_log: bool,
}

impl BasisTerm {
    pub fn new(power: Ratio<i64>, with_log: bool) -> Self {
        Self { power, with_log }
    }

    pub fn power(numer: i64, denom: i64) -> Self {
        Self::new(Ratio::new(numer, denom), false)
    }

    pub fn log() -> Self {
        Self::new(Ratio::from_integer(0), true)
    }

    pub fn constant() -> Self {
        Self::new(Ratio::from_integer(0), false)
    }

    pub fn is_constant(&self) -> bool {
        *self == Self::constant()
    }

    pub fn power_f64(&self) -> f64 {
        *self.power.numer() as f64 / *self.power.denom() as f64
    }

    /// Value of the basis function at `t > 0`.
    pub fn eval(&self, t: f64) -> f64 {
        let p = if self.power == Ratio::from_integer(0) {
            1.0
        } else if self.power.is_integer() {
            t.powi(*self.power.numer() as i32)
        } else {
            t.powf(self.power_f64())
        };
        if self.with_log {
            p * t.ln()
        } else {
            p
        }
    }
}

impl fmt::Display for BasisTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let zero = Ratio::from_integer(0);
        match (self.power == zero, self.with_log) {
            (true, false) => write!(f, "1"),
            (true, true) => write!(f, "log t"),
            (false, false) => write!(f, "t^{}", self.power),
            (false, true) => write!(f, "t^{} log t", self.power),
        }
    }
}

/// Parameters an expansion was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionParams {
    pub beta: f64,
    pub n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

/// Finite sum of basis terms with real coefficients.
///
/// Terms that vanish for particular parameters are kept, so the structure of
/// an expansion does not depend on its parameters; see [`Expansion::nonzero_terms`].
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    pub edge: Edge,
    pub params: ExpansionParams,
    terms: BTreeMap<BasisTerm, f64>,
}

/// Flat, serializable view of one term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermRow {
    pub power: String,
    pub power_value: f64,
    pub with_log: bool,
    pub coefficient: f64,
}

impl Expansion {
    pub fn new(edge: Edge, params: ExpansionParams) -> Self {
        Self {
            edge,
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn with_term(mut self, term: BasisTerm, coefficient: f64) -> Self {
        *self.terms.entry(term).or_insert(0.0) += coefficient;
        self
    }

    pub fn coefficient(&self, term: BasisTerm) -> f64 {
        self.terms.get(&term).copied().unwrap_or(0.0)
    }

    /// Terms in decreasing order of growth.
    pub fn terms(&self) -> impl Iterator<Item = (BasisTerm, f64)> + '_ {
        self.terms.iter().rev().map(|(k, v)| (*k, *v))
    }

    pub fn nonzero_terms(&self) -> Vec<(BasisTerm, f64)> {
        self.terms().filter(|(_, c)| *c != 0.0).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn rows(&self) -> Vec<TermRow> {
        self.terms()
            .map(|(term, coefficient)| TermRow {
                power: term.power.to_string(),
                power_value: term.power_f64(),
                with_log: term.with_log,
                coefficient,
            })
            .collect()
    }

    /// `Σ coeff · t^power (· log t)` for `t > 0`.
    pub fn evaluate(&self, t: f64) -> Result<f64, AsymError> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(AsymError::Domain(format!("expansions are evaluated at t > 0, got {t}")));
        }
        Ok(self.terms().map(|(term, c)| c * term.eval(t)).sum())
    }

    /// Same function written in the variable `t` after substituting `s t`.
    ///
    /// `log(s t) = log t + log s`; the `log s` part of a `t^p log t` term
    /// moves to the `t^p` term.
    pub fn rescaled(&self, s: f64) -> Result<Self, AsymError> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(AsymError::Domain(format!("scale factor must be positive, got {s}")));
        }
        let ln_s = s.ln();
        let mut out = Self::new(self.edge, self.params);
        for (term, c) in self.terms() {
            let factor = BasisTerm::new(term.power, false).eval(s);
            out = out.with_term(term, c * factor);
            if term.with_log {
                out = out.with_term(BasisTerm::new(term.power, false), c * factor * ln_s);
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out
    }

    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&BasisTerm::constant());
        out
    }
}

impl Add for &Expansion {
    type Output = Expansion;

    fn add(self, rhs: &Expansion) -> Expansion {
        let mut out = self.clone();
        for (term, c) in rhs.terms() {
            out = out.with_term(term, c);
        }
        out
    }
}

impl Neg for &Expansion {
    type Output = Expansion;

    fn neg(self) -> Expansion {
        self.scaled(-1.0)
    }
}

impl Sub for &Expansion {
    type Output = Expansion;

    fn sub(self, rhs: &Expansion) -> Expansion {
        self + &(-rhs)
    }
}

/// Per-term comparison of two expansions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualRow {
    pub term: String,
    pub power_value: f64,
    pub with_log: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualTable {
    pub rows: Vec<ResidualRow>,
    /// Largest coefficient magnitude on either side; the relative scale.
    pub scale: f64,
    pub max_relative: f64,
}

impl ResidualTable {
    /// Compares all non-constant terms present on either side.
    pub fn compare(lhs: &Expansion, rhs: &Expansion) -> Self {
        let mut keys: Vec<BasisTerm> = lhs
            .terms()
            .chain(rhs.terms())
            .map(|(k, _)| k)
            .filter(|k| !k.is_constant())
            .collect();
        keys.sort_by(|a, b| b.cmp(a));
        keys.dedup();
        let scale = keys
            .iter()
            .flat_map(|k| [lhs.coefficient(*k).abs(), rhs.coefficient(*k).abs()])
            .fold(0.0, f64::max);
        let denom = if scale > 0.0 { scale } else { 1.0 };
        let rows: Vec<ResidualRow> = keys
            .into_iter()
            .map(|k| {
                let (l, r) = (lhs.coefficient(k), rhs.coefficient(k));
                ResidualRow {
                    term: k.to_string(),
                    power_value: k.power_f64(),
                    with_log: k.with_log,
                    lhs: l,
                    rhs: r,
                    residual: l - r,
                    relative: (l - r).abs() / denom,
                }
            })
            .collect();
        let max_relative = rows.iter().map(|r| r.relative).fold(0.0, f64::max);
        Self {
            rows,
            scale,
            max_relative,
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative <= tol
    }
}
