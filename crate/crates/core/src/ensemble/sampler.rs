use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::{EnsembleKind, EnsembleSpec, McError, TridiagonalMatrix};

/// Tridiagonal sampler with the gamma laws for one spec built once.
///
/// A chi variate with `k` degrees of freedom is `√(2 Γ(k/2, 1))`.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: EnsembleSpec,
    inv_sqrt_beta: f64,
    /// Gaussian: off-diagonal laws. Laguerre: bidiagonal diagonal laws.
    first: Vec<Gamma<f64>>,
    /// Laguerre only: bidiagonal sub-diagonal laws.
    second: Vec<Gamma<f64>>,
}

fn gamma(shape: f64) -> Result<Gamma<f64>, McError> {
    if !(shape > 0.0 && shape.is_finite()) {
        return Err(McError::Construction(format!("chi shape {} is not positive", 2.0 * shape)));
    }
    Gamma::new(shape, 1.0).map_err(|e| McError::Construction(format!("gamma({shape}): {e}")))
}

impl Sampler {
    pub fn new(spec: &EnsembleSpec) -> Result<Self, McError> {
        spec.validate()?;
        let n = spec.n;
        let beta = spec.beta;
        let (first, second) = match spec.kind {
            EnsembleKind::Gaussian => {
                let off = (1..n)
                    .map(|k| gamma(beta * (n - k) as f64 / 2.0))
                    .collect::<Result<_, _>>()?;
                (off, Vec::new())
            }
            EnsembleKind::Laguerre => {
                let diag = (0..n)
                    .map(|i| gamma((beta * (spec.a + (n - 1 - i) as f64) + 2.0) / 2.0))
                    .collect::<Result<_, _>>()?;
                let sub = (1..n)
                    .map(|k| gamma(beta * (n - k) as f64 / 2.0))
                    .collect::<Result<_, _>>()?;
                (diag, sub)
            }
        };
        Ok(Self {
            spec: *spec,
            inv_sqrt_beta: 1.0 / beta.sqrt(),
            first,
            second,
        })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TridiagonalMatrix {
        let mut out = TridiagonalMatrix::zeros(self.spec.n);
        self.sample_into(rng, &mut out);
        out
    }

    /// Overwrites `out`, which must have dimension `N`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut TridiagonalMatrix) {
        assert_eq!(out.dim(), self.spec.n);
        let s = self.inv_sqrt_beta;
        match self.spec.kind {
            EnsembleKind::Gaussian => {
                for d in out.diag.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *d = z * s;
                }
                for (e, law) in out.offdiag.iter_mut().zip(&self.first) {
                    *e = law.sample(rng).sqrt() * s;
                }
            }
            EnsembleKind::Laguerre => {
                // Lower bidiagonal B scaled by 1/√β, then B Bᵀ.
                let root2 = std::f64::consts::SQRT_2 * s;
                let mut prev_sub = 0.0;
                for i in 0..self.spec.n {
                    let d = (self.first[i].sample(rng)).sqrt() * root2;
                    out.diag[i] = d * d + prev_sub * prev_sub;
                    if i + 1 < self.spec.n {
                        let sub = self.second[i].sample(rng).sqrt() * root2;
                        out.offdiag[i] = d * sub;
                        prev_sub = sub;
                    }
                }
            }
        }
    }
}

pub fn sample_gaussian<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    rng: &mut R,
) -> Result<TridiagonalMatrix, McError> {
    if spec.kind != EnsembleKind::Gaussian {
        return Err(McError::Usage("sample_gaussian needs a gaussian spec".into()));
    }
    Ok(Sampler::new(spec)?.sample(rng))
}

pub fn sample_laguerre<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    rng: &mut R,
) -> Result<TridiagonalMatrix, McError> {
    if spec.kind != EnsembleKind::Laguerre {
        return Err(McError::Usage("sample_laguerre needs a laguerre spec".into()));
    }
    Ok(Sampler::new(spec)?.sample(rng))
}
