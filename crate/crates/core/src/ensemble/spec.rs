use serde::Serialize;

use super::McError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    Gaussian,
    Laguerre,
}

impl std::str::FromStr for EnsembleKind {
    type Err = McError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "laguerre" => Ok(Self::Laguerre),
            other => Err(McError::Usage(format!("unknown ensemble '{other}'"))),
        }
    }
}

/// Gaussian weight `e^{-βλ²/2}` or Laguerre weight `λ^{βa/2} e^{-βλ/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub beta: f64,
    pub a: f64,
}

impl EnsembleSpec {
    pub fn gaussian(n: usize, beta: f64) -> Result<Self, McError> {
        Self::new(EnsembleKind::Gaussian, n, beta, 0.0)
    }

    pub fn laguerre(n: usize, beta: f64, a: f64) -> Result<Self, McError> {
        Self::new(EnsembleKind::Laguerre, n, beta, a)
    }

    pub fn new(kind: EnsembleKind, n: usize, beta: f64, a: f64) -> Result<Self, McError> {
        let spec = Self { kind, n, beta, a };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), McError> {
        if self.n == 0 {
            return Err(McError::Usage("matrix size N must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(McError::Usage(format!("beta must be positive, got {}", self.beta)));
        }
        if !self.a.is_finite() {
            return Err(McError::Usage(format!("a must be finite, got {}", self.a)));
        }
        if self.kind == EnsembleKind::Laguerre {
            let smallest = self.beta * self.a + 2.0;
            if smallest <= 0.0 {
                return Err(McError::Construction(format!(
                    "smallest chi shape beta*a + 2 = {smallest} is not positive"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowEdge {
    Hard,
    Soft,
}

impl std::str::FromStr for WindowEdge {
    type Err = McError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hard" => Ok(Self::Hard),
            "soft" => Ok(Self::Soft),
            other => Err(McError::Usage(format!("unknown edge '{other}'"))),
        }
    }
}

/// Scaled edge window: hard `(0, t/(4N))`, soft `(threshold(t), ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeWindow {
    pub edge: WindowEdge,
    pub t: f64,
}

/// Raw window in eigenvalue units; `upper` is infinite for the soft edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawInterval {
    pub lower: f64,
    pub upper: f64,
}

impl EdgeWindow {
    pub fn new(edge: WindowEdge, t: f64) -> Self {
        Self { edge, t }
    }

    pub fn raw_interval(&self, spec: &EnsembleSpec) -> Result<RawInterval, McError> {
        if !self.t.is_finite() {
            return Err(McError::Usage(format!("window parameter t = {} is not finite", self.t)));
        }
        let n = spec.n as f64;
        match (self.edge, spec.kind) {
            (WindowEdge::Hard, EnsembleKind::Gaussian) => Err(McError::Usage(
                "the hard edge window requires the laguerre ensemble".into(),
            )),
            (WindowEdge::Hard, EnsembleKind::Laguerre) => {
                if self.t < 0.0 {
                    return Err(McError::Usage(format!(
                        "hard edge window needs t >= 0, got {}",
                        self.t
                    )));
                }
                Ok(RawInterval {
                    lower: 0.0,
                    upper: self.t / (4.0 * n),
                })
            }
            (WindowEdge::Soft, EnsembleKind::Gaussian) => Ok(RawInterval {
                lower: (2.0 * n).sqrt() + self.t / (std::f64::consts::SQRT_2 * n.powf(1.0 / 6.0)),
                upper: f64::INFINITY,
            }),
            (WindowEdge::Soft, EnsembleKind::Laguerre) => Ok(RawInterval {
                lower: 4.0 * n + 2.0 * (2.0 * n).cbrt() * self.t,
                upper: f64::INFINITY,
            }),
        }
    }
}

/// Sampling plan; `n_max` is the last histogram bin, holding counts `>= n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McPlan {
    pub samples: u64,
    pub seed: u64,
    pub t_grid: Vec<f64>,
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<f64>,
}

impl McPlan {
    pub fn new(samples: u64, seed: u64, t_grid: Vec<f64>, n_max: usize) -> Self {
        Self {
            samples,
            seed,
            t_grid,
            n_max,
            max_seconds: None,
        }
    }

    pub fn validate(&self, spec: &EnsembleSpec, edge: WindowEdge) -> Result<(), McError> {
        if self.samples == 0 {
            return Err(McError::Usage("samples must be at least 1".into()));
        }
        if self.t_grid.is_empty() {
            return Err(McError::Usage("t grid is empty".into()));
        }
        if let Some(s) = self.max_seconds {
            if !(s > 0.0) {
                return Err(McError::Usage(format!("max_seconds must be positive, got {s}")));
            }
        }
        for &t in &self.t_grid {
            EdgeWindow::new(edge, t).raw_interval(spec)?;
        }
        Ok(())
    }
}
