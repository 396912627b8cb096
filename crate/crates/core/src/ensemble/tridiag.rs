use serde::Serialize;

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TridiagonalMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Self {
        assert_eq!(
            offdiag.len() + 1,
            diag.len().max(1),
            "off-diagonal must be one shorter than the diagonal"
        );
        Self { diag, offdiag }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            offdiag: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues below `x`.
    ///
    /// Counts negative pivots of the `LDLᵀ` factorization of `T - x`. Pivots
    /// smaller in magnitude than `pivmin` are replaced by `-pivmin`, so the
    /// recurrence never divides by zero.
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.dim();
        if n == 0 {
            return 0;
        }
        let max_e2 = self.offdiag.iter().fold(1.0_f64, |m, e| m.max(e * e));
        let pivmin = f64::MIN_POSITIVE * max_e2;
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() <= pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let e = self.offdiag[i - 1];
            q = (self.diag[i] - x) - e * e / q;
            if q.abs() <= pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }
}

pub fn sturm_count_below(t: &TridiagonalMatrix, x: f64) -> usize {
    t.count_below(x)
}
