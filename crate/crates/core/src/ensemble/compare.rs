use serde::Serialize;

use super::{McError, McReport};
use crate::asymptotics::{BasisTerm, Expansion};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub n: usize,
    pub log_p_hat: Option<f64>,
    pub log_p_stderr: Option<f64>,
    /// Absent at `t = 0`, where the expansion has no value.
    pub predicted: Option<f64>,
    pub difference: Option<f64>,
    /// Set when `P̂ = 0` or `t = 0`; the cell is left out of the fit.
    pub excluded: bool,
}

/// Least-squares line through `log P̂(0)` against the leading basis function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadingFit {
    pub basis: String,
    pub points: usize,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    /// Slope after subtracting the non-leading terms of the expansion first.
    pub adjusted_slope: f64,
    pub adjusted_slope_stderr: f64,
    pub expected_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub fit: Option<LeadingFit>,
}

/// Confronts a report with expansions indexed by count. Expansions are
/// evaluated at `|t|`.
pub fn compare_mc_asym(
    report: &McReport,
    expansions: &[(usize, Expansion)],
) -> Result<ComparisonTable, McError> {
    if !report.complete {
        return Err(McError::Incomplete {
            completed: report.samples_completed,
            requested: report.plan.samples,
        });
    }
    let mut rows = Vec::new();
    for row in &report.grid {
        for (n, e) in expansions {
            if *n >= row.p_hat.len().saturating_sub(1) {
                return Err(McError::Usage(format!(
                    "count {n} is not below the histogram cap {}",
                    row.p_hat.len() - 1
                )));
            }
            let predicted = if row.t == 0.0 {
                None
            } else {
                Some(
                    e.evaluate(row.t.abs())
                        .map_err(|err| McError::Usage(err.to_string()))?,
                )
            };
            let p = row.p_hat[*n];
            let (log_p_hat, log_p_stderr) = if p > 0.0 {
                (Some(p.ln()), Some(row.stderr[*n] / p))
            } else {
                (None, None)
            };
            let difference = log_p_hat.zip(predicted).map(|(l, q)| l - q);
            rows.push(ComparisonRow {
                t: row.t,
                n: *n,
                log_p_hat,
                log_p_stderr,
                predicted,
                difference,
                excluded: difference.is_none(),
            });
        }
    }

    let fit = expansions
        .iter()
        .find(|(n, _)| *n == 0)
        .and_then(|(_, e)| leading_fit(&rows, e));
    Ok(ComparisonTable { rows, fit })
}

fn leading_fit(rows: &[ComparisonRow], e: &Expansion) -> Option<LeadingFit> {
    let (lead, coeff) = e.nonzero_terms().into_iter().next()?;
    let pts: Vec<(f64, f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.n == 0 && !r.excluded)
        .map(|r| {
            let x = r.t.abs();
            let rest: f64 = e
                .terms()
                .filter(|(k, _)| *k != lead)
                .map(|(k, c)| c * k.eval(x))
                .sum();
            (lead.eval(x), r.log_p_hat.unwrap(), r.log_p_stderr.unwrap(), rest)
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let raw: Vec<(f64, f64, f64)> = pts.iter().map(|p| (p.0, p.1, p.2)).collect();
    let adjusted: Vec<(f64, f64, f64)> = pts.iter().map(|p| (p.0, p.1 - p.3, p.2)).collect();
    let (slope, slope_stderr, intercept) = ols(&raw)?;
    let (adjusted_slope, adjusted_slope_stderr, _) = ols(&adjusted)?;
    Some(LeadingFit {
        basis: lead_name(lead),
        points: pts.len(),
        slope,
        slope_stderr,
        intercept,
        adjusted_slope,
        adjusted_slope_stderr,
        expected_slope: coeff,
    })
}

fn lead_name(term: BasisTerm) -> String {
    term.to_string().replace('t', "|t|")
}

/// Ordinary least squares with intercept; the slope error is propagated from
/// the per-point standard errors.
fn ols(points: &[(f64, f64, f64)]) -> Option<(f64, f64, f64)> {
    let m = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / m;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let var: f64 = points.iter().map(|p| (p.0 - xbar).powi(2) * p.2 * p.2).sum::<f64>() / (sxx * sxx);
    Some((slope, var.sqrt(), ybar - slope * xbar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ols_recovers_line() {
        let pts = [(1.0, 3.0, 0.1), (2.0, 5.0, 0.1), (4.0, 9.0, 0.1)];
        let (s, se, i) = ols(&pts).unwrap();
        assert!((s - 2.0).abs() < 1e-14 && (i - 1.0).abs() < 1e-14);
        assert!(se > 0.0);
        assert!(ols(&[(1.0, 1.0, 0.0), (1.0, 2.0, 0.0)]).is_none());
    }
}
