use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    EdgeWindow, EnsembleSpec, McError, McPlan, RawInterval, Sampler, TridiagonalMatrix, WindowEdge,
};

/// Samples per scheduling block; the time budget is checked between blocks.
const BLOCK: u64 = 4096;

/// Eigenvalue count of `t` inside `w`.
pub fn count_in_window(
    t: &TridiagonalMatrix,
    w: &EdgeWindow,
    spec: &EnsembleSpec,
) -> Result<usize, McError> {
    let raw = w.raw_interval(spec)?;
    Ok(count_raw(t, w.edge, &raw))
}

fn count_raw(t: &TridiagonalMatrix, edge: WindowEdge, raw: &RawInterval) -> usize {
    match edge {
        WindowEdge::Hard => t.count_below(raw.upper) - t.count_below(raw.lower),
        WindowEdge::Soft => t.dim() - t.count_below(raw.lower),
    }
}

/// Random stream of one sample: ChaCha8 keyed by the seed, stream = index.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub t: f64,
    pub raw_lower: f64,
    pub raw_upper: f64,
    pub counts: Vec<u64>,
    pub p_hat: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McReport {
    pub spec: EnsembleSpec,
    pub edge: WindowEdge,
    pub plan: McPlan,
    pub grid: Vec<GridRow>,
    pub complete: bool,
    pub samples_completed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_seconds: Option<f64>,
}

impl McReport {
    /// Flat table `t,n,count,p_hat,stderr`; the last `n` is the `>= n_max` bin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,n,count,p_hat,stderr\n");
        for row in &self.grid {
            for (n, ((c, p), s)) in row.counts.iter().zip(&row.p_hat).zip(&row.stderr).enumerate() {
                out.push_str(&format!("{},{},{},{},{}\n", row.t, n, c, p, s));
            }
        }
        out
    }

    pub fn row(&self, t: f64) -> Option<&GridRow> {
        self.grid.iter().find(|r| r.t == t)
    }
}

/// Histogram `[t index][n]` for one block of sample indices.
fn run_block(
    sampler: &Sampler,
    edge: WindowEdge,
    raws: &[RawInterval],
    n_max: usize,
    seed: u64,
    range: std::ops::Range<u64>,
) -> Vec<Vec<u64>> {
    let n = sampler.spec().n;
    let empty = || vec![vec![0u64; n_max + 1]; raws.len()];
    range
        .into_par_iter()
        .fold(
            || (empty(), TridiagonalMatrix::zeros(n)),
            |(mut hist, mut mat), index| {
                let mut rng = sample_rng(seed, index);
                sampler.sample_into(&mut rng, &mut mat);
                for (h, raw) in hist.iter_mut().zip(raws) {
                    let c = count_raw(&mat, edge, raw).min(n_max);
                    h[c] += 1;
                }
                (hist, mat)
            },
        )
        .map(|(hist, _)| hist)
        .reduce(empty, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            a
        })
}

/// Monte Carlo estimate of `P(exactly n eigenvalues in the window)` for
/// each `t` in the plan.
///
/// Every sample draws from its own stream, and histograms are merged by
/// integer addition, so the report does not depend on the thread count.
/// `wall_seconds` is left empty; callers that want it set it themselves.
pub fn run_mc(spec: &EnsembleSpec, edge: WindowEdge, plan: &McPlan) -> Result<McReport, McError> {
    spec.validate()?;
    plan.validate(spec, edge)?;
    let sampler = Sampler::new(spec)?;
    let raws: Vec<RawInterval> = plan
        .t_grid
        .iter()
        .map(|&t| EdgeWindow::new(edge, t).raw_interval(spec))
        .collect::<Result<_, _>>()?;

    let start = Instant::now();
    let mut hist = vec![vec![0u64; plan.n_max + 1]; raws.len()];
    let mut done = 0u64;
    while done < plan.samples {
        if let Some(limit) = plan.max_seconds {
            if start.elapsed().as_secs_f64() > limit {
                break;
            }
        }
        let end = (done + BLOCK).min(plan.samples);
        let block = run_block(&sampler, edge, &raws, plan.n_max, plan.seed, done..end);
        for (h, b) in hist.iter_mut().zip(block) {
            for (x, y) in h.iter_mut().zip(b) {
                *x += y;
            }
        }
        done = end;
    }

    let grid = plan
        .t_grid
        .iter()
        .zip(&raws)
        .zip(hist)
        .map(|((&t, raw), counts)| {
            let m = done.max(1) as f64;
            let p_hat: Vec<f64> = counts.iter().map(|&c| c as f64 / m).collect();
            let stderr = p_hat.iter().map(|&p| (p * (1.0 - p) / m).sqrt()).collect();
            GridRow {
                t,
                raw_lower: raw.lower,
                raw_upper: raw.upper,
                counts,
                p_hat,
                stderr,
            }
        })
        .collect();

    Ok(McReport {
        spec: *spec,
        edge,
        plan: plan.clone(),
        grid,
        complete: done == plan.samples,
        samples_completed: done,
        wall_seconds: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_is_point_mass() {
        let spec = EnsembleSpec::laguerre(10, 2.0, 0.0).unwrap();
        let plan = McPlan::new(1, 3, vec![1.0, 5.0], 3);
        let r = run_mc(&spec, WindowEdge::Hard, &plan).unwrap();
        for row in &r.grid {
            assert_eq!(row.counts.iter().sum::<u64>(), 1);
            assert!(row.p_hat.iter().all(|&p| p == 0.0 || p == 1.0));
        }
    }

    #[test]
    fn zero_width_hard_window() {
        let spec = EnsembleSpec::laguerre(8, 1.0, 0.0).unwrap();
        let mut rng = sample_rng(0, 0);
        let t = Sampler::new(&spec).unwrap().sample(&mut rng);
        assert_eq!(count_in_window(&t, &EdgeWindow::new(WindowEdge::Hard, 0.0), &spec).unwrap(), 0);
    }

    #[test]
    fn hard_window_needs_laguerre() {
        let spec = EnsembleSpec::gaussian(8, 1.0).unwrap();
        let plan = McPlan::new(10, 0, vec![1.0], 2);
        assert!(matches!(run_mc(&spec, WindowEdge::Hard, &plan), Err(McError::Usage(_))));
    }

    #[test]
    fn csv_layout() {
        let spec = EnsembleSpec::gaussian(6, 2.0).unwrap();
        let plan = McPlan::new(20, 1, vec![-1.0], 2);
        let csv = run_mc(&spec, WindowEdge::Soft, &plan).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,n,count,p_hat,stderr");
        assert_eq!(lines.len(), 4);
    }
}
