//! The `verify` suite: invariant groups checked against independent oracles.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::time::Instant;

use edgegas::asymptotics::{
    bulk_expansion, factorization_residual, hard_duality_residual, soft_duality_residual,
    soft_expansion, AsymError, BasisTerm, Edge,
};
use edgegas::electrostatics::{
    general_v1, general_v1_quadrature, hard_count, hard_count_quadrature, hard_drop,
    hard_drop_quadrature, hard_field_boundary, hard_legacy_entropy, hard_solve, lemma2_h,
    lemma2_h_quadrature, soft_count, soft_count_quadrature, soft_drop, soft_drop_quadrature,
    soft_field_boundary, soft_legacy_entropy, soft_solve, ElectroError, GeneralAlphaProblem,
    HardEdgeProblem, SoftEdgeProblem, SolverOptions,
};
use edgegas::ensemble::{
    count_in_window, run_mc, sample_rng, EdgeWindow, EnsembleSpec, McPlan, Sampler,
    TridiagonalMatrix, WindowEdge,
};
use edgegas::numerics::{
    elliptic_quartet, ln_beta, quad_semi_infinite, quad_singular, quad_singular_at, Abscissa,
    EllipticModulus, QuadratureSpec,
};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::CliError;

/// Groups in the default run; `mc-hard` runs only with `--full`.
pub const GROUPS: &[&str] = &[
    "elliptic",
    "quadrature",
    "hard-oracles",
    "soft-oracles",
    "lemma2",
    "general-v1",
    "entropy",
    "exact-laws",
    "solver",
    "conductor",
    "identities",
    "coefficients",
    "endpoint-laws",
    "sturm",
];

pub const FULL_GROUPS: &[&str] = &["mc-hard"];

#[derive(Debug, Clone, Serialize)]
pub struct GroupResult {
    pub group: String,
    pub passed: bool,
    pub checks: u64,
    pub failures: u64,
    /// Measured error of the check closest to (or furthest past) its tolerance.
    pub worst_error: f64,
    pub worst_tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<String>,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub groups: Vec<GroupResult>,
    pub passed: bool,
}

struct Tally {
    checks: u64,
    failures: u64,
    worst_ratio: f64,
    worst_error: f64,
    worst_tol: f64,
    worst_case: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: 0,
            worst_ratio: -1.0,
            worst_error: 0.0,
            worst_tol: 0.0,
            worst_case: None,
        }
    }

    /// Records a measured error against its tolerance.
    fn err(&mut self, label: impl FnOnce() -> String, error: f64, tol: f64) {
        self.checks += 1;
        let ratio = if error.is_nan() { f64::INFINITY } else { error / tol };
        let failed = !(error <= tol);
        if failed {
            self.failures += 1;
        }
        if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
            self.worst_error = error;
            self.worst_tol = tol;
            self.worst_case = Some(label());
        }
    }

    fn rel(&mut self, label: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        let e = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
        self.err(label, e, tol);
    }

    fn abs(&mut self, label: impl FnOnce() -> String, got: f64, want: f64, tol: f64) {
        self.err(label, (got - want).abs(), tol);
    }

    fn truth(&mut self, label: impl FnOnce() -> String, ok: bool) {
        self.err(label, if ok { 0.0 } else { 1.0 }, 0.0);
    }

    fn finish(self, group: &str, seconds: f64) -> GroupResult {
        GroupResult {
            group: group.to_string(),
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst_error: self.worst_error,
            worst_tolerance: self.worst_tol,
            worst_case: self.worst_case,
            seconds,
        }
    }
}

type Check = Result<(), CliError>;

const T_GRID: [f64; 5] = [1.0, 10.0, 100.0, 1e3, 1e4];
const FRACTIONS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn elliptic(t: &mut Tally) -> Check {
    for i in 1..=100 {
        let k = i as f64 / 101.0;
        let q = elliptic_quartet(EllipticModulus::new(k)?);
        let lhs = q.e * q.k_prime + q.e_prime * q.k - q.k * q.k_prime;
        t.rel(|| format!("Legendre relation at k = {k}"), lhs, FRAC_PI_2, 1e-12);
    }
    let k_int = |k: f64| quad_singular(|th: f64| 1.0 / (1.0 - (k * th.sin()).powi(2)).sqrt(), QuadratureSpec::new(0.0, FRAC_PI_2).tol(1e-13));
    let e_int = |k: f64| quad_singular(|th: f64| (1.0 - (k * th.sin()).powi(2)).sqrt(), QuadratureSpec::new(0.0, FRAC_PI_2).tol(1e-13));
    for i in 1..=9 {
        let k = i as f64 / 10.0;
        let m = EllipticModulus::new(k)?;
        let q = elliptic_quartet(m);
        t.rel(|| format!("K({k})"), q.k, k_int(k)?, 1e-10);
        t.rel(|| format!("E({k})"), q.e, e_int(k)?, 1e-10);
        t.rel(|| format!("K'({k})"), q.k_prime, k_int(m.kc())?, 1e-10);
        t.rel(|| format!("E'({k})"), q.e_prime, e_int(m.kc())?, 1e-10);
    }
    Ok(())
}

fn quadrature(t: &mut Tally) -> Check {
    // Euler beta integrals with endpoint exponents in (-1/2, 2].
    for i in 0..5 {
        for j in 0..5 {
            let p = -0.5 + 0.6 * i as f64;
            let q = -0.45 + 0.6 * j as f64;
            let spec = QuadratureSpec::new(0.0, 1.0).left(p.min(0.0)).right(q.min(0.0));
            let got = quad_singular_at(|a: Abscissa| a.from_lower.powf(p) * a.to_upper.powf(q), spec)?;
            t.rel(|| format!("B({}, {})", p + 1.0, q + 1.0), got, ln_beta(p + 1.0, q + 1.0).exp(), 1e-10);
        }
    }
    // ∫_1^∞ x^{-s} dx = 1/(s-1)
    for s in [1.5f64, 2.0, 3.0] {
        let got = quad_semi_infinite(|a: Abscissa| a.x.powf(-s), 1.0, 1.0, 0.0, (s - 2.0).min(0.0), 1e-12)?.value;
        t.rel(|| format!("tail x^-{s}"), got, 1.0 / (s - 1.0), 1e-9);
    }
    Ok(())
}

fn hard_oracles(t: &mut Tally) -> Check {
    for &tt in &T_GRID {
        for &f in &FRACTIONS {
            let b = f * tt;
            t.rel(|| format!("hard count b={b} t={tt}"), hard_count(b, tt)?, hard_count_quadrature(b, tt, &opts())?, 1e-8);
            t.rel(|| format!("hard drop b={b} t={tt}"), hard_drop(b, tt)?, hard_drop_quadrature(b, tt, &opts())?, 1e-8);
        }
    }
    Ok(())
}

fn soft_oracles(t: &mut Tally) -> Check {
    for &tt in &T_GRID {
        for &f in &FRACTIONS {
            let d = f * tt / 2.0;
            t.rel(|| format!("soft count d={d} t={tt}"), soft_count(d, tt)?, soft_count_quadrature(d, tt, &opts())?, 1e-8);
            t.rel(|| format!("soft drop d={d} t={tt}"), soft_drop(d, tt)?, soft_drop_quadrature(d, tt, &opts())?, 1e-8);
        }
    }
    Ok(())
}

fn lemma2(t: &mut Tally) -> Check {
    for i in 0..=20 {
        let u = i as f64 / 20.0;
        t.abs(|| format!("u = {u}"), lemma2_h(u)?, lemma2_h_quadrature(u, &opts())?, 1e-10);
    }
    Ok(())
}

fn general_v1_group(t: &mut Tally) -> Check {
    for k in 0..=2 {
        for &c in &[0.5, 1.0, 2.0] {
            for &tt in &[0.5, 1.0, 3.0] {
                let p = GeneralAlphaProblem::new(k, c, tt, 1.0)?;
                t.rel(|| format!("k={k} c={c} t={tt}"), general_v1(&p), general_v1_quadrature(&p, &opts())?, 1e-8);
            }
        }
    }
    Ok(())
}

fn entropy(t: &mut Tally) -> Check {
    for &(b, tt, beta) in &[(1.0, 100.0, 1.0), (0.5, 4.0, 0.5), (20.0, 50.0, 4.0), (0.0, 100.0, 4.0), (9.0, 10.0, 1.0)] {
        let e = hard_legacy_entropy(b, tt, beta)?;
        t.err(|| format!("hard b={b} t={tt} beta={beta}"), e.relative_difference(), 1e-6);
    }
    let e = soft_legacy_entropy(0.0, 4.0, 1.0)?;
    let closed = 0.5 * (8.0 / 3.0) * (SQRT_2 - 0.5);
    t.rel(|| "soft empty-blob closed form".into(), e.definition, closed, 1e-6);
    for &d in &[0.5, 1.0, 1.9] {
        let e = soft_legacy_entropy(d, 4.0, 1.0)?;
        t.rel(|| format!("soft d={d} t=4"), e.value, e.definition, 1e-6);
    }
    Ok(())
}

fn exact_laws(t: &mut Tally) -> Check {
    for &beta in &[0.5, 1.0, 2.0, 4.0] {
        for &tt in &[1.0, 10.0, 100.0] {
            let s = hard_solve(&HardEdgeProblem::new(tt, 0.0, 0.0, beta)?)?;
            t.err(|| format!("hard logE beta={beta} t={tt}"), (s.log_e + beta * tt / 8.0).abs(), 4.0 * f64::EPSILON * beta * tt);
            let s = soft_solve(&SoftEdgeProblem::new(tt, 0.0, beta)?)?;
            let want = -beta * tt.powi(3) / 24.0 + (beta / 2.0 - 1.0) * SQRT_2 / 3.0 * tt.powf(1.5);
            t.err(|| format!("soft logE beta={beta} t={tt}"), (s.log_e - want).abs(), 1e-12 * want.abs().max(1.0));
        }
    }
    Ok(())
}

fn solver(t: &mut Tally) -> Check {
    for &tt in &[1e2, 1e4, 1e6] {
        for &n in &[0.0, 0.5, 1.0, 2.0, 5.0] {
            match hard_solve(&HardEdgeProblem::new(tt, n, 0.0, 2.0)?) {
                Ok(s) => t.abs(|| format!("hard n={n} t={tt}"), hard_count(s.b, tt)?, n, 1e-9),
                Err(ElectroError::Infeasible { n_max, .. }) => t.truth(|| format!("hard infeasible n={n} t={tt}"), n >= n_max),
                Err(e) => return Err(e.into()),
            }
            let s = soft_solve(&SoftEdgeProblem::new(tt, n, 2.0)?)?;
            t.abs(|| format!("soft n={n} t={tt}"), soft_count(s.d, tt)?, n, 1e-9);
        }
    }
    Ok(())
}

fn conductor(t: &mut Tally) -> Check {
    for &(f, tt) in &[(0.1, 0.5), (0.5, 3.0), (0.9, 40.0), (0.3, 700.0), (0.0, 5.0), (0.7, 5e3)] {
        let b = f * tt;
        let d = f * tt / 2.0;
        let (b1, b2) = (tt / 2.0 - d, tt / 2.0 + d);
        for i in 1..=20 {
            let u = i as f64 / 21.0;
            if b > 0.0 {
                let x = b * u;
                t.err(|| format!("hard blob x={x}"), hard_field_boundary(x, b, tt)?.re.abs(), 1e-8);
            }
            let x = tt * (1.0 + 10.0 * u);
            t.err(|| format!("hard outer x={x}"), hard_field_boundary(x, b, tt)?.re.abs(), 1e-8);
            t.err(|| format!("soft outer x={x}"), soft_field_boundary(x, d, tt)?.re.abs(), 1e-8);
            if d > 0.0 {
                let x = b1 + (b2 - b1) * u;
                t.err(|| format!("soft blob x={x}"), soft_field_boundary(x, d, tt)?.re.abs(), 1e-8);
            }
        }
    }
    Ok(())
}

fn identities(t: &mut Tally) -> Check {
    let betas = [0.5, 1.0, 2.0, 3.0, 4.0, 8.0];
    for n in 0..=6 {
        let n = n as f64;
        for &a in &[0.0, 0.5, 1.0, 2.0] {
            let r = factorization_residual(Edge::Hard, n, a)?;
            t.err(|| format!("factorization hard n={n} a={a}"), r.max_relative, 1e-13);
            for &beta in &betas {
                match hard_duality_residual(beta, n, a) {
                    Ok(c) => t.err(|| format!("duality hard beta={beta} n={n} a={a}"), c.table.max_relative, 1e-13),
                    Err(AsymError::InfeasibleDual { dual_n }) => t.truth(|| "infeasible dual".into(), dual_n < 0.0),
                    Err(e) => return Err(e.into()),
                }
            }
        }
        let r = factorization_residual(Edge::Soft, n, 0.0)?;
        t.err(|| format!("factorization soft n={n}"), r.max_relative, 1e-13);
        for &beta in &betas {
            match soft_duality_residual(beta, n) {
                Ok(c) => t.err(|| format!("duality soft beta={beta} n={n}"), c.table.max_relative, 1e-13),
                Err(AsymError::InfeasibleDual { dual_n }) => t.truth(|| "infeasible dual".into(), dual_n < 0.0),
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(())
}

fn coefficients(t: &mut Tally) -> Check {
    let s = soft_expansion(2.0, 0.0)?;
    t.truth(|| "soft |t|^3".into(), s.coefficient(BasisTerm::power(3, 1)) == -1.0 / 12.0);
    t.truth(|| "soft |t|^(3/2)".into(), s.coefficient(BasisTerm::power(3, 2)) == 0.0);
    t.truth(|| "soft log".into(), s.coefficient(BasisTerm::log()) == -1.0 / 8.0);
    for rho in [0.5, 1.0, 3.0] {
        let b = bulk_expansion(2.0, 0.0, rho)?;
        t.truth(|| format!("bulk log rho={rho}"), b.coefficient(BasisTerm::log()) == -0.25);
    }
    Ok(())
}

fn endpoint_laws(t: &mut Tally) -> Check {
    let n = 2.0;
    let mut prev = [f64::INFINITY; 2];
    for &tt in &[1e3, 1e4, 1e5, 1e6] {
        let h = hard_solve(&HardEdgeProblem::new(tt, n, 0.0, 2.0)?)?;
        let s = soft_solve(&SoftEdgeProblem::new(tt, n, 2.0)?)?;
        let eb = ((h.b - (4.0 * tt.sqrt() * n - 2.0 * n * n)) / h.b).abs();
        let ed = ((s.d * s.d - (2.0 * tt).sqrt() * n) / (s.d * s.d)).abs();
        t.truth(|| format!("b law improves at t={tt}"), eb < prev[0]);
        t.truth(|| format!("d^2 law improves at t={tt}"), ed < prev[1]);
        prev = [eb, ed];
    }
    t.err(|| "b law at t=1e6".into(), prev[0], 0.02);
    t.err(|| "d^2 law at t=1e6".into(), prev[1], 0.02);
    Ok(())
}

fn dense_eigenvalues(m: &TridiagonalMatrix) -> Vec<f64> {
    let n = m.dim();
    let d = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => m.diag[i],
        1 => m.offdiag[i.min(j)],
        _ => 0.0,
    });
    SymmetricEigen::new(d).eigenvalues.iter().copied().collect()
}

fn sturm(t: &mut Tally, seed: u64) -> Check {
    let lag = EnsembleSpec::laguerre(12, 2.0, 0.0)?;
    let gau = EnsembleSpec::gaussian(12, 1.0)?;
    let sl = Sampler::new(&lag)?;
    let sg = Sampler::new(&gau)?;
    for i in 0..1000u64 {
        let mut rng = sample_rng(seed, i);
        let m = sl.sample(&mut rng);
        let ev = dense_eigenvalues(&m);
        for &x in &[0.5, 4.0, 40.0] {
            let w = EdgeWindow::new(WindowEdge::Hard, x);
            let raw = w.raw_interval(&lag)?;
            let dense = ev.iter().filter(|&&e| e > raw.lower && e < raw.upper).count();
            t.truth(|| format!("laguerre sample {i} t={x}"), count_in_window(&m, &w, &lag)? == dense);
        }
        let m = sg.sample(&mut rng);
        let ev = dense_eigenvalues(&m);
        for &x in &[-6.0, -2.0, 0.0, 1.0] {
            let w = EdgeWindow::new(WindowEdge::Soft, x);
            let raw = w.raw_interval(&gau)?;
            let dense = ev.iter().filter(|&&e| e >= raw.lower).count();
            t.truth(|| format!("gaussian sample {i} t={x}"), count_in_window(&m, &w, &gau)? == dense);
        }
    }
    Ok(())
}

/// Laguerre β = 2, a = 0: `-log P(0) = t/4` exactly for every N.
fn mc_hard(t: &mut Tally, seed: u64) -> Check {
    let spec = EnsembleSpec::laguerre(100, 2.0, 0.0)?;
    let report = run_mc(&spec, WindowEdge::Hard, &McPlan::new(100_000, seed, vec![1.0, 2.0, 4.0], 1))?;
    for row in &report.grid {
        let p = row.p_hat[0];
        let got = -p.ln();
        let se = row.stderr[0] / p;
        let want = row.t / 4.0;
        t.err(|| format!("t={} in standard errors", row.t), (got - want).abs() / se, 3.0);
        if row.t == 4.0 {
            t.rel(|| "t=4 relative".into(), got, want, 0.05);
        }
    }
    Ok(())
}

pub fn run_group(name: &str, seed: u64) -> Result<GroupResult, CliError> {
    let start = Instant::now();
    let mut t = Tally::new();
    match name {
        "elliptic" => elliptic(&mut t),
        "quadrature" => quadrature(&mut t),
        "hard-oracles" => hard_oracles(&mut t),
        "soft-oracles" => soft_oracles(&mut t),
        "lemma2" => lemma2(&mut t),
        "general-v1" => general_v1_group(&mut t),
        "entropy" => entropy(&mut t),
        "exact-laws" => exact_laws(&mut t),
        "solver" => solver(&mut t),
        "conductor" => conductor(&mut t),
        "identities" => identities(&mut t),
        "coefficients" => coefficients(&mut t),
        "endpoint-laws" => endpoint_laws(&mut t),
        "sturm" => sturm(&mut t, seed),
        "mc-hard" => mc_hard(&mut t, seed),
        other => {
            return Err(CliError::Usage(format!(
                "unknown group '{other}'; known: {}",
                GROUPS.iter().chain(FULL_GROUPS).copied().collect::<Vec<_>>().join(", ")
            )))
        }
    }
    .or_else(|e| match e {
        // A numerical failure inside a group is a failed check, not a crash.
        CliError::Accuracy(msg) | CliError::Infeasible(msg) => {
            t.err(|| msg, f64::INFINITY, 0.0);
            Ok(())
        }
        other => Err(other),
    })?;
    Ok(t.finish(name, start.elapsed().as_secs_f64()))
}

/// Groups named explicitly, or the default set (plus `mc-hard` when `full`).
pub fn selected_groups(requested: &[String], full: bool) -> Vec<String> {
    if !requested.is_empty() {
        return requested.to_vec();
    }
    let mut g: Vec<String> = GROUPS.iter().map(|s| s.to_string()).collect();
    if full {
        g.extend(FULL_GROUPS.iter().map(|s| s.to_string()));
    }
    g
}

pub fn run_suite(groups: &[String], seed: u64) -> Result<SuiteResult, CliError> {
    let groups = groups.iter().map(|g| run_group(g, seed)).collect::<Result<Vec<_>, _>>()?;
    let passed = groups.iter().all(|g| g.passed);
    Ok(SuiteResult { groups, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_groups_pass() {
        for g in ["lemma2", "coefficients", "exact-laws", "identities"] {
            let r = run_group(g, 0).unwrap();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn unknown_group_is_usage() {
        assert!(matches!(run_group("nope", 0), Err(CliError::Usage(_))));
    }

    #[test]
    fn tally_tracks_worst() {
        let mut t = Tally::new();
        t.err(|| "a".into(), 1e-12, 1e-10);
        t.err(|| "b".into(), 2e-3, 1e-2);
        t.err(|| "c".into(), 5.0, 1.0);
        let r = t.finish("x", 0.0);
        assert!(!r.passed);
        assert_eq!(r.failures, 1);
        assert_eq!(r.worst_case.as_deref(), Some("c"));
    }

    #[test]
    fn selection() {
        assert_eq!(selected_groups(&[], false).len(), GROUPS.len());
        assert!(selected_groups(&[], true).contains(&"mc-hard".to_string()));
        assert_eq!(selected_groups(&["lemma2".into()], true), vec!["lemma2".to_string()]);
    }
}
