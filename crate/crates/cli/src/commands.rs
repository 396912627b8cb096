use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use edgegas::asymptotics::{
    bulk_expansion, factorization_residual, hard_duality_residual, hard_expansion,
    soft_duality_residual, soft_expansion, Edge, Expansion, ResidualTable,
};
use edgegas::electrostatics::{
    hard_solve_with, soft_solve_with, HardEdgeProblem, SoftEdgeProblem, SolverOptions,
};
use edgegas::ensemble::{
    compare_mc_asym, run_mc, ComparisonTable, EnsembleKind, EnsembleSpec, McPlan, McReport,
    WindowEdge,
};
use edgegas::numerics::{DEFAULT_REL_TOL, DEFAULT_ROOT_TOL};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Grid, RunConfig};
use crate::error::CliError;
use crate::output::{csv_rows, kv_text, num, table_text, Report};

/// Residual threshold for `check`.
pub const CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EdgeArg {
    Hard,
    Soft,
    Bulk,
}

impl EdgeArg {
    fn name(self) -> &'static str {
        match self {
            EdgeArg::Hard => "hard",
            EdgeArg::Soft => "soft",
            EdgeArg::Bulk => "bulk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Duality,
    Factorization,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnsembleArg {
    Gaussian,
    Laguerre,
}

#[derive(Debug, Clone, Args)]
pub struct ElectroArgs {
    /// hard or soft
    #[arg(value_enum)]
    pub edge: Option<EdgeArg>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    /// Laguerre exponent (hard edge only)
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long = "tol-quad")]
    pub tol_quad: Option<f64>,
    #[arg(long = "tol-root")]
    pub tol_root: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct AsymArgs {
    /// hard, soft or bulk
    #[arg(value_enum)]
    pub edge: Option<EdgeArg>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Bulk density
    #[arg(long)]
    pub rho: Option<f64>,
    /// Also evaluate the expansion at this |t|
    #[arg(long = "eval-at")]
    pub eval_at: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// duality or factorization
    #[arg(value_enum)]
    pub kind: Option<CheckKind>,
    #[arg(long, value_enum)]
    pub edge: Option<EdgeArg>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[arg(long, value_enum)]
    pub ensemble: Option<EnsembleArg>,
    #[arg(long, value_enum)]
    pub edge: Option<EdgeArg>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Matrix size
    #[arg(long = "N")]
    pub big_n: Option<usize>,
    /// Comma-separated window parameters
    #[arg(long = "t", visible_alias = "t-grid", value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Last histogram bin (counts at or above it are pooled)
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Stop after this many seconds and flag the report incomplete
    #[arg(long = "max-seconds")]
    pub max_seconds: Option<f64>,
    /// Worker threads; does not affect the output
    #[arg(long)]
    pub threads: Option<usize>,
    /// Attach the comparison with the asymptotic expansions
    #[arg(long)]
    pub compare: bool,
    /// Include wall-clock time in the report
    #[arg(long = "record-timing")]
    pub record_timing: bool,
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl ElectroArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            edge: self.edge.map(|e| e.name().to_string()),
            beta: self.beta,
            n: self.n,
            a: self.a,
            t: self.t.map(Grid::One),
            tol_quad: self.tol_quad,
            tol_root: self.tol_root,
            ..Default::default()
        }
    }
}

impl AsymArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            edge: self.edge.map(|e| e.name().to_string()),
            beta: self.beta,
            n: self.n,
            a: self.a,
            rho: self.rho,
            eval_at: self.eval_at,
            ..Default::default()
        }
    }
}

impl CheckArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            kind: self.kind.map(|k| match k {
                CheckKind::Duality => "duality".to_string(),
                CheckKind::Factorization => "factorization".to_string(),
            }),
            edge: self.edge.map(|e| e.name().to_string()),
            beta: self.beta,
            n: self.n,
            a: self.a,
            ..Default::default()
        }
    }
}

impl McArgs {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            ensemble: self.ensemble.map(|e| match e {
                EnsembleArg::Gaussian => "gaussian".to_string(),
                EnsembleArg::Laguerre => "laguerre".to_string(),
            }),
            edge: self.edge.map(|e| e.name().to_string()),
            beta: self.beta,
            a: self.a,
            big_n: self.big_n,
            t: self.t.clone().map(Grid::Many),
            samples: self.samples,
            seed: self.seed,
            n_max: self.n_max,
            max_seconds: self.max_seconds,
            compare: flag(self.compare),
            record_timing: flag(self.record_timing),
            ..Default::default()
        }
    }
}

fn edge_of(cfg: &RunConfig, default: Option<&str>) -> Result<Edge, CliError> {
    match cfg.edge.as_deref().or(default) {
        Some(s) => s.parse().map_err(CliError::from),
        None => Err(CliError::Usage("an edge (hard|soft) is required".into())),
    }
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

/// Flattens a JSON value into `path,value` pairs.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Number(n) => {
            let s = match n.as_f64() {
                Some(f) if !n.is_u64() && !n.is_i64() => num(f),
                _ => n.to_string(),
            };
            out.push((prefix.to_string(), s));
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn key_value_report<T: Serialize>(command: &str, cfg: RunConfig, result: &T) -> Result<Report, CliError> {
    let mut r = Report::new(command, cfg, result)?;
    let mut pairs = Vec::new();
    flatten("", &r.result, &mut pairs);
    let exact = {
        let mut v = Vec::new();
        flatten_exact("", &r.result, &mut v);
        v
    };
    r.csv = csv_rows(&["key", "value"], &exact.into_iter().map(|(k, v)| vec![k, v]).collect::<Vec<_>>());
    let rows: Vec<(&str, String)> = pairs.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    r.text = kv_text(&rows);
    Ok(r)
}

/// Like [`flatten`] but keeps full precision.
fn flatten_exact(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_exact(&p, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten_exact(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn electro(cfg: RunConfig) -> Result<Report, CliError> {
    let edge = edge_of(&cfg, None)?;
    let opts = SolverOptions {
        quad_rel_tol: cfg.tol_quad.unwrap_or(DEFAULT_REL_TOL),
        root_tol: cfg.tol_root.unwrap_or(DEFAULT_ROOT_TOL),
    };
    let beta = cfg.beta.unwrap_or(2.0);
    let n = cfg.n.unwrap_or(0.0);
    let t = need(cfg.scalar_t()?, "t")?;
    let mut eff = RunConfig {
        beta: Some(beta),
        n: Some(n),
        t: Some(Grid::One(t)),
        tol_quad: Some(opts.quad_rel_tol),
        tol_root: Some(opts.root_tol),
        ..cfg.clone()
    };
    match edge {
        Edge::Hard => {
            let a = cfg.a.unwrap_or(0.0);
            eff.a = Some(a);
            let s = hard_solve_with(&HardEdgeProblem::new(t, n, a, beta)?, &opts)?;
            key_value_report("electro", eff, &s)
        }
        Edge::Soft => {
            if cfg.a.is_some() {
                return Err(CliError::Usage("--a applies to the hard edge only".into()));
            }
            let s = soft_solve_with(&SoftEdgeProblem::new(t, n, beta)?, &opts)?;
            key_value_report("electro", eff, &s)
        }
        Edge::Bulk => Err(CliError::Usage("electro supports the hard and soft edges".into())),
    }
}

#[derive(Serialize)]
struct AsymResult {
    edge: Edge,
    params: edgegas::asymptotics::ExpansionParams,
    terms: Vec<edgegas::asymptotics::TermRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<Evaluation>,
}

#[derive(Serialize)]
struct Evaluation {
    t: f64,
    value: f64,
}

pub fn asym(cfg: RunConfig) -> Result<Report, CliError> {
    let edge = edge_of(&cfg, None)?;
    let beta = cfg.beta.unwrap_or(2.0);
    let n = cfg.n.unwrap_or(0.0);
    let mut eff = RunConfig {
        beta: Some(beta),
        n: Some(n),
        ..cfg.clone()
    };
    let e = match edge {
        Edge::Hard => {
            let a = cfg.a.unwrap_or(0.0);
            eff.a = Some(a);
            hard_expansion(beta, n, a)?
        }
        Edge::Soft => soft_expansion(beta, n)?,
        Edge::Bulk => {
            let rho = cfg.rho.unwrap_or(1.0);
            eff.rho = Some(rho);
            bulk_expansion(beta, n, rho)?
        }
    };
    let evaluation = match cfg.eval_at {
        Some(t) => Some(Evaluation { t, value: e.evaluate(t)? }),
        None => None,
    };
    let result = AsymResult {
        edge,
        params: e.params,
        terms: e.rows(),
        evaluation,
    };
    let mut r = Report::new("asym", eff, &result)?;
    let rows: Vec<Vec<String>> = result
        .terms
        .iter()
        .map(|t| vec![t.power.clone(), t.with_log.to_string(), format!("{}", t.coefficient)])
        .collect();
    r.csv = csv_rows(&["power", "with_log", "coefficient"], &rows);
    let text_rows: Vec<Vec<String>> = result
        .terms
        .iter()
        .map(|t| vec![term_label(t), num(t.coefficient)])
        .collect();
    r.text = table_text(&["term", "coefficient"], &text_rows);
    if let Some(ev) = &result.evaluation {
        r.text.push_str(&format!("\nvalue at |t| = {}: {}\n", num(ev.t), num(ev.value)));
    }
    Ok(r)
}

fn term_label(t: &edgegas::asymptotics::TermRow) -> String {
    match (t.power.as_str(), t.with_log) {
        ("0", false) => "1".into(),
        ("0", true) => "log|t|".into(),
        ("1", false) => "|t|".into(),
        (p, false) => format!("|t|^{p}"),
        (p, true) => format!("|t|^{p} log|t|"),
    }
}

#[derive(Serialize)]
struct CheckResult {
    check: &'static str,
    edge: Edge,
    #[serde(skip_serializing_if = "Option::is_none")]
    duality: Option<Value>,
    table: ResidualTable,
    tolerance: f64,
    passed: bool,
}

pub fn check(cfg: RunConfig) -> Result<(Report, bool), CliError> {
    let kind = match cfg.kind.as_deref() {
        Some("duality") => CheckKind::Duality,
        Some("factorization") => CheckKind::Factorization,
        Some(other) => return Err(CliError::Usage(format!("unknown check '{other}'"))),
        None => return Err(CliError::Usage("check needs duality or factorization".into())),
    };
    let edge = edge_of(&cfg, Some("hard"))?;
    let n = cfg.n.unwrap_or(0.0);
    let a = cfg.a.unwrap_or(0.0);
    let mut eff = RunConfig {
        edge: Some(edge_name(edge).into()),
        n: Some(n),
        ..cfg.clone()
    };
    let (name, duality, table) = match kind {
        CheckKind::Duality => {
            let beta = cfg.beta.unwrap_or(2.0);
            eff.beta = Some(beta);
            let c = match edge {
                Edge::Hard => {
                    eff.a = Some(a);
                    hard_duality_residual(beta, n, a)?
                }
                Edge::Soft => soft_duality_residual(beta, n)?,
                Edge::Bulk => return Err(CliError::Usage("duality is checked at the hard and soft edges".into())),
            };
            let mut meta = serde_json::to_value(&c)?;
            if let Value::Object(m) = &mut meta {
                m.remove("table");
            }
            ("duality", Some(meta), c.table)
        }
        CheckKind::Factorization => {
            if edge == Edge::Hard {
                eff.a = Some(a);
            }
            ("factorization", None, factorization_residual(edge, n, a)?)
        }
    };
    let passed = table.passes(CHECK_TOL);
    let result = CheckResult {
        check: name,
        edge,
        duality,
        table,
        tolerance: CHECK_TOL,
        passed,
    };
    let mut r = Report::new("check", eff, &result)?;
    let rows: Vec<Vec<String>> = result
        .table
        .rows
        .iter()
        .map(|x| vec![x.term.clone(), x.lhs.to_string(), x.rhs.to_string(), x.residual.to_string(), x.relative.to_string()])
        .collect();
    r.csv = csv_rows(&["term", "lhs", "rhs", "residual", "relative"], &rows);
    let text_rows: Vec<Vec<String>> = result
        .table
        .rows
        .iter()
        .map(|x| vec![x.term.clone(), num(x.lhs), num(x.rhs), num(x.residual), num(x.relative)])
        .collect();
    r.text = table_text(&["term", "lhs", "rhs", "residual", "relative"], &text_rows);
    r.text.push_str(&format!(
        "\n{} (max relative residual {}, tolerance {})\n",
        if passed { "PASS" } else { "FAIL" },
        num(result.table.max_relative),
        num(CHECK_TOL)
    ));
    Ok((r, passed))
}

fn edge_name(e: Edge) -> &'static str {
    match e {
        Edge::Hard => "hard",
        Edge::Soft => "soft",
        Edge::Bulk => "bulk",
    }
}

#[derive(Serialize)]
pub struct McOutput {
    #[serde(flatten)]
    pub report: McReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonTable>,
}

/// Runs the Monte Carlo job. `threads` only sizes the worker pool.
pub fn mc(cfg: RunConfig, threads: Option<usize>) -> Result<(Report, McOutput), CliError> {
    let edge = match edge_of(&cfg, Some("hard"))? {
        Edge::Hard => WindowEdge::Hard,
        Edge::Soft => WindowEdge::Soft,
        Edge::Bulk => return Err(CliError::Usage("mc windows are hard or soft".into())),
    };
    let kind: EnsembleKind = match cfg.ensemble.as_deref() {
        Some(s) => s.parse()?,
        None if edge == WindowEdge::Hard => EnsembleKind::Laguerre,
        None => EnsembleKind::Gaussian,
    };
    let beta = cfg.beta.unwrap_or(2.0);
    let a = match kind {
        EnsembleKind::Laguerre => cfg.a.unwrap_or(0.0),
        EnsembleKind::Gaussian => {
            if cfg.a.is_some_and(|a| a != 0.0) {
                return Err(CliError::Usage("--a applies to the laguerre ensemble only".into()));
            }
            0.0
        }
    };
    let big_n = cfg.big_n.unwrap_or(100);
    let t_grid = need(cfg.grid_t(), "t")?;
    let mut plan = McPlan::new(cfg.samples.unwrap_or(100_000), cfg.seed.unwrap_or(0), t_grid.clone(), cfg.n_max.unwrap_or(4));
    plan.max_seconds = cfg.max_seconds;
    let spec = EnsembleSpec::new(kind, big_n, beta, a)?;
    let eff = RunConfig {
        edge: Some(if edge == WindowEdge::Hard { "hard" } else { "soft" }.into()),
        ensemble: Some(if kind == EnsembleKind::Laguerre { "laguerre" } else { "gaussian" }.into()),
        beta: Some(beta),
        a: (kind == EnsembleKind::Laguerre).then_some(a),
        big_n: Some(big_n),
        t: Some(Grid::Many(t_grid)),
        t_grid: None,
        samples: Some(plan.samples),
        seed: Some(plan.seed),
        n_max: Some(plan.n_max),
        ..cfg.clone()
    };

    let start = Instant::now();
    let job = || run_mc(&spec, edge, &plan);
    let mut report = match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(job)?,
        None => job()?,
    };
    if cfg.record_timing == Some(true) {
        report.wall_seconds = Some(start.elapsed().as_secs_f64());
    }
    let comparison = if cfg.compare == Some(true) && report.complete {
        let expansions = expansions_for(edge, &spec, plan.n_max)?;
        Some(compare_mc_asym(&report, &expansions)?)
    } else {
        None
    };

    let out = McOutput { report, comparison };
    let mut r = Report::new("mc", eff, &out)?;
    r.csv = out.report.to_csv();
    r.text = mc_text(&out);
    Ok((r, out))
}

fn expansions_for(edge: WindowEdge, spec: &EnsembleSpec, n_max: usize) -> Result<Vec<(usize, Expansion)>, CliError> {
    (0..n_max)
        .map(|n| {
            let e = match edge {
                WindowEdge::Hard => hard_expansion(spec.beta, n as f64, spec.a)?,
                WindowEdge::Soft => soft_expansion(spec.beta, n as f64)?,
            };
            Ok((n, e))
        })
        .collect()
}

fn mc_text(out: &McOutput) -> String {
    let r = &out.report;
    let mut s = format!(
        "{} samples of {}{}\n\n",
        r.samples_completed,
        r.plan.samples,
        if r.complete { "" } else { " (INCOMPLETE)" }
    );
    let mut header = vec!["t".to_string()];
    let bins = r.plan.n_max + 1;
    for n in 0..bins {
        header.push(if n + 1 == bins { format!("P(>={n})") } else { format!("P({n})") });
    }
    header.push("-log P(0)".into());
    let rows: Vec<Vec<String>> = r
        .grid
        .iter()
        .map(|g| {
            let mut row = vec![num(g.t)];
            for (p, e) in g.p_hat.iter().zip(&g.stderr) {
                row.push(format!("{} ± {}", fmt_p(*p), fmt_p(*e)));
            }
            row.push(if g.p_hat[0] > 0.0 { num(-g.p_hat[0].ln()) } else { "inf".into() });
            row
        })
        .collect();
    let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
    s.push_str(&table_text(&hdr, &rows));
    if let Some(c) = &out.comparison {
        if let Some(f) = &c.fit {
            s.push_str(&format!(
                "\nfit of log P(0) against {}: slope {} ± {} (adjusted {} ± {}), expected {}\n",
                f.basis,
                num(f.slope),
                num(f.slope_stderr),
                num(f.adjusted_slope),
                num(f.adjusted_slope_stderr),
                num(f.expected_slope)
            ));
        }
    }
    if let Some(w) = r.wall_seconds {
        s.push_str(&format!("\nwall time {w:.3} s\n"));
    }
    s
}

fn fmt_p(p: f64) -> String {
    format!("{p:.5}")
}

/// `prefix.json` and `prefix.csv` next to each other.
pub fn mc_paths(out: &std::path::Path) -> (PathBuf, PathBuf) {
    let base = match out.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("csv") => out.with_extension(""),
        _ => out.to_path_buf(),
    };
    let mut j = base.clone().into_os_string();
    j.push(".json");
    let mut c = base.into_os_string();
    c.push(".csv");
    (PathBuf::from(j), PathBuf::from(c))
}
