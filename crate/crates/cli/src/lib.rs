//! The `whitney` command-line front end.
//!
//! [`run`] parses an argument vector, dispatches to a subcommand and returns the exit
//! code: 0 on success, 1 when an assertion or computation fails, 2 on usage errors.

mod body;
mod expr;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use whitney_core::approx::{best_uniform, e1_convex};
use whitney_core::convexify::{convexify_quadratic, convexify_smooth, SHIFT_INFLATION};
use whitney_core::geometry::position;
use whitney_core::polynomials::is_convex_on;
use whitney_core::smoothness::modulus;
use whitney_core::whitney::{
    all_suites, default_grid, entropy_fn, format_sig, halving_catalog, prop18_f, prop18_suite, ramp, repair_grid,
    repair_suite, round_sig, symmetric_halving_suite, symmetric_random_suite, to_csv, whitney_ratio, Case, Relation,
    Report, SuiteSizes, WitnessFunction,
};
use whitney_core::{ConvexBody, GridSpec, Polynomial, ScalarField};

pub use body::parse_body;
pub use expr::{parse_polynomial, variables_used, ParseError};

/// Failure of a CLI invocation, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Core(#[from] whitney_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use whitney_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
            CliError::Core(E::InvalidInput(_) | E::DimensionMismatch { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Usage(format!("cannot parse polynomial: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn resolution_arg(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(r) if r >= 2 => Ok(r),
        Ok(_) => Err("resolution must be at least 2".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_arg(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        Ok(_) => Err("must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Parameters shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ExperimentConfig {
    /// Body: ball:N, cube:N, simplex:N, [a,b]x[c,d], inline JSON or a JSON file
    #[arg(long, global = true)]
    pub body: Option<String>,
    /// Function: ramp, entropy, roof, or a polynomial such as "x^2 - 3*x*y"
    #[arg(long = "fn", global = true)]
    pub function: Option<String>,
    /// Polynomial degree or modulus order
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Grid points per axis
    #[arg(long, global = true, value_parser = resolution_arg)]
    pub resolution: Option<usize>,
    /// Tolerance for convexity and assertion checks
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_arg)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Ramp width
    #[arg(long, global = true, default_value_t = 0.5, value_parser = positive_arg)]
    pub delta: f64,
    /// Dimension for catalog functions without a body
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Number of randomized cases
    #[arg(long, global = true)]
    pub cases: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best uniform polynomial approximation of degree m
    Approx,
    /// m-th modulus of smoothness
    Modulus,
    /// Lower bound for the best affine error of a convex function
    E1Convex,
    /// Convex quadratic repair of the best quadratic approximation
    Repair,
    /// Add a multiple of |x|^2 to a polynomial to make it convex
    ConvexifySmooth,
    /// Ratio of the best degree m-1 error to the m-th modulus
    WhitneyRatio,
    /// Roof function with saddle and convex best quadratics
    VerifyProp18,
    /// Symmetric bodies: linear error within half the second modulus
    VerifyThm13,
    /// Randomized convex quadratic repairs
    VerifyThm16,
    /// Every suite in one bundle
    Report,
}

#[derive(Debug, Parser)]
#[command(name = "whitney", version, about = "Uniform polynomial approximation on convex bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: ExperimentConfig,
}

/// What a subcommand produced.
enum Output {
    Value(Value),
    Reports(Vec<Report>),
    /// A computed result together with the assertions made about it.
    Checked(Value, Report),
}

/// Runs with the process's stdout and stderr.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Runs with explicit output streams and returns the exit code.
pub fn run_with<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = &cli.config;
    let output = match cli.command {
        Command::Approx => approx(cfg)?,
        Command::Modulus => modulus_cmd(cfg)?,
        Command::E1Convex => e1(cfg)?,
        Command::Repair => repair(cfg)?,
        Command::ConvexifySmooth => smooth(cfg)?,
        Command::WhitneyRatio => ratio(cfg)?,
        Command::VerifyProp18 => {
            let r = cfg.resolution.unwrap_or(101);
            Output::Reports(vec![prop18_suite(&GridSpec::per_axis(&[r, r.div_ceil(2).max(2)]))])
        }
        Command::VerifyThm13 => {
            let (bodies, fields) = halving_catalog();
            let grid = GridSpec::uniform(cfg.resolution.unwrap_or(41));
            Output::Reports(vec![
                symmetric_halving_suite(&bodies, &fields, &grid),
                symmetric_random_suite(cfg.seed, cfg.cases.unwrap_or(100)),
            ])
        }
        Command::VerifyThm16 => Output::Reports(vec![repair_suite(cfg.seed, cfg.cases.unwrap_or(500))]),
        Command::Report => {
            let sizes = match cfg.cases {
                Some(c) => SuiteSizes {
                    symmetric: c,
                    repair: c,
                    smooth: c,
                },
                None => SuiteSizes::default(),
            };
            Output::Reports(all_suites(cfg.seed, sizes))
        }
    };

    let (text, failures) = render(&output, cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Failed(format!("cannot write '{}': {e}", path.display())))?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failed(format!("cannot write output: {e}")))?,
    }
    if failures.is_empty() {
        return Ok(0);
    }
    let _ = writeln!(err, "{} assertion(s) failed:", failures.len());
    for (suite, c) in &failures {
        let _ = writeln!(
            err,
            "  {suite}/{}: expected {} {} (tol {}), got {}",
            c.id,
            c.relation.symbol(),
            format_sig(c.expected),
            format_sig(c.tol),
            format_sig(c.actual)
        );
    }
    Ok(1)
}

fn render(output: &Output, format: Format) -> Result<(String, Vec<(String, Case)>), CliError> {
    let failures_of = |reports: &[&Report]| -> Vec<(String, Case)> {
        reports
            .iter()
            .flat_map(|r| r.failures().map(|c| (r.suite.clone(), c.clone())))
            .collect()
    };
    let text = match (output, format) {
        (Output::Value(v), Format::Json) => json_text(v)?,
        (Output::Value(v), Format::Csv) => key_value_csv(v),
        (Output::Reports(rs), Format::Json) => {
            let v = if rs.len() == 1 { to_value(&rs[0])? } else { to_value(rs)? };
            json_text(&v)?
        }
        (Output::Reports(rs), Format::Csv) => to_csv(rs)?,
        (Output::Checked(v, rep), Format::Json) => json_text(&json!({ "result": v, "report": to_value(rep)? }))?,
        (Output::Checked(v, rep), Format::Csv) => {
            format!("{}\n{}", key_value_csv(v), to_csv(std::slice::from_ref(rep))?)
        }
    };
    let failures = match output {
        Output::Value(_) => Vec::new(),
        Output::Reports(rs) => failures_of(&rs.iter().collect::<Vec<_>>()),
        Output::Checked(_, rep) => failures_of(&[rep]),
    };
    Ok((text, failures))
}

/// Infix form with 12-digit coefficients, in the variable names the parser accepts.
fn poly_text(p: &Polynomial<f64>) -> String {
    let mut s = String::new();
    for (alpha, c) in p.terms().filter(|(_, c)| *c != 0.0) {
        let mag = format_sig(c.abs());
        if s.is_empty() {
            if c < 0.0 {
                s.push('-');
            }
        } else {
            s.push_str(if c < 0.0 { " - " } else { " + " });
        }
        if alpha.total_degree() == 0 {
            s.push_str(&mag);
        } else if mag == "1" {
            s.push_str(&alpha.to_string());
        } else {
            s.push_str(&format!("{mag}*{alpha}"));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn to_value<S: Serialize + ?Sized>(v: &S) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Failed(format!("serialization failed: {e}")))
}

/// Rounds every float to 12 significant digits.
fn round_value(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x) + 0.0))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, v)| (k.clone(), round_value(v))).collect()),
        other => other.clone(),
    }
}

fn json_text(v: &Value) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&round_value(v))
        .map_err(|e| CliError::Failed(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(o) => {
            for (k, v) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, v, rows);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().map(scalar_text).collect();
            rows.push((prefix.to_string(), parts.join(" ")));
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), v, rows);
            }
        }
        other => rows.push((prefix.to_string(), scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(format_sig).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn key_value_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut s = String::from("key,value\n");
    for (k, v) in rows {
        s.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
    }
    s
}

/// A function together with the body it is evaluated on.
struct Problem {
    id: String,
    field: ScalarField<f64>,
    body: ConvexBody<f64>,
    polynomial: Option<Polynomial<f64>>,
    witness: Option<WitnessFunction>,
}

fn catalog(id: &str, cfg: &ExperimentConfig, body_dim: Option<usize>) -> Result<Option<WitnessFunction>, CliError> {
    let dim = cfg.n.or(body_dim);
    let w = match id {
        "ramp" => ramp(cfg.delta, dim.unwrap_or(1))?,
        "entropy" => entropy_fn(dim.unwrap_or(1))?,
        "roof" => prop18_f(),
        _ => return Ok(None),
    };
    Ok(Some(w))
}

fn problem(cfg: &ExperimentConfig) -> Result<Problem, CliError> {
    let src = cfg
        .function
        .as_deref()
        .ok_or_else(|| CliError::Usage("--fn is required".into()))?;
    let body = cfg.body.as_deref().map(parse_body).transpose()?;
    if let Some(w) = catalog(src.trim(), cfg, body.as_ref().map(|b| b.dim()))? {
        let body = body.unwrap_or_else(|| w.natural_body.clone());
        if body.dim() != w.field.dim() {
            return Err(CliError::Usage(format!(
                "'{}' is {}-dimensional but the body is {}-dimensional",
                w.id,
                w.field.dim(),
                body.dim()
            )));
        }
        return Ok(Problem {
            id: w.id.clone(),
            field: w.field.clone(),
            body,
            polynomial: None,
            witness: Some(w),
        });
    }
    let used = variables_used(src)?;
    let body = match body {
        Some(b) => b,
        None => {
            let n = cfg.n.unwrap_or(used.max(1));
            ConvexBody::cuboid(vec![-1.0; n], vec![1.0; n])?
        }
    };
    if used > body.dim() {
        return Err(CliError::Usage(format!(
            "the polynomial uses {used} variables but the body is {}-dimensional",
            body.dim()
        )));
    }
    let p = parse_polynomial(src, body.dim())?;
    let convex = is_convex_on(&p, &body, &grid_for(cfg, body.dim()), cfg.tol)?;
    Ok(Problem {
        id: src.trim().to_string(),
        field: ScalarField::from_polynomial(p.clone()).declare_convex(convex),
        body,
        polynomial: Some(p),
        witness: None,
    })
}

fn grid_for(cfg: &ExperimentConfig, n: usize) -> GridSpec {
    cfg.resolution.map(GridSpec::uniform).unwrap_or_else(|| default_grid(n))
}

fn approx(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let pr = problem(cfg)?;
    let m = cfg.m.unwrap_or(1);
    let sol = best_uniform(&pr.field, &pr.body, m, &grid_for(cfg, pr.body.dim()))?;
    Ok(Output::Value(json!({
        "function": pr.id,
        "m": m,
        "error": sol.error,
        "polynomial": poly_text(&sol.polynomial),
        "coefficients": to_value(&sol.polynomial)?,
        "active_points": sol.active_points,
        "orthogonality_residual": sol.orthogonality_residual(),
    })))
}

fn modulus_cmd(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let pr = problem(cfg)?;
    let m = cfg.m.unwrap_or(2);
    let w = modulus(&pr.field, &pr.body, m, &grid_for(cfg, pr.body.dim()))?;
    Ok(Output::Value(json!({
        "function": pr.id,
        "m": m,
        "value": w.value,
        "x": w.x,
        "h": w.h,
    })))
}

fn e1(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let pr = problem(cfg)?;
    let est = e1_convex(&pr.field, &pr.body, &grid_for(cfg, pr.body.dim()))?;
    Ok(Output::Value(json!({
        "function": pr.id,
        "e1_lower": est.value,
        "points": est.points,
        "weights": est.weights,
    })))
}

fn ratio(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let pr = problem(cfg)?;
    let m = cfg.m.unwrap_or(2);
    let w = pr.witness.clone().unwrap_or_else(|| WitnessFunction {
        id: pr.id.clone(),
        field: pr.field.clone(),
        natural_body: pr.body.clone(),
        expected: Vec::new(),
    });
    let grid = match (cfg.resolution, w.id.starts_with("ramp")) {
        (Some(r), _) => GridSpec::uniform(r),
        (None, true) => whitney_core::whitney::ramp_grid(pr.body.dim()),
        (None, false) => default_grid(pr.body.dim()),
    };
    let est = whitney_ratio(&w, &pr.body, m, &grid)?;
    let mut v = to_value(&est)?;
    if let Value::Object(o) = &mut v {
        let expected: Map<String, Value> = w.expected.iter().map(|e| (e.name.clone(), json!(e.value))).collect();
        o.insert("expected".into(), Value::Object(expected));
    }
    Ok(Output::Value(v))
}

fn repair(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let pr = problem(cfg)?;
    if !pr.field.is_declared_convex() {
        return Err(CliError::Usage(format!("repair needs a convex function; '{}' is not convex", pr.id)));
    }
    let n = pr.body.dim();
    let placed = position(&pr.body)?;
    let inv = placed.map.inverse()?;
    let f = pr.field.compose_affine(&inv.matrix, &inv.offset)?;
    let grid = cfg.resolution.map(GridSpec::uniform).unwrap_or_else(|| repair_grid(n));
    let p = best_uniform(&f, &placed.body, 2, &grid)?.polynomial;
    let r = convexify_quadratic(&f, &p, &placed.body, &grid)?;
    let q = r.q.compose_affine(&placed.map.matrix, &placed.map.offset)?;
    let p_orig = p.compose_affine(&placed.map.matrix, &placed.map.offset)?;

    let inflate = 1.0 + SHIFT_INFLATION;
    let mut report = Report::new("repair");
    report.push(Case::new("psd", Relation::Ge, 0.0, r.q_min_eigenvalue, cfg.tol, "oracle"));
    report.push(Case::new("ball", Relation::Le, r.e_ball * inflate, r.ball_gap, cfg.tol, "oracle"));
    report.push(Case::new(
        "bound",
        Relation::Le,
        2.0 * r.lambda * r.lambda * r.e_k * inflate,
        r.achieved,
        cfg.tol,
        "oracle",
    ));
    let result = json!({
        "function": pr.id,
        "p": poly_text(&p_orig),
        "q": poly_text(&q),
        "q_coefficients": to_value(&q)?,
        "lambda": r.lambda,
        "e_ball": r.e_ball,
        "e_k": r.e_k,
        "shift": r.shift,
        "ball_gap": r.ball_gap,
        "achieved": r.achieved,
        "bound": r.bound,
        "ratio": r.ratio,
        "eigenvalues": r.eigenvalues,
        "clipped": r.clipped,
        "q_min_eigenvalue": r.q_min_eigenvalue,
    });
    Ok(Output::Checked(result, report))
}

fn smooth(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let pr = problem(cfg)?;
    let g = pr
        .polynomial
        .ok_or_else(|| CliError::Usage("convexify-smooth needs a polynomial --fn".into()))?;
    let s = convexify_smooth(&g, &pr.body, &grid_for(cfg, pr.body.dim()))?;
    let mut report = Report::new("convexify-smooth");
    report.push(Case::new("convex", Relation::Ge, 0.0, s.min_hessian_eig, cfg.tol, "oracle"));
    Ok(Output::Checked(
        json!({
            "function": pr.id,
            "h": poly_text(&s.h),
            "h_coefficients": to_value(&s.h)?,
            "l": s.l,
            "min_hessian_eig": s.min_hessian_eig,
        }),
        report,
    ))
}
