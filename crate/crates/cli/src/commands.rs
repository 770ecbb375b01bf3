use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use shapesum::tau::parse_complex;
use shapesum::verify::{run_suite, VerifyOptions};
use shapesum::{
    g2_abs_series, g2_ref, g2_shape, residual_closed_form, residual_integral, residual_lattice, wp_abs_direct, wp_ref,
    wp_shape, Complex64, QuadratureConfig, ShapeSpec, SumConfig, TauPoint,
};

use crate::args::{Cli, Command, EvalArgs, EvalQuantity, Method, OutputFormat, ShapesArgs, SweepArgs, VerifyArgs};

pub const THREADS_ENV: &str = "SHAPESUM_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
    Core(shapesum::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<shapesum::Error> for CliError {
    fn from(e: shapesum::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Complex numbers as `{"re": .., "im": ..}`.
#[derive(Debug, Serialize)]
struct ReIm {
    re: f64,
    im: f64,
}

impl From<Complex64> for ReIm {
    fn from(z: Complex64) -> Self {
        ReIm { re: z.re, im: z.im }
    }
}

/// Reads `SHAPESUM_THREADS` and sizes the worker pool. Returns whether
/// lattice sums should run in parallel.
fn configure_threads() -> Result<bool> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(true);
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{raw}'")))?;
    // a second initialization (only possible in-process) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(n > 1)
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let parallel = configure_threads()?;
    match cli.command {
        Command::Eval { quantity } => eval(quantity, parallel),
        Command::Sweep(args) => sweep(args),
        Command::Verify(args) => verify(args, parallel),
        Command::Shapes(args) => shapes(args),
    }
}

pub fn parse_shape(spec: &str) -> Result<ShapeSpec> {
    if let Some(path) = spec.strip_prefix("file:") {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read shape file '{path}': {e}")))?;
        return Ok(ShapeSpec::from_profile_json(&text)?);
    }
    Ok(spec.parse()?)
}

fn parse_tau(s: &str) -> Result<TauPoint> {
    let z = parse_complex(s).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(TauPoint::new(z)?)
}

fn emit(text: &str, out_path: Option<&Path>) -> Result<()> {
    match out_path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

struct Evaluation {
    value: Complex64,
    method: &'static str,
    error_estimate: f64,
}

fn sum_config(args: &EvalArgs, parallel: bool, zero_origin: bool) -> SumConfig {
    let mut cfg = SumConfig { extrapolate: !args.no_extrapolate, zero_origin, parallel, ..SumConfig::default() };
    if let Some(s) = &args.schedule {
        cfg.lambda_schedule = s.clone();
    }
    cfg
}

fn quad_config(args: &EvalArgs) -> QuadratureConfig {
    QuadratureConfig { rel_tol: args.rel_tol, abs_tol: args.abs_tol, max_subdivisions: args.max_subdivisions }
}

fn required_shape(args: &EvalArgs, why: &str) -> Result<ShapeSpec> {
    let spec = args.shape.as_deref().ok_or_else(|| CliError::Usage(format!("--shape is required {why}")))?;
    parse_shape(spec)
}

fn eval(quantity: EvalQuantity, parallel: bool) -> Result<ExitCode> {
    let start = Instant::now();
    let (name, args) = match &quantity {
        EvalQuantity::G2(a) => ("g2", a),
        EvalQuantity::Residual(a) => ("residual", a),
        EvalQuantity::Wp(a) => ("wp", a),
    };
    let tau = parse_tau(&args.tau)?;
    let result = match quantity {
        EvalQuantity::G2(ref a) => eval_g2(a, tau, parallel)?,
        EvalQuantity::Residual(ref a) => eval_residual(a, tau, parallel)?,
        EvalQuantity::Wp(ref a) => eval_wp(a, tau, parallel)?,
    };
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let text = match args.out.output {
        OutputFormat::Json => {
            let doc = json!({
                "quantity": name,
                "value": ReIm::from(result.value),
                "method": result.method,
                "error_estimate": result.error_estimate,
                "inputs": echo_inputs(args, tau),
                "wall_time_ms": wall_time_ms,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        OutputFormat::Csv => format!(
            "quantity,method,re,im,error_estimate\n{name},{},{:?},{:?},{:?}\n",
            result.method, result.value.re, result.value.im, result.error_estimate
        ),
    };
    emit(&text, args.out.out_path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn echo_inputs(args: &EvalArgs, tau: TauPoint) -> Value {
    json!({
        "shape": args.shape,
        "tau": ReIm::from(tau.value()),
        "z": args.z.as_deref().map(|z| parse_complex(z).map(ReIm::from).ok()),
        "method": format!("{:?}", args.method).to_lowercase(),
        "schedule": args.schedule,
        "extrapolate": !args.no_extrapolate,
        "tol": args.tol,
        "rel_tol": args.rel_tol,
        "abs_tol": args.abs_tol,
        "max_subdivisions": args.max_subdivisions,
        "radius": args.radius,
    })
}

fn eval_g2(args: &EvalArgs, tau: TauPoint, parallel: bool) -> Result<Evaluation> {
    let v = match args.method {
        Method::Auto | Method::Closed => g2_ref(tau, args.tol)?,
        Method::Series => g2_abs_series(tau, args.tol.max(1e-10))?,
        Method::Lattice => {
            let shape = required_shape(args, "for a lattice G2 evaluation")?;
            g2_shape(&shape, tau, &sum_config(args, parallel, true))?
        }
        Method::Integral => return Err(CliError::Usage("G2 has no integral method".into())),
    };
    let method = match v.method {
        shapesum::EisensteinMethod::Reference => "reference",
        shapesum::EisensteinMethod::AbsSeries => "abs_series",
        shapesum::EisensteinMethod::Shape => "lattice",
        shapesum::EisensteinMethod::ReversedOrder => "reversed_order",
    };
    Ok(Evaluation { value: v.value, method, error_estimate: v.error_estimate })
}

fn eval_residual(args: &EvalArgs, tau: TauPoint, parallel: bool) -> Result<Evaluation> {
    let shape = required_shape(args, "for the residual")?;
    let v = match args.method {
        Method::Closed => residual_closed_form(&shape, tau)?,
        Method::Integral => residual_integral(&shape, tau, &quad_config(args))?,
        Method::Lattice => residual_lattice(&shape, tau, &sum_config(args, parallel, true), args.tol)?,
        Method::Auto => match shape {
            ShapeSpec::Custom { .. } => residual_integral(&shape, tau, &quad_config(args))?,
            _ => residual_closed_form(&shape, tau)?,
        },
        Method::Series => return Err(CliError::Usage("the residual has no series method".into())),
    };
    let method = match v.method {
        shapesum::ResidualMethod::Lattice => "lattice",
        shapesum::ResidualMethod::Integral => "integral",
        shapesum::ResidualMethod::ClosedForm => "closed_form",
    };
    Ok(Evaluation { value: v.value, method, error_estimate: v.error_estimate })
}

fn eval_wp(args: &EvalArgs, tau: TauPoint, parallel: bool) -> Result<Evaluation> {
    let z = args.z.as_deref().ok_or_else(|| CliError::Usage("--z is required for wp".into()))?;
    let z = parse_complex(z).map_err(|e| CliError::Usage(e.to_string()))?;
    match args.method {
        Method::Auto | Method::Closed => {
            Ok(Evaluation { value: wp_ref(z, tau, args.tol)?, method: "reference", error_estimate: args.tol })
        }
        Method::Series => Ok(Evaluation {
            value: wp_abs_direct(z, tau, args.radius)?,
            method: "direct",
            // the square truncation leaves an O(1/R^2) tail
            error_estimate: 1.0 / (args.radius as f64).powi(2),
        }),
        Method::Lattice => {
            let shape = required_shape(args, "for a lattice p-function evaluation")?;
            let r = wp_shape(&shape, z, tau, &sum_config(args, parallel, false))?;
            Ok(Evaluation { value: r.value, method: "lattice", error_estimate: r.error_estimate })
        }
        Method::Integral => Err(CliError::Usage("the p-function has no integral method".into())),
    }
}

fn linspace(min: f64, max: f64, steps: usize, k: usize) -> f64 {
    if steps == 1 {
        min
    } else {
        min + (max - min) * k as f64 / (steps - 1) as f64
    }
}

fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let start = Instant::now();
    if args.re_steps == 0 || args.im_steps == 0 {
        return Err(CliError::Usage("grid steps must be at least 1".into()));
    }
    if args.im_min.is_nan()
        || args.im_min < shapesum::tau::MIN_IMAG
        || args.im_max < args.im_min
        || args.re_max < args.re_min
    {
        return Err(CliError::Usage(format!(
            "invalid grid: need re_min <= re_max and {} <= im_min <= im_max",
            shapesum::tau::MIN_IMAG
        )));
    }
    let shape = parse_shape(&args.shape)?;
    let q = QuadratureConfig { rel_tol: args.rel_tol, abs_tol: args.abs_tol, max_subdivisions: args.max_subdivisions };
    // rows follow im, columns follow re
    let grid: Vec<(f64, f64)> = (0..args.im_steps)
        .flat_map(|j| {
            let im = linspace(args.im_min, args.im_max, args.im_steps, j);
            (0..args.re_steps).map(move |k| (linspace(args.re_min, args.re_max, args.re_steps, k), im))
        })
        .collect();
    let rows = grid
        .par_iter()
        .map(|&(re, im)| {
            let tau = TauPoint::from_parts(re, im)?;
            residual_integral(&shape, tau, &q).map(|v| (re, im, v))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let text = match args.out.output {
        OutputFormat::Csv => {
            let mut s = String::from("re_tau,im_tau,re_E,im_E,error_estimate\n");
            for (re, im, v) in &rows {
                writeln!(s, "{re:?},{im:?},{:?},{:?},{:?}", v.value.re, v.value.im, v.error_estimate)
                    .expect("string write");
            }
            s
        }
        OutputFormat::Json => {
            let points: Vec<Value> = rows
                .iter()
                .map(|(re, im, v)| {
                    json!({
                        "tau": {"re": re, "im": im},
                        "value": ReIm::from(v.value),
                        "error_estimate": v.error_estimate,
                    })
                })
                .collect();
            let doc = json!({
                "shape": args.shape,
                "method": "integral",
                "grid": {
                    "re_min": args.re_min, "re_max": args.re_max, "re_steps": args.re_steps,
                    "im_min": args.im_min, "im_max": args.im_max, "im_steps": args.im_steps,
                },
                "points": points,
                "wall_time_ms": start.elapsed().as_secs_f64() * 1e3,
            });
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    };
    emit(&text, args.out.out_path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs, parallel: bool) -> Result<ExitCode> {
    let start = Instant::now();
    let results = run_suite(VerifyOptions { quick: args.quick, parallel });
    let passed = results.iter().all(|r| r.passed);
    let text = if args.json {
        let doc = json!({
            "quick": args.quick,
            "passed": passed,
            "checks": results,
            "wall_time_ms": start.elapsed().as_secs_f64() * 1e3,
        });
        serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
    } else {
        let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let mut s = String::new();
        for r in &results {
            let status = if r.passed { "PASS" } else { "FAIL" };
            let detail = match (&r.discrepancy, &r.error) {
                (Some(d), _) => format!("{d:.3e} <= {:.1e}", r.tolerance),
                (None, Some(e)) => format!("error: {e}"),
                (None, None) => String::new(),
            };
            writeln!(s, "{status}  {:width$}  {detail}", r.name).expect("string write");
        }
        let failed = results.iter().filter(|r| !r.passed).count();
        writeln!(s, "{} checks, {} failed", results.len(), failed).expect("string write");
        s
    };
    emit(&text, args.out_path.as_deref())?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn describe(spec: &str, shape: &ShapeSpec) -> Value {
    let violations = shape.validate();
    let valid = violations.is_empty();
    json!({
        "shape": spec,
        "valid": valid,
        "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "support": valid.then(|| shape.support()),
        "area": valid.then(|| shape.area()),
        "transpose": shape.transpose().ok().map(|t| t.to_string()),
    })
}

fn shapes(args: ShapesArgs) -> Result<ExitCode> {
    let doc = match &args.shape {
        Some(spec) => {
            // report violations instead of failing on them
            let shape = match spec.strip_prefix("file:") {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| CliError::Usage(format!("cannot read shape file '{path}': {e}")))?;
                    let points: Vec<[f64; 2]> =
                        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("profile document: {e}")))?;
                    ShapeSpec::Custom { profile: shapesum::Profile::new(points) }
                }
                None => parse_shape(spec)?,
            };
            describe(spec, &shape)
        }
        None => {
            let builtin = [
                ("rect:c=1", ShapeSpec::Rectangle { c: 1.0 }),
                ("disk", ShapeSpec::Disk),
                ("diamond", ShapeSpec::Diamond),
            ];
            Value::Array(builtin.iter().map(|(s, k)| describe(s, k)).collect())
        }
    };
    let text = match args.out.output {
        OutputFormat::Json => serde_json::to_string_pretty(&doc).expect("serializable") + "\n",
        OutputFormat::Csv => {
            let rows = match doc {
                Value::Array(a) => a,
                one => vec![one],
            };
            let mut s = String::from("shape,valid,support,area,transpose\n");
            for r in rows {
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    r["shape"].as_str().unwrap_or(""),
                    r["valid"],
                    r["support"],
                    r["area"],
                    r["transpose"].as_str().unwrap_or("")
                )
                .expect("string write");
            }
            s
        }
    };
    emit(&text, args.out.out_path.as_deref())?;
    Ok(ExitCode::SUCCESS)
}
