//! Command-line front end. Every subcommand prints deterministic JSON to
//! stdout; failures are reported as structured JSON on stderr with a nonzero
//! exit code. `verify` exits 0 exactly when every identity in the selected
//! suite passed.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::process::ExitCode;
use std::sync::Arc;
use symtensor::depth::trace_decompose;
use symtensor::detour::detour_report;
use symtensor::dynamics::{
    drift_report, integrate_rk4, noether_charges, Charges, DriftReport, FrameData, PhaseState,
};
use symtensor::error::{Error, Result};
use symtensor::geometry::Geometry;
use symtensor::json::{decomposition_to_json, normal_form_to_json, tensor_to_json};
use symtensor::lang::pochhammer::{pochhammer_report, PochhammerReport};
use symtensor::lang::{apply_expr, normalize, parse, CurvatureClass};
use symtensor::tensor::make_tensor;
use symtensor::verify::run_verification;

#[derive(Parser)]
#[command(
    name = "symtensor",
    version,
    about = "Exact symmetric-tensor operator algebra: identity verification, \
             depth decomposition, operator rewriting, and the classical \
             spinning-geodesic integrator"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run randomized identity suites and emit a verification report
    Verify(VerifyArgs),
    /// Split a tensor into trace-free depth slices g^k phi_s
    Decompose(DecomposeArgs),
    /// Rewrite an operator expression into normal form
    Normalize(NormalizeArgs),
    /// Apply an operator expression to a tensor
    Apply(ApplyArgs),
    /// Integrate the classical flow and report conserved-charge drift
    Simulate(SimulateArgs),
    /// Compare the normal form of g^m tr^m with the closed product formulas
    Pochhammer(PochhammerArgs),
    /// Residual report for the flat second-order gauge operator
    Detour(DetourArgs),
}

#[derive(Args)]
struct GeoArgs {
    /// background: flat | hyperbolic
    #[arg(long, default_value = "flat")]
    geometry: String,
    /// number of dimensions
    #[arg(long)]
    dim: usize,
    /// flat metric signature as "p,q"; defaults to Euclidean (dim,0)
    #[arg(long)]
    signature: Option<String>,
}

fn parse_signature(s: &str) -> Result<(u32, u32)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidFlags(format!(
            "--signature expects \"p,q\", got {s:?}"
        )));
    }
    let p = parts[0].trim().parse::<u32>();
    let q = parts[1].trim().parse::<u32>();
    match (p, q) {
        (Ok(p), Ok(q)) => Ok((p, q)),
        _ => Err(Error::InvalidFlags(format!(
            "--signature expects nonnegative integers \"p,q\", got {s:?}"
        ))),
    }
}

fn build_geometry(geo: &GeoArgs) -> Result<Arc<Geometry>> {
    match geo.geometry.as_str() {
        "flat" => {
            let (p, q) = match &geo.signature {
                Some(s) => parse_signature(s)?,
                None => (geo.dim as u32, 0),
            };
            if (p + q) as usize != geo.dim {
                return Err(Error::InvalidFlags(format!(
                    "signature ({p},{q}) does not fill dim {}",
                    geo.dim
                )));
            }
            Ok(Arc::new(Geometry::flat(p, q)?))
        }
        "hyperbolic" => {
            if let Some(s) = &geo.signature {
                let (p, q) = parse_signature(s)?;
                if q != 0 || p as usize != geo.dim {
                    return Err(Error::InvalidFlags(format!(
                        "hyperbolic space is Riemannian; signature ({p},{q}) \
                         is not supported"
                    )));
                }
            }
            Ok(Arc::new(Geometry::hyperbolic(geo.dim)?))
        }
        other => Err(Error::InvalidFlags(format!(
            "unknown geometry {other:?}; expected flat or hyperbolic"
        ))),
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    geo: GeoArgs,
    /// sp2 | doublet | box | fig3 | depth | inversion | rewriter | all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random tensors per identity
    #[arg(long, default_value_t = 50)]
    trials: u32,
    /// highest tensor rank in the samples
    #[arg(long = "max-rank", default_value_t = 4)]
    max_rank: u32,
    /// highest coefficient degree in the samples
    #[arg(long = "max-degree", default_value_t = 3)]
    max_degree: u32,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    geo: GeoArgs,
    /// tensor in textual syntax, e.g. "u1^2 - 1/2*x2*u2*u3"
    #[arg(long)]
    tensor: String,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    dim: u32,
    /// operator word, e.g. "divt gradt"
    #[arg(long)]
    expr: String,
    /// coefficient algebra: constant (curvature) | flat
    #[arg(long, default_value = "constant")]
    curvature: String,
}

#[derive(Args)]
struct ApplyArgs {
    #[command(flatten)]
    geo: GeoArgs,
    #[arg(long)]
    expr: String,
    #[arg(long)]
    tensor: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    geo: GeoArgs,
    /// starting position, comma-separated
    #[arg(long)]
    x0: String,
    /// starting momentum, comma-separated
    #[arg(long)]
    pi0: String,
    /// starting spin vector, comma-separated complex entries like "0.3+0.2i"
    #[arg(long)]
    z0: String,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// keep every k-th state in the output (the last state is always kept)
    #[arg(long = "sample-every")]
    sample_every: Option<usize>,
}

#[derive(Args)]
struct PochhammerArgs {
    /// depth of the word g^m tr^m; omit to sweep m = 1..=3
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = 3)]
    dim: u32,
}

#[derive(Args)]
struct DetourArgs {
    #[command(flatten)]
    geo: GeoArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// random fields per constraint class
    #[arg(long, default_value_t = 12)]
    trials: u32,
}

fn parse_floats(flag: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim().parse::<f64>().map_err(|_| {
                Error::InvalidFlags(format!("{flag} expects comma-separated floats, got {p:?}"))
            })
        })
        .collect()
}

/// "a", "bi", "a+bi", "a-bi" with f64 parts.
fn parse_complex(flag: &str, s: &str) -> Result<[f64; 2]> {
    let t = s.trim();
    let bad = || Error::InvalidFlags(format!("{flag}: cannot read complex entry {s:?}"));
    if let Some(im) = t.strip_suffix('i') {
        // find the sign that splits real and imaginary parts, skipping a
        // leading sign and exponent signs like 1e-3
        let bytes = im.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-')
                && bytes[i - 1] != b'e'
                && bytes[i - 1] != b'E'
            {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = im[..i].trim().parse().map_err(|_| bad())?;
                let sign = if bytes[i] == b'-' { -1.0 } else { 1.0 };
                let mag = im[i + 1..].trim();
                let imag: f64 = if mag.is_empty() { 1.0 } else { mag.parse().map_err(|_| bad())? };
                Ok([re, sign * imag])
            }
            None => {
                let imag: f64 = if im.trim().is_empty() {
                    1.0
                } else {
                    im.trim().parse().map_err(|_| bad())?
                };
                Ok([0.0, imag])
            }
        }
    } else {
        Ok([t.parse().map_err(|_| bad())?, 0.0])
    }
}

fn parse_complex_list(flag: &str, s: &str) -> Result<Vec<[f64; 2]>> {
    s.split(',').map(|p| parse_complex(flag, p)).collect()
}

#[derive(Serialize)]
struct SimulateOutput {
    geometry: String,
    dim: usize,
    dt: f64,
    steps: usize,
    sample_every: usize,
    initial_charges: Charges,
    states: Vec<PhaseState>,
    drift: DriftReport,
}

fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateOutput> {
    let geo = build_geometry(&args.geo)?;
    let n = geo.dim();
    let x0 = parse_floats("--x0", &args.x0)?;
    let pi0 = parse_floats("--pi0", &args.pi0)?;
    let z0 = parse_complex_list("--z0", &args.z0)?;
    for (flag, len) in [("--x0", x0.len()), ("--pi0", pi0.len()), ("--z0", z0.len())] {
        if len != n {
            return Err(Error::InvalidFlags(format!(
                "{flag} has {len} entries, expected {n}"
            )));
        }
    }
    if !args.dt.is_finite() || args.dt <= 0.0 {
        return Err(Error::InvalidFlags("--dt must be positive".into()));
    }
    if args.steps == 0 {
        return Err(Error::InvalidFlags("--steps must be positive".into()));
    }
    let frame = FrameData::new(geo.clone());
    let state0 = PhaseState::new(x0, pi0, z0);
    let initial_charges = noether_charges(&state0, &frame);
    let trajectory = integrate_rk4(state0, args.dt, args.steps, &frame)?;
    let drift = drift_report(&trajectory, &frame);
    let sample_every = args
        .sample_every
        .unwrap_or_else(|| (args.steps / 100).max(1));
    let mut states: Vec<PhaseState> = trajectory
        .iter()
        .step_by(sample_every)
        .cloned()
        .collect();
    if (trajectory.len() - 1) % sample_every != 0 {
        states.push(trajectory.last().expect("nonempty trajectory").clone());
    }
    Ok(SimulateOutput {
        geometry: args.geo.geometry.clone(),
        dim: n,
        dt: args.dt,
        steps: args.steps,
        sample_every,
        initial_charges,
        states,
        drift,
    })
}

fn emit<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serialization cannot fail")
    );
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Verify(a) => {
            let geo = build_geometry(&a.geo)?;
            let report =
                run_verification(&geo, &a.suite, a.seed, a.trials, a.max_rank, a.max_degree)?;
            emit(&report);
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Decompose(a) => {
            let geo = build_geometry(&a.geo)?;
            let t = make_tensor(geo, &a.tensor)?;
            emit(&decomposition_to_json(&trace_decompose(&t)?));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Normalize(a) => {
            let class = match a.curvature.as_str() {
                "constant" => CurvatureClass::ConstantCurvature,
                "flat" => CurvatureClass::Flat,
                other => {
                    return Err(Error::InvalidFlags(format!(
                        "unknown curvature class {other:?}; expected constant or flat"
                    )))
                }
            };
            let nf = normalize(&parse(&a.expr)?, a.dim, class);
            emit(&normal_form_to_json(&nf));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Apply(a) => {
            let geo = build_geometry(&a.geo)?;
            let t = make_tensor(geo, &a.tensor)?;
            let out = apply_expr(&parse(&a.expr)?, &t)?;
            emit(&tensor_to_json(&out));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate(a) => {
            emit(&cmd_simulate(&a)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Pochhammer(a) => {
            let range = match a.m {
                Some(m) => m..=m,
                None => 1..=3,
            };
            let reports: Vec<PochhammerReport> =
                range.map(|m| pochhammer_report(m, a.dim)).collect();
            emit(&reports);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Detour(a) => {
            let geo = build_geometry(&a.geo)?;
            emit(&detour_report(&geo, a.seed, a.trials)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let payload =
                serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            eprintln!("{payload}");
            ExitCode::from(2)
        }
    }
}
