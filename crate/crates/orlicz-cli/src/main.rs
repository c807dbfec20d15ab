//! Command line front end for the orlicz library.
//!
//! Exit codes: 0 success, 1 verification-threshold breach, 2 configuration
//! or parse error (clap uses the same code for flag errors), 3 mathematical
//! hypothesis failure.

mod config;
mod emit;

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use orlicz::{
    approx_smooth_kink, check_mult_convolution, defaults, density_from_orlicz_2,
    density_from_orlicz_max, density_from_orlicz_p, embedding_experiment, khintchine_check,
    log_grid, max_equivalence_experiment, musielak_norm, orlicz_from_distribution_max,
    orlicz_from_distribution_p, orlicz_norm, p_equivalence_experiment, parse_function,
    pareto_generates_lp, tail_from_orlicz_max, tail_from_orlicz_p, DensityModel,
    EquivalenceReport, MusielakFamily, OrliczError, OrliczFunction, Result, TailFunction,
};

use config::Resolver;
use emit::{atom_table, atoms_path, density_table, fmt12, smooth_table, write_output};

#[derive(Parser)]
#[command(
    name = "orlicz",
    version,
    about = "Orlicz norms, the distributions generating them, and Monte Carlo verification"
)]
struct Cli {
    /// Flat key=value config file; explicit flags override its entries.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Orlicz or Musielak-Orlicz norm of a vector.
    Norm(NormArgs),
    /// Tail/density tables of the distribution generating a function.
    Generate(GenerateArgs),
    /// Kink smoothing: original and smoothed function side by side.
    Smooth(SmoothArgs),
    /// Quadrature identities and Monte Carlo equivalence checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct NormArgs {
    /// Function specification, e.g. "power:q=1.5|normalize".
    #[arg(long = "fn", value_name = "SPEC")]
    fn_spec: Option<String>,
    /// Semicolon-separated per-coordinate specifications.
    #[arg(long, value_name = "SPEC;SPEC;...", conflicts_with = "fn_spec")]
    musielak: Option<String>,
    /// Comma-separated coordinates, e.g. "3,4".
    #[arg(long, value_name = "CSV")]
    x: Option<String>,
    /// Residual tolerance of the modular at the returned norm.
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Output path (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    /// Law whose expected maxima generate the norm.
    Max,
    /// Law whose expected l_p averages generate the norm (needs --p).
    Lp,
    /// The p=2 specialization with its simplified density.
    P2,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenerateKind,
    /// Function specification; generation requires it normalized.
    #[arg(long = "fn", value_name = "SPEC")]
    fn_spec: Option<String>,
    /// Norm exponent for `lp`.
    #[arg(long, value_name = "FLOAT")]
    p: Option<f64>,
    /// Output path; the atom table lands at <out with extension atoms.csv>.
    /// Default: both tables to stdout separated by a blank line.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SmoothArgs {
    /// Function specification to smooth.
    #[arg(long = "fn", value_name = "SPEC")]
    fn_spec: Option<String>,
    /// Equivalence budget c > 1 in N <= M <= cN.
    #[arg(long, value_name = "FLOAT")]
    c: Option<f64>,
    /// Output path (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum VerifyCheck {
    /// Max-law roundtrip: generate a distribution, rebuild the function.
    RoundtripMax,
    /// l_p-law roundtrip (needs --p).
    RoundtripP,
    /// Ratios of expected maxima to Orlicz norms over a suite.
    Max,
    /// Ratios of expected l_p averages to Orlicz norms (needs --p).
    Lp,
    /// Ratios of expected maxima under the reference power law to plain
    /// l_p norms (needs --p).
    ParetoLp,
    /// Ratios of signed-sum means to Orlicz norms (L1 embedding).
    Embedding,
    /// Multiplicative-convolution identity between two functions.
    Convolution,
    /// Exact Rademacher sign average against the l_2 norm.
    Khintchine,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: VerifyCheck,
    /// Function specification (single-function checks).
    #[arg(long = "fn", value_name = "SPEC")]
    fn_spec: Option<String>,
    /// Left-hand function of the convolution identity.
    #[arg(long = "fnM", value_name = "SPEC")]
    fn_m: Option<String>,
    /// Right-hand function of the convolution identity.
    #[arg(long = "fnN", value_name = "SPEC")]
    fn_n: Option<String>,
    /// Multiplier law: "point:<float>" or "loggamma:p=<float>"; the
    /// convolution check defaults to the l_p law of --fnM at --p.
    #[arg(long, value_name = "SPEC")]
    mu: Option<String>,
    /// Comma-separated coordinates (khintchine).
    #[arg(long, value_name = "CSV")]
    x: Option<String>,
    /// Norm exponent.
    #[arg(long, value_name = "FLOAT")]
    p: Option<f64>,
    /// Suite dimension.
    #[arg(long, value_name = "INT")]
    n: Option<usize>,
    /// Monte Carlo replications per vector.
    #[arg(long = "n-mc", value_name = "INT")]
    n_mc: Option<usize>,
    /// Seed (also via ORLICZ_SEED; flag wins).
    #[arg(long, value_name = "INT")]
    seed: Option<u64>,
    /// "standard" or inline "1,0;0,1;..." vectors.
    #[arg(long, value_name = "SPEC")]
    suite: Option<String>,
    /// Pass/fail threshold: max spread for suite checks, max sup-error for
    /// roundtrips and convolution.
    #[arg(long, value_name = "FLOAT")]
    threshold: Option<f64>,
    /// Emit the per-vector table as CSV instead of the JSON report.
    #[arg(long)]
    csv: bool,
    /// Output path (default: stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            failure_code(&e)
        }
    }
}

/// Configuration mistakes exit 2; failed mathematical hypotheses (a law
/// that cannot exist, a function that cannot be normalized) exit 3.
fn failure_code(e: &OrliczError) -> ExitCode {
    match e {
        OrliczError::InvalidParameter(_)
        | OrliczError::NonFiniteInput(_)
        | OrliczError::LengthMismatch { .. }
        | OrliczError::DomainExceeded { .. }
        | OrliczError::Parse { .. }
        | OrliczError::Io { .. } => ExitCode::from(2),
        OrliczError::NotNormalized { .. }
        | OrliczError::NonNormalizable { .. }
        | OrliczError::NegativeDensity { .. }
        | OrliczError::ConvexityViolation { .. }
        | OrliczError::MassMismatch { .. }
        | OrliczError::NonIntegrableTail(_)
        | OrliczError::QuadratureNonConvergence { .. }
        | OrliczError::HypothesisNotMet(_) => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let resolver = Resolver::new(cli.config.as_deref())?;
    match cli.command {
        Command::Norm(args) => cmd_norm(&resolver, args),
        Command::Generate(args) => cmd_generate(&resolver, args),
        Command::Smooth(args) => cmd_smooth(&resolver, args),
        Command::Verify(args) => cmd_verify(&resolver, args),
    }
}

/// Default residual tolerance for printed norms: tight enough that all
/// twelve displayed digits are converged, not just the library default's ten.
const NORM_PRINT_TOL: f64 = 1e-13;

fn cmd_norm(r: &Resolver, args: NormArgs) -> Result<ExitCode> {
    let x = config::parse_vector(&r.require_string(args.x, "x")?)?;
    let tol = r.number(args.tol, "tol")?.unwrap_or(NORM_PRINT_TOL);
    let fn_spec = r.string(args.fn_spec, "fn");
    let musielak = r.string(args.musielak, "musielak");
    let value = match (fn_spec, musielak) {
        (Some(spec), None) => orlicz_norm(&parse_function(&spec)?, &x, tol)?,
        (None, Some(specs)) => {
            let functions: Result<Vec<OrliczFunction<f64>>> =
                specs.split(';').map(parse_function).collect();
            musielak_norm(&MusielakFamily::new(functions?)?, &x, tol)?
        }
        _ => {
            return Err(OrliczError::InvalidParameter(
                "provide exactly one of --fn and --musielak".into(),
            ))
        }
    };
    write_output(args.out.as_deref(), &format!("{}\n", fmt12(value)))?;
    Ok(ExitCode::SUCCESS)
}

/// A horizon for plotting grids: the tail has decayed below 1e-6 there.
fn plot_horizon(tail: &TailFunction<f64>) -> Result<f64> {
    let mut r = tail.support_floor().max(1.0) * 2.0;
    for _ in 0..200 {
        if tail.tail(r) < 1e-6 {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(OrliczError::NonIntegrableTail(
        "tail does not decay below 1e-6 within range".into(),
    ))
}

fn cmd_generate(r: &Resolver, args: GenerateArgs) -> Result<ExitCode> {
    let m = parse_function(&r.require_string(args.fn_spec, "fn")?)?;
    let d: DensityModel<f64> = match args.kind {
        GenerateKind::Max => density_from_orlicz_max(&m)?,
        GenerateKind::Lp => density_from_orlicz_p(&m, r.require_number(args.p, "p")?)?,
        GenerateKind::P2 => density_from_orlicz_2(&m)?,
    };
    let lo = d.tail().support_floor() * 0.5;
    let hi = plot_horizon(d.tail())?;
    let grid = log_grid(lo, hi, defaults::GRID_POINTS);
    let table = density_table(&d, &grid);
    let atoms = atom_table(&d);
    match args.out {
        Some(path) => {
            write_output(Some(&path), &table)?;
            write_output(Some(&atoms_path(&path)), &atoms)?;
        }
        None => write_output(None, &format!("{table}\n{atoms}"))?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_smooth(r: &Resolver, args: SmoothArgs) -> Result<ExitCode> {
    let m = parse_function(&r.require_string(args.fn_spec, "fn")?)?;
    let c = r.require_number(args.c, "c")?;
    let (n, delta) = approx_smooth_kink(&m, c)?;
    let grid = log_grid(defaults::GRID_SPAN * m.kink(), m.kink(), defaults::GRID_POINTS);
    write_output(args.out.as_deref(), &smooth_table(&m, &n, delta, &grid)?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(r: &Resolver, args: VerifyArgs) -> Result<ExitCode> {
    match args.check {
        VerifyCheck::RoundtripMax | VerifyCheck::RoundtripP => verify_roundtrip(r, args),
        VerifyCheck::Max | VerifyCheck::Lp | VerifyCheck::ParetoLp | VerifyCheck::Embedding => {
            verify_suite(r, args)
        }
        VerifyCheck::Convolution => verify_convolution(r, args),
        VerifyCheck::Khintchine => verify_khintchine(r, args),
    }
}

fn verdict(
    check: &str,
    metric_name: &str,
    metric: f64,
    threshold: f64,
    pass: bool,
) -> ExitCode {
    let status = if pass { "PASS" } else { "FAIL" };
    eprintln!(
        "{check}: {metric_name} {} (threshold {}): {status}",
        fmt12(metric),
        fmt12(threshold)
    );
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn verify_roundtrip(r: &Resolver, args: VerifyArgs) -> Result<ExitCode> {
    let spec = r.require_string(args.fn_spec, "fn")?;
    let m = parse_function(&spec)?;
    let (name, back, default_threshold) = match args.check {
        VerifyCheck::RoundtripMax => {
            let d = tail_from_orlicz_max(&m)?;
            ("roundtrip-max", orlicz_from_distribution_max(&d)?, 1e-6)
        }
        _ => {
            let p = r.require_number(args.p, "p")?;
            let d = tail_from_orlicz_p(&m, p)?;
            ("roundtrip-p", orlicz_from_distribution_p(&d, p)?, 1e-4)
        }
    };
    let threshold = r.number(args.threshold, "threshold")?.unwrap_or(default_threshold);
    let mut sup = 0.0f64;
    let mut at = 0.0f64;
    for &t in &log_grid(defaults::GRID_SPAN * m.kink(), m.kink(), defaults::GRID_POINTS) {
        let gap = (back.eval(t, 0)? - m.eval(t, 0)?).abs();
        if gap > sup {
            sup = gap;
            at = t;
        }
    }
    let pass = sup <= threshold;
    let report = json!({
        "check": name,
        "fn": spec,
        "sup_error": sup,
        "at": at,
        "threshold": threshold,
        "pass": pass,
    });
    emit_json(args.out.as_deref(), &report)?;
    Ok(verdict(name, "sup error", sup, threshold, pass))
}

fn verify_suite(r: &Resolver, args: VerifyArgs) -> Result<ExitCode> {
    let n = r.number(args.n, "n")?.unwrap_or(64);
    let n_mc = r.number(args.n_mc, "n_mc")?.unwrap_or(defaults::DEFAULT_N_MC);
    let seed = r.seed(args.seed)?;
    let suite = config::parse_suite(r.string(args.suite.clone(), "suite").as_deref(), n, seed)?;
    let report: EquivalenceReport = match args.check {
        VerifyCheck::Max => {
            let m = parse_function(&r.require_string(args.fn_spec, "fn")?)?;
            max_equivalence_experiment(&m, n, Some(&suite), n_mc, seed)?
        }
        VerifyCheck::Lp => {
            let m = parse_function(&r.require_string(args.fn_spec, "fn")?)?;
            let p = r.require_number(args.p, "p")?;
            p_equivalence_experiment(&m, p, n, Some(&suite), n_mc, seed)?
        }
        VerifyCheck::ParetoLp => {
            let p = r.require_number(args.p, "p")?;
            pareto_generates_lp(p, n, Some(&suite), n_mc, seed)?
        }
        _ => {
            let m = parse_function(&r.require_string(args.fn_spec, "fn")?)?;
            embedding_experiment(&m, &suite, n_mc, seed)?
        }
    };
    let threshold = r.number(args.threshold, "threshold")?.unwrap_or(8.0);
    let pass = report.spread <= threshold;
    if args.csv {
        write_output(args.out.as_deref(), &report.to_csv())?;
    } else {
        let value = serde_json::to_value(&report).expect("report serializes");
        emit_json(args.out.as_deref(), &value)?;
    }
    Ok(verdict(&report.experiment.clone(), "spread", report.spread, threshold, pass))
}

fn verify_convolution(r: &Resolver, args: VerifyArgs) -> Result<ExitCode> {
    let m_spec = r.require_string(args.fn_m, "fnM")?;
    let n_spec = r.require_string(args.fn_n, "fnN")?;
    let m = parse_function(&m_spec)?;
    let n = parse_function(&n_spec)?;
    let (mu, mu_echo) = match r.string(args.mu, "mu") {
        Some(spec) => (config::parse_tail_spec(&spec)?, spec),
        None => {
            let p = r.require_number(args.p, "p")?;
            (tail_from_orlicz_p(&m, p)?, format!("lp law of fnM at p={p}"))
        }
    };
    let target = tail_from_orlicz_max(&m)?;
    let hi = plot_horizon(&target)?;
    let grid = log_grid(target.support_floor() * 0.5, hi, defaults::GRID_POINTS);
    let report = check_mult_convolution(&m, &n, &mu, &grid)?;
    let threshold = r.number(args.threshold, "threshold")?.unwrap_or(1e-4);
    let pass = report.sup_residual <= threshold;
    let out = json!({
        "check": "convolution",
        "fnM": m_spec,
        "fnN": n_spec,
        "mu": mu_echo,
        "sup_residual": report.sup_residual,
        "at": report.at,
        "threshold": threshold,
        "pass": pass,
    });
    emit_json(args.out.as_deref(), &out)?;
    Ok(verdict("convolution", "sup residual", report.sup_residual, threshold, pass))
}

fn verify_khintchine(r: &Resolver, args: VerifyArgs) -> Result<ExitCode> {
    let x = config::parse_vector(&r.require_string(args.x, "x")?)?;
    let ratio = khintchine_check(&x)?;
    let (lower, upper) = (FRAC_1_SQRT_2 - 1e-9, 1.0 + 1e-9);
    let pass = ratio >= lower && ratio <= upper;
    let out = json!({
        "check": "khintchine",
        "x": x.as_slice(),
        "ratio": ratio,
        "lower": FRAC_1_SQRT_2,
        "upper": 1.0,
        "pass": pass,
    });
    emit_json(args.out.as_deref(), &out)?;
    Ok(verdict("khintchine", "ratio", ratio, upper, pass))
}

fn emit_json(out: Option<&std::path::Path>, value: &serde_json::Value) -> Result<()> {
    let text = format!("{:#}\n", value);
    write_output(out, &text)
}
