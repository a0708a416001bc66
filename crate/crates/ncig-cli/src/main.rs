//! `ncig` — compute α-divergences, run divergence projections, and verify
//! the toolkit's geometric identities from the command line.
//!
//! Exit codes: 0 success, 1 verification check failed, 2 parse error,
//! 3 domain error, 4 solver did not converge.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ncig::divergence::alpha_divergence;
use ncig::json;
use ncig::lp::{alpha_embed, alpha_unembed};
use ncig::projection::{alpha_project, SolverOptions};
use ncig::quasientropy::{alpha_via_quasientropy, modular_spectrum, ScalarFn};
use ncig::report::{fmt_float, render_rows, ReportFormat};
use ncig::verify::{run_suite, SuiteConfig, CHECK_NAMES};
use ncig::Error;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ncig",
    about = "Non-commutative information geometry: divergences, projections, verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for samplers and solver starts.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance override (oracle agreement, solver, or every suite check).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format for `verify`.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// α-divergence between two functionals given as JSON files.
    Divergence(DivergenceArgs),
    /// α-projection of a functional onto a convex set in the embedded space.
    Project(ProjectArgs),
    /// α-embedding of a functional (or its inverse with --inverse).
    Embed(EmbedArgs),
    /// Relative modular spectrum and quasi-entropy of two positive functionals.
    Spectrum(SpectrumArgs),
    /// Run the seeded property-check suite and emit a report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DivergenceArgs {
    /// First functional (JSON file).
    omega1: PathBuf,
    /// Second functional (JSON file).
    omega2: PathBuf,
    /// α ∈ (−1, 1).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Also evaluate the spectral quasi-entropy route and report agreement.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct ProjectArgs {
    /// Functional to project (JSON file).
    psi: PathBuf,
    /// Convex set in the embedded L_p space (JSON file).
    set: PathBuf,
    /// α ∈ (−1, 1); the set's order must equal 2/(1−α).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Maximum solver iterations.
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    /// Sample count for the optimality certificates.
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

#[derive(Args)]
struct EmbedArgs {
    /// Functional (or L_p vector with --inverse) as a JSON file.
    input: PathBuf,
    /// α ∈ (−1, 1).
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Map an L_p vector back to its functional.
    #[arg(long)]
    inverse: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    /// First (numerator) positive functional.
    phi: PathBuf,
    /// Second (reference) positive functional.
    psi: PathBuf,
    /// Built-in integrand: g_p:alpha=…, t_log_t, identity, one.
    #[arg(long)]
    g: Option<String>,
    /// Tabulated integrand: JSON file with [[t, g(t)], …] pairs.
    #[arg(long)]
    g_table: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite configuration file (JSON); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_PARSE,
            _ => EXIT_DOMAIN,
        };
        Failure::new(code, e.to_string())
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_DOMAIN, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Divergence(args) => cmd_divergence(&cli, args),
        Command::Project(args) => cmd_project(&cli, args),
        Command::Embed(args) => cmd_embed(&cli, args),
        Command::Spectrum(args) => cmd_spectrum(&cli, args),
        Command::Verify(args) => cmd_verify(&cli, args),
    }
}

fn cmd_divergence(cli: &Cli, args: &DivergenceArgs) -> Result<u8, Failure> {
    let w1 = json::parse_functional(&read_file(&args.omega1)?)?;
    let w2 = json::parse_functional(&read_file(&args.omega2)?)?;
    let d = alpha_divergence(&w1, &w2, args.alpha)?;

    let mut out = String::from("{");
    let _ = write!(
        out,
        "\"value\":{},\"lower_bound\":{},\"cross_term\":[{},{}]",
        fmt_float(d.value),
        fmt_float(d.lower_bound),
        fmt_float(d.cross_term.re),
        fmt_float(d.cross_term.im)
    );
    if args.oracle {
        let oracle = alpha_via_quasientropy(&w1, &w2, args.alpha)?;
        let tol = cli.tol.unwrap_or(1e-9);
        let agreement = (oracle - d.value).abs() <= tol * (1.0 + d.value.abs());
        let _ = write!(
            out,
            ",\"oracle_value\":{},\"agreement\":{}",
            fmt_float(oracle),
            agreement
        );
    }
    out.push_str("}\n");
    emit(&cli.out, &out)?;
    Ok(0)
}

fn cmd_project(cli: &Cli, args: &ProjectArgs) -> Result<u8, Failure> {
    let psi = json::parse_functional(&read_file(&args.psi)?)?;
    let set = json::parse_set(&read_file(&args.set)?)?;
    let opts = SolverOptions {
        tolerance: cli.tol.unwrap_or(1e-8),
        max_iter: args.max_iter,
        seed: cli.seed.unwrap_or(0),
        certificate_samples: args.samples,
    };
    let proj = alpha_project(&psi, &set, args.alpha, &opts)?;

    let mut out = String::from("{");
    let _ = write!(
        out,
        "\"omega_m\":{},\"x_m\":{},\"value\":{},\"kkt_residual\":{},\"three_point_worst\":{},\"inequality_gap\":{},\"iterations\":{},\"converged\":{}",
        json::functional_to_json(&proj.omega_m),
        json::lp_vector_to_json(&proj.result.x_m),
        fmt_float(proj.result.value),
        fmt_float(proj.result.kkt_residual),
        fmt_float(proj.result.three_point_worst),
        fmt_float(proj.inequality_gap),
        proj.result.iterations,
        proj.result.converged
    );
    out.push_str("}\n");
    emit(&cli.out, &out)?;
    Ok(if proj.result.converged { 0 } else { EXIT_SOLVER })
}

fn cmd_embed(cli: &Cli, args: &EmbedArgs) -> Result<u8, Failure> {
    let text = read_file(&args.input)?;
    let rendered = if args.inverse {
        let x = json::parse_lp_vector(&text)?;
        let w = alpha_unembed(&x, args.alpha)?;
        json::functional_to_json(&w)
    } else {
        let w = json::parse_functional(&text)?;
        let x = alpha_embed(&w, args.alpha)?;
        json::lp_vector_to_json(&x)
    };
    emit(&cli.out, &format!("{rendered}\n"))?;
    Ok(0)
}

fn cmd_spectrum(cli: &Cli, args: &SpectrumArgs) -> Result<u8, Failure> {
    let phi = json::parse_functional(&read_file(&args.phi)?)?;
    let psi = json::parse_functional(&read_file(&args.psi)?)?;
    let spec = modular_spectrum(&phi, &psi)?;

    let g = match (&args.g, &args.g_table) {
        (Some(_), Some(_)) => {
            return Err(Failure::new(EXIT_DOMAIN, "pass either --g or --g-table, not both"))
        }
        (Some(name), None) => Some(ScalarFn::parse(name)?),
        (None, Some(path)) => {
            let points: Vec<(f64, f64)> = serde_json::from_str(&read_file(path)?)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("bad table: {e}")))?;
            Some(ScalarFn::tabulated(points)?)
        }
        (None, None) => None,
    };

    let mut out = String::from("{");
    let _ = write!(out, "\"restricted\":{},\"pairs\":[", spec.restricted);
    for (i, &(t, w)) in spec.pairs().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "[{},{}]", fmt_float(t), fmt_float(w));
    }
    out.push(']');
    if let Some(g) = g {
        let value = spec.apply(|t| g.eval(t));
        let _ = write!(out, ",\"value\":{}", fmt_float(value));
    }
    out.push_str("}\n");
    emit(&cli.out, &out)?;
    Ok(0)
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs) -> Result<u8, Failure> {
    let (mut cfg, output) = match &args.config {
        Some(path) => json::parse_config(&read_file(path)?)?,
        None => (SuiteConfig::default(), json::OutputSpec::default()),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = cli.tol {
        for name in CHECK_NAMES {
            cfg.tolerances.insert(name.to_string(), tol);
        }
    }
    let rows = run_suite(&cfg)?;

    let format = match (&cli.format, &output.format) {
        (Some(f), _) => f.parse::<ReportFormat>()?,
        (None, Some(f)) => *f,
        (None, None) => ReportFormat::Json,
    };
    let rendered = render_rows(&rows, format);
    let out_path = cli.out.clone().or_else(|| output.path.clone().map(PathBuf::from));
    emit(&out_path, &rendered)?;

    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", rows.len());
        Ok(EXIT_CHECK_FAILED)
    } else {
        eprintln!("all {} checks passed", rows.len());
        Ok(0)
    }
}
