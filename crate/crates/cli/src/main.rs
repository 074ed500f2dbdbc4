mod args;
mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use jacobi_kit::jacobi::JacobiParams;
use jacobi_kit::quadrature::QuadratureSpec;

use commands::{Context, Output};
use error::CliError;
use output::{emit, Format};

/// Jacobi functions, transforms, convolutions and kernels on rank-one spaces.
#[derive(Debug, Parser)]
#[command(name = "jacobi-kit", version)]
struct Cli {
    #[arg(long, global = true, default_value_t = 1.3, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, global = true, default_value_t = 0.2, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file (atomically) instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Truncation radius of radial integrals.
    #[arg(long = "quad-tmax", global = true)]
    quad_tmax: Option<f64>,
    /// Truncation of spectral integrals.
    #[arg(long = "quad-lmax", global = true)]
    quad_lmax: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// φ_λ(t) on a grid of λ and t.
    Eval(commands::EvalArgs),
    /// Bessel-type expansion with remainder, or Harish-Chandra coefficients.
    Expand(commands::ExpandArgs),
    /// Forward transform, roundtrip and Plancherel check.
    Transform(commands::TransformArgs),
    /// Hypergroup convolution of two radial functions.
    Convolve(commands::ConvolveArgs),
    /// Riesz potential kernel k_a.
    Riesz(commands::RieszArgs),
    /// L^p → L^q boundedness region of the Riesz potential.
    Region(commands::RegionArgs),
    /// Jacobi parameters of a geometry, with identity checks (JSON).
    Geom(commands::GeomArgs),
    /// Run the acceptance criteria.
    Selftest(commands::SelftestArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("JACOBIKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("JACOBIKIT_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn context(cli: &Cli) -> Result<Context, CliError> {
    let params = JacobiParams::new(cli.alpha, cli.beta)?;
    let mut quad = QuadratureSpec::default();
    if let Some(t) = cli.tol {
        quad = quad.with_tol(t);
    }
    if let Some(t) = cli.quad_tmax {
        quad = quad.with_t_max(t);
    }
    if let Some(l) = cli.quad_lmax {
        quad = quad.with_lambda_max(l);
    }
    quad.validate()?;
    Ok(Context { params, quad, lambda_max_set: cli.quad_lmax.is_some() })
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    let output = match &cli.command {
        Command::Geom(a) => commands::geom(a)?,
        Command::Selftest(a) => commands::selftest(a)?,
        cmd => {
            let ctx = context(cli)?;
            match cmd {
                Command::Eval(a) => commands::eval(&ctx, a)?,
                Command::Expand(a) => commands::expand(&ctx, a)?,
                Command::Transform(a) => commands::transform(&ctx, a)?,
                Command::Convolve(a) => commands::convolve_cmd(&ctx, a)?,
                Command::Riesz(a) => commands::riesz(&ctx, a)?,
                Command::Region(a) => commands::region(&ctx, a)?,
                Command::Geom(_) | Command::Selftest(_) => unreachable!(),
            }
        }
    };
    let out = cli.out.as_deref();
    match output {
        Output::Table(table) => {
            if let Some(row) = table.first_non_finite() {
                return Err(CliError::NonFinite(format!("row {row} holds a non-finite value")));
            }
            emit(&table.render(cli.format)?, out)?;
            if let (Format::Csv, Some(diagnostics)) = (cli.format, &table.diagnostics) {
                eprintln!("{}", serde_json::json!({ "diagnostics": diagnostics }));
            }
            Ok(ExitCode::SUCCESS)
        }
        Output::Document(doc) => {
            let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.into()))?;
            bytes.push(b'\n');
            emit(&bytes, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Output::Report { text, json, success } => {
            let bytes = match cli.format {
                Format::Csv => text.into_bytes(),
                Format::Json => {
                    let mut b = serde_json::to_vec_pretty(&json).map_err(|e| CliError::Io(e.into()))?;
                    b.push(b'\n');
                    b
                }
            };
            emit(&bytes, out)?;
            Ok(if success { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    ExitCode::from(2)
                } else {
                    ExitCode::SUCCESS
                };
            }
            _ => {
                let err = CliError::Usage(e.to_string().trim_end().to_string());
                eprintln!("{}", err.to_json());
                return ExitCode::from(2);
            }
        },
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
