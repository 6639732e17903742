use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use qspace::commands::{self, GridFormat, GridSpec, Output};
use qspace::formats;
use qspace::validate::{validate, ValidateOptions};
use qspace_core::multishell::{MultiShellGrid, SpfMode};
use qspace_core::radial::BConvention;

#[derive(Parser)]
#[command(name = "qspace", version, about = "Multi-shell q-space sampling grids and SPF transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a sampling grid as a gradient table, descriptor or sample table.
    Grid {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, value_enum, default_value_t = Format::Bvec)]
        format: Format,
        /// Also emit the full-sphere point list (samples plus antipodes).
        #[arg(long)]
        mirror: bool,
        /// Output prefix; files get `.bvals`/`.bvecs`, `.json`, `.csv` or `.mirror.csv` appended.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compute SPF coefficients from a sample file.
    Forward {
        /// Scheme descriptor written by `grid --format json`.
        #[arg(long)]
        scheme: PathBuf,
        /// One value per line in grid sample order.
        #[arg(long)]
        samples: PathBuf,
        /// Project every degree onto all radial orders, treating missing degrees as zero.
        #[arg(long)]
        zero_padded: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate an SPF expansion at `b x y z` query rows.
    Evaluate {
        #[arg(long)]
        scheme: PathBuf,
        /// CSV written by `forward`.
        #[arg(long)]
        coefficients: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        /// Print `re,im` instead of the real part.
        #[arg(long)]
        complex: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check quadrature, conditioning and round trips; exit status 1 on failure.
    Validate {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random signals per round-trip check.
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SchemeArgs {
    /// Rebuild from a scheme descriptor instead of the parameters below.
    #[arg(long, conflicts_with_all = ["shells", "bmax", "bandlimits", "convention", "tau", "latitudes"])]
    descriptor: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    shells: usize,
    /// Largest b-value in s/mm².
    #[arg(long, default_value_t = 8000.0)]
    bmax: f64,
    /// Odd angular band-limit per shell, innermost first.
    #[arg(long, value_delimiter = ',', default_value = "3,5,9,11")]
    bandlimits: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Convention::Normalized)]
    convention: Convention,
    /// Effective diffusion time for the physical convention, `b = 4π²τq²`.
    #[arg(long, required_if_eq("convention", "physical"))]
    tau: Option<f64>,
    /// Ring latitude override as `SHELL:theta,theta,...` (1-based shell, radians). Repeatable.
    #[arg(long, value_parser = commands::parse_latitude_override)]
    latitudes: Vec<(usize, Vec<f64>)>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Bvec,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    Normalized,
    Physical,
}

impl SchemeArgs {
    fn grid(&self) -> Result<MultiShellGrid> {
        if let Some(path) = &self.descriptor {
            return Ok(commands::load_scheme(path)?);
        }
        let convention = match self.convention {
            Convention::Normalized => BConvention::Normalized,
            Convention::Physical => BConvention::Physical { tau: self.tau.context("--tau is required")? },
        };
        let spec = GridSpec {
            shells: self.shells,
            b_max: self.bmax,
            band_limits: self.bandlimits.clone(),
            convention,
            latitudes: self.latitudes.clone(),
        };
        Ok(spec.build()?)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Grid { scheme, format, mirror, output } => {
            let grid = scheme.grid()?;
            let format = match format {
                Format::Bvec => GridFormat::Bvec,
                Format::Json => GridFormat::Json,
                Format::Csv => GridFormat::Csv,
            };
            commands::write_outputs(&commands::grid_outputs(&grid, format, mirror, output.as_deref())?)?;
        }
        Command::Forward { scheme, samples, zero_padded, output } => {
            let grid = commands::load_scheme(&scheme)?;
            let values = formats::parse_samples(&commands::read_file(&samples)?).map_err(|e| e.in_file(&samples))?;
            let mode = if zero_padded { SpfMode::ZeroPadded } else { SpfMode::Staircase };
            let result = commands::forward(&grid, &values, mode)?;
            eprintln!("reconstruction residual: {:e}", result.residual);
            let csv = formats::write_coefficients(result.coefficients.layout(), result.coefficients.values());
            commands::write_outputs(&[Output { path: output, contents: csv }])?;
        }
        Command::Evaluate { scheme, coefficients, queries, complex, output } => {
            let grid = commands::load_scheme(&scheme)?;
            let (layout, values) = formats::parse_coefficients(&commands::read_file(&coefficients)?)
                .map_err(|e| e.in_file(&coefficients))?;
            let rows = formats::parse_queries(&commands::read_file(&queries)?).map_err(|e| e.in_file(&queries))?;
            let result = commands::evaluate(&grid, layout, values, &rows)?;
            commands::write_outputs(&[Output { path: output, contents: formats::write_values(&result, complex) }])?;
        }
        Command::Validate { scheme, seed, trials, output } => {
            let grid = scheme.grid()?;
            let report = validate(&grid, &ValidateOptions { trials, seed });
            commands::write_outputs(&[Output { path: output, contents: report.to_json() }])?;
            if !report.passed {
                for c in report.checks.iter().filter(|c| !c.passed) {
                    eprintln!("failed: {}", c.name);
                }
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
