//! `atomlens` — design data for wide, aberration-minimized atom-optical
//! lenses built from odd Hermite-Gaussian laser mode superpositions.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use atomlens_cli::artifact::Format;
use atomlens_cli::commands::{self, OutputTarget};
use atomlens_cli::config::RunConfig;
use atomlens_cli::{CliError, Result};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "ATOMLENS_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "atomlens",
    version,
    about = "Design data for flat-bottomed atom-optical lenses from odd laser mode superpositions",
    long_about = "Computes superposition designs, lens figures, dephasing limits and \
                  imprinted phase maps, and writes them as deterministic CSV or JSON \
                  artifacts.\n\nReduced-unit commands (coeffs, profile, metrics, table1, \
                  zmin) need no configuration; SI commands (phase, raycheck) read the \
                  scenario from --config. Output directory precedence: --out, then \
                  $ATOMLENS_OUT_DIR, then the config's output.directory, then the \
                  current directory.\n\nExit codes: 0 success, 2 configuration error, \
                  3 numeric failure, 4 physics-validity failure."
)]
struct Cli {
    /// TOML configuration file (required for phase and raycheck).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Artifact format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Amplitude-ratio matrix of the designs up to an order.
    Coeffs {
        /// Largest odd order to include.
        #[arg(long, default_value_t = 33)]
        max_order: u32,
    },
    /// Focal field and integrated intensity profiles for one order.
    Profile {
        /// Odd superposition order.
        #[arg(long)]
        order: u32,
        /// Longitudinal offset of the intensity slice, in wavelengths.
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        /// Rayleigh range in wavelengths (default pi: one-wavelength waist).
        #[arg(long, default_value_t = commands::DEFAULT_PROFILE_RAYLEIGH)]
        rayleigh: f64,
        /// Number of grid samples.
        #[arg(long)]
        grid_points: Option<usize>,
        /// Grid half-width in wavelengths (default: past the outermost peak).
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Scalar lens figures for one order.
    Metrics {
        /// Odd superposition order.
        #[arg(long)]
        order: u32,
    },
    /// Lens-parameter table with reference values side by side.
    Table1,
    /// Minimal Rayleigh ranges and their power-law fit.
    Zmin {
        /// Comma-separated odd orders (default: config orders, else a
        /// built-in sweep).
        #[arg(long, value_delimiter = ',')]
        orders: Vec<u32>,
        /// Relative deviation budget of the criterion.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Imprinted phase map for the configured SI scenario.
    Phase {
        /// Odd superposition order (default: each order in the config).
        #[arg(long)]
        order: Option<u32>,
        /// Number of grid samples.
        #[arg(long)]
        grid_points: Option<usize>,
    },
    /// Ballistic ray validation of the thin-lens claim.
    Raycheck {
        /// Odd superposition order (default: each order in the config).
        #[arg(long)]
        order: Option<u32>,
        /// Number of rays across the useful region.
        #[arg(long, default_value_t = 41)]
        rays: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let directory = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| config.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let format = cli
        .format
        .or(config.output.format)
        .unwrap_or(Format::Csv);
    let out = OutputTarget { directory, format };

    match cli.command {
        Command::Coeffs { max_order } => {
            commands::cmd_coeffs(max_order, &out)?;
        }
        Command::Profile {
            order,
            z,
            rayleigh,
            grid_points,
            half_width,
        } => {
            let points = grid_points
                .or(config.output.grid_points)
                .unwrap_or(atomlens::superposition::DEFAULT_GRID_POINTS);
            let half = half_width.or(config.output.half_width);
            commands::cmd_profile(order, z, rayleigh, points, half, &out)?;
        }
        Command::Metrics { order } => {
            commands::cmd_metrics(order, &out)?;
        }
        Command::Table1 => {
            commands::cmd_table1(&out)?;
        }
        Command::Zmin { orders, tolerance } => {
            let orders = if orders.is_empty() {
                config.resolve_orders(None, &commands::DEFAULT_ZMIN_ORDERS)
            } else {
                for &order in &orders {
                    if order % 2 == 0 || order == 0 {
                        return Err(CliError::Config(format!(
                            "orders must be odd and at least 1, got {order}"
                        )));
                    }
                }
                orders
            };
            let tolerance = tolerance.unwrap_or(commands::DEFAULT_ZMIN_TOLERANCE);
            commands::cmd_zmin(&orders, tolerance, &out)?;
        }
        Command::Phase { order, grid_points } => {
            let points = grid_points
                .or(config.output.grid_points)
                .unwrap_or(commands::DEFAULT_PHASE_GRID);
            for order in config.resolve_orders(order, &[3]) {
                commands::cmd_phase(&config, order, points, &out)?;
            }
        }
        Command::Raycheck { order, rays } => {
            for order in config.resolve_orders(order, &[3]) {
                commands::cmd_raycheck(&config, order, rays, &out)?;
            }
        }
    }
    Ok(())
}
