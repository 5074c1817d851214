//! `stiefel`: geodesics, logarithms, Frenet curvatures and experiments on
//! the Stiefel manifold from the command line.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ExperimentArgs, ExperimentName, FrenetArgs, LogArgs};
use config::{Config, Format, CONFIG_ENV};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "stiefel",
    version,
    about = "Euclidean-metric geometry of the Stiefel manifold St(n, p)"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Output format for diagnostics and the normal form; overrides the config.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the geodesic Exp_U(t D).
    Exp {
        /// Base point U (CSV).
        base: PathBuf,
        /// Tangent vector D at U (CSV).
        tangent: PathBuf,
        /// Curve parameter; accepts multiples of pi such as `0.5pi`.
        #[arg(short, long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        /// Output file; stdout if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Shooting logarithm: a minimal D with Exp_U(D) = V.
    Log {
        base: PathBuf,
        target: PathBuf,
        /// File for D; stdout if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Diagnostic report file; stderr if omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Randomly perturbed starts in addition to the canonical one.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
    },
    /// Finite-difference Frenet curvatures along the geodesic against the analytic values.
    Frenet {
        base: PathBuf,
        tangent: PathBuf,
        /// Number of derivatives m; curvatures kappa_1 .. kappa_{m-1}.
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Number of grid points on [0, t-max].
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value = "2pi")]
        t_max: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Normal form of the vectorized geodesic and its minimal period.
    NormalForm {
        base: PathBuf,
        tangent: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded experiment and write its report.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated probe radii.
        #[arg(long, default_value = "0.25pi,0.5pi,0.75pi,0.9pi,pi")]
        radii: String,
        /// Logarithm starts per probe.
        #[arg(long, default_value_t = 20)]
        starts: usize,
        /// Sectional curvature bound for `klingenberg`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        c: String,
        /// Shortest closed geodesic length for `klingenberg`.
        #[arg(long, default_value = "2pi", allow_hyphen_values = true)]
        l: String,
        /// Overrides the configured output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref())?;
    let format = cli.format.unwrap_or(cfg.format);
    match cli.command {
        Command::Exp { base, tangent, t, out } => {
            let t = io::parse_param(&t)?;
            commands::exp(&base, &tangent, t, out.as_deref(), &cfg)
        }
        Command::Log {
            base,
            target,
            out,
            report,
            restarts,
            seed,
            max_iter,
        } => commands::log(
            &LogArgs {
                base: &base,
                target: &target,
                out: out.as_deref(),
                report: report.as_deref(),
                restarts,
                seed: seed.unwrap_or(cfg.seed),
                max_iter,
            },
            format,
            &cfg,
        ),
        Command::Frenet {
            base,
            tangent,
            order,
            grid,
            t_max,
            out,
        } => commands::frenet(
            &FrenetArgs {
                base: &base,
                tangent: &tangent,
                order,
                grid,
                t_max: io::parse_param(&t_max)?,
                out: out.as_deref(),
            },
            &cfg,
        ),
        Command::NormalForm { base, tangent, out } => {
            commands::normal_form(&base, &tangent, out.as_deref(), format, &cfg)
        }
        Command::Experiment {
            name,
            n,
            p,
            samples,
            seed,
            radii,
            starts,
            c,
            l,
            out_dir,
        } => {
            let args = ExperimentArgs {
                name,
                n: n.unwrap_or(cfg.n),
                p: p.unwrap_or(cfg.p),
                samples: samples.unwrap_or(cfg.samples),
                seed: seed.unwrap_or(cfg.seed),
                radii: io::parse_list(&radii)?,
                starts,
                c: io::parse_param(&c)?,
                l: io::parse_param(&l)?,
                out_dir: out_dir.unwrap_or_else(|| cfg.output_dir.clone()),
            };
            let line = commands::experiment(&args, &cfg)?;
            println!("{line}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stiefel: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
