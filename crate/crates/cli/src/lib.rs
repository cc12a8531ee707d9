//! Command-line front end for the kerrcap library.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod table;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use kerrcap::channel::ComplexAmplitude;

use commands::{Output, UsageError};
use config::{FileConfig, Format, InputKind, Overrides, RunConfig};
use table::report_table;

#[derive(Debug, Parser)]
#[command(name = "kerrcap", version, about = "Capacity of the per-sample nonlinear optical fiber channel")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Nonlinearity coefficient γ in 1/(mW·km).
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Fiber length in km.
    #[arg(long, global = true)]
    pub length_km: Option<f64>,
    /// Noise power density Q in mW/km.
    #[arg(long, global = true)]
    pub q_noise: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON config file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report information in bits instead of nats.
    #[arg(long, global = true)]
    pub bits: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutual information versus input power.
    MiSweep {
        #[arg(long)]
        power_start: Option<f64>,
        #[arg(long)]
        power_stop: Option<f64>,
        #[arg(long)]
        power_points: Option<usize>,
        /// Comma-separated subset of opt, beta1, beta2.
        #[arg(long, value_delimiter = ',')]
        inputs: Option<Vec<InputKind>>,
    },
    /// Optimal input density and its constants at one power.
    OptimalInput {
        #[arg(long, default_value_t = 10.0)]
        power_mw: f64,
        #[arg(long, default_value_t = 101)]
        density_points: usize,
    },
    /// Conditional density on a grid around the deterministic output.
    PdfGrid {
        #[arg(long, default_value_t = 1.0)]
        x_re: f64,
        #[arg(long, default_value_t = 0.0)]
        x_im: f64,
        /// Half-width in units of √(QL).
        #[arg(long, default_value_t = 4.0)]
        half_width: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// Internal consistency checks.
    Validate {
        /// normalization, moments, entropy or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Compare Monte Carlo propagation with the analytic densities.
    McCheck {
        /// linear, conditional, output-beta1, output-beta2 or output-optimal.
        #[arg(long, default_value = "conditional")]
        case: String,
        #[arg(long)]
        n_traj: Option<usize>,
        #[arg(long)]
        n_steps: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        power_mw: f64,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn resolve(cli: &Cli) -> Result<RunConfig, String> {
    let g = &cli.global;
    let file = match &g.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut flags = Overrides {
        gamma: g.gamma,
        length_km: g.length_km,
        q_noise: g.q_noise,
        format: g.format,
        seed: g.seed,
        out: g.out.clone(),
        bits: g.bits,
        ..Overrides::default()
    };
    match &cli.command {
        Command::MiSweep {
            power_start,
            power_stop,
            power_points,
            inputs,
        } => {
            flags.power_start = *power_start;
            flags.power_stop = *power_stop;
            flags.power_points = *power_points;
            flags.inputs = inputs.clone();
        }
        Command::McCheck { n_traj, n_steps, .. } => {
            flags.n_traj = *n_traj;
            flags.n_steps = *n_steps;
        }
        _ => {}
    }
    RunConfig::resolve(flags, file)
}

pub fn execute(cli: &Cli, cfg: &RunConfig) -> Result<Output, UsageError> {
    match &cli.command {
        Command::MiSweep { .. } => Ok(commands::mi_sweep(cfg)),
        Command::OptimalInput {
            power_mw,
            density_points,
        } => commands::optimal_input(cfg, *power_mw, *density_points),
        Command::PdfGrid {
            x_re,
            x_im,
            half_width,
            points,
        } => commands::pdf_grid(cfg, ComplexAmplitude::new(*x_re, *x_im), *half_width, *points),
        Command::Validate { suite } => commands::validate(cfg, suite),
        Command::McCheck { case, power_mw, .. } => commands::mc_check(cfg, case, *power_mw),
    }
}

fn emit(output: &Output, cfg: &RunConfig) -> std::io::Result<()> {
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match (output, cfg.format) {
        (Output::Table { table, .. }, Format::Csv) => table.write_csv(&mut sink)?,
        (Output::Table { table, .. }, Format::Json) => {
            serde_json::to_writer_pretty(&mut sink, &table.to_json())?;
            writeln!(sink)?;
        }
        (Output::Report(checks), Format::Csv) => {
            for c in checks {
                writeln!(sink, "{}", c.line())?;
            }
        }
        (Output::Report(checks), Format::Json) => {
            serde_json::to_writer_pretty(&mut sink, &report_table(checks).to_json())?;
            writeln!(sink)?;
        }
    }
    sink.flush()
}

/// Parses, runs and writes; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let output = match execute(&cli, &cfg) {
        Ok(o) => o,
        Err(UsageError(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = emit(&output, &cfg) {
        eprintln!("error: writing output: {e}");
        return EXIT_FAILED;
    }
    if output.ok() {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}
