mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Geometric, material, static and dynamic models of soft sleeve actuators.
///
/// Boundary units: mm, N, kPa, degrees, kg, s.
#[derive(Debug, Parser)]
#[command(name = "sleeve", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    /// CSV (or table) destination; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Extra copy of the report; `.json` selects the structured form.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Overwrite existing output files.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// Actuator config (JSON).
    #[arg(long, short)]
    pub config: PathBuf,
    /// Warn about unknown config keys instead of rejecting them.
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KinematicsMode {
    Extension,
    Contraction,
    Bending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AreaModeArg {
    Constant,
    FoldUpdate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fold strokes and bending geometry.
    Kinematics {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum, default_value = "extension")]
        mode: KinematicsMode,
        /// Bending only: free-side extension in mm (defaults to the full fold stroke).
        #[arg(long)]
        extension_mm: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Least-squares hyperelastic fit to a `strain,stress_mpa` CSV.
    FitMaterial {
        #[arg(long, short)]
        data: PathBuf,
        /// neo-hookean, mr2, mr5 or yeoh3.
        #[arg(long, default_value = "mr5")]
        family: String,
        #[command(flatten)]
        out: Output,
    },
    /// Cubic stiffness fit and binned stiffness of a force-displacement CSV.
    FitStiffness {
        #[arg(long, short)]
        data: PathBuf,
        /// Bin width for interval stiffness, mm.
        #[arg(long, default_value_t = 5.0)]
        bin_width_mm: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Blocked force, free stroke and optional force-displacement curve.
    Statics {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        pressure_kpa: f64,
        /// Displacement grid START:STOP:STEP (mm) for a force-displacement CSV.
        #[arg(long)]
        sweep_y: Option<String>,
        #[arg(long, value_enum, default_value = "constant")]
        area_mode: AreaModeArg,
        #[command(flatten)]
        out: Output,
    },
    /// Closed-loop PID simulation along a trajectory.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// step:AMP:DUR, ramp:SLOPE:RAMP_DUR:DUR or sine:AMP:OFFSET:FREQ:DUR (mm, s, Hz).
        #[arg(long, short)]
        trajectory: String,
        /// Plant step, s; must divide the controller period.
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Disable the pressure lag from the config.
        #[arg(long)]
        no_lag: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Square-wave frequency response and -3 dB bandwidth.
    Freq {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 0.1)]
        fmin: f64,
        #[arg(long, default_value_t = 3.0)]
        fmax: f64,
        #[arg(long, default_value_t = 0.1)]
        df: f64,
        /// Upper level of the square wave; defaults to half the supply limit.
        #[arg(long)]
        pressure_kpa: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long)]
        no_lag: bool,
        #[command(flatten)]
        out: Output,
    },
    /// One-parameter design sweep.
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// fold_angle (deg), fold_width (mm) or fold_count.
        #[arg(long)]
        param: String,
        /// VALUE or START:STOP:STEP.
        #[arg(long)]
        range: String,
        /// extension, blocked_force or max_extension.
        #[arg(long)]
        metric: String,
        /// Pressure for force metrics.
        #[arg(long, default_value_t = 100.0)]
        pressure_kpa: f64,
        #[command(flatten)]
        out: Output,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<sleeve_core::Error>() {
        Some(sleeve_core::Error::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => 2,
        Some(e) if e.is_input_error() => 2,
        Some(_) => 1,
        None => match err.downcast_ref::<std::io::Error>() {
            Some(e) if e.kind() == std::io::ErrorKind::NotFound => 2,
            _ => 1,
        },
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
