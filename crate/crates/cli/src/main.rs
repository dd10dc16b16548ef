//! `qrs`: data files and verification reports for the quantum Rabi square.

use std::f64::consts::FRAC_PI_4;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qrs_core::report::{Format, Report};
use qrs_core::runs::{self, GaugeCommand, Method, Range, RunConfig};
use qrs_core::QrsError;

#[derive(Parser, Debug)]
#[command(name = "qrs", version, about = "Quantum Rabi square: critical points, phases, gauge maps and ED checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical coupling of every momentum branch and the dominant one
    Critical,
    /// Energy, order parameter and gap along g
    Sweep,
    /// Phase labels on a (J2, g) grid
    PhaseDiagram,
    /// Critical exponent of the excitation gap on both sides of g_c
    Scaling,
    /// Square/ring gauge correspondence
    Gauge {
        #[command(subcommand)]
        action: GaugeAction,
    },
    /// Spin-model minimiser against the optical branches
    Spin,
    /// Mean-field state against exact diagonalization
    EdCompare,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum GaugeAction {
    /// J2 matching the staggered (or uniform, for J1 < 0) branch
    MapAfrp,
    /// J2(g) matching the paired branch
    MapFrustrated,
    /// Triple point of the ring
    Triple,
    /// Spectral residuals of both maps on 50-point grids
    Verify,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Ed,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// Cavity frequency
    #[arg(long, global = true, default_value_t = 1.0)]
    omega: f64,
    /// Qubit gap
    #[arg(long = "Omega", global = true, default_value_t = 50.0)]
    qubit_gap: f64,
    /// Qubit gap in units of the cavity frequency; overrides --Omega
    #[arg(long, global = true)]
    ratio: Option<f64>,
    /// Atom-cavity coupling
    #[arg(long, global = true, conflicts_with = "g")]
    lambda: Option<f64>,
    /// Dimensionless coupling lambda / sqrt(omega Omega)
    #[arg(long, global = true)]
    g: Option<f64>,
    #[arg(long, global = true, default_value_t = 0.05, allow_negative_numbers = true)]
    j1: f64,
    #[arg(long, global = true, default_value_t = 0.02, allow_negative_numbers = true)]
    j2: f64,
    /// Ring hopping magnitude
    #[arg(long, global = true, default_value_t = 0.05)]
    j10: f64,
    /// Ring gauge phase
    #[arg(long, global = true, default_value_t = FRAC_PI_4, allow_negative_numbers = true)]
    theta: f64,
    #[arg(long, global = true, default_value_t = 0.3)]
    g_min: f64,
    #[arg(long, global = true, default_value_t = 0.7)]
    g_max: f64,
    /// Points along g
    #[arg(long, global = true, default_value_t = 41)]
    steps: usize,
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    j2_min: f64,
    #[arg(long, global = true, default_value_t = 0.1, allow_negative_numbers = true)]
    j2_max: f64,
    #[arg(long, global = true, default_value_t = 21)]
    j2_steps: usize,
    /// Lower end of the scaling window in |g - g_c|
    #[arg(long, global = true, default_value_t = 1e-6)]
    window_min: f64,
    #[arg(long, global = true, default_value_t = 1e-3)]
    window_max: f64,
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Analytic)]
    method: MethodArg,
    /// Photon cutoff per cavity
    #[arg(long, global = true, default_value_t = 5)]
    nc: usize,
    /// Seed for minimiser starts and Lanczos start vectors
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Memory budget for concurrent ED jobs, MiB
    #[arg(long, global = true, default_value_t = 2048)]
    memory_cap: usize,
    /// Leave the zero-point term out of superradiant energies
    #[arg(long, global = true)]
    no_fluctuation: bool,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Log progress to stderr (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

impl Common {
    fn config(&self) -> RunConfig {
        RunConfig {
            omega: self.omega,
            qubit_gap: self.ratio.map_or(self.qubit_gap, |r| r * self.omega),
            g: self.g,
            lambda: self.lambda,
            j1: self.j1,
            j2: self.j2,
            j1_0: self.j10,
            theta: self.theta,
            g_range: Range::new(self.g_min, self.g_max, self.steps),
            j2_range: Range::new(self.j2_min, self.j2_max, self.j2_steps),
            method: match self.method {
                MethodArg::Analytic => Method::Analytic,
                MethodArg::Ed => Method::Ed,
                MethodArg::Both => Method::Both,
            },
            n_c: self.nc,
            seed: self.seed,
            memory_cap_mb: self.memory_cap,
            fluctuation: !self.no_fluctuation,
            window: (self.window_min, self.window_max),
        }
    }
}

const EXIT_USAGE: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_ASSERTION: u8 = 3;
const EXIT_NO_CONVERGENCE: u8 = 4;

fn exit_code(e: &QrsError) -> u8 {
    match e {
        QrsError::InvalidParams(_) | QrsError::Io(_) => EXIT_USAGE,
        QrsError::Mismatch(_) => EXIT_ASSERTION,
        QrsError::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_DOMAIN,
    }
}

fn run(cli: &Cli) -> Result<Report, QrsError> {
    let cfg = cli.common.config();
    cfg.params()?;
    match &cli.command {
        Command::Critical => runs::run_critical(&cfg),
        Command::Sweep => runs::run_sweep(&cfg),
        Command::PhaseDiagram => runs::run_phase_diagram(&cfg),
        Command::Scaling => runs::run_scaling(&cfg),
        Command::Gauge { action } => {
            let cmd = match action {
                GaugeAction::MapAfrp => GaugeCommand::MapAfrp,
                GaugeAction::MapFrustrated => GaugeCommand::MapFrustrated,
                GaugeAction::Triple => GaugeCommand::Triple,
                GaugeAction::Verify => GaugeCommand::Verify,
            };
            runs::run_gauge(&cfg, cmd)
        }
        Command::Spin => runs::run_spin(&cfg),
        Command::EdCompare => runs::run_ed_compare(&cfg),
    }
}

fn write_report(report: &Report, cli: &Cli) -> Result<(), QrsError> {
    let format = match cli.common.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    match &cli.common.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| QrsError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            report.write(&mut w, format)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            report.write(stdout.lock(), format)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let level = match cli.common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = write_report(&report, &cli) {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    let failed = report.failed_checks();
    if !failed.is_empty() {
        for f in &failed {
            eprintln!("check failed: {f}");
        }
        return ExitCode::from(EXIT_ASSERTION);
    }
    ExitCode::SUCCESS
}
