//! `urllc`: reproducible experiments over the urllc-core toolkit.
//!
//! Every command writes CSV (or a code/model text file) whose `#` header
//! records the resolved configuration. Values come from flags, then from the
//! `--config` file (`key = value` lines), then from defaults.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Infeasible(String),
    /// Unreadable or malformed input file.
    Input(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Input(_) | CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Infeasible(m) => write!(f, "infeasible: {m}"),
            CliError::Input(m) => write!(f, "bad input file: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<urllc_core::Error> for CliError {
    fn from(e: urllc_core::Error) -> Self {
        use urllc_core::Error as E;
        match e {
            E::Infeasible(m) | E::NotFound(m) => CliError::Infeasible(m),
            E::Parse { .. } => CliError::Input(e.to_string()),
            E::Io(_) => CliError::Io(e.to_string()),
            E::Domain(_) | E::Invalid(_) | E::Fit(_) => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "urllc", version, about = "Finite-blocklength URLLC design experiments")]
struct Cli {
    /// `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for Monte Carlo and grid sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Blocklength, deadline and model settings shared by the optimization commands.
#[derive(Args, Debug, Clone, Default)]
pub struct SystemArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Deadline, seconds.
    #[arg(long)]
    pub l_m: Option<f64>,
    #[arg(long)]
    pub eps_m: Option<f64>,
    /// Symbol duration, seconds.
    #[arg(long)]
    pub t_s: Option<f64>,
    /// Seconds per binary operation.
    #[arg(long)]
    pub t_b: Option<f64>,
    /// Minimum rate.
    #[arg(long)]
    pub r_m: Option<f64>,
    /// SNR cap, dB.
    #[arg(long)]
    pub rho_m_db: Option<f64>,
    /// `preset` or a model file (`a=…`, `b=…`, `residual=…`).
    #[arg(long)]
    pub model: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity, dispersion and normal-approximation rate over an SNR grid.
    Bounds {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// `start:step:stop` or comma list, dB.
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<String>,
        /// Gauss-Legendre nodes per unit panel.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Code construction.
    Codec {
        #[command(subcommand)]
        action: CodecAction,
    },
    /// Monte Carlo codeword error probability of the OS decoder.
    SimulateCep {
        #[arg(long)]
        code: Option<PathBuf>,
        /// Decoding order, or a comma list.
        #[arg(long)]
        order: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Stop each point after this many errors.
        #[arg(long)]
        target_errors: Option<u64>,
        /// `soft` or `hamming`.
        #[arg(long)]
        metric: Option<String>,
        /// `exhaustive` or `fast`.
        #[arg(long)]
        reprocessing: Option<String>,
        /// Accumulator width in bits.
        #[arg(long)]
        q: Option<u32>,
    },
    /// Fits `1/log2 K = a·√Δρ + b` to measured points.
    FitModel {
        /// CSV with columns delta_rho_db, log2_k.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Normal-approximation rate with and without the processing constraint.
    ConstrainedRate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: Option<String>,
    },
    /// Pareto boundary of the rate/power trade-off.
    Pareto {
        #[command(flatten)]
        system: SystemArgs,
        /// Reference rate r_s.
        #[arg(long)]
        rate: Option<f64>,
        /// Boundary step in Δρ, dB.
        #[arg(long)]
        step_db: Option<f64>,
    },
    /// Scalarization minimizers as α sweeps a grid.
    ScalarizeSweep {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        rate: Option<f64>,
        /// `1`, `inf`, or a finite θ ≥ 1.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        step_db: Option<f64>,
        /// `shannon` or `raw`.
        #[arg(long)]
        power_cost: Option<String>,
        /// `boundary` or `none`.
        #[arg(long)]
        normalize: Option<String>,
    },
    /// Battery drain with battery-dependent MOOP weights.
    Battery {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        rate: Option<f64>,
        /// `1`, `inf`, `fixed0` or `fixed1`.
        #[arg(long)]
        theta: Option<String>,
        /// Battery capacity, watt-hours.
        #[arg(long)]
        capacity_wh: Option<f64>,
        #[arg(long)]
        distance_m: Option<f64>,
        #[arg(long)]
        pathloss_exponent: Option<f64>,
        #[arg(long)]
        pathloss_ref_db: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        noise_dbm: Option<f64>,
        /// `fraction` or `percent`.
        #[arg(long)]
        alpha_scale: Option<String>,
        /// Divide α by its full-battery value.
        #[arg(long)]
        normalize_alpha: Option<bool>,
        /// `batched` or `per-codeword`.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        step_db: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum CodecAction {
    /// (Extended) binary BCH code of length 2^m − 1 correcting t errors.
    Build {
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        t: Option<usize>,
        /// Append an overall parity bit.
        #[arg(long)]
        extend: bool,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut settings = config::Settings::load(cli.config.as_deref())?;
    let s = &mut settings;
    match cli.command {
        Command::Bounds { n, eps, snr_db, order } => commands::bounds(s, n, eps, snr_db, order),
        Command::Codec {
            action: CodecAction::Build { m, t, extend },
        } => commands::codec_build(s, m, t, extend),
        Command::SimulateCep {
            code,
            order,
            snr_db,
            trials,
            seed,
            target_errors,
            metric,
            reprocessing,
            q,
        } => commands::simulate_cep(
            s,
            commands::CepArgs {
                code,
                order,
                snr_db,
                trials,
                seed,
                target_errors,
                metric,
                reprocessing,
                q,
            },
        ),
        Command::FitModel { points } => commands::fit_model(s, points),
        Command::ConstrainedRate { system, snr_db } => commands::constrained_rate(s, &system, snr_db),
        Command::Pareto { system, rate, step_db } => commands::pareto(s, &system, rate, step_db),
        Command::ScalarizeSweep {
            system,
            rate,
            theta,
            alphas,
            step_db,
            power_cost,
            normalize,
        } => commands::scalarize_sweep(
            s,
            &system,
            commands::SweepArgs {
                rate,
                theta,
                alphas,
                step_db,
                power_cost,
                normalize,
            },
        ),
        Command::Battery {
            system,
            rate,
            theta,
            capacity_wh,
            distance_m,
            pathloss_exponent,
            pathloss_ref_db,
            noise_dbm,
            alpha_scale,
            normalize_alpha,
            mode,
            step_db,
        } => commands::battery(
            s,
            &system,
            commands::BatteryArgs {
                rate,
                theta,
                capacity_wh,
                distance_m,
                pathloss_exponent,
                pathloss_ref_db,
                noise_dbm,
                alpha_scale,
                normalize_alpha,
                mode,
                step_db,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = cli.out.clone();
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(CliError::Usage(format!("cannot start {t} threads: {e}"))),
        },
        None => run(cli),
    };
    let written = result.and_then(|text| match &out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    });
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("urllc: {e}");
            ExitCode::from(e.code())
        }
    }
}
