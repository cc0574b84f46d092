//! `hpcqed` command-line front end.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 when the input data or
//! the model rejects the run.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

/// Default output directory when neither `--out-dir`, `HPCQED_OUT_DIR` nor
/// the configuration names one.
const DEFAULT_OUT_DIR: &str = "hpcqed-out";

#[derive(Debug, Parser)]
#[command(
    name = "hpcqed",
    version,
    about = "Simulate and fit hybrid GaAs/LN ring-resonator cavity-QED devices"
)]
struct Cli {
    /// Output directory [env: HPCQED_OUT_DIR]
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct SimArgs {
    /// Run configuration (TOML); built-in defaults when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Noise seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Input CSV file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Number of least-squares starting points.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=1000))]
    starts: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    MinimizeMaxAbsVoltage,
    MaximizeMargin,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All-pass ring transmission spectrum -> transmission.csv
    SimulateTransmission(SimArgs),
    /// Emitter wavelength against strain voltage -> tuning.csv
    SimulateTuning(SimArgs),
    /// Time-resolved decay histogram -> decay.csv + decay.meta.toml
    SimulateDecay {
        #[command(flatten)]
        sim: SimArgs,
        /// Write expected counts without Poisson noise.
        #[arg(long)]
        noiseless: bool,
    },
    /// Pulsed g2 correlation histogram -> g2.csv + g2.meta.toml
    SimulateG2 {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        noiseless: bool,
    },
    /// Lorentzian fits to every transmission dip -> resonance.toml, resonance_dips.csv
    FitResonance(FitArgs),
    /// IRF-convolved exponential decay fit -> decay_fit.toml
    FitDecay {
        #[command(flatten)]
        fit: FitArgs,
        /// Instrument-response FWHM; taken from the sidecar when omitted.
        #[arg(long, value_name = "NS")]
        irf_fwhm_ns: Option<f64>,
    },
    /// Linear and quadratic tuning fits with model selection -> rate_fit.toml
    FitRate {
        /// CSV with columns voltage_v,wavelength_nm.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Central-peak suppression of a pulsed g2 histogram -> g2_fit.toml
    FitG2 {
        #[command(flatten)]
        fit: FitArgs,
        /// Laser repetition period; taken from the sidecar when omitted.
        #[arg(long, value_name = "NS")]
        repetition_ns: Option<f64>,
    },
    /// Common-wavelength voltage plan for a device fleet -> plan.toml
    Plan {
        /// Fleet file (TOML, one [[device]] table per device).
        #[arg(long, value_name = "FILE")]
        fleet: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MinimizeMaxAbsVoltage)]
        objective: ObjectiveArg,
    },
    /// Effective mode volume of a sampled field -> mode_volume.toml
    ModeVolume {
        /// CSV with columns x_um,y_um,z_um,permittivity,field_sq.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        #[arg(long, value_name = "NM", default_value_t = 910.0)]
        wavelength_nm: f64,
        /// Refractive index used for the (λ/n)³ normalisation.
        #[arg(long, default_value_t = 3.5)]
        refractive_index: f64,
        /// Loaded Q; adds the corresponding maximum Purcell factor.
        #[arg(long)]
        quality: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                ErrorKind::InvalidSubcommand => {
                    eprintln!("\n{}", Cli::command().render_help());
                    ExitCode::from(1)
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
