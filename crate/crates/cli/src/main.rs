//! `qdhom`: command-line front-end for the HOM interference toolkit.
//!
//! Exit status: 0 on success, 1 for I/O, parse and configuration errors,
//! 2 for numerical failures (non-convergence, degenerate data, unreachable
//! Stark targets).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdhom::correlation::Polarization;
use qdhom::lineshape::LineshapeKind;

#[derive(Parser, Debug)]
#[command(name = "qdhom", version, about = "Two-emitter Hong-Ou-Mandel interference modelling and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a Lorentzian, Gaussian or Voigt profile to a spectrum CSV.
    LineshapeFit(LineshapeFitArgs),
    /// Autocorrelation trace of one emitter.
    G2(G2Args),
    /// Cross-correlation trace behind the beamsplitter for two emitters.
    Hom(HomArgs),
    /// Post-selected visibility at one detuning, or a detuning sweep.
    Visibility(VisibilityArgs),
    /// Stark map: energy at a field, field for an energy, or tuning onto another emitter.
    Stark(StarkArgs),
    /// Summary of every pair listed in the config.
    Table(TableArgs),
    /// Synthetic fixtures: coincidence histograms and noisy spectra.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct LineshapeFitArgs {
    /// Spectrum CSV with columns `energy_ueV,intensity`.
    spectrum: PathBuf,
    #[arg(long, value_enum, default_value_t = Kind::Voigt)]
    kind: Kind,
    /// Fit a constant background instead of fixing it at zero.
    #[arg(long)]
    fit_offset: bool,
    /// Weight points by 1/sqrt(max(counts, 1)).
    #[arg(long)]
    poisson: bool,
    /// Write `energy_ueV,residual` (data − model) here.
    #[arg(long)]
    residuals: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
struct ResponseFlags {
    /// Without detector response.
    #[arg(long)]
    ideal: bool,
    /// Convolved with the detector response (default).
    #[arg(long)]
    convolved: bool,
}

#[derive(Args, Debug)]
struct G2Args {
    config: PathBuf,
    emitter: String,
    #[command(flatten)]
    response: ResponseFlags,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct HomArgs {
    config: PathBuf,
    a: String,
    b: String,
    /// Detuning ΔE in µeV.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true, value_parser = finite)]
    detuning: f64,
    #[arg(long, value_enum, default_value_t = Pol::Parallel)]
    polarization: Pol,
    /// Overlap γ, overriding the config.
    #[arg(long, value_parser = finite)]
    gamma: Option<f64>,
    #[command(flatten)]
    response: ResponseFlags,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct VisibilityArgs {
    config: PathBuf,
    a: String,
    b: String,
    /// Sweep `lo:hi:step` in µeV (defaults to the config sweep, else -30:30:0.5).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "at")]
    sweep: Option<String>,
    /// Single detuning in µeV.
    #[arg(long, allow_negative_numbers = true, value_parser = finite)]
    at: Option<f64>,
    /// With --at: also report the value without detector response.
    #[arg(long, requires = "at")]
    ideal: bool,
    #[arg(long, value_parser = finite)]
    gamma: Option<f64>,
    /// Write the sweep as `detuning_ueV,visibility` here.
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct StarkQuery {
    /// Energy (µeV) to reach.
    #[arg(long, value_parser = finite)]
    target: Option<f64>,
    /// Field (kV/cm) at which to evaluate the energy.
    #[arg(long, allow_negative_numbers = true, value_parser = finite)]
    field: Option<f64>,
    /// Tune onto the centre energy of this emitter.
    #[arg(long)]
    tune_to: Option<String>,
}

#[derive(Args, Debug)]
struct StarkArgs {
    config: PathBuf,
    emitter: String,
    #[command(flatten)]
    query: StarkQuery,
}

#[derive(Args, Debug)]
struct TableArgs {
    config: PathBuf,
    /// JSON instead of an aligned text table.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(subcommand)]
    kind: SynthKind,
}

#[derive(Subcommand, Debug)]
enum SynthKind {
    /// Monte Carlo coincidence histogram of one emitter's autocorrelation.
    G2(SynthG2Args),
    /// Noisy spectrum of one emitter's line.
    Spectrum(SynthSpectrumArgs),
}

#[derive(Args, Debug)]
struct SynthG2Args {
    config: PathBuf,
    emitter: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    events: u64,
    /// Full histogram span in ps.
    #[arg(long, default_value_t = 6000.0, value_parser = finite)]
    window_ps: f64,
    #[arg(long, default_value_t = 40.0, value_parser = finite)]
    bin_width_ps: f64,
    /// Draw the total count from a Poisson distribution.
    #[arg(long)]
    poisson: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args, Debug)]
struct SynthSpectrumArgs {
    config: PathBuf,
    emitter: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Full energy span in µeV.
    #[arg(long = "span-ueV", default_value_t = 40.0, value_parser = finite)]
    span: f64,
    /// Multiplicative Gaussian noise, percent of the local value.
    #[arg(long, default_value_t = 2.0, value_parser = finite)]
    noise_pct: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Lorentzian,
    Gaussian,
    Voigt,
}

impl From<Kind> for LineshapeKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Lorentzian => LineshapeKind::Lorentzian,
            Kind::Gaussian => LineshapeKind::Gaussian,
            Kind::Voigt => LineshapeKind::Voigt,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Pol {
    Parallel,
    Orthogonal,
}

impl From<Pol> for Polarization {
    fn from(p: Pol) -> Self {
        match p {
            Pol::Parallel => Polarization::Parallel,
            Pol::Orthogonal => Polarization::Orthogonal,
        }
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qdhom: {e}");
            ExitCode::from(if e.is_input() { 1 } else { 2 })
        }
    }
}
