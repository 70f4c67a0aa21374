use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nmep", version, about = "Oscillator coupled to a finite equidistant reservoir")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenfrequencies, shifts and oscillator weights of every mode.
    Eigen(EigenArgs),
    /// Oscillator amplitude a(t) from a(0) = 1.
    Evolve(EvolveArgs),
    /// Revival terms and their sum.
    Revivals(RevivalsArgs),
    /// Analytic (and optionally windowed) revival spectra with a peak report.
    Spectrum(SpectrumArgs),
    /// Cascade matrix of one revival order and its Jordan structure.
    EpMatrix(EpMatrixArgs),
    /// Run the invariant suites of every module.
    Verify(VerifyArgs),
}

/// Physical parameters; flags override `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct SystemArgs {
    /// Line-based key=value file (omega0, delta_omega, n_modes, coupling|gamma, rotating_frame).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub delta_omega: Option<f64>,
    /// Reservoir modes N + 1 (odd) [default: 4001].
    #[arg(long)]
    pub n_modes: Option<usize>,
    /// Coupling g; exclusive with --gamma.
    #[arg(long)]
    pub coupling: Option<f64>,
    /// Decay rate gamma = pi g^2 / delta_omega; exclusive with --coupling.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Keep the carrier (laboratory frame) instead of slow amplitudes.
    #[arg(long)]
    pub lab_frame: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Data file to write; the manifest goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for the default file names.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Finite,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Eigenbasis,
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Finite)]
    pub mode: ModeArg,
    /// Truncation |k| <= K of the infinite reservoir [default: ceil(200 gamma/delta_omega)].
    #[arg(long)]
    pub k_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// End time, absolute or as `<k>TR`.
    #[arg(long, default_value = "3TR")]
    pub t_max: String,
    #[arg(long, default_value_t = 2000)]
    pub samples_per_tr: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Eigenbasis)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Finite)]
    pub mode: ModeArg,
    #[arg(long)]
    pub k_max: Option<u32>,
    /// RK4 step bound [default: 0.05/omega_max].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep the reservoir amplitudes and emit the total norm.
    #[arg(long)]
    pub store_reservoir: bool,
}

#[derive(Debug, Args)]
pub struct RevivalsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value = "3TR")]
    pub t_max: String,
    #[arg(long, default_value_t = 2000)]
    pub samples_per_tr: usize,
    /// Highest revival order [default: floor(t_max/T_R)].
    #[arg(long)]
    pub n_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub order: u32,
    /// Half-width of the frequency grid [default: 25 gamma].
    #[arg(long)]
    pub omega_max: Option<f64>,
    /// Grid spacing [default: gamma/200].
    #[arg(long)]
    pub d_omega: Option<f64>,
    /// Also transform a simulated trajectory over `<lo>:<hi>` (each absolute or `<k>TR`).
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long, default_value_t = 2000)]
    pub samples_per_tr: usize,
}

#[derive(Debug, Args)]
pub struct EpMatrixArgs {
    #[arg(long)]
    pub order: u32,
    #[arg(long)]
    pub gamma: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Quick)]
    pub suite: SuiteArg,
    /// Manifest path [default: standard output].
    #[arg(long)]
    pub out: Option<PathBuf>,
}
