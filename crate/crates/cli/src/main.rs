//! `vortex`: command-line front end for the vortex-beam library.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use vortex_core::VortexError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] VortexError),
    #[error("config: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<image::ImageError> for CliError {
    fn from(e: image::ImageError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(VortexError::Io(_)) | CliError::Io(_) => 1,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
            CliError::Config(_) | CliError::Argument(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "vortex", version, about = "Electron vortex beam simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a fork mask or a matrix-valued spinor mask.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Mask(MaskArgs),
    /// Reconstruct a mask's far field and measure the diffraction orders.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Farfield(FarfieldArgs),
    /// Angular-momentum expectation values of a Pauli vortex spinor.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Angmom(AngmomArgs),
    /// Radial density of the special Dirac states and the critical radius.
    #[command(
        name = "dirac-density",
        args_override_self = true,
        allow_negative_numbers = true
    )]
    DiracDensity(DensityArgs),
    /// Topological charge of a field stored in a VFLD file.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Charge(ChargeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat `key = value` file whose entries act as flags (command line wins).
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct HologramArgs {
    /// Target topological charge (spinor masks: the up-component order).
    #[arg(long, default_value_t = 1)]
    pub n: i32,
    /// Grid size in pixels (square).
    #[arg(long, default_value_t = 512)]
    pub size: usize,
    /// Fringes across the grid; also the far-field lobe spacing in pixels.
    #[arg(long, default_value_t = 40.0)]
    pub fringes: f64,
    /// Aperture radius as a fraction of the grid half width.
    #[arg(long, default_value_t = 0.4)]
    pub aperture: f64,
    /// Extraction window radius as a fraction of the lobe spacing.
    #[arg(long, default_value_t = 0.45)]
    pub window: f64,
    /// Keep the graded interference pattern instead of binarizing it.
    #[arg(long)]
    pub raw: bool,
    /// Build the matrix-valued mask for the J_z = n + 1/2 spinor.
    #[arg(long)]
    pub spinor: bool,
    /// Relative sign of the down component of the spinor target.
    #[arg(long, value_enum, default_value_t = Sign::Plus)]
    pub helicity: Sign,
    /// Exchange up and down in the conjugate term of the matrix mask.
    #[arg(long)]
    pub swap_conjugate: bool,
    /// Reference weight C1 as `re` or `re,im`.
    #[arg(long, default_value = "1")]
    pub c1: ComplexArg,
    /// Target weight C2.
    #[arg(long, default_value = "1")]
    pub c2: ComplexArg,
    /// Conjugate weight C3.
    #[arg(long, default_value = "1")]
    pub c3: ComplexArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    #[value(name = "plus", alias = "+")]
    Plus,
    #[value(name = "minus", alias = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub vortex_core::C64);

impl std::str::FromStr for ComplexArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| format!("`{t}` is not a number"))
        };
        let (re, im) = match parts.as_slice() {
            [re] => (num(re)?, 0.0),
            [re, im] => (num(re)?, num(im)?),
            _ => return Err(format!("expected `re` or `re,im`, got `{s}`")),
        };
        if !(re.is_finite() && im.is_finite()) {
            return Err("complex weights must be finite".into());
        }
        Ok(ComplexArg(vortex_core::C64::new(re, im)))
    }
}

#[derive(Args, Debug)]
pub struct MaskArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub holo: HologramArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FarfieldArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub holo: HologramArgs,
    /// Reconstruct this scalar mask (VFLD, one real component) instead of
    /// synthesizing one.
    #[arg(long, value_name = "FILE")]
    pub mask: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct BeamArgs {
    /// Kinetic energy in keV.
    #[arg(long, default_value_t = 200.0)]
    pub energy_kev: f64,
    /// Vortex radius in nm (used when --kperp is absent).
    #[arg(long, default_value_t = 0.05)]
    pub radius_nm: f64,
    /// Transverse wavenumber in keV; overrides --radius-nm.
    #[arg(long)]
    pub kperp: Option<f64>,
    /// Radius-to-k_perp conversion.
    #[arg(long, value_enum, default_value_t = KperpMode::Paper)]
    pub kperp_mode: KperpMode,
    /// Rest mass in keV.
    #[arg(long, default_value_t = vortex_core::units::ELECTRON_MASS_KEV)]
    pub mass_kev: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum KperpMode {
    /// k_perp = 0.37 / R
    Paper,
    /// k_perp from the first maximum of J_1²
    Exact,
}

#[derive(Args, Debug)]
pub struct AngmomArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Up-component order.
    #[arg(long, default_value_t = 1)]
    pub n: i32,
    /// Down-component order.
    #[arg(long, default_value_t = 2)]
    pub n_prime: i32,
    /// Down/up amplitude ratio; `inf` for a pure down state.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Also evaluate by quadrature on a grid.
    #[arg(long)]
    pub numeric: bool,
    #[arg(long, default_value_t = 512)]
    pub size: usize,
    /// Aperture radius in units of 1/k_perp.
    #[arg(long, default_value_t = 40.0)]
    pub rmax: f64,
    /// Grid spacing in units of 1/k_perp.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
    pub kperp_dx: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateArg {
    Plus,
    Minus,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Which approximate-L_z state.
    #[arg(long, value_enum, default_value_t = StateArg::Minus)]
    pub state: StateArg,
    #[arg(long, default_value_t = 1)]
    pub n: i32,
    /// Largest radius in pm.
    #[arg(long, default_value_t = 5.0)]
    pub rmax_pm: f64,
    #[arg(long, default_value_t = 501)]
    pub samples: usize,
    /// Skip the PNG plot.
    #[arg(long)]
    pub no_plot: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ChargeArgs {
    #[command(flatten)]
    pub common: Common,
    /// VFLD file.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    /// Loop radius in grid units; placed on the brightest ring when absent.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Minimum loop amplitude relative to the field maximum.
    #[arg(long, default_value_t = vortex_core::grid::CHARGE_AMPLITUDE_FLOOR)]
    pub floor: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let value = match cli.command {
        Command::Mask(a) => commands::mask(&a)?,
        Command::Farfield(a) => commands::farfield(&a)?,
        Command::Angmom(a) => commands::angmom(&a)?,
        Command::DiracDensity(a) => commands::dirac_density(&a)?,
        Command::Charge(a) => commands::charge(&a)?,
    };
    let text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Io(e.to_string()))?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
