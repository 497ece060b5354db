use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "Exit codes:
  0  success
  2  configuration or parse error
  3  validation failure
  4  numerical failure (non-convergence with --strict)
  5  optimizer did not converge (design with --strict)

Units: wavelengths nm, temperatures °C, fields kV/cm, lengths mm.
The default crystal catalog is taken from $BIPHOTON_CATALOG when a config names none.";

#[derive(Debug, Parser)]
#[command(name = "biphoton", version, about = "Spectral engineering of SPDC biphoton fields", after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by the commands that read a simulation config.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Simulation config (JSON).
    pub config: PathBuf,
    /// Output directory; overrides `output.dir` of the config.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Treat non-convergence as an error.
    #[arg(long)]
    pub strict: bool,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long)]
    pub gnuplot: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every record of a crystal catalog.
    #[command(after_help = EXIT_CODES)]
    CatalogValidate {
        /// Catalog file (JSON array of crystal records).
        path: PathBuf,
    },
    /// Spectral amplitude on a frequency grid, with width summary.
    #[command(after_help = EXIT_CODES)]
    Spectrum(RunArgs),
    /// Widths and integral intensity over a parameter sweep.
    #[command(after_help = SWEEP_HELP)]
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Swept parameter.
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated list, or `start:stop:count` for an even range.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Re-solve the matching angle for every value at the hottest point of
        /// the temperature profile instead of holding the base angle.
        #[arg(long)]
        resolve_angle: bool,
    },
    /// First- and second-order correlations and the HOM dip.
    #[command(after_help = EXIT_CODES)]
    Correlations(RunArgs),
    /// Inverse design of a control profile from the config's `design` section.
    #[command(after_help = EXIT_CODES)]
    Design(RunArgs),
    /// Mismatch versus detuning, Taylor coefficients and analytic width limits.
    #[command(after_help = EXIT_CODES)]
    PhaseMatch(RunArgs),
}

const SWEEP_HELP: &str = "Parameters and units:
  delta-t    temperature rise along a linear profile, K (starts at temperature_c)
  gradient   linear temperature gradient, K/mm
  chirp      poling chirp rate, rad/um^2 (needs uniform or chirped poling)
  field      uniform field, kV/cm
  length     crystal length, mm
  pump-dq    pump transverse wavevector spread, rad/m (angular spectrum at zero detuning)
  pump-dwp   pump spectral width, rad/s (signal marginal of the joint amplitude)

The matching angle and poling period are solved once for the base config and
held fixed across the sweep; --resolve-angle re-solves the angle per value at
the hottest point of the crystal. Integral intensity is relative to the homogeneous
spectrum of the base config, or to the first row for the pump sweeps.

Exit codes:
  0  success
  2  configuration or parse error, unknown parameter
  3  validation failure
  4  numerical failure (non-convergence with --strict)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    DeltaT,
    Gradient,
    Chirp,
    Field,
    Length,
    PumpDq,
    PumpDwp,
}

impl SweepParam {
    /// CSV column name with unit.
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::DeltaT => "delta_t_k",
            SweepParam::Gradient => "gradient_k_per_mm",
            SweepParam::Chirp => "chirp_rad_per_um2",
            SweepParam::Field => "field_kv_per_cm",
            SweepParam::Length => "length_mm",
            SweepParam::PumpDq => "pump_dq_rad_per_m",
            SweepParam::PumpDwp => "pump_dwp_rad_per_s",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::DeltaT => "delta-t",
            SweepParam::Gradient => "gradient",
            SweepParam::Chirp => "chirp",
            SweepParam::Field => "field",
            SweepParam::Length => "length",
            SweepParam::PumpDq => "pump-dq",
            SweepParam::PumpDwp => "pump-dwp",
        }
    }
}
