mod run;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "uaa", version, about = "Uniform asymptotic spectra, transmission and wave functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Catalog potential name.
    #[arg(long)]
    pub potential: String,
    /// Comma-separated key=value pairs; m and hbar default to 1.
    #[arg(long, default_value = "")]
    pub params: String,
    /// Comma-separated method list; the default depends on the subcommand.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct XGrid {
    #[arg(long, allow_negative_numbers = true)]
    pub xmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub xmax: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    DecayAtInfinity,
    DecayAtOrigin,
    IncidentFromLeft,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    UnitL2,
    UnitIncidentFlux,
    Raw,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ControlFn {
    /// Anchored at a single turning point.
    H,
    /// Anchored at the nearer turning point of a pair.
    I,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bound-state energies: exact, wkb, improved, numerov.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Level range `a..b` (inclusive) or a single level.
        #[arg(long, default_value = "0..5")]
        n: String,
        /// Hard wall for the single-turning-point condition.
        #[arg(long, allow_negative_numbers = true)]
        boundary: Option<f64>,
    },
    /// Transmission coefficients: improved, wkb, exact-numeric, closed-form.
    Transmit {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        emin: f64,
        #[arg(long, allow_negative_numbers = true)]
        emax: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Wave function samples: uniform, numerov.
    Wavefunction {
        #[command(flatten)]
        common: Common,
        /// Bound level; its energy comes from the improved condition.
        #[arg(long)]
        n: Option<usize>,
        /// Energy for scattering and single-turning-point states.
        #[arg(long, allow_negative_numbers = true)]
        energy: Option<f64>,
        #[command(flatten)]
        grid: XGrid,
        #[arg(long, value_enum)]
        bc: Option<BcArg>,
        #[arg(long, value_enum)]
        normalization: Option<NormArg>,
    },
    /// Error-control function along x: improved (selected q), wkb (q = 0).
    ErrorControl {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        energy: f64,
        #[command(flatten)]
        grid: XGrid,
        #[arg(long, value_enum, default_value_t = ControlFn::I)]
        function: ControlFn,
        /// Turning point anchoring the single-point function.
        #[arg(long, allow_negative_numbers = true)]
        anchor: Option<f64>,
    },
    /// Side-by-side table, one column per method: T(E) for barriers, E_n otherwise.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        emin: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        emax: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
