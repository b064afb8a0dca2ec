//! `biphoton` command-line front end.

mod angle;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biphoton::entanglement::{EntanglementOptions, GridSpec, WidthConvention};
use biphoton::quadrature::QuadratureSpec;
use biphoton::spdc_state::{ConfigBuilder, DEFAULT_ANISOTROPY_THRESHOLD};
use biphoton::sweep::{SweepAxis, SweepOptions, SweepTable};
use biphoton::{Error, SpdcConfig};
use clap::{Args, Parser, Subcommand};

use report::Render;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(name = "biphoton", version, about = "Lorentz-invariant mass and entanglement of SPDC biphotons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Machine-readable JSON instead of the text report.
    #[arg(long)]
    json: bool,
    /// Write to this file instead of stdout.
    #[arg(long, short, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Key-value config file (lambda_p_m, w_p_m, L_m, n_o, n_p_prime_abs).
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Pump wavelength λ_p (m).
    #[arg(long)]
    lambda_p: Option<f64>,
    /// Pump waist w_p (m).
    #[arg(long)]
    w_p: Option<f64>,
    /// Crystal length L (m).
    #[arg(long = "length", visible_alias = "L")]
    length: Option<f64>,
    /// Ordinary refractive index.
    #[arg(long)]
    n_o: Option<f64>,
    /// |dn_p/dϑ| for the anisotropy check.
    #[arg(long)]
    n_p_prime: Option<f64>,
    /// Upper bound on L|n_p'|/w_p before the anisotropy warning.
    #[arg(long, default_value_t = DEFAULT_ANISOTROPY_THRESHOLD)]
    anisotropy_threshold: f64,
}

impl ConfigArgs {
    fn load(&self) -> Result<SpdcConfig, Error> {
        let file = match &self.config {
            Some(path) => ConfigBuilder::parse(&std::fs::read_to_string(path).map_err(|e| {
                Error::Io(format!("{}: {e}", path.display()))
            })?)?,
            None => ConfigBuilder::default(),
        };
        let flags = ConfigBuilder {
            lambda_p: self.lambda_p,
            w_p: self.w_p,
            length: self.length,
            n_o: self.n_o,
            n_p_prime_abs: self.n_p_prime,
        };
        file.overridden_by(&flags).build()
    }
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Grid half-extent in units of max(a, b).
    #[arg(long, default_value_t = 6.0)]
    extent: f64,
    /// Starting grid size; by default the smallest size resolving min(a, b).
    #[arg(long)]
    points: Option<usize>,
    /// Samples required across min(a, b).
    #[arg(long, default_value_t = 8)]
    min_samples: usize,
    /// Largest grid for the Schmidt-number search.
    #[arg(long, default_value_t = 4096)]
    max_points: usize,
    /// Relative change under grid doubling accepted as converged.
    #[arg(long, default_value_t = 0.01)]
    svd_tolerance: f64,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        GridSpec {
            extent_factor: self.extent,
            points: self.points,
            min_samples: self.min_samples,
            max_svd_points: self.max_points,
            svd_tolerance: self.svd_tolerance,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Invariant mass of two photons at an opening angle.
    PairMass {
        /// Photon wavelength (m).
        #[arg(long, conflicts_with = "omega", required_unless_present = "omega")]
        lambda: Option<f64>,
        /// Photon angular frequency (rad/s).
        #[arg(long)]
        omega: Option<f64>,
        /// Opening angle: radians, or `pi`, `pi/2`, `3pi/4`.
        #[arg(long, default_value = "pi", value_parser = angle::parse, allow_hyphen_values = true)]
        theta: f64,
        /// Number of identical pairs in the group.
        #[arg(long, default_value_t = 1.0)]
        count: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Mass and mean velocity of a Gaussian pump pulse.
    Pump {
        #[arg(long)]
        lambda_p: f64,
        #[arg(long)]
        w_p: f64,
        /// Photons in the pulse.
        #[arg(long, default_value_t = 1.0)]
        photons: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Moments, momentum deficit and mass of the SPDC biphoton.
    Spdc {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Widths, R parameter and Schmidt number.
    Entanglement {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Partner-detector position for the conditional width (1/m).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        k2_fixed: f64,
        /// FWHM widths instead of rms.
        #[arg(long)]
        fwhm: bool,
        /// Skip the grid-doubling SVD.
        #[arg(long)]
        no_svd: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Parameter sweep written as CSV (or JSON with --json).
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// `param=start:end:count[:lin|log]`, param one of w_p, L, lambda_p; repeat for a 2D grid.
        #[arg(long = "axis", required = true)]
        axes: Vec<String>,
        /// Also compute K_svd per row (slow).
        #[arg(long)]
        svd: bool,
        /// Skip the numeric R column.
        #[arg(long)]
        no_r_numeric: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Error> {
    match &out.output {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn render<R: Render>(r: &R, out: &OutputArgs) -> Result<(), Error> {
    let text = if out.json {
        let mut s = serde_json::to_string_pretty(r).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        s
    } else {
        r.text()
    };
    for w in r.warnings() {
        eprintln!("warning: {w}");
    }
    emit(out, &text)
}

fn run(cli: Cli) -> Result<(), Error> {
    let quad = QuadratureSpec::from_env()?;
    match cli.command {
        Command::PairMass {
            lambda,
            omega,
            theta,
            count,
            out,
        } => {
            let omega = match (lambda, omega) {
                (Some(l), None) => biphoton::constants::angular_frequency(l),
                (None, Some(w)) => w,
                _ => return Err(Error::InvalidInput("give exactly one of --lambda, --omega".into())),
            };
            render(&report::PairMassReport::compute(omega, theta, count)?, &out)
        }
        Command::Pump {
            lambda_p,
            w_p,
            photons,
            out,
        } => render(&report::PumpReport::compute(lambda_p, w_p, photons)?, &out),
        Command::Spdc { cfg, out } => {
            let config = cfg.load()?;
            render(&report::SpdcReport::compute(&config, &quad, cfg.anisotropy_threshold)?, &out)
        }
        Command::Entanglement {
            cfg,
            grid,
            k2_fixed,
            fwhm,
            no_svd,
            out,
        } => {
            let config = cfg.load()?;
            let opts = EntanglementOptions {
                grid: grid.spec(),
                k2_fixed,
                convention: if fwhm { WidthConvention::Fwhm } else { WidthConvention::Rms },
                compute_svd: !no_svd,
                ..EntanglementOptions::default()
            };
            render(
                &report::EntanglementSummary::compute(&config, &opts, cfg.anisotropy_threshold)?,
                &out,
            )
        }
        Command::Sweep {
            cfg,
            axes,
            svd,
            no_r_numeric,
            grid,
            out,
        } => {
            let template = cfg.load()?;
            let axes = axes.iter().map(|a| a.parse()).collect::<Result<Vec<SweepAxis>, _>>()?;
            let opts = SweepOptions {
                quadrature: quad,
                anisotropy_threshold: cfg.anisotropy_threshold,
                grid: grid.spec(),
                r_numeric: !no_r_numeric,
                svd,
                ..SweepOptions::default()
            };
            let table = SweepTable::run(&template, &axes, &opts)?;
            let flagged = table.rows.iter().filter(|r| !r.flags.is_empty()).count();
            if flagged > 0 {
                eprintln!("warning: {flagged} of {} rows carry validity flags", table.rows.len());
            }
            let text = if out.json { table.to_json()? + "\n" } else { table.to_csv()? };
            emit(&out, &text)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else if matches!(e, Error::Io(_)) {
        EXIT_IO
    } else {
        EXIT_CONFIG
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
