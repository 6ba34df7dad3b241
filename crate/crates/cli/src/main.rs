mod commands;
mod config;
mod svg;

use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use corner_spectrum::Error;

use config::Defaults;

#[derive(Parser, Debug)]
#[command(
    name = "corner-spectrum",
    version,
    about = "Corner exponents, line inversion and singular coefficients for sign-changing transmission problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct Grids {
    /// Points of the grid in t = log r.
    #[arg(long = "grid-t")]
    pub grid_t: Option<usize>,
    /// Points on the integration line.
    #[arg(long = "grid-eta")]
    pub grid_eta: Option<usize>,
    /// Points per sector in theta.
    #[arg(long = "grid-theta")]
    pub grid_theta: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zeros of the determinant in a band.
    Spectrum {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = FRAC_PI_2)]
        omega: f64,
        /// re_min re_max im_max
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["RE_MIN", "RE_MAX", "IM_MAX"])]
        band: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Right-angle exponents over a range of contrasts.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Angular profile of a singular term.
    SingularFunction {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = FRAC_PI_2)]
        omega: f64,
        /// 0 is the constant; k >= 1 is the k-th exponent with 0 < Re < 1.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Transmission problem on the line for one frequency.
    Solve1d {
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["a_plus", "a_minus"])]
        mu: Option<f64>,
        #[arg(long = "a-plus", allow_negative_numbers = true, default_value_t = 1.0)]
        a_plus: f64,
        #[arg(long = "a-minus", allow_negative_numbers = true, default_value_t = -2.0)]
        a_minus: f64,
        /// Data on y > 0 as `coeff:power:rate` terms, comma separated.
        #[arg(long, default_value = "1:0:1", allow_hyphen_values = true)]
        plus: String,
        /// Data on y < 0, in the variable s = -y.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        minus: String,
        /// Solve by finite differences on sampled data.
        #[arg(long)]
        sampled: bool,
        /// Half-width of the window written as CSV or SVG.
        #[arg(long, default_value_t = 8.0)]
        extent: f64,
        #[arg(long, default_value_t = 401)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Solution in the weighted space of exponent gamma.
    InvertLine {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = FRAC_PI_2)]
        omega: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        gamma: f64,
        /// Radial CSV with the data; a manufactured solution when absent.
        #[arg(long)]
        data: Option<PathBuf>,
        #[command(flatten)]
        grids: Grids,
        #[command(flatten)]
        output: Output,
    },
    /// Coefficients of the singular terms at a spectrum point.
    Residue {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = FRAC_PI_2)]
        omega: f64,
        /// Spectrum point: re im.
        #[arg(long, num_args = 2, required = true, allow_negative_numbers = true, value_names = ["RE", "IM"])]
        lambda: Vec<f64>,
        /// Radial CSV with the data; a planted singular term when absent.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Amplitude of the planted term.
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        grids: Grids,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(e) => match e {
                Error::ExcludedContrast { .. } | Error::InvalidContrast { .. } => 2,
                Error::WrongRegime { .. } | Error::SpectrumOnLine { .. } => 3,
                Error::Resolution(_)
                | Error::Quadrature(_)
                | Error::UnstableWinding { .. }
                | Error::Contour { .. }
                | Error::NearSingularSymbol { .. } => 4,
                _ => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Core(e) => format!("error: {e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let defaults = Defaults::load()?;
    match cli.command {
        Command::Spectrum { mu, omega, band, output } => {
            commands::spectrum(&defaults, mu, omega, band.as_deref(), &output)
        }
        Command::Sweep { from, to, step, output } => commands::sweep(from, to, step, &output),
        Command::SingularFunction { mu, omega, index, output } => {
            commands::singular_function(&defaults, mu, omega, index, &output)
        }
        Command::Solve1d {
            mu,
            a_plus,
            a_minus,
            plus,
            minus,
            sampled,
            extent,
            points,
            output,
        } => {
            let coeffs = match mu {
                Some(mu) => (mu, 1.0),
                None => (a_plus, a_minus),
            };
            commands::solve1d(coeffs, &plus, &minus, sampled, extent, points, &output)
        }
        Command::InvertLine { mu, omega, gamma, data, grids, output } => {
            commands::invert_line(&defaults, mu, omega, gamma, data.as_deref(), &grids, &output)
        }
        Command::Residue {
            mu,
            omega,
            lambda,
            data,
            amplitude,
            radius,
            grids,
            output,
        } => {
            let target = commands::ResidueTarget {
                lambda: num_complex::Complex64::new(lambda[0], lambda[1]),
                data,
                amplitude,
                radius,
            };
            commands::residue(&defaults, mu, omega, &target, &grids, &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.message());
            ExitCode::from(f.code())
        }
    }
}
