use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The contrast `mu = a+/a-` equals -1 (`a+ + a- = 0`).
    #[error("excluded contrast: mu = {mu} (a+ + a- = 0)")]
    ExcludedContrast { mu: f64 },

    #[error("invalid contrast mu = {mu}: {reason}")]
    InvalidContrast { mu: f64, reason: &'static str },

    #[error("corner angle omega = {omega} must lie in (0, 2*pi)")]
    InvalidAngle { omega: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("symbol is near-singular at lambda = {lambda}: |A(lambda)| = {modulus:e}")]
    NearSingularSymbol { lambda: Complex64, modulus: f64 },

    #[error("lambda = {lambda} is not a spectrum point: |A(lambda)| = {modulus:e}")]
    NotARoot { lambda: Complex64, modulus: f64 },

    #[error("mu = {mu} lies outside the {expected} regime")]
    WrongRegime { mu: f64, expected: &'static str },

    #[error("winding count unstable on box [{re_min}, {re_max}] x [{im_min}, {im_max}]")]
    UnstableWinding {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
    },

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("line Re(lambda) = {xi} meets the spectrum at {roots:?}")]
    SpectrumOnLine { xi: f64, roots: Vec<Complex64> },

    #[error("contour of radius {radius} around {center} meets another pole")]
    Contour { center: Complex64, radius: f64 },

    #[error("quadrature error: {0}")]
    Quadrature(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
