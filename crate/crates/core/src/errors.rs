//! Error type shared across the library.

use std::fmt;

use crate::model::Case;

/// Everything that can go wrong below the CLI layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its domain constraint. The payload names the
    /// constraint, e.g. `"p1 must lie in (0, 0.5]"`.
    Domain(&'static str),
    /// An operation only defined for one prior/noise case was called in
    /// another.
    Case { required: Case, actual: Case },
    /// Root isolation failed to produce a structurally valid root set.
    Convergence(String),
    /// A requested amplitude exceeds the sensor's power cap.
    Cap { sensor: u8, amplitude: f64, cap: f64 },
    /// A simulation entry point was handed a scheme it does not handle.
    Scheme(&'static str),
    /// Reading or writing an output stream failed.
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(constraint) => write!(f, "domain error: {constraint}"),
            Error::Case { required, actual } => {
                write!(f, "case error: defined for Case {required} only, got Case {actual}")
            }
            Error::Convergence(detail) => write!(f, "convergence error: {detail}"),
            Error::Cap { sensor, amplitude, cap } => write!(
                f,
                "cap error: sensor {sensor} amplitude {amplitude} exceeds cap sqrt({cap})"
            ),
            Error::Scheme(detail) => write!(f, "scheme error: {detail}"),
            Error::Io(detail) => write!(f, "io error: {detail}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
