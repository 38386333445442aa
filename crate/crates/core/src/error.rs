//! Error taxonomy shared by every module of the crate.

use std::fmt;

/// Errors produced by symbolic construction, evaluation and simulation.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operands disagree on dimension (variable count, matrix shape, ...).
    Dimension(String),
    /// A precondition on an argument was violated.
    Argument(String),
    /// Exact evaluation hit a vanishing denominator; carries its text form.
    EvalDenominatorZero { denominator: String },
    /// A symbolic operation would exceed the total-degree cap.
    DegreeOverflow { degree: u32, cap: u32 },
    /// Numeric integration produced a non-finite state.
    Divergence { time: f64 },
    /// A denominator magnitude dropped below the guard during integration.
    Singularity {
        time: f64,
        state: Vec<f64>,
        what: String,
    },
    /// A system is missing data required for the requested construction.
    Config(String),
    /// A spec document failed to parse or validate.
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::EvalDenominatorZero { denominator } => {
                write!(f, "denominator vanishes at the evaluation point: {denominator}")
            }
            Error::DegreeOverflow { degree, cap } => {
                write!(f, "total degree {degree} exceeds the cap {cap}")
            }
            Error::Divergence { time } => {
                write!(f, "state became non-finite at t = {time}")
            }
            Error::Singularity { time, what, .. } => {
                write!(f, "denominator {what} fell below the guard at t = {time}")
            }
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
