//! Error type shared across the crate.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numerical pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// Structural validation of input data failed; one message per violation.
    Validation(Vec<String>),
    /// Input data is malformed or unusable for the requested operation.
    Data(String),
    /// A gamma-factor argument landed on a pole (non-positive integer).
    GammaPole { factor: usize, dual: bool },
    /// The coefficient stream does not cover the range an operation needs.
    InsufficientData {
        needed: f64,
        available: f64,
        what: &'static str,
    },
    /// An oscillatory integral would need more quadrature nodes than allowed.
    OscillationTooFast { nodes: usize, ceiling: usize },
    /// An iterative scheme failed to reach its target residual.
    NonConvergence { what: &'static str, residual: f64 },
    /// A sequence-extrapolation fit did not stabilize.
    FitDiverged { index: usize, spread: f64 },
    /// The certified series tail cannot be pushed below the requested bound.
    Truncation {
        requested: f64,
        achieved: f64,
        terms: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Validation(msgs) => {
                write!(f, "validation failed ({} issue(s)):", msgs.len())?;
                for m in msgs {
                    write!(f, "\n  - {m}")?;
                }
                Ok(())
            }
            Error::GammaPole { factor, dual } => write!(
                f,
                "gamma factor {factor} ({}) evaluated at a pole",
                if *dual { "dual side" } else { "primal side" }
            ),
            Error::InsufficientData {
                needed,
                available,
                what,
            } => write!(
                f,
                "insufficient data for {what}: need coverage up to {needed:.6e}, stream ends at {available:.6e}"
            ),
            Error::OscillationTooFast { nodes, ceiling } => write!(
                f,
                "integrand oscillates too fast: {nodes} nodes needed, ceiling is {ceiling}"
            ),
            Error::NonConvergence { what, residual } => {
                write!(f, "{what} did not converge (residual {residual:.3e})")
            }
            Error::FitDiverged { index, spread } => write!(
                f,
                "expansion-coefficient fit diverged at index {index} (spread {spread:.3e})"
            ),
            Error::Truncation {
                requested,
                achieved,
                terms,
            } => write!(
                f,
                "tail bound {achieved:.6e} after {terms} terms exceeds requested {requested:.6e}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
