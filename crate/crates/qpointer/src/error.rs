//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong when evaluating deformed-oscillator
/// expressions or running a sweep.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument left the convergence domain of a basic series.
    /// `limit` is the largest modulus accepted for this deformation.
    #[error("{what}: argument modulus {modulus:.6} exceeds the convergence limit {limit:.6}")]
    Domain {
        what: &'static str,
        modulus: f64,
        limit: f64,
    },

    /// A series failed to reach the requested tolerance within the term cap.
    #[error("series did not converge: {terms} terms, tail bound {tail_bound:.3e}, tolerance {tol:.3e}")]
    NonConvergence {
        terms: usize,
        tail_bound: f64,
        tol: f64,
    },

    /// The adaptive basis truncation hit its hard size cap before the
    /// requested tail mass was reached.
    #[error("basis truncation needs more than {max} states (tail bound {tail_bound:.3e} at the cap)")]
    DimensionOverflow { max: usize, tail_bound: f64 },

    /// Two matrix-mechanics objects with incompatible truncations were combined.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// The pointer normalization bracket came out non-positive, so no
    /// physical state can be built for this parameter set.
    #[error("non-positive pointer norm bracket: {value:.6e}")]
    NonPositiveNorm { value: f64 },

    /// Mean photon number is zero (or numerically indistinguishable from
    /// zero), so intensity ratios are undefined.
    #[error("mean photon number is zero; Mandel parameter and g2 are undefined")]
    ZeroMeanPhoton,

    /// Bad user-facing configuration: unknown key, malformed value, invalid
    /// range, inconsistent axis, and so on.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
